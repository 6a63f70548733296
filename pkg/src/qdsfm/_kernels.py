"""Numba-compiled inner loops: exact cut-cone projection and coordinate descent.

The projection solves, for a single weighted cut function (directed or
undirected), the cone problem

    min ||y - a||^2_Wt + phi^2   s.t.  phi >= 0, y in phi * B

by passing to its primal counterpart min 0.5||z - b||^2_V + 0.5 w (max_H z -
min_T z)_+^2 with V = Wt^{-1} and b = 0.5 Wt a, then running a sorted plateau
line search: gamma (the clamped head level) only decreases and delta (the
clamped tail level) only increases, keeping the two partial derivatives equal
and opposite, until the balanced zero is bracketed; a closed-form correction
lands exactly on it.  Everything here is plain-array code so that the
coordinate-descent driver can stay inside one jitted region.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _plateau_search(b, vprime, hidx, tidx):
    """Find the clamp levels (gamma, delta) of the cut projection.

    ``vprime`` is the primal metric divided by the cut weight.  Returns
    (gamma, delta, active); when active is 0 the cut constraint is slack and
    z = b is optimal.
    """
    nh = hidx.size
    nt = tidx.size
    bh = np.empty(nh)
    for k in range(nh):
        bh[k] = b[hidx[k]]
    bt = np.empty(nt)
    for k in range(nt):
        bt[k] = b[tidx[k]]
    ordh = np.argsort(bh)  # ascending; plateau consumes from the top
    ordt = np.argsort(bt)  # ascending; plateau consumes from the bottom
    gamma = bh[ordh[nh - 1]]
    delta = bt[ordt[0]]
    if gamma <= delta:
        return gamma, delta, 0

    # plateau sums: wh = sum of vprime over {i in H: b_i >= gamma}, ch the
    # matching sum of vprime*b; same for the tail side
    ph = nh
    wh = 0.0
    ch = 0.0
    while ph > 0 and bh[ordh[ph - 1]] >= gamma:
        ph -= 1
        i = hidx[ordh[ph]]
        wh += vprime[i]
        ch += vprime[i] * b[i]
    pt = 0
    wt = 0.0
    while pt < nt and bt[ordt[pt]] <= delta:
        i = tidx[ordt[pt]]
        wt += vprime[i]
        pt += 1

    while True:
        # candidate 1: drop gamma to the next head value, raise delta to keep
        # the derivative balance; candidate 2: raise delta to the next tail
        # value.  The move with the smaller delta is the shorter one and
        # cannot skip past a vertex of the other side.
        has1 = ph > 0
        has2 = pt < nt
        if not has1 and not has2:
            break
        if has1:
            g1 = bh[ordh[ph - 1]]
            d1 = delta + (gamma - g1) * wh / wt
        else:
            g1 = 0.0
            d1 = np.inf
        if has2:
            d2 = bt[ordt[pt]]
            g2 = gamma - (d2 - delta) * wt / wh
        else:
            g2 = 0.0
            d2 = np.inf
        if d1 <= d2:
            gc = g1
            dc = d1
        else:
            gc = g2
            dc = d2
        if gc <= dc:
            break
        # derivative w.r.t. gamma at the candidate, with the current plateaus
        grad = (gc - dc) + wh * gc - ch
        if grad <= 0.0:
            break
        gamma = gc
        delta = dc
        while ph > 0 and bh[ordh[ph - 1]] >= gamma:
            ph -= 1
            i = hidx[ordh[ph]]
            wh += vprime[i]
            ch += vprime[i] * b[i]
        while pt < nt and bt[ordt[pt]] <= delta:
            i = tidx[ordt[pt]]
            wt += vprime[i]
            pt += 1

    # balanced zero within the bracketed segment
    grad = (gamma - delta) + wh * gamma - ch
    denom = wt * wh + wt + wh
    gamma -= wt * grad / denom
    delta += wh * grad / denom
    return gamma, delta, 1


@njit(cache=True)
def cut_project(aloc, wtloc, weight, hidx, tidx):
    """Project a (restricted to one atom) onto the cone of a weighted cut.

    ``wtloc`` is the diagonal of the projection metric on the atom's members;
    ``hidx``/``tidx`` are member-local head and tail positions.  Returns
    (y, phi).
    """
    n = aloc.size
    b = np.empty(n)
    vprime = np.empty(n)
    for j in range(n):
        b[j] = 0.5 * wtloc[j] * aloc[j]
        vprime[j] = 1.0 / (wtloc[j] * weight)
    gamma, delta, active = _plateau_search(b, vprime, hidx, tidx)
    y = np.zeros(n)
    if active == 0:
        return y, 0.0
    z = b.copy()
    for k in range(hidx.size):
        j = hidx[k]
        if b[j] >= gamma:
            z[j] = gamma
    for k in range(tidx.size):
        j = tidx[k]
        if b[j] <= delta:
            z[j] = delta
    for j in range(n):
        y[j] = aloc[j] - 2.0 * z[j] / wtloc[j]
    phi = 2.0 * np.sqrt(weight) * (gamma - delta)
    if phi < 0.0:
        phi = 0.0
    return y, phi


@njit(cache=True)
def rcd_chunk(picks, off, mem, hoff, hmem, toff, tmem, weights,
              yflat, phi, ysum, a2w, wt_dense):
    """Run one chunk of coordinate-descent updates in place.

    ``picks`` holds the atom indices drawn for this chunk.  Atom r owns the
    member slice mem[off[r]:off[r+1]] (global vertex ids), with the matching
    slice of ``yflat``; hmem/tmem store member-local positions.  ``a2w`` is
    the fixed vector 2*W*a and ``wt_dense`` the projection metric 1/W.
    """
    for t in range(picks.size):
        r = picks[t]
        s = off[r]
        e = off[r + 1]
        n = e - s
        aloc = np.empty(n)
        wtloc = np.empty(n)
        for j in range(n):
            v = mem[s + j]
            aloc[j] = a2w[v] - (ysum[v] - yflat[s + j])
            wtloc[j] = wt_dense[v]
        ynew, ph = cut_project(aloc, wtloc, weights[r],
                               hmem[hoff[r]:hoff[r + 1]],
                               tmem[toff[r]:toff[r + 1]])
        for j in range(n):
            v = mem[s + j]
            ysum[v] += ynew[j] - yflat[s + j]
            yflat[s + j] = ynew[j]
        phi[r] = ph
