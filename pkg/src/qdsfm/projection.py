"""Projection onto the cone induced by a base polytope.

The cone of an atom is C = {(y, phi): phi >= 0, y in phi * B} with B the base
polytope.  ``conic_mnp`` and ``conic_fw`` handle arbitrary atoms through the
greedy linear minimization oracle; ``exact_directed`` handles the cut families
in closed form via a sorted line search and is both exact and much faster.
All routines work on member-aligned vectors and a diagonal metric ``w_tilde``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .atoms import CUT_KINDS, SubmodularAtom, greedy_lmo

DEFAULT_DELTA = 1e-10
DEPENDENCE_TOL = 1e-12
PRUNE_TOL = 1e-14


class Status(enum.Enum):
    CONVERGED = "converged"
    MAX_ITERATIONS = "max_iterations"


@dataclass
class ProjectionResult:
    y: np.ndarray
    phi: float
    h_value: float
    status: Status
    major_loops: int = 0
    minor_loops: int = 0
    h_trace: list = field(default_factory=list)


def _h(y, phi, a, wt):
    d = y - a
    return float(np.dot(wt * d, d) + phi * phi)


def active_set_qp(points: list[np.ndarray], a: np.ndarray, w_tilde: np.ndarray) -> np.ndarray:
    """Unconstrained minimizer of ||sum_i alpha_i q_i - a||^2_Wt + (sum_i alpha_i)^2.

    Solved as one least-squares problem on the augmented system whose rows are
    [sqrt(Wt) q_i; 1], which keeps the sum penalty inside the factorization.
    """
    root = np.sqrt(w_tilde)
    mat = np.empty((a.size + 1, len(points)))
    for i, q in enumerate(points):
        mat[:-1, i] = root * q
        mat[-1, i] = 1.0
    rhs = np.concatenate([root * a, [0.0]])
    alpha, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
    return alpha


def _is_dependent(points: list[np.ndarray], q: np.ndarray, w_tilde: np.ndarray) -> bool:
    """True if the augmented column of q lies in the span of the active set."""
    root = np.sqrt(w_tilde)
    basis = np.stack([np.concatenate([root * p, [1.0]]) for p in points], axis=1)
    target = np.concatenate([root * q, [1.0]])
    coef, *_ = np.linalg.lstsq(basis, target, rcond=None)
    resid = target - basis @ coef
    scale = max(1.0, float(np.linalg.norm(target)))
    return float(np.linalg.norm(resid)) <= DEPENDENCE_TOL * scale


def conic_mnp(atom: SubmodularAtom, a, w_tilde, delta: float = DEFAULT_DELTA,
              max_major: int | None = None) -> ProjectionResult:
    """Min-norm-point projection onto the cone of ``atom``.

    The objective decreases monotonically; on normal termination the greedy
    certificate guarantees h <= h* + delta * ||a||_Wt.
    """
    a = np.asarray(a, dtype=float)
    wt = np.asarray(w_tilde, dtype=float)
    if delta <= 0:
        raise ValueError("delta must be positive")
    if max_major is None:
        max_major = 100 * atom.size

    zero = np.zeros(atom.size)
    if not np.any(a):
        return ProjectionResult(zero, 0.0, 0.0, Status.CONVERGED, h_trace=[0.0])

    q1 = greedy_lmo(atom, wt * a)
    lam = np.array([max(0.0, float(np.dot(wt * a, q1)) / (1.0 + float(np.dot(wt * q1, q1))))])
    points = [q1]
    y = lam[0] * q1
    phi = float(lam[0])
    status = Status.MAX_ITERATIONS
    major = 0
    minor = 0
    trace = [_h(y, phi, a, wt)]

    while major < max_major:
        major += 1
        grad = wt * (y - a)
        q = greedy_lmo(atom, -grad)
        if float(np.dot(grad, q)) + phi >= -delta:
            status = Status.CONVERGED
            break
        if _is_dependent(points, q, wt):
            # numerically degenerate active set; keep the best iterate
            break
        points.append(q)
        lam = np.append(lam, 0.0)
        while True:
            alpha = active_set_qp(points, a, wt)
            z = np.sum(alpha[:, None] * np.array(points), axis=0)
            if np.all(alpha >= 0.0):
                lam = alpha
                y = z
                break
            minor += 1
            neg = alpha < 0.0
            theta = float(np.min(lam[neg] / (lam[neg] - alpha[neg])))
            lam = theta * alpha + (1.0 - theta) * lam
            y = theta * z + (1.0 - theta) * y
            keep = lam > PRUNE_TOL
            points = [p for p, k in zip(points, keep) if k]
            lam = lam[keep]
        phi = float(np.sum(lam))
        trace.append(_h(y, phi, a, wt))

    return ProjectionResult(y, phi, _h(y, phi, a, wt), status, major, minor, trace)


def _fw_step(y, phi, q, a, wt):
    """Best point of the cone spanned by the rays y and q, in closed form.

    Minimizes h(u*y + v*q, u*phi + v) over u, v >= 0 by checking the
    unconstrained stationary point and both clamped boundaries.
    """
    m11 = float(np.dot(wt * y, y)) + phi * phi
    m12 = float(np.dot(wt * y, q)) + phi
    m22 = float(np.dot(wt * q, q)) + 1.0
    r1 = float(np.dot(wt * a, y))
    r2 = float(np.dot(wt * a, q))
    cands = [(0.0, 0.0)]
    det = m11 * m22 - m12 * m12
    if det > 1e-300:
        u = (m22 * r1 - m12 * r2) / det
        v = (m11 * r2 - m12 * r1) / det
        if u >= 0.0 and v >= 0.0:
            cands.append((u, v))
    if m11 > 0.0:
        cands.append((max(0.0, r1 / m11), 0.0))
    if m22 > 0.0:
        cands.append((0.0, max(0.0, r2 / m22)))

    def value(uv):
        u, v = uv
        return m11 * u * u + 2.0 * m12 * u * v + m22 * v * v - 2.0 * (r1 * u + r2 * v)

    return min(cands, key=value)


def conic_fw(atom: SubmodularAtom, a, w_tilde, delta: float = DEFAULT_DELTA,
             max_iter: int | None = None) -> ProjectionResult:
    """Frank-Wolfe projection onto the cone: two-ray updates, 1/k rate."""
    a = np.asarray(a, dtype=float)
    wt = np.asarray(w_tilde, dtype=float)
    if delta <= 0:
        raise ValueError("delta must be positive")
    if max_iter is None:
        max_iter = 100 * atom.size * atom.size

    y = np.zeros(atom.size)
    phi = 0.0
    status = Status.MAX_ITERATIONS
    trace = [_h(y, phi, a, wt)]
    k = 0
    while k < max_iter:
        grad = wt * (y - a)
        q = greedy_lmo(atom, -grad)
        if float(np.dot(grad, q)) + phi >= -delta:
            status = Status.CONVERGED
            break
        u, v = _fw_step(y, phi, q, a, wt)
        y = u * y + v * q
        phi = u * phi + v
        k += 1
        trace.append(_h(y, phi, a, wt))

    return ProjectionResult(y, phi, _h(y, phi, a, wt), status, k, 0, trace)


def exact_directed(atom: SubmodularAtom, a, w_tilde) -> ProjectionResult:
    """Exact cone projection for the cut families, O(|S_r| log |S_r|)."""
    if atom.kind not in CUT_KINDS:
        raise ValueError("exact projection requires a cut-type atom")
    a = np.asarray(a, dtype=float)
    wt = np.asarray(w_tilde, dtype=float)
    y, phi = _kernels.cut_project(a, wt, atom.weight, atom.head_local, atom.tail_local)
    return ProjectionResult(y, phi, _h(y, phi, a, wt), Status.CONVERGED)


def check_kkt(atom: SubmodularAtom, a, w_tilde, result: ProjectionResult) -> float:
    """Optimality residual: stationarity over the cone plus perpendicularity.

    Zero exactly at the optimum: every ray of the cone must satisfy
    <y - a, q>_Wt + phi >= 0, and the solution itself must be orthogonal to
    the residual, <y - a, y>_Wt + phi^2 = 0.
    """
    a = np.asarray(a, dtype=float)
    wt = np.asarray(w_tilde, dtype=float)
    grad = wt * (result.y - a)
    q = greedy_lmo(atom, -grad)
    slack = float(np.dot(grad, q)) + result.phi
    perp = float(np.dot(grad, result.y)) + result.phi ** 2
    return max(0.0, -slack) + abs(perp)
