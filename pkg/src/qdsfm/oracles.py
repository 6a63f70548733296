"""Slow, obviously-correct reference computations for small inputs.

Everything here exists to independently confirm the fast code paths: vertex
enumeration of base polytopes, projected-gradient cone projection over the
enumerated vertices, a convex-programming solve of the full quadratic
problem, exhaustive conductance search, and a dense linear-algebra PageRank
for ordinary graphs.  Each oracle refuses inputs above its size bound.
"""

from __future__ import annotations

import itertools

import numpy as np

from .atoms import ProblemInstance, SubmodularAtom, _prefix_values
from .hypergraph import Hypergraph, conductance
from .projection import ProjectionResult, Status


def enumerate_base_vertices(atom: SubmodularAtom) -> np.ndarray:
    """All extreme points of the base polytope, via every greedy ordering."""
    if atom.size > 8:
        raise ValueError("vertex enumeration limited to 8 members")
    pts = []
    for order in itertools.permutations(range(atom.size)):
        order = np.array(order, dtype=np.int64)
        gains = np.diff(_prefix_values(atom, order))
        y = np.empty(atom.size)
        y[order] = gains
        pts.append(y)
    pts = np.array(pts)
    return np.unique(np.round(pts, 12), axis=0)


def brute_projection(atom: SubmodularAtom, a, w_tilde,
                     tol: float = 1e-10, max_iter: int = 2_000_000) -> ProjectionResult:
    """Cone projection by accelerated projected gradient over vertex weights.

    Parameterizes y = V^T lam with lam >= 0 over the enumerated vertices and
    phi = sum(lam); the objective is then a nonnegative least-squares problem
    solved to the requested stationarity.
    """
    if atom.size > 6:
        raise ValueError("brute projection limited to 6 members")
    a = np.asarray(a, dtype=float)
    wt = np.asarray(w_tilde, dtype=float)
    verts = enumerate_base_vertices(atom)
    k = verts.shape[0]
    # h(lam) = ||V^T lam - a||^2_Wt + (1^T lam)^2
    gram = verts @ (wt[:, None] * verts.T) + 1.0
    lin = verts @ (wt * a)
    lip = float(np.linalg.eigvalsh(gram).max()) * 2.0
    lam = np.zeros(k)
    mom = lam.copy()
    t_acc = 1.0
    for _ in range(max_iter):
        grad = 2.0 * (gram @ mom - lin)
        new = np.clip(mom - grad / lip, 0.0, None)
        stat = np.abs(new - np.clip(new - 2.0 * (gram @ new - lin), 0.0, None))
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t_acc * t_acc))
        mom = new + ((t_acc - 1.0) / t_next) * (new - lam)
        lam = new
        t_acc = t_next
        if float(stat.max()) <= tol:
            break
    y = verts.T @ lam
    phi = float(np.sum(lam))
    d = y - a
    h = float(np.dot(wt * d, d) + phi * phi)
    return ProjectionResult(y, phi, h, Status.CONVERGED)


def brute_qdsfm(instance: ProblemInstance) -> np.ndarray:
    """Minimize the full quadratic decomposable objective by convex programming.

    Each extension is expressed as the max of inner products with the
    enumerated base-polytope vertices; squaring its positive part keeps the
    problem convex and lets a generic conic solver certify the optimum.
    """
    import cvxpy as cp

    if instance.n > 6 or instance.r > 4:
        raise ValueError("brute solve limited to n <= 6, r <= 4")
    x = cp.Variable(instance.n)
    w = instance.w_diag
    obj = cp.sum(cp.multiply(w, cp.square(x - instance.a)))
    for atom in instance.atoms:
        verts = enumerate_base_vertices(atom)
        sel = list(atom.members)
        fx = cp.max(verts @ x[sel])
        obj = obj + cp.square(cp.pos(fx))
    prob = cp.Problem(cp.Minimize(obj))
    prob.solve(solver=cp.CLARABEL)
    if prob.status not in ("optimal", "optimal_inaccurate"):
        raise RuntimeError(f"reference solve failed: {prob.status}")
    return np.asarray(x.value, dtype=float)


def brute_min_conductance(hg: Hypergraph) -> tuple[list[int], float]:
    """Exhaustive minimum conductance over all nonempty proper subsets."""
    if hg.n > 16:
        raise ValueError("exhaustive conductance limited to 16 vertices")
    best_set: list[int] = []
    best = np.inf
    for mask in range(1, 2 ** hg.n - 1):
        s = [v for v in range(hg.n) if mask >> v & 1]
        phi = conductance(hg, s)
        if phi < best:
            best = phi
            best_set = s
    return best_set, best


def dense_graph_pagerank(hg: Hypergraph, alpha: float, p0) -> np.ndarray:
    """PageRank on an ordinary graph by solving the stationarity system.

    The quadratic objective for pairwise edges is smooth, so its minimizer
    satisfies (beta D + L) x = beta D x0 with beta = alpha / (1 - alpha) and L
    the weighted graph Laplacian; p = D x.
    """
    if hg.n > 200:
        raise ValueError("dense oracle limited to 200 vertices")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie strictly between 0 and 1")
    p0 = np.asarray(p0, dtype=float)
    lap = np.zeros((hg.n, hg.n))
    for e in hg.edges:
        if len(set(e.members)) != 2 or not e.undirected:
            raise ValueError("dense oracle requires undirected pairwise edges")
        i, j = sorted(set(e.members))
        lap[i, i] += e.weight
        lap[j, j] += e.weight
        lap[i, j] -= e.weight
        lap[j, i] -= e.weight
    beta = alpha / (1.0 - alpha)
    d = hg.degrees
    x = np.linalg.solve(beta * np.diag(d) + lap, beta * p0)
    return d * x
