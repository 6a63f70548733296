"""Hypergraph applications: PageRank, sweep cuts, and semi-supervised learning.

A hypergraph edge is a triple (head set, tail set, incidence set) with a
nonnegative weight; undirected edges have head = tail = incidence set.  The
PageRank potential solves the quadratic decomposable problem with target
x0 = D^-1 p0 and vertex weights (alpha / (1 - alpha)) D, so that p = D x is
the diffusion fixed point.  Partition quality is measured by conductance over
degree volumes; sweep cuts scan prefixes of the degree-normalized potential.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .atoms import (Kind, ProblemInstance, SubmodularAtom, graph_edge,
                    undirected_hyperedge)
from .solvers import SolveReport, SolverConfig, rcd_solve, ap_solve


@dataclass
class HyperEdge:
    weight: float
    members: tuple[int, ...]
    head: tuple[int, ...]
    tail: tuple[int, ...]

    def __post_init__(self):
        self.weight = float(self.weight)
        self.members = tuple(int(v) for v in self.members)
        self.head = tuple(int(v) for v in self.head)
        self.tail = tuple(int(v) for v in self.tail)

    @property
    def undirected(self) -> bool:
        return set(self.head) == set(self.members) == set(self.tail)


@dataclass
class Hypergraph:
    n: int
    edges: list[HyperEdge]
    degrees: np.ndarray = field(init=False)

    def __post_init__(self):
        deg = np.zeros(self.n)
        for e in self.edges:
            if e.weight < 0:
                raise ValueError("negative edge weight")
            mem = set(e.members)
            if not mem or min(mem) < 0 or max(mem) >= self.n:
                raise ValueError("edge members outside vertex range")
            if not set(e.head) <= mem or not set(e.tail) <= mem:
                raise ValueError("head/tail must be subsets of members")
            if not e.head or not e.tail:
                raise ValueError("head and tail must be nonempty")
            for v in e.members:
                deg[v] += e.weight
        if np.any(deg <= 0):
            raise ValueError("vertex with zero degree")
        self.degrees = deg

    @property
    def volume(self) -> float:
        return float(np.sum(self.degrees))


def undirected_edge(members, weight: float = 1.0) -> HyperEdge:
    members = tuple(members)
    return HyperEdge(weight, members, members, members)


def directed_edge(members, head, tail, weight: float = 1.0) -> HyperEdge:
    return HyperEdge(weight, tuple(members), tuple(head), tuple(tail))


def edge_atoms(hg: Hypergraph) -> list[SubmodularAtom]:
    """Atoms whose extensions are sqrt(w_r) times the unit cut of each edge."""
    atoms = []
    for e in hg.edges:
        if e.undirected:
            if len(e.members) == 2:
                atoms.append(graph_edge(*e.members, weight=e.weight))
            else:
                atoms.append(undirected_hyperedge(e.members, e.weight))
        else:
            atoms.append(SubmodularAtom(Kind.DIRECTED_HYPEREDGE, e.members,
                                        e.weight, head=e.head, tail=e.tail))
    return atoms


def pagerank(hg: Hypergraph, alpha: float, p0, config: SolverConfig | None = None,
             return_report: bool = False):
    """Personalized PageRank potential via the quadratic dual solver."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie strictly between 0 and 1")
    p0 = np.asarray(p0, dtype=float)
    if p0.shape != (hg.n,) or np.any(p0 < 0):
        raise ValueError("p0 must be a nonnegative length-n vector")
    if config is None:
        config = SolverConfig()
    d = hg.degrees
    instance = ProblemInstance(hg.n, p0 / d, (alpha / (1.0 - alpha)) * d,
                               edge_atoms(hg))
    report = rcd_solve(instance, config)
    p = d * report.x
    return (p, report) if return_report else p


def cut_stats(hg: Hypergraph, S) -> tuple[float, float, float]:
    """(vol(S), vol(complement), vol(boundary)) for a vertex set S.

    An edge is on the boundary when S meets its head and the complement meets
    its tail.
    """
    s = set(int(v) for v in S)
    if not s <= set(range(hg.n)):
        raise ValueError("S contains vertices outside the hypergraph")
    vol_s = float(sum(hg.degrees[v] for v in s))
    boundary = 0.0
    for e in hg.edges:
        if any(v in s for v in e.head) and any(v not in s for v in e.tail):
            boundary += e.weight
    return vol_s, hg.volume - vol_s, boundary


def conductance(hg: Hypergraph, S) -> float:
    vol_s, vol_c, boundary = cut_stats(hg, S)
    if vol_s == 0.0 or vol_c == 0.0:
        raise ValueError("conductance requires a nonempty proper subset")
    return boundary / min(vol_s, vol_c)


@dataclass
class SweepResult:
    best_set: list[int]
    best_conductance: float
    per_prefix: list[tuple[int, float]]


def _potential_order(hg: Hypergraph, p: np.ndarray) -> np.ndarray:
    x = np.asarray(p, dtype=float) / hg.degrees
    # descending potential, ties by ascending vertex index
    return np.lexsort((np.arange(hg.n), -x))


def sweep_cut(hg: Hypergraph, p) -> SweepResult:
    """Best conductance over prefixes of the degree-normalized ordering.

    Maintains per-edge counts |S intersect H| and |complement intersect T| so
    each vertex insertion costs only its incident edges.
    """
    order = _potential_order(hg, p)
    in_head: list[list[int]] = [[] for _ in range(hg.n)]
    in_tail: list[list[int]] = [[] for _ in range(hg.n)]
    for r, e in enumerate(hg.edges):
        for v in set(e.head):
            in_head[v].append(r)
        for v in set(e.tail):
            in_tail[v].append(r)
    head_hits = np.zeros(len(hg.edges), dtype=np.int64)
    tail_misses = np.array([len(set(e.tail)) for e in hg.edges], dtype=np.int64)
    weights = np.array([e.weight for e in hg.edges])
    active = np.zeros(len(hg.edges), dtype=bool)

    boundary = 0.0
    vol_s = 0.0
    total = hg.volume
    per_prefix = []
    best_j = 1
    best_phi = np.inf
    for j in range(hg.n - 1):
        v = int(order[j])
        vol_s += hg.degrees[v]
        touched = set(in_head[v]) | set(in_tail[v])
        for r in in_head[v]:
            head_hits[r] += 1
        for r in in_tail[v]:
            tail_misses[r] -= 1
        for r in touched:
            now = head_hits[r] > 0 and tail_misses[r] > 0
            if now != active[r]:
                boundary += weights[r] if now else -weights[r]
                active[r] = now
        phi = boundary / min(vol_s, total - vol_s)
        per_prefix.append((j + 1, phi))
        if phi < best_phi:
            best_phi = phi
            best_j = j + 1
    return SweepResult([int(v) for v in order[:best_j]], best_phi, per_prefix)


@dataclass
class LSCurve:
    """Concave piecewise-linear majorant of prefix masses vs prefix volume."""

    breakpoints: np.ndarray  # shape (k, 2): (volume, mass)

    def __call__(self, z):
        return np.interp(z, self.breakpoints[:, 0], self.breakpoints[:, 1])


def ls_curve(hg: Hypergraph, p) -> LSCurve:
    p = np.asarray(p, dtype=float)
    if np.any(p < 0):
        raise ValueError("p must be nonnegative")
    order = _potential_order(hg, p)
    x = p / hg.degrees
    pts = [(0.0, 0.0)]
    vol = 0.0
    mass = 0.0
    for j, v in enumerate(order):
        vol += hg.degrees[v]
        mass += p[v]
        last = j == hg.n - 1
        # breakpoints only where the normalized potential strictly drops
        if last or x[order[j + 1]] < x[v]:
            pts.append((vol, mass))
    return LSCurve(np.array(pts))


def ssl_instance(hg: Hypergraph, labels, beta: float, w_norm) -> ProblemInstance:
    """Least-squares label propagation as a quadratic decomposable problem.

    ``labels`` holds -1/0/+1 per vertex (0 = unlabeled).  Solved in the
    normalized variable u_i = x_i / sqrt(w_norm_i), which folds the score
    normalization into the diagonal weights: target u = labels / sqrt(w_norm),
    vertex weights beta * w_norm, unit-weight cut atoms per edge.
    """
    labels = np.asarray(labels, dtype=float)
    w_norm = np.asarray(w_norm, dtype=float)
    if beta <= 0:
        raise ValueError("beta must be positive")
    if np.any(w_norm <= 0):
        raise ValueError("w_norm must be strictly positive")
    if not np.any(labels):
        raise ValueError("at least one labeled vertex is required")
    unit = Hypergraph(hg.n, [HyperEdge(1.0, e.members, e.head, e.tail)
                             for e in hg.edges])
    atoms = edge_atoms(unit)
    root = np.sqrt(w_norm)
    return ProblemInstance(hg.n, labels / root, beta * w_norm, atoms)


def ssl_solve(hg: Hypergraph, labels, beta: float, w_norm,
              config: SolverConfig | None = None, method: str = "rcd"):
    """Solve the label-propagation problem; returns (scores x, predictions).

    Scores are reported in the original variable x = sqrt(w_norm) * u;
    two-class predictions are the sign of the score (0 maps to +1).
    """
    if config is None:
        config = SolverConfig()
    instance = ssl_instance(hg, labels, beta, w_norm)
    solver = rcd_solve if method == "rcd" else ap_solve
    report = solver(instance, config)
    x = np.sqrt(np.asarray(w_norm, dtype=float)) * report.x
    predicted = np.where(x >= 0, 1, -1)
    return x, predicted, report


def cheeger_classify(hg: Hypergraph, x, w_norm) -> tuple[list[int], float]:
    """Two-class partition by the prefix minimizing the incidence-mass ratio.

    Vertices are sorted by x_i / sqrt(w_norm_i) descending; each proper prefix
    is scored by (number of edges meeting both sides) over the smaller of the
    two incidence masses sum_r |S_r intersect prefix|.  Normalizing by the
    smaller side penalizes unbalanced cuts; normalizing by the larger one
    would make singleton prefixes near-optimal and useless for labeling.
    """
    x = np.asarray(x, dtype=float)
    w_norm = np.asarray(w_norm, dtype=float)
    score = x / np.sqrt(w_norm)
    order = np.lexsort((np.arange(hg.n), -score))
    rank = np.empty(hg.n, dtype=np.int64)
    rank[order] = np.arange(hg.n)

    total_mass = sum(len(set(e.members)) for e in hg.edges)
    # an edge straddles prefixes j in [min rank + 1, max rank]
    lo = np.array([min(rank[v] for v in set(e.members)) for e in hg.edges])
    hi = np.array([max(rank[v] for v in set(e.members)) for e in hg.edges])
    straddle = np.zeros(hg.n + 1)
    for a, b in zip(lo, hi):
        straddle[a + 1] += 1
        straddle[b + 1] -= 1
    straddle = np.cumsum(straddle)

    mass_in = 0.0
    inc = np.zeros(hg.n)
    for e in hg.edges:
        for v in set(e.members):
            inc[v] += 1
    best_j = 1
    best = np.inf
    for j in range(1, hg.n):
        mass_in += inc[order[j - 1]]
        ratio = straddle[j] / min(mass_in, total_mass - mass_in)
        if ratio < best:
            best = ratio
            best_j = j
    return [int(v) for v in order[:best_j]], float(best)


def generate_cluster_hypergraph(seed: int, n: int = 1000, intra: int = 500,
                                cross: int = 1000, size: int = 20,
                                labels_per_cluster: int = 3):
    """Planted two-cluster hypergraph with a few labeled seeds per cluster.

    Returns (hypergraph, labels, truth): truth is +1 on the first cluster and
    -1 on the second; labels agree with truth on the sampled seeds and are 0
    elsewhere.  Vertices left uncovered by the random edges are patched with
    extra intra-cluster edges so every degree is positive.
    """
    if n % 2:
        raise ValueError("n must be even")
    half = n // 2
    if size > half:
        raise ValueError("edge size exceeds cluster size")
    rng = np.random.default_rng(seed)
    edges = []
    for _ in range(intra):
        edges.append(undirected_edge(sorted(rng.choice(half, size, replace=False))))
    for _ in range(intra):
        edges.append(undirected_edge(sorted(half + rng.choice(half, size, replace=False))))
    for _ in range(cross):
        edges.append(undirected_edge(sorted(rng.choice(n, size, replace=False))))
    covered = np.zeros(n, dtype=bool)
    for e in edges:
        covered[list(e.members)] = True
    while not covered.all():
        v = int(np.flatnonzero(~covered)[0])
        side = 0 if v < half else half
        others = side + rng.choice(half, size, replace=False)
        mem = sorted(set([v]) | set(int(u) for u in others[:size - 1]))
        edges.append(undirected_edge(mem))
        covered[mem] = True
    hg = Hypergraph(n, edges)
    truth = np.where(np.arange(n) < half, 1, -1)
    labels = np.zeros(n)
    for base in (0, half):
        for v in rng.choice(half, labels_per_cluster, replace=False):
            labels[base + v] = truth[base + v]
    return hg, labels, truth


def generate_cardinality_bench(seed: int, theta: float, n: int = 100,
                               r: int = 100, size: int = 10) -> ProblemInstance:
    """Random concave-cardinality benchmark with identity vertex weights.

    Incidence sets are redrawn until every vertex is covered, so the instance
    invariant holds for any seed.
    """
    from .atoms import cardinality_atom

    rng = np.random.default_rng(seed)
    while True:
        sets = [sorted(rng.choice(n, size, replace=False)) for _ in range(r)]
        covered = np.zeros(n, dtype=bool)
        for s in sets:
            covered[s] = True
        if covered.all():
            break
    a = rng.standard_normal(n)
    atoms = [cardinality_atom(s, theta) for s in sets]
    return ProblemInstance(n, a, np.ones(n), atoms)
