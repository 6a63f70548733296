"""Submodular function families, their Lovasz extensions and base-polytope oracles.

Every atom is a submodular set function F defined on a small incidence set
(``members``), normalized so that F(empty) = 0 and F >= 0.  Four families are
supported:

* graph edge:            F(S) = sqrt(w) if S splits the two endpoints
* undirected hyperedge:  F(S) = sqrt(w) if S splits the members nontrivially
* directed hyperedge:    F(S) = sqrt(w) if S hits the head set and the
                         complement hits the tail set
* cardinality:           F(S) = min(|S|, |members| - |S|)^theta / (|members|/2)^theta

Vectors associated with an atom (Lovasz arguments, base-polytope points,
projection targets) are plain numpy arrays aligned with ``atom.members``:
entry ``k`` belongs to vertex ``atom.members[k]``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np


class Kind(enum.Enum):
    GRAPH_EDGE = "graph_edge"
    UNDIRECTED_HYPEREDGE = "undirected_hyperedge"
    DIRECTED_HYPEREDGE = "directed_hyperedge"
    CARDINALITY = "cardinality"


CUT_KINDS = (Kind.GRAPH_EDGE, Kind.UNDIRECTED_HYPEREDGE, Kind.DIRECTED_HYPEREDGE)


class DegreeVariant(enum.Enum):
    INCIDENCE_COUNT = "incidence"
    MAX_SQUARED = "max_squared"


@dataclass
class SubmodularAtom:
    """One decomposed submodular function with its incidence set.

    ``head``/``tail`` are only meaningful for directed hyperedges and must be
    nonempty subsets of ``members``; ``theta`` in (0, 1] is only meaningful for
    cardinality atoms.  Instances are treated as immutable after construction.
    """

    kind: Kind
    members: tuple[int, ...]
    weight: float = 1.0
    head: tuple[int, ...] | None = None
    tail: tuple[int, ...] | None = None
    theta: float | None = None

    # derived, filled in __post_init__
    head_local: np.ndarray = field(init=False, repr=False)
    tail_local: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.members = tuple(int(i) for i in self.members)
        if len(set(self.members)) != len(self.members):
            raise ValueError("duplicate vertices in members")
        if len(self.members) < 2:
            raise ValueError("degenerate atom: needs at least two members")
        if self.weight < 0:
            raise ValueError("negative weight")
        if self.kind is Kind.GRAPH_EDGE and len(self.members) != 2:
            raise ValueError("graph edge must have exactly two members")
        pos = {v: k for k, v in enumerate(self.members)}

        if self.kind is Kind.DIRECTED_HYPEREDGE:
            if not self.head or not self.tail:
                raise ValueError("directed hyperedge needs nonempty head and tail")
            self.head = tuple(int(i) for i in self.head)
            self.tail = tuple(int(i) for i in self.tail)
            for v in self.head + self.tail:
                if v not in pos:
                    raise ValueError(f"head/tail vertex {v} outside members")
        elif self.kind in (Kind.GRAPH_EDGE, Kind.UNDIRECTED_HYPEREDGE):
            # undirected cuts are the head = tail = members special case
            self.head = self.members
            self.tail = self.members
        else:  # cardinality
            if self.theta is None or not (0.0 < self.theta <= 1.0):
                raise ValueError("cardinality atom needs theta in (0, 1]")
            if self.weight != 1.0:
                raise ValueError("cardinality atoms are unweighted (weight must be 1)")
            self.head = None
            self.tail = None

        if self.head is not None:
            self.head_local = np.array(sorted(pos[v] for v in set(self.head)), dtype=np.int64)
            self.tail_local = np.array(sorted(pos[v] for v in set(self.tail)), dtype=np.int64)
        else:
            self.head_local = np.empty(0, dtype=np.int64)
            self.tail_local = np.empty(0, dtype=np.int64)
        self._pos = pos

    @property
    def size(self) -> int:
        return len(self.members)

    def local(self, vertices) -> np.ndarray:
        """Map global vertex ids to positions within ``members``."""
        try:
            return np.array([self._pos[int(v)] for v in vertices], dtype=np.int64)
        except KeyError as exc:
            raise ValueError(f"vertex {exc.args[0]} outside atom members") from None

    def restrict(self, x_dense: np.ndarray) -> np.ndarray:
        """Slice a dense length-N vector down to the member coordinates."""
        return np.asarray(x_dense, dtype=float)[list(self.members)]


def graph_edge(i: int, j: int, weight: float = 1.0) -> SubmodularAtom:
    return SubmodularAtom(Kind.GRAPH_EDGE, (i, j), weight)


def undirected_hyperedge(members, weight: float = 1.0) -> SubmodularAtom:
    return SubmodularAtom(Kind.UNDIRECTED_HYPEREDGE, tuple(members), weight)


def directed_hyperedge(members, head, tail, weight: float = 1.0) -> SubmodularAtom:
    return SubmodularAtom(
        Kind.DIRECTED_HYPEREDGE, tuple(members), weight, head=tuple(head), tail=tuple(tail)
    )


def cardinality_atom(members, theta: float) -> SubmodularAtom:
    return SubmodularAtom(Kind.CARDINALITY, tuple(members), 1.0, theta=theta)


def evaluate(atom: SubmodularAtom, S) -> float:
    """Value F(S) for a subset S (given as global vertex ids) of the members."""
    s_local = set(atom.local(S).tolist())
    n = atom.size
    k = len(s_local)
    if atom.kind is Kind.CARDINALITY:
        return min(k, n - k) ** atom.theta / (n / 2.0) ** atom.theta
    hits_head = any(p in s_local for p in atom.head_local)
    hits_tail = any(p not in s_local for p in atom.tail_local)
    return float(np.sqrt(atom.weight)) if (hits_head and hits_tail) else 0.0


def max_value(atom: SubmodularAtom) -> float:
    """max_S F(S) over all subsets of the members."""
    if atom.kind is Kind.CARDINALITY:
        n = atom.size
        return (n // 2) ** atom.theta / (n / 2.0) ** atom.theta
    return float(np.sqrt(atom.weight))


def _prefix_values(atom: SubmodularAtom, order: np.ndarray) -> np.ndarray:
    """F of the prefixes of ``order`` (local positions), length n + 1."""
    n = atom.size
    vals = np.zeros(n + 1)
    if atom.kind is Kind.CARDINALITY:
        k = np.arange(n + 1, dtype=float)
        vals = np.minimum(k, n - k) ** atom.theta / (n / 2.0) ** atom.theta
        return vals
    # cut families: F(prefix_k) = sqrt(w) iff the prefix already hits the head
    # and the suffix still hits the tail
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.arange(n)
    k_head = int(rank[atom.head_local].min()) + 1
    k_tail = int(rank[atom.tail_local].max()) + 1
    root_w = np.sqrt(atom.weight)
    if k_head < k_tail:
        vals[k_head:k_tail] = root_w
    return vals


def greedy_lmo(atom: SubmodularAtom, direction: np.ndarray) -> np.ndarray:
    """Base-polytope point maximizing <y, direction>, via the greedy ordering.

    Sorts ``direction`` descending (ties broken by ascending position) and
    assigns marginal gains of F along the prefix chain.  The inner product of
    the result with ``direction`` equals the Lovasz extension value.
    """
    direction = np.asarray(direction, dtype=float)
    if direction.shape != (atom.size,):
        raise ValueError("direction must be aligned with atom.members")
    order = np.argsort(-direction, kind="stable")
    gains = np.diff(_prefix_values(atom, order))
    y = np.empty(atom.size)
    y[order] = gains
    return y


def lovasz(atom: SubmodularAtom, x: np.ndarray) -> float:
    """Lovasz extension f(x) of the atom at a member-aligned vector."""
    x = np.asarray(x, dtype=float)
    return float(np.dot(greedy_lmo(atom, x), x))


@dataclass
class ProblemInstance:
    """The quadratic decomposable problem min ||x - a||_W^2 + sum_r f_r(x)^2."""

    n: int
    a: np.ndarray
    w_diag: np.ndarray
    atoms: list[SubmodularAtom]

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=float)
        self.w_diag = np.asarray(self.w_diag, dtype=float)
        if self.a.shape != (self.n,) or self.w_diag.shape != (self.n,):
            raise ValueError("a and w_diag must have length n")
        if np.any(self.w_diag <= 0):
            raise ValueError("w_diag entries must be strictly positive")
        covered = np.zeros(self.n, dtype=bool)
        for atom in self.atoms:
            mem = np.array(atom.members)
            if mem.min() < 0 or mem.max() >= self.n:
                raise ValueError("atom members outside ground set")
            covered[mem] = True
        if not covered.all():
            missing = int(np.flatnonzero(~covered)[0])
            raise ValueError(f"vertex {missing} is not incident to any atom")

    @property
    def r(self) -> int:
        return len(self.atoms)


def primal_objective(instance: ProblemInstance, x: np.ndarray) -> float:
    """||x - a||_W^2 + sum_r f_r(x)^2 for a dense length-N vector x."""
    x = np.asarray(x, dtype=float)
    diff = x - instance.a
    value = float(np.dot(instance.w_diag * diff, diff))
    for atom in instance.atoms:
        value += lovasz(atom, atom.restrict(x)) ** 2
    return value


def degree_vector(instance: ProblemInstance, variant: DegreeVariant) -> np.ndarray:
    """Per-vertex degree diagnostics.

    INCIDENCE_COUNT counts how many atoms each vertex touches; MAX_SQUARED
    accumulates max_S F_r(S)^2 over the incident atoms (the weight for cut
    atoms).
    """
    deg = np.zeros(instance.n)
    for atom in instance.atoms:
        mem = list(atom.members)
        if variant is DegreeVariant.INCIDENCE_COUNT:
            deg[mem] += 1.0
        else:
            deg[mem] += max_value(atom) ** 2
    if np.any(deg <= 0):
        raise ValueError("vertex with zero incidence")
    return deg
