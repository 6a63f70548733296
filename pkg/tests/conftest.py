"""Shared helpers: exhaustive polytope checks and random atom generators."""

import itertools

import numpy as np
import pytest

from qdsfm.atoms import (SubmodularAtom, Kind, cardinality_atom,
                         directed_hyperedge, evaluate, graph_edge,
                         undirected_hyperedge)


def subset_value(atom, local_subset):
    """F(S) for a subset given as member-local positions."""
    S = [atom.members[k] for k in local_subset]
    return evaluate(atom, S)


def in_base_polytope(atom, y, tol=1e-9):
    """Exhaustive membership check: y(S) <= F(S) for all S, tight at the top."""
    n = atom.size
    assert n <= 8, "enumeration check limited to small atoms"
    for r in range(n + 1):
        for S in itertools.combinations(range(n), r):
            bound = subset_value(atom, S)
            if sum(y[k] for k in S) > bound + tol:
                return False
    return abs(sum(y) - subset_value(atom, range(n))) <= tol


def in_cone(atom, y, phi, tol=1e-9):
    if phi < -tol:
        return False
    if phi <= tol:
        return bool(np.all(np.abs(y) <= tol))
    return in_base_polytope(atom, np.asarray(y) / phi, tol)


def random_atom(rng, kinds=("graph", "undirected", "directed", "cardinality"),
                max_size=6, weighted=True):
    kind = rng.choice(list(kinds))
    if kind == "graph":
        n = 2
    else:
        n = int(rng.integers(3, max_size + 1))
    members = tuple(sorted(rng.choice(20, n, replace=False).tolist()))
    w = float(rng.uniform(0.2, 3.0)) if weighted else 1.0
    if kind == "graph":
        return graph_edge(*members, weight=w)
    if kind == "undirected":
        return undirected_hyperedge(members, w)
    if kind == "directed":
        head = tuple(rng.choice(members, int(rng.integers(1, n + 1)), replace=False).tolist())
        tail = tuple(rng.choice(members, int(rng.integers(1, n + 1)), replace=False).tolist())
        return directed_hyperedge(members, head, tail, w)
    theta = float(rng.choice([0.25, 0.5, 1.0]))
    return cardinality_atom(members, theta)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
