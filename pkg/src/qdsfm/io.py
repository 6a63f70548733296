"""File formats: problem instances, hypergraphs, and convergence traces.

Instances and hypergraphs are JSON documents with 0-based vertex indices.
Instance keys: ``n``, ``a`` (length-n array), ``w`` (either a length-n array
of positive reals or {"variant": "degree"|"incidence", "beta": b} which
expands to b times the corresponding degree vector), and ``functions`` (list
of {kind, weight, members, head?, tail?, theta?}).  Hypergraph keys: ``n``
and ``edges`` (list of {weight, members, head?, tail?}; head/tail default to
members, i.e. undirected).  Traces are CSV files with a fixed header and 17
significant digits so values round-trip exactly.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .atoms import (DegreeVariant, Kind, ProblemInstance, SubmodularAtom,
                    degree_vector)
from .hypergraph import HyperEdge, Hypergraph

TRACE_HEADER = ["iteration", "elapsed_seconds", "dual_objective", "duality_gap"]


class ParseError(ValueError):
    pass


def _require(cond: bool, msg: str):
    if not cond:
        raise ParseError(msg)


def _atom_from_dict(idx: int, obj: dict) -> SubmodularAtom:
    _require(isinstance(obj, dict), f"functions[{idx}]: expected an object")
    _require("kind" in obj and "members" in obj, f"functions[{idx}]: needs kind and members")
    try:
        kind = Kind(obj["kind"])
    except ValueError:
        raise ParseError(f"functions[{idx}]: unknown kind {obj['kind']!r}") from None
    members = obj["members"]
    _require(isinstance(members, list), f"functions[{idx}]: members must be a list")
    _require(len(set(members)) == len(members),
             f"functions[{idx}]: duplicate vertex in members")
    try:
        return SubmodularAtom(kind, tuple(members),
                              float(obj.get("weight", 1.0)),
                              head=tuple(obj["head"]) if "head" in obj else None,
                              tail=tuple(obj["tail"]) if "tail" in obj else None,
                              theta=obj.get("theta"))
    except ValueError as exc:
        raise ParseError(f"functions[{idx}]: {exc}") from None


def instance_from_dict(doc: dict) -> ProblemInstance:
    for key in ("n", "a", "w", "functions"):
        _require(key in doc, f"missing key {key!r}")
    n = doc["n"]
    _require(isinstance(n, int) and n > 0, "n must be a positive integer")
    a = np.asarray(doc["a"], dtype=float)
    _require(a.shape == (n,), "a must have length n")
    atoms = [_atom_from_dict(i, f) for i, f in enumerate(doc["functions"])]

    w = doc["w"]
    if isinstance(w, dict):
        _require("variant" in w and "beta" in w, "w object needs variant and beta")
        variant = {"degree": DegreeVariant.MAX_SQUARED,
                   "incidence": DegreeVariant.INCIDENCE_COUNT}.get(w["variant"])
        _require(variant is not None, f"unknown w variant {w['variant']!r}")
        beta = float(w["beta"])
        _require(beta > 0, "beta must be positive")
        stub = ProblemInstance(n, a, np.ones(n), atoms)
        w_diag = beta * degree_vector(stub, variant)
    else:
        w_diag = np.asarray(w, dtype=float)
        _require(w_diag.shape == (n,), "w must have length n")
        _require(bool(np.all(w_diag > 0)), "w entries must be strictly positive")
    try:
        return ProblemInstance(n, a, w_diag, atoms)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def instance_to_dict(instance: ProblemInstance) -> dict:
    funcs = []
    for atom in instance.atoms:
        f = {"kind": atom.kind.value, "weight": atom.weight,
             "members": list(atom.members)}
        if atom.kind is Kind.DIRECTED_HYPEREDGE:
            f["head"] = list(atom.head)
            f["tail"] = list(atom.tail)
        if atom.kind is Kind.CARDINALITY:
            f["theta"] = atom.theta
        funcs.append(f)
    return {"n": instance.n, "a": instance.a.tolist(),
            "w": instance.w_diag.tolist(), "functions": funcs}


def parse_instance(path) -> ProblemInstance:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON ({exc})") from None
    return instance_from_dict(doc)


def write_instance(instance: ProblemInstance, path) -> None:
    with open(path, "w") as fh:
        json.dump(instance_to_dict(instance), fh, indent=1)
        fh.write("\n")


def hypergraph_from_dict(doc: dict) -> Hypergraph:
    for key in ("n", "edges"):
        _require(key in doc, f"missing key {key!r}")
    edges = []
    for i, e in enumerate(doc["edges"]):
        _require(isinstance(e, dict) and "members" in e, f"edges[{i}]: needs members")
        members = tuple(e["members"])
        head = tuple(e.get("head", members))
        tail = tuple(e.get("tail", members))
        edges.append(HyperEdge(float(e.get("weight", 1.0)), members, head, tail))
    try:
        return Hypergraph(doc["n"], edges)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def hypergraph_to_dict(hg: Hypergraph) -> dict:
    edges = []
    for e in hg.edges:
        obj = {"weight": e.weight, "members": list(e.members)}
        if not e.undirected:
            obj["head"] = list(e.head)
            obj["tail"] = list(e.tail)
        edges.append(obj)
    return {"n": hg.n, "edges": edges}


def parse_hypergraph(path) -> Hypergraph:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON ({exc})") from None
    return hypergraph_from_dict(doc)


def write_hypergraph(hg: Hypergraph, path) -> None:
    with open(path, "w") as fh:
        json.dump(hypergraph_to_dict(hg), fh, indent=1)
        fh.write("\n")


def write_trace(rows, path) -> None:
    """CSV trace; floats use 17 significant digits for lossless round-trip."""
    rows = list(rows)
    if not rows:
        raise ValueError("trace must contain at least one row")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_HEADER)
        for it, elapsed, dual, gap in rows:
            writer.writerow([int(it), f"{elapsed:.17g}", f"{dual:.17g}", f"{gap:.17g}"])


def read_trace(path) -> list[tuple[int, float, float, float]]:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != TRACE_HEADER:
            raise ParseError(f"{path}: unexpected trace header {header}")
        last = -1
        for line in reader:
            it = int(line[0])
            if it <= last:
                raise ParseError(f"{path}: iterations must be strictly increasing")
            last = it
            rows.append((it, float(line[1]), float(line[2]), float(line[3])))
    return rows


def write_solution(x: np.ndarray, path) -> None:
    with open(path, "w") as fh:
        for v in x:
            fh.write(f"{v:.17g}\n")
