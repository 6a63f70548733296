"""End-to-end acceptance checks.

Each test prints a single ``CRITERION n: PASS/FAIL`` line (visible under
``pytest -s`` or on failure) and asserts the same condition.
"""

import time

import numpy as np
import pytest

from conftest import in_base_polytope, random_atom
from qdsfm.atoms import (ProblemInstance, directed_hyperedge, greedy_lmo,
                         lovasz)
from qdsfm.hypergraph import (Hypergraph, cheeger_classify,
                              generate_cardinality_bench,
                              generate_cluster_hypergraph, pagerank, ssl_solve,
                              undirected_edge)
from qdsfm.oracles import (brute_projection, brute_qdsfm, dense_graph_pagerank,
                           enumerate_base_vertices)
from qdsfm.projection import Status, check_kkt, conic_fw, conic_mnp, exact_directed
from qdsfm.solvers import Backend, SolverConfig, ap_solve, rcd_solve

from test_solvers import random_instance


def _report(num: int, ok: bool, detail: str):
    print(f"CRITERION {num}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"criterion {num}: {detail}"


def _random_directed(rng, max_size=8):
    n = int(rng.integers(2, max_size + 1))
    head = tuple(rng.choice(n, int(rng.integers(1, n + 1)), replace=False).tolist())
    tail = tuple(rng.choice(n, int(rng.integers(1, n + 1)), replace=False).tolist())
    return directed_hyperedge(tuple(range(n)), head, tail,
                              float(rng.uniform(0.2, 3.0)))


def test_criterion_1_exact_projection_matches_mnp():
    rng = np.random.default_rng(1001)
    start = time.perf_counter()
    max_dh = 0.0
    max_dy = 0.0
    for _ in range(200):
        atom = _random_directed(rng)
        a = rng.standard_normal(atom.size)
        wt = rng.uniform(0.1, 10.0, atom.size)
        re_ = exact_directed(atom, a, wt)
        rm = conic_mnp(atom, a, wt, 1e-12)
        max_dh = max(max_dh, abs(re_.h_value - rm.h_value))
        max_dy = max(max_dy, float(np.max(np.abs(re_.y - rm.y))))
    elapsed = time.perf_counter() - start
    ok = max_dh <= 1e-6 and max_dy <= 1e-5 and elapsed < 10.0
    _report(1, ok, f"max|dh|={max_dh:.2e} max|dy|={max_dy:.2e} {elapsed:.1f}s")


def test_criterion_2_fw_rate_envelope():
    rng = np.random.default_rng(1002)
    worst_slack = -np.inf
    for _ in range(50):
        atom = random_atom(rng, max_size=5)
        a = rng.standard_normal(atom.size)
        wt = rng.uniform(0.1, 10.0, atom.size)
        h_star = conic_mnp(atom, a, wt, 1e-12).h_value
        verts = enumerate_base_vertices(atom)
        q2 = float(np.max(np.sum(wt * verts * verts, axis=1)))
        bound = 2.0 * float(np.dot(wt * a, a)) * q2
        res = conic_fw(atom, a, wt, delta=1e-13, max_iter=1000)
        for k, h in enumerate(res.h_trace):
            worst_slack = max(worst_slack, (h - h_star) - bound / (k + 2))
    ok = worst_slack <= 1e-10
    _report(2, ok, f"worst envelope violation={worst_slack:.2e}")


def test_criterion_3_mnp_descent_and_termination():
    rng = np.random.default_rng(1003)
    delta = 1e-9
    monotone = True
    bounded = True
    for _ in range(60):
        atom = random_atom(rng, max_size=6)
        a = rng.standard_normal(atom.size)
        wt = rng.uniform(0.1, 10.0, atom.size)
        res = conic_mnp(atom, a, wt, delta)
        if np.any(np.diff(res.h_trace) > 1e-9 * max(1.0, res.h_trace[0])):
            monotone = False
        h_star = brute_projection(atom, a, wt).h_value
        norm_a = float(np.sqrt(np.dot(wt * a, a)))
        if res.h_value > h_star + delta * norm_a + 1e-10:
            bounded = False
    _report(3, monotone and bounded,
            f"monotone={monotone} termination_bound={bounded}")


def test_criterion_4_cardinality_benchmark_convergence():
    details = []
    ok = True
    for theta in (0.25, 0.5, 1.0):
        inst = generate_cardinality_bench(44, theta)
        cfg = SolverConfig(max_iterations=300 * inst.r, gap_tolerance=1e-300,
                           rng_seed=44, trace_every=1000,
                           projection_backend=Backend.MNP)
        rep = rcd_solve(inst, cfg)
        its = np.array([row[0] for row in rep.trace], dtype=float)
        logs = np.log10(np.maximum([row[3] for row in rep.trace], 1e-16))
        slope, intercept = np.polyfit(its, logs, 1)
        fit = slope * its + intercept
        ss_res = float(np.sum((logs - fit) ** 2))
        ss_tot = float(np.sum((logs - np.mean(logs)) ** 2))
        r2 = 1.0 - ss_res / ss_tot
        final = logs[-1]
        this_ok = slope < 0 and r2 >= 0.8
        if theta == 1.0:
            this_ok = this_ok and final <= -6.0
        ok = ok and this_ok
        details.append(f"theta={theta}: slope={slope:.2e}/iter r2={r2:.2f} "
                       f"log10(gap)={final:.1f}")
    _report(4, ok, "; ".join(details))


def test_criterion_5_tiny_instances_match_bruteforce():
    rng = np.random.default_rng(1005)
    worst_rcd = 0.0
    worst_ap = 0.0
    worst_cross = 0.0
    for _ in range(50):
        inst = random_instance(rng, n_max=6, r_max=4)
        x_star = brute_qdsfm(inst)
        cfg = SolverConfig(max_iterations=60000, gap_tolerance=1e-13)
        xr = rcd_solve(inst, cfg).x
        xa = ap_solve(inst, cfg).x
        worst_rcd = max(worst_rcd, float(np.max(np.abs(xr - x_star))))
        worst_ap = max(worst_ap, float(np.max(np.abs(xa - x_star))))
        worst_cross = max(worst_cross, float(np.max(np.abs(xr - xa))))
    ok = max(worst_rcd, worst_ap, worst_cross) <= 1e-5
    _report(5, ok, f"rcd={worst_rcd:.2e} ap={worst_ap:.2e} "
                   f"cross={worst_cross:.2e}")


def _random_graph(rng, n):
    edges = []
    p = min(1.0, 3.0 / n)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                edges.append(undirected_edge((i, j), float(rng.uniform(0.5, 2.0))))
    deg = np.zeros(n)
    for e in edges:
        for v in e.members:
            deg[v] += 1
    for v in np.flatnonzero(deg == 0):
        edges.append(undirected_edge((int(v), int((v + 1) % n))))
    return Hypergraph(n, edges)


def test_criterion_6_pagerank_matches_dense_solver():
    rng = np.random.default_rng(1006)
    worst = 0.0
    worst_pi = 0.0
    for _ in range(20):
        n = int(rng.integers(5, 51))
        hg = _random_graph(rng, n)
        p0 = np.zeros(n)
        p0[int(rng.integers(0, n))] = 1.0
        cfg = SolverConfig(max_iterations=2_000_000, gap_tolerance=1e-14,
                           trace_every=20000)
        p = pagerank(hg, 0.2, p0, cfg)
        pd = dense_graph_pagerank(hg, 0.2, p0)
        worst = max(worst, float(np.max(np.abs(p - pd))))
        pi = hg.degrees / hg.volume
        p_pi = pagerank(hg, 0.2, pi, SolverConfig(max_iterations=1000))
        worst_pi = max(worst_pi, float(np.max(np.abs(p_pi - pi))))
    ok = worst <= 1e-6 and worst_pi <= 1e-8
    _report(6, ok, f"max|dp|={worst:.2e} stationary={worst_pi:.2e}")


def test_criterion_7_ssl_mean_error():
    errors = []
    start = time.perf_counter()
    for seed in range(20):
        hg, labels, truth = generate_cluster_hypergraph(seed)
        w_norm = np.zeros(hg.n)
        for e in hg.edges:
            for v in set(e.members):
                w_norm[v] += 1.0
        cfg = SolverConfig(max_iterations=20_000_000, gap_tolerance=1e-9,
                           rng_seed=seed)
        x, _, report = ssl_solve(hg, labels, beta=0.02, w_norm=w_norm,
                                 config=cfg)
        assert report.converged
        side, _ = cheeger_classify(hg, x, w_norm)
        in_side = np.zeros(hg.n, dtype=bool)
        in_side[side] = True
        pos_seeds = int(np.sum((labels > 0) & in_side))
        labeled_in = int(np.sum((labels != 0) & in_side))
        orient = 1 if 2 * pos_seeds >= labeled_in else -1
        guess = np.where(in_side, orient, -orient)
        errors.append(float(np.mean(guess != truth)))
    elapsed = time.perf_counter() - start
    mean_err = float(np.mean(errors))
    ok = mean_err <= 0.05
    _report(7, ok, f"mean_error={100 * mean_err:.2f}% "
                   f"median={100 * float(np.median(errors)):.2f}% {elapsed:.0f}s")


def test_criterion_8_invariant_suites():
    rng = np.random.default_rng(1008)
    failures = []

    for _ in range(40):  # base-polytope membership by enumeration
        atom = random_atom(rng, max_size=6)
        x = rng.standard_normal(atom.size)
        if not in_base_polytope(atom, greedy_lmo(atom, x)):
            failures.append("membership")
            break

    hits = 0  # extension value equals the greedy inner product
    for _ in range(1000):
        atom = random_atom(rng)
        x = rng.standard_normal(atom.size)
        y = greedy_lmo(atom, x)
        if abs(lovasz(atom, x) - float(np.dot(y, x))) <= 1e-9 * max(1.0, abs(lovasz(atom, x))):
            hits += 1
    if hits != 1000:
        failures.append(f"extension ({hits}/1000)")

    for delta in (1e-6, 1e-9):  # residual certificate at termination
        for _ in range(20):
            atom = random_atom(rng)
            a = rng.standard_normal(atom.size)
            wt = rng.uniform(0.1, 10.0, atom.size)
            res = conic_mnp(atom, a, wt, delta)
            if res.status is Status.CONVERGED and check_kkt(atom, a, wt, res) > delta:
                failures.append("kkt")

    inst = random_instance(rng)  # per-step dual descent
    cfg = SolverConfig(max_iterations=400, gap_tolerance=1e-300, trace_every=1,
                       rng_seed=5, projection_backend=Backend.MNP)
    g = [row[2] for row in rcd_solve(inst, cfg).trace]
    if any(after > before + 1e-10 * max(1.0, abs(before))
           for before, after in zip(g, g[1:])):
        failures.append("descent")

    cfg = SolverConfig(max_iterations=5000, gap_tolerance=1e-12, rng_seed=11)
    t1 = [(r[0], r[2], r[3]) for r in rcd_solve(inst, cfg).trace]
    t2 = [(r[0], r[2], r[3]) for r in rcd_solve(inst, cfg).trace]
    if t1 != t2:
        failures.append("determinism")

    _report(8, not failures, "all invariant suites clean" if not failures
            else "failed: " + ", ".join(failures))
