"""Command-line front end.

Subcommands: ``solve`` (full instance), ``project`` (single-atom cone
projection), ``pagerank`` (hypergraph diffusion with optional sweep cut),
``ssl-demo`` (two-cluster label propagation experiment), ``gen`` (synthetic
instance/hypergraph emitters), and ``bench`` (method/backend grid producing
one trace file per cell).  Exit codes: 0 success, 1 usage error, 2 data
error, 3 solver did not reach the requested tolerance (best-effort outputs
are still written).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import io
from .hypergraph import (cheeger_classify, generate_cardinality_bench,
                         generate_cluster_hypergraph, pagerank, ssl_solve,
                         sweep_cut)
from .projection import check_kkt, conic_fw, conic_mnp, exact_directed
from .solvers import Backend, SolverConfig, ap_solve, rcd_solve

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NOCONV = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _solver_flags(sub):
    sub.add_argument("--tol", type=float, default=1e-9)
    sub.add_argument("--max-iters", type=int, default=1_000_000)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--trace-every", type=int, default=None)


def _config(args, backend=None):
    return SolverConfig(max_iterations=args.max_iters, gap_tolerance=args.tol,
                        rng_seed=args.seed, trace_every=args.trace_every,
                        projection_backend=backend or Backend.AUTO)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qdsfm")
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("solve", help="solve an instance file")
    s.add_argument("--instance", required=True)
    s.add_argument("--method", choices=["rcd", "ap"], default="rcd")
    s.add_argument("--backend", choices=[b.value for b in Backend], default="auto")
    s.add_argument("--trace")
    s.add_argument("--solution")
    _solver_flags(s)

    p = subs.add_parser("project", help="project onto a single atom's cone")
    p.add_argument("--instance", required=True,
                   help="instance file with exactly one function; w is the metric")
    p.add_argument("--backend", choices=["exact", "mnp", "fw"], default="exact")
    p.add_argument("--delta", type=float, default=1e-10)

    g = subs.add_parser("pagerank", help="hypergraph PageRank potential")
    g.add_argument("--hypergraph", required=True)
    g.add_argument("--alpha", type=float, required=True)
    src = g.add_mutually_exclusive_group(required=True)
    src.add_argument("--source", type=int, help="seed vertex (p0 = unit mass)")
    src.add_argument("--p0", help="file with one p0 entry per line")
    g.add_argument("--sweep", action="store_true")
    g.add_argument("--output")
    _solver_flags(g)

    d = subs.add_parser("ssl-demo", help="semi-supervised labeling experiment")
    d.add_argument("--preset", choices=["synthetic", "file"], default="synthetic")
    d.add_argument("--hypergraph", help="required for --preset file")
    d.add_argument("--labels-file", help="required for --preset file")
    d.add_argument("--labels", type=int, default=3, help="labeled seeds per cluster")
    d.add_argument("--beta", type=float, default=0.02)
    d.add_argument("--seeds", type=int, default=1, help="number of random replicas")
    _solver_flags(d)

    e = subs.add_parser("gen", help="emit a synthetic instance or hypergraph")
    e.add_argument("--preset", choices=["cardinality-bench", "cluster-ssl"],
                   required=True)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--theta", type=float, default=1.0)
    e.add_argument("--out", required=True)

    b = subs.add_parser("bench", help="run a method/backend grid")
    b.add_argument("--instance", required=True)
    b.add_argument("--methods", default="rcd,ap")
    b.add_argument("--backends", default="auto")
    b.add_argument("--out-dir", required=True)
    _solver_flags(b)
    return parser


def _cmd_solve(args) -> int:
    instance = io.parse_instance(args.instance)
    config = _config(args, Backend(args.backend))
    solver = rcd_solve if args.method == "rcd" else ap_solve
    report = solver(instance, config)
    if args.trace:
        io.write_trace(report.trace, args.trace)
    if args.solution:
        io.write_solution(report.x, args.solution)
    print(f"iterations={report.iterations_run} gap={report.final_gap:.6g} "
          f"converged={report.converged}")
    return EXIT_OK if report.converged else EXIT_NOCONV


def _cmd_project(args) -> int:
    instance = io.parse_instance(args.instance)
    if instance.r != 1:
        raise io.ParseError("project expects exactly one function in the instance")
    atom = instance.atoms[0]
    a = atom.restrict(instance.a)
    wt = atom.restrict(instance.w_diag)
    if args.backend == "exact":
        result = exact_directed(atom, a, wt)
    elif args.backend == "mnp":
        result = conic_mnp(atom, a, wt, args.delta)
    else:
        result = conic_fw(atom, a, wt, args.delta)
    print("y", " ".join(f"{v:.6g}" for v in result.y))
    print(f"phi {result.phi:.6g}")
    print(f"h {result.h_value:.6g}")
    print(f"kkt {check_kkt(atom, a, wt, result):.3g}")
    return EXIT_OK


def _cmd_pagerank(args) -> int:
    hg = io.parse_hypergraph(args.hypergraph)
    if args.source is not None:
        if not 0 <= args.source < hg.n:
            raise io.ParseError("source vertex out of range")
        p0 = np.zeros(hg.n)
        p0[args.source] = 1.0
    else:
        p0 = np.loadtxt(args.p0, ndmin=1)
    p, report = pagerank(hg, args.alpha, p0, _config(args), return_report=True)
    if args.output:
        io.write_solution(p, args.output)
    else:
        for v in p:
            print(f"{v:.10g}")
    if args.sweep:
        sw = sweep_cut(hg, p)
        print(f"sweep_conductance {sw.best_conductance:.10g}")
        print("sweep_set", " ".join(str(v) for v in sorted(sw.best_set)))
    return EXIT_OK if report.converged else EXIT_NOCONV


def _incidence_degrees(hg) -> np.ndarray:
    deg = np.zeros(hg.n)
    for e in hg.edges:
        for v in set(e.members):
            deg[v] += 1.0
    return deg


def _cmd_ssl(args) -> int:
    errors = []
    all_ok = True
    for k in range(args.seeds):
        if args.preset == "synthetic":
            hg, labels, truth = generate_cluster_hypergraph(
                args.seed + k, labels_per_cluster=args.labels)
            w_norm = _incidence_degrees(hg)
        else:
            if not args.hypergraph or not args.labels_file:
                raise io.ParseError("--preset file needs --hypergraph and --labels-file")
            hg = io.parse_hypergraph(args.hypergraph)
            labels = np.loadtxt(args.labels_file, ndmin=1)
            truth = None
            w_norm = _incidence_degrees(hg)
        config = SolverConfig(max_iterations=args.max_iters,
                              gap_tolerance=args.tol, rng_seed=args.seed + k,
                              trace_every=args.trace_every)
        x, predicted, report = ssl_solve(hg, labels, args.beta, w_norm, config)
        all_ok = all_ok and report.converged
        side, score = cheeger_classify(hg, x, w_norm)
        if truth is not None:
            in_side = np.zeros(hg.n, dtype=bool)
            in_side[side] = True
            seeds_pos = (labels > 0) & in_side
            orient = 1 if seeds_pos.sum() * 2 >= (labels != 0)[in_side].sum() else -1
            guess = np.where(in_side, orient, -orient)
            err = float(np.mean(guess != truth))
            errors.append(err)
            print(f"seed={args.seed + k} error={err:.4f} cheeger={score:.6g} "
                  f"gap={report.final_gap:.3g}")
        else:
            print(f"seed={args.seed + k} cheeger={score:.6g} gap={report.final_gap:.3g}")
            print("labels", " ".join(str(int(v)) for v in predicted))
    if errors:
        print(f"mean_error={np.mean(errors):.4f} median_error={np.median(errors):.4f}")
    return EXIT_OK if all_ok else EXIT_NOCONV


def _cmd_gen(args) -> int:
    if args.preset == "cardinality-bench":
        instance = generate_cardinality_bench(args.seed, args.theta)
        io.write_instance(instance, args.out)
    else:
        hg, labels, _ = generate_cluster_hypergraph(args.seed)
        io.write_hypergraph(hg, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_bench(args) -> int:
    import os

    instance = io.parse_instance(args.instance)
    os.makedirs(args.out_dir, exist_ok=True)
    all_ok = True
    for method in args.methods.split(","):
        for backend in args.backends.split(","):
            config = SolverConfig(max_iterations=args.max_iters,
                                  gap_tolerance=args.tol, rng_seed=args.seed,
                                  trace_every=args.trace_every,
                                  projection_backend=Backend(backend))
            solver = rcd_solve if method == "rcd" else ap_solve
            report = solver(instance, config)
            path = os.path.join(args.out_dir, f"{method}-{backend}.csv")
            io.write_trace(report.trace, path)
            all_ok = all_ok and report.converged
            print(f"{method}/{backend}: iterations={report.iterations_run} "
                  f"gap={report.final_gap:.6g}")
    return EXIT_OK if all_ok else EXIT_NOCONV


_COMMANDS = {"solve": _cmd_solve, "project": _cmd_project,
             "pagerank": _cmd_pagerank, "ssl-demo": _cmd_ssl,
             "gen": _cmd_gen, "bench": _cmd_bench}


def run_command(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (io.ParseError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


def main() -> None:
    raise SystemExit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
