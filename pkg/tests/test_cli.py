"""Command-line interface: subcommands, outputs, and exit codes."""

import json

import numpy as np
import pytest

from qdsfm.cli import (EXIT_DATA, EXIT_NOCONV, EXIT_OK, EXIT_USAGE,
                       run_command)
from qdsfm.io import read_trace


@pytest.fixture
def instance_file(tmp_path):
    doc = {
        "n": 3,
        "a": [1.0, -1.0, 0.5],
        "w": [1.0, 1.0, 2.0],
        "functions": [
            {"kind": "graph_edge", "members": [0, 1]},
            {"kind": "undirected_hyperedge", "members": [0, 1, 2], "weight": 0.5},
        ],
    }
    path = tmp_path / "inst.json"
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def edge_instance_file(tmp_path):
    doc = {
        "n": 2,
        "a": [1.0, -1.0],
        "w": [1.0, 1.0],
        "functions": [{"kind": "graph_edge", "members": [0, 1]}],
    }
    path = tmp_path / "edge.json"
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def hypergraph_file(tmp_path):
    doc = {
        "n": 4,
        "edges": [
            {"members": [0, 1]}, {"members": [1, 2]},
            {"members": [2, 3]}, {"members": [0, 1, 2], "weight": 0.5},
        ],
    }
    path = tmp_path / "hg.json"
    path.write_text(json.dumps(doc))
    return str(path)


class TestSolve:
    def test_writes_trace_and_solution(self, instance_file, tmp_path, capsys):
        trace = tmp_path / "trace.csv"
        sol = tmp_path / "sol.txt"
        code = run_command(["solve", "--instance", instance_file,
                            "--trace", str(trace), "--solution", str(sol),
                            "--tol", "1e-11", "--max-iters", "100000"])
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert "converged=True" in out
        rows = read_trace(trace)
        assert rows[-1][3] <= 1e-11
        x = np.loadtxt(sol)
        assert x.shape == (3,)

    def test_repeat_runs_identical_modulo_timing(self, instance_file, tmp_path):
        traces = []
        for name in ("t1.csv", "t2.csv"):
            path = tmp_path / name
            assert run_command(["solve", "--instance", instance_file,
                                "--trace", str(path), "--seed", "7"]) == EXIT_OK
            traces.append([(r[0], r[2], r[3]) for r in read_trace(path)])
        assert traces[0] == traces[1]

    def test_ap_method(self, instance_file, capsys):
        code = run_command(["solve", "--instance", instance_file,
                            "--method", "ap", "--tol", "1e-8"])
        assert code == EXIT_OK
        assert "converged=True" in capsys.readouterr().out

    def test_nonconvergence_exit_code(self, instance_file, capsys):
        code = run_command(["solve", "--instance", instance_file,
                            "--max-iters", "1", "--tol", "1e-14"])
        assert code == EXIT_NOCONV
        assert "converged=False" in capsys.readouterr().out

    def test_missing_file_is_data_error(self, tmp_path):
        code = run_command(["solve", "--instance", str(tmp_path / "nope.json")])
        assert code == EXIT_DATA

    def test_malformed_json_is_data_error(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{oops")
        assert run_command(["solve", "--instance", str(path)]) == EXIT_DATA

    def test_missing_required_flag_is_usage_error(self):
        assert run_command(["solve"]) == EXIT_USAGE

    def test_unknown_subcommand_is_usage_error(self):
        assert run_command(["frobnicate"]) == EXIT_USAGE


class TestProject:
    def test_exact_output(self, edge_instance_file, capsys):
        assert run_command(["project", "--instance", edge_instance_file]) == EXIT_OK
        out = capsys.readouterr().out
        assert "h 0.666667" in out
        assert "phi 0.666667" in out

    def test_backends_match(self, edge_instance_file, capsys):
        values = {}
        for backend in ("exact", "mnp"):
            assert run_command(["project", "--instance", edge_instance_file,
                                "--backend", backend, "--delta", "1e-12"]) == EXIT_OK
            out = capsys.readouterr().out
            values[backend] = float(next(l for l in out.splitlines()
                                         if l.startswith("h ")).split()[1])
        assert values["exact"] == pytest.approx(values["mnp"], abs=1e-6)

    def test_multiple_functions_rejected(self, instance_file):
        assert run_command(["project", "--instance", instance_file]) == EXIT_DATA


class TestPagerank:
    def test_source_with_sweep(self, hypergraph_file, tmp_path, capsys):
        out_file = tmp_path / "p.txt"
        code = run_command(["pagerank", "--hypergraph", hypergraph_file,
                            "--alpha", "0.2", "--source", "0",
                            "--sweep", "--output", str(out_file),
                            "--tol", "1e-11", "--max-iters", "200000"])
        assert code == EXIT_OK
        p = np.loadtxt(out_file)
        assert p.shape == (4,)
        assert np.all(p >= -1e-9)
        out = capsys.readouterr().out
        assert "sweep_conductance" in out and "sweep_set" in out

    def test_p0_file(self, hypergraph_file, tmp_path, capsys):
        p0 = tmp_path / "p0.txt"
        p0.write_text("1.0\n0.0\n0.0\n0.0\n")
        code = run_command(["pagerank", "--hypergraph", hypergraph_file,
                            "--alpha", "0.2", "--p0", str(p0),
                            "--tol", "1e-10"])
        assert code == EXIT_OK
        assert len(capsys.readouterr().out.strip().splitlines()) == 4

    def test_source_out_of_range(self, hypergraph_file):
        assert run_command(["pagerank", "--hypergraph", hypergraph_file,
                            "--alpha", "0.2", "--source", "9"]) == EXIT_DATA

    def test_bad_alpha_is_data_error(self, hypergraph_file):
        assert run_command(["pagerank", "--hypergraph", hypergraph_file,
                            "--alpha", "1.5", "--source", "0"]) == EXIT_DATA

    def test_source_and_p0_conflict(self, hypergraph_file, tmp_path):
        p0 = tmp_path / "p0.txt"
        p0.write_text("1\n0\n0\n0\n")
        assert run_command(["pagerank", "--hypergraph", hypergraph_file,
                            "--alpha", "0.2", "--source", "0",
                            "--p0", str(p0)]) == EXIT_USAGE


class TestGen:
    def test_cardinality_preset_deterministic(self, tmp_path, capsys):
        files = []
        for name in ("a.json", "b.json"):
            out = tmp_path / name
            assert run_command(["gen", "--preset", "cardinality-bench",
                                "--seed", "3", "--theta", "0.5",
                                "--out", str(out)]) == EXIT_OK
            files.append(out.read_bytes())
        assert files[0] == files[1]
        doc = json.loads(files[0])
        assert doc["n"] == 100 and len(doc["functions"]) == 100

    def test_cluster_preset(self, tmp_path):
        out = tmp_path / "hg.json"
        assert run_command(["gen", "--preset", "cluster-ssl",
                            "--out", str(out)]) == EXIT_OK
        doc = json.loads(out.read_text())
        assert doc["n"] == 1000 and len(doc["edges"]) >= 2000

    def test_unknown_preset_is_usage_error(self, tmp_path):
        assert run_command(["gen", "--preset", "bogus",
                            "--out", str(tmp_path / "x.json")]) == EXIT_USAGE


class TestBench:
    def test_grid_traces(self, instance_file, tmp_path, capsys):
        out_dir = tmp_path / "bench"
        code = run_command(["bench", "--instance", instance_file,
                            "--methods", "rcd,ap", "--backends", "auto,mnp",
                            "--out-dir", str(out_dir),
                            "--tol", "1e-8", "--max-iters", "50000",
                            "--trace-every", "10"])
        assert code == EXIT_OK
        for method in ("rcd", "ap"):
            for backend in ("auto", "mnp"):
                rows = read_trace(out_dir / f"{method}-{backend}.csv")
                assert rows[-1][3] <= 1e-8
        assert capsys.readouterr().out.count("iterations=") == 4
