"""Command-line driver: round trips, output tables, exit codes, determinism."""

import numpy as np
import pytest

from aoisim import read_trace, write_trace
from aoisim.cli import main

from conftest import make_trace


@pytest.fixture
def example_file(tmp_path, example_trace):
    path = tmp_path / "example.trace"
    write_trace(example_trace, path)
    return str(path)


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestGenTrace:
    def test_single_good_kind(self, tmp_path, capsys):
        out = tmp_path / "t.trace"
        code, stdout, _ = run_cli(
            capsys, "gen-trace", "--kind", "yao", "-N", "4", "-T", "50", "--seed", "7", "--out", str(out)
        )
        assert code == 0
        assert "N=4" in stdout
        trace = read_trace(out)
        assert (trace.channels.sum(axis=1) == 1).all()

    def test_missing_seed_is_an_error(self, tmp_path, capsys):
        code, _, stderr = run_cli(
            capsys, "gen-trace", "--kind", "yao", "-N", "2", "-T", "10", "--out", str(tmp_path / "t")
        )
        assert code == 2
        assert "seed" in stderr

    def test_adaptive_kind_realizes_replayable_trace(self, tmp_path, capsys):
        out = tmp_path / "b.trace"
        code, _, _ = run_cli(
            capsys, "gen-trace", "--kind", "blocking", "-N", "3", "-T", "20", "--out", str(out)
        )
        assert code == 0
        trace = read_trace(out)
        assert trace.config.horizon == 20

    def test_iid_kind_with_mobility(self, tmp_path, capsys):
        out = tmp_path / "i.trace"
        code, _, _ = run_cli(
            capsys,
            "gen-trace", "--kind", "iid", "-N", "3", "-M", "2", "-T", "30",
            "--seed", "5", "--mobility", "walk", "--good-prob", "0.4", "--out", str(out),
        )
        assert code == 0
        trace = read_trace(out)
        assert trace.locations.max() <= 1


class TestRunAndOpt:
    def test_run_prints_cost(self, example_file, capsys, tmp_path):
        out_csv = tmp_path / "run.csv"
        code, stdout, _ = run_cli(
            capsys, "run", "--trace", example_file, "--policy", "cma", "--out", str(out_csv)
        )
        assert code == 0
        assert "cost=10" in stdout
        assert out_csv.read_text().startswith("slot,")

    def test_opt_dp(self, example_file, capsys):
        code, stdout, _ = run_cli(capsys, "opt", "--trace", example_file, "--method", "dp")
        assert code == 0
        assert "cost=9" in stdout

    def test_opt_single_good(self, tmp_path, capsys):
        trace = make_trace(2, 1, 4, [(1, 0), (0, 1), (1, 0), (0, 1)])
        path = tmp_path / "alt.trace"
        write_trace(trace, path)
        code, stdout, _ = run_cli(capsys, "opt", "--trace", str(path), "--method", "single-good")
        assert code == 0
        assert "cost=7" in stdout

    def test_opt_single_good_rejects_multi_good(self, example_file, capsys):
        code, _, stderr = run_cli(capsys, "opt", "--trace", example_file, "--method", "single-good")
        assert code == 2
        assert "slot" in stderr

    def test_opt_certificate(self, example_file, capsys):
        code, stdout, _ = run_cli(capsys, "opt", "--trace", example_file, "--method", "certificate")
        assert code == 0
        assert "lower_bound=7" in stdout

    def test_dp_guard_maps_to_exit_2(self, tmp_path, capsys):
        trace = make_trace(2, 1, 20, [(0, 0)] * 20)
        path = tmp_path / "long.trace"
        write_trace(trace, path)
        code, _, stderr = run_cli(capsys, "opt", "--trace", str(path), "--method", "dp")
        assert code == 2
        assert "guard" in stderr


class TestRatioAndBounds:
    def test_ratio_row(self, example_file, capsys):
        code, stdout, _ = run_cli(capsys, "ratio", "--trace", example_file, "--policy", "cma")
        assert code == 0
        lines = stdout.strip().splitlines()
        assert lines[0] == "trace,policy,policy_cost,opt_method,opt_value,ratio"
        fields = lines[1].split(",")
        assert fields[1:5] == ["cma", "10", "dp", "9"]
        assert float(fields[5]) == pytest.approx(10 / 9)

    def test_verify_bounds_passes_on_example(self, example_file, capsys):
        code, stdout, _ = run_cli(capsys, "verify-bounds", "--trace", example_file)
        assert code == 0
        assert "all_ok=1" in stdout
        assert "certified_ratio=" in stdout
        header = stdout.splitlines()[0]
        assert header.startswith("interval,start,end,length,max_user,complete")

    def test_yao_table(self, capsys):
        code, stdout, _ = run_cli(
            capsys, "yao", "-N", "4", "-T", "2000", "--replications", "3", "--seed", "11"
        )
        assert code == 0
        tags = [line.split(",")[0] for line in stdout.strip().splitlines()[1:]]
        assert tags == [
            "opt-time-avg-max",
            "policy-time-avg-max",
            "empirical-ratio-floor",
            "analytic-ratio-floor",
            "opt-age-tv-to-geometric",
        ]
        values = {
            line.split(",")[0]: float(line.split(",")[4])
            for line in stdout.strip().splitlines()[1:]
        }
        assert all(v > 0 for v in values.values() if v == v)


class TestDeterminism:
    def test_gen_trace_is_byte_stable(self, tmp_path, capsys):
        paths = [tmp_path / "a.trace", tmp_path / "b.trace"]
        for p in paths:
            run_cli(
                capsys, "gen-trace", "--kind", "iid", "-N", "3", "-M", "2", "-T", "40",
                "--seed", "9", "--mobility", "walk", "--out", str(p),
            )
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_run_table_is_byte_stable(self, example_file, tmp_path, capsys):
        outs = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for p in outs:
            run_cli(capsys, "run", "--trace", example_file, "--policy", "random", "--seed", "3", "--out", str(p))
        assert outs[0].read_bytes() == outs[1].read_bytes()


def test_unknown_policy_rejected_by_parser(capsys):
    with pytest.raises(SystemExit):
        main(["run", "--trace", "x", "--policy", "bogus"])
