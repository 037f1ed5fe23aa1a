"""Backend parity: the compiled kernels and the pure-Python fallback must be
bit-identical, and both must agree with the generic simulation engine."""

import os
import subprocess
import sys

import numpy as np

import aoisim
from aoisim import SystemConfig, Trace, make_policy, opt_single_good, run_simulation
from aoisim._kernels import BACKEND, yao_cma_stats, yao_opt_stats
from aoisim._kernels import _pure
from aoisim.adversaries import yao_good_sequence


def single_good_trace(good, num_users):
    horizon = len(good)
    channels = np.zeros((horizon, num_users), dtype=bool)
    channels[np.arange(horizon), good] = True
    locations = np.zeros((horizon, num_users), dtype=np.int64)
    return Trace(SystemConfig(num_users, 1, horizon), channels, locations)


def test_backend_is_reported():
    assert BACKEND in ("pure", "compiled")
    assert aoisim.KERNEL_BACKEND == BACKEND


def test_opt_kernel_matches_pure_backend():
    rng = np.random.default_rng(0)
    for n in (1, 2, 5, 9):
        good = yao_good_sequence(n, 3000, rng)
        cap = 32 * n
        cost_a, hist_a = yao_opt_stats(good, n, cap)
        cost_b, hist_b = _pure.yao_opt_stats(good, n, cap)
        assert cost_a == cost_b
        assert np.array_equal(hist_a, hist_b)


def test_cma_kernel_matches_pure_backend():
    rng = np.random.default_rng(1)
    for n in (1, 2, 5, 9):
        good = yao_good_sequence(n, 3000, rng)
        tie = np.arange(n, dtype=np.int64)
        assert yao_cma_stats(good, n, tie) == _pure.yao_cma_stats(good, n, tie)


def test_opt_kernel_matches_generic_oracle():
    rng = np.random.default_rng(2)
    for n in (2, 4):
        good = yao_good_sequence(n, 200, rng)
        trace = single_good_trace(good, n)
        cost, hist = yao_opt_stats(good, n, 64 * n)
        assert cost == opt_single_good(trace).cost
        assert hist[1:].sum() == 200 * n  # one age sample per user per slot


def test_cma_kernel_matches_generic_engine():
    rng = np.random.default_rng(3)
    for n in (2, 4):
        good = yao_good_sequence(n, 200, rng)
        trace = single_good_trace(good, n)
        log = run_simulation(trace.config, trace, make_policy("cma"))
        assert yao_cma_stats(good, n, np.arange(n, dtype=np.int64)) == log.cumulative_cost


def test_histogram_tail_pooling():
    # 1 user, never served after slot 1: ages 1..T, cap pools everything >= cap
    good = np.zeros(10, dtype=np.int64)
    good[1:] = 1  # user 1 of 2 is good after slot 1; user 0 ages forever
    _, hist = yao_opt_stats(good, 2, 4)
    assert hist[4] == sum(1 for age in range(1, 11) if age >= 4)


def test_environment_variable_forces_pure_backend():
    env = dict(os.environ, AOISIM_PURE_KERNELS="1")
    out = subprocess.run(
        [sys.executable, "-c", "import aoisim; print(aoisim.KERNEL_BACKEND)"],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    assert out.stdout.strip() == "pure"
