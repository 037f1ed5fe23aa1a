"""Trace generators, adaptive adversaries, and mobility processes."""

import numpy as np
import pytest

from aoisim import (
    BlockingAdversary,
    InputError,
    RelocatingAdversary,
    SystemConfig,
    gen_iid_trace,
    gen_yao_trace,
    make_policy,
    mobility_random_walk,
    mobility_static,
    run_simulation,
)
from aoisim.adversaries import ADVERSARY_NAMES, make_adversary


class TestSingleGoodGenerator:
    def test_exactly_one_good_per_slot(self):
        trace = gen_yao_trace(SystemConfig(4, 1, 200), seed=3)
        assert (trace.channels.sum(axis=1) == 1).all()
        assert (trace.locations == 0).all()

    def test_single_user_degenerate(self):
        trace = gen_yao_trace(SystemConfig(1, 1, 10), seed=0)
        assert trace.channels.all()

    def test_multi_cell_rejected(self):
        with pytest.raises(InputError):
            gen_yao_trace(SystemConfig(2, 2, 10), seed=0)

    def test_uniform_good_frequency(self):
        trace = gen_yao_trace(SystemConfig(4, 1, 100_000), seed=42)
        freq = trace.channels.mean(axis=0)
        assert np.allclose(freq, 0.25, atol=0.01)

    def test_seed_determinism(self):
        cfg = SystemConfig(3, 1, 50)
        assert gen_yao_trace(cfg, seed=9) == gen_yao_trace(cfg, seed=9)


class TestIidGenerator:
    def test_degenerate_probabilities(self):
        cfg = SystemConfig(2, 1, 20)
        assert gen_iid_trace(cfg, [1.0, 1.0], seed=0).channels.all()
        assert not gen_iid_trace(cfg, [0.0, 0.0], seed=0).channels.any()

    def test_probability_range_checked(self):
        cfg = SystemConfig(2, 1, 5)
        with pytest.raises(InputError):
            gen_iid_trace(cfg, [0.5, 1.5], seed=0)
        with pytest.raises(InputError):
            gen_iid_trace(cfg, [0.5], seed=0)

    def test_joint_frequency(self):
        cfg = SystemConfig(2, 1, 100_000)
        trace = gen_iid_trace(cfg, [0.5, 0.5], seed=7)
        both = (trace.channels[:, 0] & trace.channels[:, 1]).mean()
        assert abs(both - 0.25) < 0.01


class TestMobility:
    def test_static_keeps_placement(self):
        cfg = SystemConfig(3, 2, 5)
        gen = mobility_static(cfg, initial=(0, 1, 1))
        assert [next(gen) for _ in range(3)] == [(0, 1, 1)] * 3

    def test_static_length_checked(self):
        with pytest.raises(InputError):
            next(mobility_static(SystemConfig(3, 2, 5), initial=(0, 1)))

    def test_single_cell_constant(self):
        cfg = SystemConfig(2, 1, 5)
        assert next(mobility_random_walk(cfg, seed=1)) == (0, 0)

    def test_random_walk_occupancy(self):
        cfg = SystemConfig(2, 3, 1)
        gen = mobility_random_walk(cfg, seed=5)
        locs = np.array([next(gen) for _ in range(60_000)])
        for cell in range(3):
            assert abs((locs == cell).mean() - 1 / 3) < 0.01


class TestBlockingAdversary:
    def test_cold_start_gives_priority_user_the_channel(self):
        cfg = SystemConfig(3, 1, 1, tie_order=(1, 2, 0))
        log = run_simulation(cfg, BlockingAdversary(cfg), make_policy("cma"))
        assert log.channels[0].tolist() == [False, True, False]

    def test_scheduled_user_blocked_next_slot(self):
        cfg = SystemConfig(3, 1, 30)
        log = run_simulation(cfg, BlockingAdversary(cfg), make_policy("cma"))
        for t in range(1, 30):
            for user in log.decisions[t - 1].values():
                assert not log.channels[t][user]

    def test_realized_trace_replays_identically(self):
        cfg = SystemConfig(4, 1, 40)
        live = run_simulation(cfg, BlockingAdversary(cfg), make_policy("cma"))
        replay = run_simulation(cfg, live.realized_trace(), make_policy("cma"))
        assert live.decisions == replay.decisions
        assert live.cumulative_cost == replay.cumulative_cost

    def test_starves_max_age_policy_throughput(self):
        # the oldest user is persistently scheduled, hence persistently
        # blocked: per-slot cost grows without bound
        cfg = SystemConfig(2, 1, 50)
        log = run_simulation(cfg, BlockingAdversary(cfg), make_policy("cma"))
        assert log.slot_costs[-1] >= 25


class TestRelocatingAdversary:
    def test_initial_spread(self):
        cfg = SystemConfig(5, 3, 2)
        log = run_simulation(cfg, RelocatingAdversary(cfg), make_policy("cma"))
        assert log.locations[0].tolist() == [0, 1, 2, 0, 1]

    def test_oldest_user_moves_to_crowd(self):
        cfg = SystemConfig(5, 3, 20)
        log = run_simulation(cfg, RelocatingAdversary(cfg), make_policy("cma"))
        rank = cfg.tie_rank()
        for t in range(1, 20):
            ages = log.ages[t - 1]
            oldest = max(range(5), key=lambda u: (int(ages[u]), -rank[u]))
            prev = log.locations[t - 1].tolist()
            counts = [prev.count(c) for c in range(3)]
            target = max(range(3), key=lambda j: (counts[j], -j))
            assert log.locations[t][oldest] == target

    def test_realized_trace_replays_identically(self):
        cfg = SystemConfig(4, 2, 40)
        live = run_simulation(cfg, RelocatingAdversary(cfg), make_policy("cma"))
        replay = run_simulation(cfg, live.realized_trace(), make_policy("cma"))
        assert live.decisions == replay.decisions
        assert live.cumulative_cost == replay.cumulative_cost


def test_make_adversary_names():
    assert set(ADVERSARY_NAMES) == {"blocking", "relocating"}
    with pytest.raises(InputError):
        make_adversary("nope", SystemConfig(2, 1, 5))
