"""Shared fixtures and independent reference implementations.

``brute_force_opt`` enumerates every per-slot scheduling choice directly
(including dominated ones) with its own age arithmetic, so it shares no code
with the dynamic-programming oracle it is used to check.
"""

from itertools import product

import numpy as np
import pytest

from aoisim import SystemConfig, Trace


def make_trace(num_users, num_stations, horizon, channel_rows, location_rows=None, tie_order=()):
    """Build a trace from per-slot tuples; locations default to cell 0."""
    config = SystemConfig(num_users, num_stations, horizon, tie_order)
    channels = np.array(channel_rows, dtype=bool)
    if location_rows is None:
        locations = np.zeros((horizon, num_users), dtype=np.int64)
    else:
        locations = np.array(location_rows, dtype=np.int64)
    return Trace(config, channels, locations)


@pytest.fixture
def example_trace():
    """N=2, M=1, T=4 with channels (B,G),(G,G),(B,B),(G,B).

    Known values: max-age policy cost 10 with slot costs (1,2,3,4); offline
    optimum 9 (serve user 2 at slots 1 and 2, user 1 at slot 4).
    """
    return make_trace(2, 1, 4, [(0, 1), (1, 1), (0, 0), (1, 0)])


def brute_force_opt(trace):
    """Minimum cumulative max-age cost by exhaustive enumeration.

    Per slot, each cell may idle or target any user located there (even on a
    Bad channel).  Exponential; only for tiny instances.
    """
    cfg = trace.config
    best = [None]

    def rec(t, ages, cost):
        if best[0] is not None and cost >= best[0]:
            return
        if t == cfg.horizon:
            best[0] = cost
            return
        per_cell = []
        for cell in range(cfg.num_stations):
            options = [None] + [
                u for u in range(cfg.num_users) if trace.locations[t][u] == cell
            ]
            per_cell.append(options)
        for combo in product(*per_cell):
            new_ages = [a + 1 for a in ages]
            for u in combo:
                if u is not None and trace.channels[t][u]:
                    new_ages[u] = 1
            rec(t + 1, tuple(new_ages), cost + max(new_ages))

    rec(0, (0,) * cfg.num_users, 0)
    return best[0]


def random_trace(num_users, num_stations, horizon, seed):
    """Arbitrary i.i.d. channels (p=0.5) with uniformly random locations."""
    rng = np.random.default_rng(seed)
    config = SystemConfig(num_users, num_stations, horizon)
    channels = rng.random((horizon, num_users)) < 0.5
    locations = rng.integers(0, num_stations, size=(horizon, num_users), dtype=np.int64)
    return Trace(config, channels, locations)
