"""Offline optimal cost: exact DP, the single-Good fast path, and the
super-interval lower-bound certificate.

The DP explores age vectors forward in time, keeping only reachable states.
Scheduling a Bad-channel user is pruned: it is pointwise dominated by
idling, so pruning loses no optimality.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .model import Decision, GuardError, InputError, RunLog, SystemConfig, Trace, run_simulation

if TYPE_CHECKING:
    from .analysis import SuperInterval

__all__ = [
    "OptResult",
    "opt_exact_dp",
    "opt_single_good",
    "opt_lower_bound_superintervals",
    "replay_schedule",
    "DEFAULT_MAX_USERS",
    "DEFAULT_MAX_HORIZON",
]

DEFAULT_MAX_USERS = 5
DEFAULT_MAX_HORIZON = 14


@dataclass
class OptResult:
    cost: int
    schedule: list  # one Decision per slot
    states_explored: int


class _FixedSchedule:
    """Policy wrapper replaying a precomputed per-slot decision sequence."""

    def __init__(self, schedule: Sequence[Decision]):
        self._schedule = schedule

    def reset(self, config: SystemConfig, seed: int = 0) -> None:
        self._t = 0

    def decide(self, state) -> Decision:
        d = self._schedule[self._t]
        self._t += 1
        return d


def replay_schedule(trace: Trace, schedule: Sequence[Decision]) -> RunLog:
    """Run a fixed decision sequence through the simulation engine."""
    return run_simulation(trace.config, trace, _FixedSchedule(schedule))


def _slot_actions(config: SystemConfig, channels, locations) -> list:
    """All undominated actions for one slot: per non-empty cell, schedule one
    Good user present there or idle."""
    per_cell = []
    for cell in range(config.num_stations):
        options = [None] + [
            u for u in range(config.num_users) if locations[u] == cell and channels[u]
        ]
        per_cell.append(options)
    actions = []
    for combo in product(*per_cell):
        actions.append({cell: u for cell, u in enumerate(combo) if u is not None})
    return actions


def opt_exact_dp(
    trace: Trace,
    max_users: int = DEFAULT_MAX_USERS,
    max_horizon: int = DEFAULT_MAX_HORIZON,
) -> OptResult:
    """Exact minimum cumulative max-age cost over all offline schedules.

    State space is exponential in N, so instances are guarded (defaults
    N <= 5, T <= 14) and the guard fails loudly.
    """
    cfg = trace.config
    if cfg.num_users > max_users or cfg.horizon > max_horizon:
        raise GuardError(
            f"instance (N={cfg.num_users}, T={cfg.horizon}) exceeds DP guard "
            f"(N <= {max_users}, T <= {max_horizon})"
        )
    cap = cfg.horizon + 1

    start = (0,) * cfg.num_users
    # layer: ages tuple -> (cost so far, predecessor ages, action taken)
    layer = {start: (0, None, None)}
    layers = [layer]
    states_explored = 0
    for t in range(cfg.horizon):
        actions = _slot_actions(cfg, trace.channels[t], trace.locations[t])
        nxt = {}
        for ages, (cost, _, _) in layer.items():
            grown = tuple(min(a + 1, cap) for a in ages)
            for action in actions:
                if action:
                    new_ages = list(grown)
                    for user in action.values():
                        new_ages[user] = 1
                    new_ages = tuple(new_ages)
                else:
                    new_ages = grown
                c = cost + max(new_ages)
                best = nxt.get(new_ages)
                if best is None or c < best[0]:
                    nxt[new_ages] = (c, ages, action)
        layer = nxt
        layers.append(layer)
        states_explored += len(layer)

    final_ages = min(layer, key=lambda a: layer[a][0])
    cost = layer[final_ages][0]
    schedule = []
    ages = final_ages
    for t in range(cfg.horizon, 0, -1):
        _, prev, action = layers[t][ages]
        schedule.append(action)
        ages = prev
    schedule.reverse()
    return OptResult(cost=cost, schedule=schedule, states_explored=states_explored)


def opt_single_good(trace: Trace) -> OptResult:
    """O(NT) optimum for traces with at most one Good channel per slot.

    Serving the only resettable user pointwise dominates every alternative,
    so the greedy schedule is exactly optimal here.
    """
    cfg = trace.config
    good_count = trace.channels.sum(axis=1)
    bad_slots = np.nonzero(good_count > 1)[0]
    if bad_slots.size:
        raise InputError(
            f"slot {int(bad_slots[0]) + 1} has {int(good_count[bad_slots[0]])} Good channels; "
            "the single-Good oracle requires at most one per slot"
        )
    h = np.zeros(cfg.num_users, dtype=np.int64)
    cost = 0
    schedule: list[Decision] = []
    for t in range(cfg.horizon):
        h += 1
        if good_count[t]:
            user = int(np.nonzero(trace.channels[t])[0][0])
            h[user] = 1
            schedule.append({int(trace.locations[t][user]): user})
        else:
            schedule.append({})
        cost += int(h.max())
    return OptResult(cost=cost, schedule=schedule, states_explored=0)


def _check_contiguous(intervals: Sequence["SuperInterval"]) -> None:
    expected_start = 1
    for iv in intervals:
        if iv.start != expected_start or iv.end < iv.start:
            raise InputError(
                f"super-intervals are not contiguous/disjoint at interval {iv.index}"
            )
        expected_start = iv.end + 1


def opt_lower_bound_superintervals(
    intervals: Sequence["SuperInterval"],
    variant: str = "adjusted",
    include_trailing: bool | None = None,
) -> int:
    """Certified lower bound on OPT's cost from a max-age-policy decomposition.

    Each interval's owner was scheduled every slot and failed on all but
    (possibly) the final slot, so its channel was Bad on those slots and no
    offline schedule can reset it there either; its age under OPT therefore
    grows through the interval, which bounds OPT's per-slot cost from below.

    ``variant="adjusted"`` (default) accounts for two boundary effects the
    nominal per-interval formula (Delta^2 + 3*Delta)/2 ignores:

    * the owner of the interval starting at slot 1 enters with age 0, not 1;
    * on a complete interval's final slot the owner's channel is Good, so
      OPT may reset it there and only the trivial cost of 1 can be claimed.

    The adjusted bound is exhaustively validated against the exact DP (it is
    sound with the trailing interval included, hence the default); the
    nominal formula over-counts on short-interval runs and is kept only for
    comparison, with the trailing term off by default.
    """
    if variant not in ("adjusted", "nominal"):
        raise InputError(f"unknown certificate variant {variant!r}")
    if include_trailing is None:
        include_trailing = variant == "adjusted"
    _check_contiguous(intervals)

    total = 0
    for iv in intervals:
        d = iv.length
        if variant == "nominal":
            if iv.complete or include_trailing:
                total += (d * d + 3 * d) // 2
            continue
        entry = 0 if iv.start == 1 else 1  # OPT age of the owner entering the interval
        if iv.complete:
            # slots 1..d-1: owner unresettable, age >= entry + k; final slot: >= 1
            total += sum(entry + k for k in range(1, d)) + 1
        elif include_trailing:
            total += sum(entry + k for k in range(1, d + 1))
    return total
