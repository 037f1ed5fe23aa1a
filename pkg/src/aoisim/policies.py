"""Causal (channel-blind) scheduling policies.

Every policy implements ``reset(config, seed)`` followed by one
``decide(state) -> {cell: user}`` call per slot.  Decisions may only depend
on the observable state: pre-transmission ages, current locations, and past
decisions/ACKs.  Stateful baselines keep their state on the instance so runs
replay exactly.
"""

from __future__ import annotations

import random
from typing import Dict

from .model import InputError, ObservableState, SystemConfig

__all__ = [
    "ObservableState",
    "CmaPolicy",
    "RoundRobinPolicy",
    "RandomPolicy",
    "GreedyIndexPolicy",
    "POLICY_NAMES",
    "make_policy",
]


def _users_by_cell(state: ObservableState) -> Dict[int, list]:
    cells: Dict[int, list] = {}
    for user, cell in enumerate(state.locations):
        cells.setdefault(cell, []).append(user)
    return cells


class CmaPolicy:
    """Cellular Max-Age: each cell schedules its highest pre-age user.

    Fully distributed; ties break by the fixed priority order.
    """

    name = "cma"

    def reset(self, config: SystemConfig, seed: int = 0) -> None:
        self._rank = config.tie_rank()

    def decide(self, state: ObservableState) -> Dict[int, int]:
        decision = {}
        for cell, users in _users_by_cell(state).items():
            decision[cell] = max(users, key=lambda u: (state.pre_ages[u], -self._rank[u]))
        return decision


class RoundRobinPolicy:
    """Per-cell pointer cycling over user indices, skipping absent users."""

    name = "round-robin"

    def reset(self, config: SystemConfig, seed: int = 0) -> None:
        self._n = config.num_users
        self._pointer: Dict[int, int] = {}

    def decide(self, state: ObservableState) -> Dict[int, int]:
        decision = {}
        for cell, users in _users_by_cell(state).items():
            present = set(users)
            p = self._pointer.get(cell, 0)
            for off in range(self._n):
                u = (p + off) % self._n
                if u in present:
                    decision[cell] = u
                    self._pointer[cell] = (u + 1) % self._n
                    break
        return decision


class RandomPolicy:
    """Uniform choice among users present in each cell, driven by the run seed."""

    name = "random"

    def reset(self, config: SystemConfig, seed: int = 0) -> None:
        self._rng = random.Random(seed)

    def decide(self, state: ObservableState) -> Dict[int, int]:
        decision = {}
        cells = _users_by_cell(state)
        for cell in sorted(cells):
            users = cells[cell]
            decision[cell] = users[0] if len(users) == 1 else self._rng.choice(users)
        return decision


class GreedyIndexPolicy:
    """Always schedules the present user of highest fixed priority."""

    name = "greedy-index"

    def reset(self, config: SystemConfig, seed: int = 0) -> None:
        self._rank = config.tie_rank()

    def decide(self, state: ObservableState) -> Dict[int, int]:
        decision = {}
        for cell, users in _users_by_cell(state).items():
            decision[cell] = min(users, key=lambda u: self._rank[u])
        return decision


_POLICIES = {
    "cma": CmaPolicy,
    "round-robin": RoundRobinPolicy,
    "random": RandomPolicy,
    "greedy-index": GreedyIndexPolicy,
}

POLICY_NAMES = tuple(_POLICIES)


def make_policy(name: str):
    try:
        return _POLICIES[name]()
    except KeyError:
        raise InputError(f"unknown policy {name!r}; choose from {', '.join(POLICY_NAMES)}")
