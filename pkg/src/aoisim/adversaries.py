"""Trace generation: stochastic sources, adaptive adversaries, and mobility.

Stochastic generators are pure functions of their seed.  Adaptive adversaries
are deterministic functions of the interaction history: they commit each
slot's channels and locations *before* observing the current decision, so
recording the realized trace and replaying it reproduces the run exactly.
"""

from __future__ import annotations

from typing import Iterator, Optional, Sequence

import numpy as np

from .model import InputError, RunLog, SlotInput, SystemConfig, Trace

__all__ = [
    "yao_good_sequence",
    "gen_yao_trace",
    "gen_iid_trace",
    "mobility_static",
    "mobility_random_walk",
    "BlockingAdversary",
    "RelocatingAdversary",
    "make_adversary",
    "ADVERSARY_NAMES",
]


def yao_good_sequence(num_users: int, horizon: int, rng: np.random.Generator) -> np.ndarray:
    """Per-slot index of the single Good-channel user, uniform i.i.d."""
    return rng.integers(0, num_users, size=horizon, dtype=np.int64)


def gen_yao_trace(config: SystemConfig, seed: int) -> Trace:
    """Single-cell trace with exactly one uniformly random Good user per slot."""
    if config.num_stations != 1:
        raise InputError("the single-Good construction requires M = 1")
    rng = np.random.default_rng(seed)
    good = yao_good_sequence(config.num_users, config.horizon, rng)
    channels = np.zeros((config.horizon, config.num_users), dtype=bool)
    channels[np.arange(config.horizon), good] = True
    locations = np.zeros((config.horizon, config.num_users), dtype=np.int64)
    return Trace(config, channels, locations)


def mobility_static(config: SystemConfig, initial: Optional[Sequence[int]] = None) -> Iterator[tuple]:
    """Every user stays in its initial cell (default: all in cell 0)."""
    loc = tuple(initial) if initial is not None else (0,) * config.num_users
    if len(loc) != config.num_users:
        raise InputError("initial placement length mismatch")
    while True:
        yield loc


def mobility_random_walk(config: SystemConfig, seed: int) -> Iterator[tuple]:
    """Each user jumps to an independent uniformly random cell every slot.

    The model allows arbitrary jumps, so a uniform re-draw is admissible.
    """
    rng = np.random.default_rng(seed)
    while True:
        yield tuple(int(x) for x in rng.integers(0, config.num_stations, size=config.num_users))


def gen_iid_trace(
    config: SystemConfig,
    per_user_good_prob: Sequence[float],
    seed: int,
    mobility: Optional[Iterator[tuple]] = None,
) -> Trace:
    """Channels i.i.d. Bernoulli per user per slot; locations from ``mobility``."""
    probs = np.asarray(per_user_good_prob, dtype=float)
    if probs.shape != (config.num_users,):
        raise InputError(f"need {config.num_users} probabilities, got shape {probs.shape}")
    if (probs < 0).any() or (probs > 1).any():
        raise InputError("success probabilities must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    channels = rng.random((config.horizon, config.num_users)) < probs
    if mobility is None:
        mobility = mobility_static(config)
    locations = np.array([next(mobility) for _ in range(config.horizon)], dtype=np.int64)
    return Trace(config, channels, locations)


class BlockingAdversary:
    """Predicts persistence: blocks whoever was scheduled last slot.

    Every user scheduled in the previous slot gets a Bad channel; exactly one
    other user gets a Good channel, chosen round-robin in priority order
    (cold start: the first user in the tie order).  Users are static in their
    initial cells (default all in cell 0).
    """

    name = "blocking"

    def __init__(self, config: SystemConfig, initial: Optional[Sequence[int]] = None):
        self.config = config
        if initial is not None and len(initial) != config.num_users:
            raise InputError("initial placement length mismatch")
        self._initial = tuple(initial) if initial is not None else (0,) * config.num_users
        self.reset(config)

    def reset(self, config: SystemConfig) -> None:
        self._order = list(config.tie_order)
        self._next = 0  # round-robin position in the priority order

    def _pick_good(self, blocked: set) -> int:
        n = self.config.num_users
        for off in range(n):
            u = self._order[(self._next + off) % n]
            if u not in blocked:
                self._next = (self._next + off + 1) % n
                return u
        return -1  # every user blocked (N = 1 edge case): all channels Bad

    def _locations(self, t: int, past: RunLog) -> tuple:
        return self._initial

    def next_slot(self, t: int, past: RunLog) -> SlotInput:
        n = self.config.num_users
        blocked = set(past.decisions[t - 1].values()) if t > 0 else set()
        good = self._pick_good(blocked)
        channels = tuple(i == good for i in range(n))
        return SlotInput(channels, self._locations(t, past))


class RelocatingAdversary(BlockingAdversary):
    """Blocking channels plus mobility pressure.

    Additionally moves the globally oldest user (fixed-order tie-break) into
    the currently most-populated cell each slot, forcing contention.
    """

    name = "relocating"

    def __init__(self, config: SystemConfig, initial: Optional[Sequence[int]] = None):
        if initial is None:
            # spread users over cells so there is something to relocate into
            initial = tuple(i % config.num_stations for i in range(config.num_users))
        super().__init__(config, initial)

    def reset(self, config: SystemConfig) -> None:
        super().reset(config)
        self._rank = config.tie_rank()
        self._loc = list(self._initial) if hasattr(self, "_initial") else None

    def _locations(self, t: int, past: RunLog) -> tuple:
        if t == 0:
            self._loc = list(self._initial)
            return tuple(self._loc)
        ages = past.ages[t - 1]
        oldest = max(range(self.config.num_users), key=lambda u: (int(ages[u]), -self._rank[u]))
        counts = [0] * self.config.num_stations
        for c in self._loc:
            counts[c] += 1
        target = max(range(self.config.num_stations), key=lambda j: (counts[j], -j))
        self._loc[oldest] = target
        return tuple(self._loc)


_ADVERSARIES = {
    "blocking": BlockingAdversary,
    "relocating": RelocatingAdversary,
}

ADVERSARY_NAMES = tuple(_ADVERSARIES)


def make_adversary(name: str, config: SystemConfig):
    try:
        return _ADVERSARIES[name](config)
    except KeyError:
        raise InputError(
            f"unknown adversary {name!r}; choose from {', '.join(ADVERSARY_NAMES)}"
        )
