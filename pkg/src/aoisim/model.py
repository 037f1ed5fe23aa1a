"""Core domain types, age dynamics, and the slot-by-slot simulation engine.

Conventions used throughout the package:

* Users and cells are indexed from 0 internally.  The trace file format and
  all printed tables use 1-based ids.
* ``h[i]`` is the post-transmission age of user ``i``.  All ages start at 0
  (every user is treated as freshly served at a virtual slot 0), a success at
  slot ``t`` resets the age to 1, otherwise it increases by 1.
* Policies observe the pre-transmission ages ``h[i] + 1`` and never the
  current slot's channel states.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

GOOD = True
BAD = False


class SimulationError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(SimulationError):
    """Vector lengths inconsistent with the configuration."""


class InputError(SimulationError):
    """Malformed trace, configuration, or parameter."""


class ProtocolError(SimulationError):
    """A policy decision violated the scheduling constraints."""


class GuardError(InputError):
    """Instance exceeds the size guard of an exact method."""


class AnalysisError(SimulationError):
    """A run log does not satisfy the preconditions of an analysis step."""


@dataclass(frozen=True)
class SystemConfig:
    """Static parameters of one scheduling instance.

    ``tie_order`` is a permutation of user indices giving the fixed priority
    used for every tie-break; earlier position wins.  Defaults to identity.
    """

    num_users: int
    num_stations: int
    horizon: int
    tie_order: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.num_users < 1 or self.num_stations < 1 or self.horizon < 1:
            raise InputError("num_users, num_stations and horizon must be >= 1")
        if not self.tie_order:
            object.__setattr__(self, "tie_order", tuple(range(self.num_users)))
        else:
            object.__setattr__(self, "tie_order", tuple(self.tie_order))
        if sorted(self.tie_order) != list(range(self.num_users)):
            raise InputError(
                f"tie_order {self.tie_order} is not a permutation of 0..{self.num_users - 1}"
            )

    def tie_rank(self) -> tuple[int, ...]:
        """rank[u] = position of user u in the priority order (lower wins)."""
        rank = [0] * self.num_users
        for pos, user in enumerate(self.tie_order):
            rank[user] = pos
        return tuple(rank)


@dataclass(frozen=True)
class SlotInput:
    """Channel states (True = Good) and cell of every user for one slot."""

    channels: tuple[bool, ...]
    locations: tuple[int, ...]

    def validate(self, config: SystemConfig) -> None:
        n = config.num_users
        if len(self.channels) != n or len(self.locations) != n:
            raise DimensionError(
                f"slot input has lengths ({len(self.channels)}, {len(self.locations)}), expected {n}"
            )
        for loc in self.locations:
            if not 0 <= loc < config.num_stations:
                raise InputError(f"invalid cell id {loc}")


class Trace:
    """A full input sequence: per-slot channel states and user locations.

    Stored as dense arrays (``channels`` is a T x N boolean matrix,
    ``locations`` a T x N integer matrix) so large horizons stay cheap.
    """

    def __init__(self, config: SystemConfig, channels: np.ndarray, locations: np.ndarray):
        channels = np.asarray(channels, dtype=bool)
        locations = np.asarray(locations, dtype=np.int64)
        shape = (config.horizon, config.num_users)
        if channels.shape != shape or locations.shape != shape:
            raise DimensionError(
                f"trace arrays have shapes {channels.shape}, {locations.shape}, expected {shape}"
            )
        if locations.size and (locations.min() < 0 or locations.max() >= config.num_stations):
            raise InputError("trace contains an invalid cell id")
        self.config = config
        self.channels = channels
        self.locations = locations

    @classmethod
    def from_slots(cls, config: SystemConfig, slots: Sequence[SlotInput]) -> "Trace":
        if len(slots) != config.horizon:
            raise InputError(f"trace has {len(slots)} slots, expected {config.horizon}")
        for s in slots:
            s.validate(config)
        channels = np.array([s.channels for s in slots], dtype=bool)
        locations = np.array([s.locations for s in slots], dtype=np.int64)
        return cls(config, channels, locations)

    def slot(self, t: int) -> SlotInput:
        return SlotInput(tuple(bool(c) for c in self.channels[t]), tuple(int(x) for x in self.locations[t]))

    @property
    def slots(self) -> list[SlotInput]:
        return [self.slot(t) for t in range(self.config.horizon)]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Trace)
            and self.config == other.config
            and np.array_equal(self.channels, other.channels)
            and np.array_equal(self.locations, other.locations)
        )

    def digest(self) -> str:
        """Short content hash, stable across processes."""
        h = hashlib.sha256(serialize_trace(self).encode())
        return h.hexdigest()[:12]


# Decision: partial map cell id -> user index; absent cells idle.
Decision = dict


@dataclass(frozen=True)
class ObservableState:
    """What a causal policy sees before deciding slot ``slot`` (1-based).

    Contains no current-slot channel information.  ``past_decisions`` and
    ``past_successes`` cover slots 1..slot-1 (success ACKs arrive one slot
    delayed at the latest).
    """

    slot: int
    pre_ages: tuple[int, ...]
    locations: tuple[int, ...]
    past_decisions: Sequence[Decision]
    past_successes: Sequence[Sequence[bool]]


@dataclass
class RunLog:
    """Complete record of one simulation: inputs, decisions, ages, costs."""

    config: SystemConfig
    channels: np.ndarray  # (T, N) bool, the realized channel states
    locations: np.ndarray  # (T, N) int
    decisions: list[Decision]
    successes: np.ndarray  # (T, N) bool
    ages: np.ndarray  # (T, N) int, post-transmission
    slot_costs: np.ndarray  # (T,) int, max age per slot
    cumulative_cost: int
    average_age_cost: Fraction

    def realized_trace(self) -> Trace:
        """The trace this run actually experienced (replayable against OPT)."""
        return Trace(self.config, self.channels, self.locations)


def step_ages(prev: Sequence[int], successes: Sequence[bool]) -> tuple[int, ...]:
    """Advance the sawtooth one slot: reset to 1 on success, else +1."""
    if len(prev) != len(successes):
        raise DimensionError(
            f"age vector has length {len(prev)}, successes has length {len(successes)}"
        )
    return tuple(1 if s else a + 1 for a, s in zip(prev, successes))


def _validate_decision(decision: Decision, locations: Sequence[int], config: SystemConfig, t: int) -> None:
    for cell, user in decision.items():
        if not 0 <= cell < config.num_stations:
            raise ProtocolError(f"slot {t + 1}: decision names invalid cell {cell}")
        if not 0 <= user < config.num_users:
            raise ProtocolError(f"slot {t + 1}: decision names invalid user {user}")
        if locations[user] != cell:
            raise ProtocolError(
                f"slot {t + 1}, cell {cell}: scheduled user {user} is located in cell {locations[user]}"
            )


def run_simulation(config: SystemConfig, source, policy, seed: int = 0) -> RunLog:
    """Couple a policy with a trace or adaptive adversary for one full run.

    ``source`` is either a :class:`Trace` or an adaptive adversary exposing
    ``reset(config)`` and ``next_slot(t, partial_log)``.  The adversary
    commits each slot's channels and locations before the policy decides;
    the policy never observes the current channel states.

    Deterministic given (config, source, policy, seed).
    """
    T, N = config.horizon, config.num_users
    is_trace = isinstance(source, Trace)
    if is_trace:
        if source.config.horizon < T:
            raise InputError(
                f"trace horizon {source.config.horizon} shorter than configured horizon {T}"
            )

    channels = np.zeros((T, N), dtype=bool)
    locations = np.zeros((T, N), dtype=np.int64)
    successes = np.zeros((T, N), dtype=bool)
    ages = np.zeros((T, N), dtype=np.int64)
    slot_costs = np.zeros(T, dtype=np.int64)
    decisions: list[Decision] = []

    log = RunLog(config, channels, locations, decisions, successes, ages,
                 slot_costs, 0, Fraction(0))

    policy.reset(config, seed)
    if not is_trace:
        source.reset(config)

    h = np.zeros(N, dtype=np.int64)
    for t in range(T):
        if is_trace:
            ch = source.channels[t]
            loc = source.locations[t]
        else:
            slot_in = source.next_slot(t, log)
            slot_in.validate(config)
            ch = np.asarray(slot_in.channels, dtype=bool)
            loc = np.asarray(slot_in.locations, dtype=np.int64)
        channels[t] = ch
        locations[t] = loc

        pre = tuple(int(a) + 1 for a in h)
        obs = ObservableState(
            slot=t + 1,
            pre_ages=pre,
            locations=tuple(int(x) for x in loc),
            past_decisions=decisions,
            past_successes=successes[:t],
        )
        decision = dict(policy.decide(obs))
        _validate_decision(decision, loc, config, t)
        decisions.append(decision)

        succ = np.zeros(N, dtype=bool)
        for cell, user in decision.items():
            if ch[user]:
                succ[user] = True
        h = np.where(succ, 1, h + 1)
        successes[t] = succ
        ages[t] = h
        slot_costs[t] = h.max()

    log.cumulative_cost = int(slot_costs.sum())
    log.average_age_cost = Fraction(int(ages.sum()), T * N)
    return log


def cost_of_run(log: RunLog) -> int:
    """Cumulative max-age cost: sum over slots of the maximum age."""
    if len(log.slot_costs) == 0:
        raise InputError("empty run log")
    return int(log.slot_costs.sum())


def average_age_of_run(log: RunLog) -> Fraction:
    """Secondary metric: mean age over users and slots, as an exact rational."""
    if len(log.slot_costs) == 0:
        raise InputError("empty run log")
    T, N = log.ages.shape
    return Fraction(int(log.ages.sum()), T * N)


# ---------------------------------------------------------------------------
# Trace file format: one header line "N M T tie_order..." (tie order as
# 1-based user ids), then one line per slot with N channel flags (0=Bad,
# 1=Good) followed by N 1-based cell ids, whitespace separated.
# ---------------------------------------------------------------------------

def serialize_trace(trace: Trace) -> str:
    cfg = trace.config
    lines = [
        " ".join(
            [str(cfg.num_users), str(cfg.num_stations), str(cfg.horizon)]
            + [str(u + 1) for u in cfg.tie_order]
        )
    ]
    for t in range(cfg.horizon):
        flags = ["1" if c else "0" for c in trace.channels[t]]
        cells = [str(int(x) + 1) for x in trace.locations[t]]
        lines.append(" ".join(flags + cells))
    return "\n".join(lines) + "\n"


def write_trace(trace: Trace, path) -> None:
    with open(path, "w") as f:
        f.write(serialize_trace(trace))


def parse_trace(text: str) -> Trace:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InputError("empty trace file")
    header = lines[0].split()
    if len(header) < 3:
        raise InputError("trace header needs at least N M T")
    n, m, t = (int(x) for x in header[:3])
    tie = tuple(int(x) - 1 for x in header[3:]) if len(header) > 3 else ()
    config = SystemConfig(n, m, t, tie)
    if len(lines) - 1 < t:
        raise InputError(f"trace has {len(lines) - 1} slot lines, expected {t}")
    channels = np.zeros((t, n), dtype=bool)
    locations = np.zeros((t, n), dtype=np.int64)
    for i in range(t):
        parts = lines[1 + i].split()
        if len(parts) != 2 * n:
            raise InputError(f"slot line {i + 1} has {len(parts)} fields, expected {2 * n}")
        channels[i] = [int(x) != 0 for x in parts[:n]]
        locations[i] = [int(x) - 1 for x in parts[n:]]
    return Trace(config, channels, locations)


def read_trace(path) -> Trace:
    with open(path) as f:
        return parse_trace(f.read())


def write_runlog(log: RunLog, path) -> None:
    """Export a run as a CSV table: slot, per-cell schedule, successes, ages, cost."""
    import csv

    cfg = log.config
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        header = (
            ["slot"]
            + [f"cell{j + 1}_user" for j in range(cfg.num_stations)]
            + [f"success{i + 1}" for i in range(cfg.num_users)]
            + [f"age{i + 1}" for i in range(cfg.num_users)]
            + ["slot_cost"]
        )
        w.writerow(header)
        for t in range(cfg.horizon):
            dec = log.decisions[t]
            sched = [dec.get(j, -1) + 1 for j in range(cfg.num_stations)]  # 0 = idle
            row = (
                [t + 1]
                + sched
                + [int(x) for x in log.successes[t]]
                + [int(x) for x in log.ages[t]]
                + [int(log.slot_costs[t])]
            )
            w.writerow(row)
