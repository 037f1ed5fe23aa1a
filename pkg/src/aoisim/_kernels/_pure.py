"""Pure-Python/numpy fallback for the hot single-cell simulation kernels.

Same contracts as the compiled versions in ``_core.pyx``.  The offline
kernel is fully vectorized; the max-age policy kernel is inherently
sequential and runs as a plain loop, so prefer the compiled backend for
long horizons.
"""

from __future__ import annotations

import numpy as np


def yao_opt_stats(good: np.ndarray, num_users: int, hist_cap: int):
    """Offline optimum on a single-Good sequence: serve the Good user.

    ``good[t]`` is the index of the only Good-channel user at slot t.
    Returns ``(cost_sum, hist)`` where ``cost_sum`` is the cumulative
    max-age cost and ``hist[k]`` counts user-slots with age k (ages >=
    ``hist_cap`` pool into the last bucket; index 0 unused).
    """
    good = np.asarray(good, dtype=np.int64)
    horizon = good.shape[0]
    slots = np.arange(1, horizon + 1, dtype=np.int64)
    running_max = np.zeros(horizon, dtype=np.int64)
    hist = np.zeros(hist_cap + 1, dtype=np.int64)
    for user in range(num_users):
        last = np.maximum.accumulate(np.where(good == user, slots, 0))
        ages = np.where(last > 0, slots - last + 1, slots)
        np.maximum(running_max, ages, out=running_max)
        hist += np.bincount(np.minimum(ages, hist_cap), minlength=hist_cap + 1)
    return int(running_max.sum()), hist


def yao_cma_stats(good: np.ndarray, num_users: int, tie_rank) -> int:
    """Single-cell max-age policy on a single-Good sequence.

    Schedules the user with maximum pre-transmission age (ties break by the
    lower ``tie_rank``); the transmission succeeds iff that user is
    ``good[t]``.  Returns the cumulative max-age cost.
    """
    good = np.asarray(good, dtype=np.int64)
    rank = list(tie_rank)
    h = [0] * num_users
    cost = 0
    for g in good:
        best = 0
        for u in range(1, num_users):
            if h[u] > h[best] or (h[u] == h[best] and rank[u] < rank[best]):
                best = u
        for u in range(num_users):
            h[u] += 1
        if best == g:
            h[best] = 1
        cost += max(h)
    return cost
