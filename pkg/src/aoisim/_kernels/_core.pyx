# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled single-cell simulation kernels (hot inner loops).

Contracts match ``_pure.py`` exactly; parity is enforced by tests.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def yao_opt_stats(cnp.int64_t[::1] good, int num_users, int hist_cap):
    """Offline optimum on a single-Good sequence: serve the Good user.

    Returns (cost_sum, hist) with hist[k] counting user-slots at age k,
    ages >= hist_cap pooled into the last bucket.
    """
    cdef Py_ssize_t horizon = good.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] h_arr = np.zeros(num_users, dtype=np.int64)
    cdef cnp.int64_t[::1] h = h_arr
    cdef cnp.ndarray[cnp.int64_t, ndim=1] hist_arr = np.zeros(hist_cap + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] hist = hist_arr
    cdef cnp.int64_t cost = 0
    cdef cnp.int64_t cur_max, a
    cdef Py_ssize_t t
    cdef int u

    for t in range(horizon):
        cur_max = 0
        for u in range(num_users):
            if u == good[t]:
                h[u] = 1
            else:
                h[u] += 1
            a = h[u]
            if a > cur_max:
                cur_max = a
            if a > hist_cap:
                a = hist_cap
            hist[a] += 1
        cost += cur_max
    return int(cost), hist_arr


def yao_cma_stats(cnp.int64_t[::1] good, int num_users, cnp.int64_t[::1] tie_rank):
    """Single-cell max-age policy on a single-Good sequence.

    Schedules the maximum pre-age user (ties by lower tie_rank), success iff
    it equals good[t].  Returns the cumulative max-age cost.
    """
    cdef Py_ssize_t horizon = good.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] h_arr = np.zeros(num_users, dtype=np.int64)
    cdef cnp.int64_t[::1] h = h_arr
    cdef cnp.int64_t cost = 0
    cdef cnp.int64_t cur_max
    cdef Py_ssize_t t
    cdef int u, best

    for t in range(horizon):
        best = 0
        for u in range(1, num_users):
            if h[u] > h[best] or (h[u] == h[best] and tie_rank[u] < tie_rank[best]):
                best = u
        cur_max = 0
        for u in range(num_users):
            if u == best and best == good[t]:
                h[u] = 1
            else:
                h[u] += 1
            if h[u] > cur_max:
                cur_max = h[u]
        cost += cur_max
    return int(cost)
