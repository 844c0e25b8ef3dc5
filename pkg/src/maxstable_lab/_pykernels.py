"""Pure-Python (numpy) implementations of the hot kernels.

These must agree bit for bit with ``_ckernels.pyx``: same counters, same
uniform construction, same left-bisection on the same tables.
"""

import numpy as np

from .randkit import RECORD_SHIFT, hash_uniforms

BACKEND = "python"


def renewal_visits(k0, k1, cdf, cw, n, count, first_record):
    """Visit times to state 0 of ``count`` trajectories drawn from ``mu_n``.

    Record ``r = first_record + j`` uses counter ``(r << 32) | m``: draw 0
    picks the starting state from the cumulative weights ``cw[0..n]``, draw 1
    the conditioned first return when the start is 0, and draws ``m >= 2``
    the subsequent gaps.  Returns ``(initial_states, offsets, times)`` in CSR
    layout with times increasing within each record.
    """
    n = int(n)
    count = int(count)
    table = np.asarray(cdf[: n + 1], dtype=np.float64)
    cw = np.asarray(cw[: n + 1], dtype=np.float64)
    base = (np.arange(count, dtype=np.uint64) + np.uint64(first_record)) << np.uint64(RECORD_SHIFT)

    u0 = hash_uniforms(k0, k1, base)
    states = np.searchsorted(cw, u0 * cw[n], side="left").astype(np.int64)
    t = states.copy()
    at_zero = np.flatnonzero(states == 0)
    if at_zero.size:
        u1 = hash_uniforms(k0, k1, base[at_zero] | np.uint64(1))
        t[at_zero] = np.searchsorted(table, u1 * table[n], side="left")

    recs = [np.arange(count, dtype=np.int64)]
    times = [t.copy()]
    active = np.arange(count, dtype=np.int64)
    current = t
    m = 2
    while active.size:
        u = hash_uniforms(k0, k1, base[active] | np.uint64(m))
        nxt = current + np.searchsorted(table, u, side="left")
        keep = nxt <= n
        active = active[keep]
        current = nxt[keep]
        recs.append(active)
        times.append(current)
        m += 1

    recs = np.concatenate(recs)
    times = np.concatenate(times)
    order = np.argsort(recs, kind="stable")
    offsets = np.zeros(count + 1, dtype=np.int64)
    np.cumsum(np.bincount(recs, minlength=count), out=offsets[1:])
    return states, offsets, times[order]


def partial_maxima(k0, k1, cdf, cw, n, weights, grid_idx):
    """Running maxima of ``|X_k|`` at ``grid_idx`` for one series path.

    ``X_k = sum_j weights[j] * 1{k visited by record j}`` with record ``j``
    drawn as in :func:`renewal_visits` (``first_record = 0``).  Contributions
    to one time are added in record order, matching the compiled kernel.
    """
    n = int(n)
    weights = np.asarray(weights, dtype=np.float64)
    _, offsets, times = renewal_visits(k0, k1, cdf, cw, n, weights.size, 0)
    owner = np.repeat(weights, np.diff(offsets))
    dense = np.bincount(times, weights=owner, minlength=n + 1)
    running = np.maximum.accumulate(np.abs(dense))
    return running[np.asarray(grid_idx, dtype=np.int64)]
