# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels; see ``_pykernels`` for the reference semantics."""

from libc.stdint cimport uint64_t, int64_t
from libcpp.vector cimport vector

import numpy as np

BACKEND = "cython"

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t M1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t M2 = 0x94D049BB133111EBULL
cdef double TWO_M53 = 1.0 / 9007199254740992.0


cdef inline uint64_t _mix(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * M1
    z = (z ^ (z >> 27)) * M2
    return z ^ (z >> 31)


cdef inline double _uniform(uint64_t k0, uint64_t k1, uint64_t c) noexcept nogil:
    cdef uint64_t b = _mix(_mix(k0 + c * GOLDEN) ^ k1)
    return (<double>(b >> 11) + 0.5) * TWO_M53


cdef inline Py_ssize_t _bisect_left(const double* a, Py_ssize_t hi, double x) noexcept nogil:
    cdef Py_ssize_t lo = 0, mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if a[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo


def renewal_visits(k0, k1, const double[::1] cdf, const double[::1] cw,
                   Py_ssize_t n, Py_ssize_t count, Py_ssize_t first_record):
    cdef uint64_t key0 = <uint64_t>int(k0)
    cdef uint64_t key1 = <uint64_t>int(k1)
    if cdf.shape[0] < n + 1 or cw.shape[0] < n + 1:
        raise ValueError("tables shorter than the horizon")
    states = np.empty(count, dtype=np.int64)
    offsets = np.empty(count + 1, dtype=np.int64)
    cdef int64_t[::1] st = states
    cdef int64_t[::1] off = offsets
    cdef vector[int64_t] out
    cdef const double* table = &cdf[0]
    cdef const double* weights = &cw[0]
    cdef Py_ssize_t j, s, k, t
    cdef uint64_t base, m
    cdef double total_w = cw[n], total_c = cdf[n]
    with nogil:
        out.reserve(count * 8)
        off[0] = 0
        for j in range(count):
            base = (<uint64_t>(first_record + j)) << 32
            s = _bisect_left(weights, n + 1, _uniform(key0, key1, base) * total_w)
            st[j] = s
            if s == 0:
                t = _bisect_left(table, n + 1, _uniform(key0, key1, base | 1) * total_c)
            else:
                t = s
            out.push_back(t)
            m = 2
            while True:
                k = _bisect_left(table, n + 1, _uniform(key0, key1, base | m))
                t = t + k
                if t > n:
                    break
                out.push_back(t)
                m += 1
            off[j + 1] = <int64_t>out.size()
    times = np.empty(out.size(), dtype=np.int64)
    cdef int64_t[::1] tv = times
    for j in range(<Py_ssize_t>out.size()):
        tv[j] = out[j]
    return states, offsets, times


def partial_maxima(k0, k1, const double[::1] cdf, const double[::1] cw,
                   Py_ssize_t n, const double[::1] weights, const int64_t[::1] grid_idx):
    cdef uint64_t key0 = <uint64_t>int(k0)
    cdef uint64_t key1 = <uint64_t>int(k1)
    if cdf.shape[0] < n + 1 or cw.shape[0] < n + 1:
        raise ValueError("tables shorter than the horizon")
    cdef Py_ssize_t count = weights.shape[0]
    cdef Py_ssize_t G = grid_idx.shape[0]
    cdef Py_ssize_t j, s, k, t, g
    for g in range(G):
        if grid_idx[g] < 0 or grid_idx[g] > n or (g > 0 and grid_idx[g] < grid_idx[g - 1]):
            raise ValueError("grid indices must be nondecreasing within [0, n]")
    out = np.empty(G, dtype=np.float64)
    cdef double[::1] ov = out
    cdef vector[double] dense
    cdef const double* table = &cdf[0]
    cdef const double* cwp = &cw[0]
    cdef uint64_t base, m
    cdef double total_w = cw[n], total_c = cdf[n], w, running, a
    with nogil:
        dense.resize(n + 1, 0.0)
        for j in range(count):
            w = weights[j]
            base = (<uint64_t>j) << 32
            s = _bisect_left(cwp, n + 1, _uniform(key0, key1, base) * total_w)
            if s == 0:
                t = _bisect_left(table, n + 1, _uniform(key0, key1, base | 1) * total_c)
            else:
                t = s
            dense[t] += w
            m = 2
            while True:
                k = _bisect_left(table, n + 1, _uniform(key0, key1, base | m))
                t = t + k
                if t > n:
                    break
                dense[t] += w
                m += 1
        running = 0.0
        g = 0
        for t in range(n + 1):
            a = dense[t]
            if a < 0:
                a = -a
            if a > running:
                running = a
            while g < G and grid_idx[g] == t:
                ov[g] = running
                g += 1
    return out
