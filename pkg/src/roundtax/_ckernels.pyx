# cython: language_level=3
"""Compiled kernels; see ``_pykernels`` for the stream definition they share."""
import numpy as np

from libc.stdint cimport int64_t, uint64_t

NAME = "cython"

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double unit(uint64_t z) noexcept nogil:
    return <double>(z >> 11) * (1.0 / 9007199254740992.0)


cdef inline Py_ssize_t first_above(const double[::1] cdf, double u) noexcept nogil:
    # first j with cdf[j] > u; cdf[-1] == 1.0 > u
    cdef Py_ssize_t lo = 0, hi = cdf.shape[0] - 1, mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if cdf[mid] > u:
            hi = mid
        else:
            lo = mid + 1
    return lo


def simulate_block(uint64_t key, Py_ssize_t start, Py_ssize_t stop,
                   basket_sizes, basket_cdf, ending_cdf, kernel):
    cdef Py_ssize_t n = stop - start
    cdef const int64_t[::1] bsizes = np.ascontiguousarray(basket_sizes, dtype=np.int64)
    cdef const double[::1] bcdf = np.ascontiguousarray(basket_cdf, dtype=np.float64)
    cdef const double[::1] ecdf = np.ascontiguousarray(ending_cdf, dtype=np.float64)
    cdef const int64_t[::1] kern = np.ascontiguousarray(kernel, dtype=np.int64)
    sizes_arr = np.empty(n, dtype=np.int64)
    residues_arr = np.empty(n, dtype=np.int64)
    deltas_arr = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] sizes = sizes_arr
    cdef int64_t[::1] residues = residues_arr
    cdef int64_t[::1] deltas = deltas_arr
    cdef Py_ssize_t t, j
    cdef int64_t size, total
    cdef uint64_t base
    with nogil:
        for t in range(n):
            base = mix64(key + <uint64_t>(start + t + 1) * GOLDEN)
            size = bsizes[first_above(bcdf, unit(mix64(base + GOLDEN)))]
            total = 0
            for j in range(size):
                total += first_above(ecdf, unit(mix64(base + <uint64_t>(j + 2) * GOLDEN)))
            sizes[t] = size
            residues[t] = total % 10
            deltas[t] = kern[total % 10]
    return sizes_arr, residues_arr, deltas_arr


def round_amounts(amounts, int64_t grid, up):
    cdef const int64_t[::1] a = np.ascontiguousarray(amounts, dtype=np.int64)
    cdef const int64_t[::1] upv = np.ascontiguousarray(up, dtype=np.int64)
    out_arr = np.empty(a.shape[0], dtype=np.int64)
    cdef int64_t[::1] out = out_arr
    cdef Py_ssize_t i
    cdef int64_t r
    cdef bint negative = False
    with nogil:
        for i in range(a.shape[0]):
            if a[i] < 0:
                negative = True
                break
            r = a[i] % grid
            out[i] = a[i] - r + upv[r] * grid
    if negative:
        raise ValueError("cannot round a negative amount")
    return out_arr
