# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: direction binning, (mesh, bin) counting,
per-mesh entropy, and pairwise nearest-distance scans.

Must stay in lock step with the fallback in ``_kernels_py.py``.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport asin, cos, fmod, isfinite, log, sin, sqrt

from .errors import InvalidAngleError

cnp.import_array()

cdef double TWO_PI = 2.0 * np.pi
cdef Py_ssize_t N_BINS = 100


def direction_bins(theta):
    """Map angles (radians, any real) to direction bin indices 0..99."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] t = \
        np.ascontiguousarray(theta, dtype=np.float64)
    cdef Py_ssize_t n = t.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t i
    cdef double v
    cdef long long b
    for i in range(n):
        v = t[i]
        if not isfinite(v):
            raise InvalidAngleError("non-finite direction angle")
        v = fmod(v, TWO_PI)
        if v < 0.0:
            v += TWO_PI
        b = <long long>((v / TWO_PI) * N_BINS)
        if b > N_BINS - 1:
            b = N_BINS - 1
        out[i] = b
    return out


def count_mesh_bins(mesh_idx, bins):
    """Count (mesh, bin) pairs; returns ascending keys = mesh*100+bin and counts."""
    cdef cnp.ndarray[cnp.int64_t, ndim=1] m = \
        np.ascontiguousarray(mesh_idx, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] b = \
        np.ascontiguousarray(bins, dtype=np.int64)
    cdef Py_ssize_t n = m.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] keys = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t i
    for i in range(n):
        keys[i] = m[i] * N_BINS + b[i]
    if n == 0:
        return keys, keys.copy()
    keys.sort()
    return _run_lengths(keys)


cdef _run_lengths(cnp.ndarray[cnp.int64_t, ndim=1] keys):
    cdef Py_ssize_t n = keys.shape[0]
    cdef Py_ssize_t i, nu = 1
    for i in range(1, n):
        if keys[i] != keys[i - 1]:
            nu += 1
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ukeys = np.empty(nu, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] counts = np.empty(nu, dtype=np.int64)
    cdef Py_ssize_t j = 0
    cdef long long run = 1
    for i in range(1, n):
        if keys[i] != keys[i - 1]:
            ukeys[j] = keys[i - 1]
            counts[j] = run
            j += 1
            run = 1
        else:
            run += 1
    ukeys[j] = keys[n - 1]
    counts[j] = run
    return ukeys, counts


def group_counts(keys, counts):
    """Sum counts of duplicate keys; input need not be sorted."""
    cdef cnp.ndarray[cnp.int64_t, ndim=1] k = \
        np.ascontiguousarray(keys, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] c = \
        np.ascontiguousarray(counts, dtype=np.int64)
    if k.shape[0] == 0:
        return k, c
    cdef cnp.ndarray[cnp.int64_t, ndim=1] order = \
        np.argsort(k, kind="stable").astype(np.int64)
    cdef Py_ssize_t n = k.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ks = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] cs = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t i, nu = 1
    for i in range(n):
        ks[i] = k[order[i]]
        cs[i] = c[order[i]]
    for i in range(1, n):
        if ks[i] != ks[i - 1]:
            nu += 1
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ukeys = np.empty(nu, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] totals = np.zeros(nu, dtype=np.int64)
    cdef Py_ssize_t j = 0
    ukeys[0] = ks[0]
    totals[0] = cs[0]
    for i in range(1, n):
        if ks[i] != ks[i - 1]:
            j += 1
            ukeys[j] = ks[i]
        totals[j] += cs[i]
    return ukeys, totals


def field_entropy(keys, counts, min_samples):
    """Per-mesh entropy from sorted (mesh*100+bin, count) pairs.

    Returns (mesh_ids, totals, entropy); entropy is NaN where the total
    is below ``min_samples``. log runs through the same numpy ufunc as
    the fallback backend so both produce identical bits.
    """
    cdef cnp.ndarray[cnp.int64_t, ndim=1] k = \
        np.ascontiguousarray(keys, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] c = \
        np.ascontiguousarray(counts, dtype=np.int64)
    cdef Py_ssize_t n = k.shape[0]
    if n == 0:
        return (np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64),
                np.empty(0, dtype=np.float64))
    cdef long long ms = min_samples
    cdef Py_ssize_t i, nu = 1
    for i in range(1, n):
        if k[i] // N_BINS != k[i - 1] // N_BINS:
            nu += 1
    cdef cnp.ndarray[cnp.int64_t, ndim=1] mesh = np.empty(nu, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] totals = np.empty(nu, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ent = np.empty(nu, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] p = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t start = 0, stop, j = 0
    cdef long long total
    cdef double s
    while start < n:
        stop = start
        total = 0
        while stop < n and k[stop] // N_BINS == k[start] // N_BINS:
            total += c[stop]
            stop += 1
        mesh[j] = k[start] // N_BINS
        totals[j] = total
        for i in range(start, stop):
            p[i] = <double>c[i] / <double>total
        j += 1
        start = stop
    cdef cnp.ndarray[cnp.float64_t, ndim=1] logp = np.log(p)
    start = 0
    j = 0
    while start < n:
        stop = start
        while stop < n and k[stop] // N_BINS == k[start] // N_BINS:
            stop += 1
        if totals[j] < ms:
            ent[j] = <double>np.nan
        else:
            s = 0.0
            for i in range(start, stop):
                s += p[i] * logp[i]
            ent[j] = -s + 0.0
        j += 1
        start = stop
    return mesh, totals, ent


def min_haversine_m(lat_a, lon_a, lat_b, lon_b, double radius_m=6_371_000.0):
    """For each point in A, the distance to its nearest point in B (meters).

    Minimizes the haversine parameter h (monotone in distance), with the
    sines taken through the same numpy ufunc as the fallback backend and
    a single scalar asin per row, so both backends agree bit for bit.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=1] la = \
        np.radians(np.ascontiguousarray(lat_a, dtype=np.float64))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] oa = \
        np.radians(np.ascontiguousarray(lon_a, dtype=np.float64))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lb = \
        np.radians(np.ascontiguousarray(lat_b, dtype=np.float64))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ob = \
        np.radians(np.ascontiguousarray(lon_b, dtype=np.float64))
    cdef Py_ssize_t na = la.shape[0], nb = lb.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(na, dtype=np.float64)
    cdef Py_ssize_t i, j
    cdef double best, h, sdp, sdl, ca
    if nb == 0:
        out[:] = np.inf
        return out
    cdef cnp.ndarray[cnp.float64_t, ndim=1] clb = np.cos(lb)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] cla = np.cos(la)
    for i in range(na):
        best = 2.0
        ca = cla[i]
        for j in range(nb):
            sdp = sin((lb[j] - la[i]) / 2.0)
            sdl = sin((ob[j] - oa[i]) / 2.0)
            h = sdp * sdp + ca * clb[j] * sdl * sdl
            if h < best:
                best = h
        if best > 1.0:
            best = 1.0
        out[i] = 2.0 * radius_m * asin(sqrt(best))
    return out
