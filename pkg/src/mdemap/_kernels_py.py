"""Pure-python (numpy) implementations of the hot kernels.

Selected at import time by :mod:`mdemap.kernels` when the compiled
extension is unavailable. Signatures and semantics must stay in lock
step with ``_ckernels.pyx``.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidAngleError

TWO_PI = 2.0 * np.pi
N_BINS = 100


def direction_bins(theta):
    """Map angles (radians, any real) to direction bin indices 0..99.

    Angles are reduced mod 2*pi; bin i covers [i*pi/50, (i+1)*pi/50).
    """
    theta = np.ascontiguousarray(theta, dtype=np.float64)
    if theta.size and not np.all(np.isfinite(theta)):
        raise InvalidAngleError("non-finite direction angle")
    t = np.mod(theta, TWO_PI)
    idx = ((t / TWO_PI) * N_BINS).astype(np.int64)
    np.minimum(idx, N_BINS - 1, out=idx)
    return idx


def count_mesh_bins(mesh_idx, bins):
    """Count occurrences of (mesh, bin) pairs.

    Returns (keys, counts) with key = mesh * 100 + bin, keys strictly
    ascending. Merging chunked outputs and re-grouping reproduces the
    unchunked result exactly.
    """
    mesh_idx = np.ascontiguousarray(mesh_idx, dtype=np.int64)
    bins = np.ascontiguousarray(bins, dtype=np.int64)
    keys = mesh_idx * N_BINS + bins
    if keys.size == 0:
        return keys, keys.copy()
    keys = np.sort(keys)
    starts = np.concatenate(([0], np.flatnonzero(np.diff(keys)) + 1))
    counts = np.diff(np.append(starts, keys.size))
    return keys[starts], counts.astype(np.int64)


def group_counts(keys, counts):
    """Sum counts of duplicate keys; input need not be sorted."""
    keys = np.ascontiguousarray(keys, dtype=np.int64)
    counts = np.ascontiguousarray(counts, dtype=np.int64)
    if keys.size == 0:
        return keys, counts
    order = np.argsort(keys, kind="stable")
    keys = keys[order]
    counts = counts[order]
    starts = np.concatenate(([0], np.flatnonzero(np.diff(keys)) + 1))
    return keys[starts], np.add.reduceat(counts, starts)


def field_entropy(keys, counts, min_samples):
    """Per-mesh Shannon entropy from sorted (mesh*100+bin, count) pairs.

    Returns (mesh_ids, totals, entropy) with entropy NaN where the mesh
    total is below ``min_samples``. The p*log(p) terms are accumulated
    strictly in bin order per mesh (the j-th occupied bins of all meshes
    at once), so both backends round identically.
    """
    keys = np.ascontiguousarray(keys, dtype=np.int64)
    counts = np.ascontiguousarray(counts, dtype=np.int64)
    if keys.size == 0:
        return (keys, counts,
                np.empty(0, dtype=np.float64))
    mesh = keys // N_BINS
    starts = np.concatenate(([0], np.flatnonzero(np.diff(mesh)) + 1))
    lens = np.diff(np.append(starts, mesh.size))
    totals = np.add.reduceat(counts, starts)
    p = counts / np.repeat(totals, lens)
    plogp = p * np.log(p)
    s = np.zeros(starts.size, dtype=np.float64)
    for j in range(int(lens.max())):
        sel = np.flatnonzero(lens > j)
        s[sel] += plogp[starts[sel] + j]
    h = -s + 0.0
    h[totals < min_samples] = np.nan
    return mesh[starts], totals, h


def min_haversine_m(lat_a, lon_a, lat_b, lon_b, radius_m=6_371_000.0):
    """For each point in A, the distance to its nearest point in B (meters).

    The minimum is taken over the haversine parameter h (monotone in
    distance); the arcsine runs once per row through scalar libm, so the
    two backends agree bit for bit.
    """
    la = np.radians(np.ascontiguousarray(lat_a, dtype=np.float64))[:, None]
    lb = np.radians(np.ascontiguousarray(lat_b, dtype=np.float64))[None, :]
    oa = np.radians(np.ascontiguousarray(lon_a, dtype=np.float64))[:, None]
    ob = np.radians(np.ascontiguousarray(lon_b, dtype=np.float64))[None, :]
    if lb.size == 0:
        return np.full(la.shape[0], np.inf)
    sdp = np.sin((lb - la) / 2.0)
    sdl = np.sin((ob - oa) / 2.0)
    h = sdp * sdp + np.cos(la) * np.cos(lb) * sdl * sdl
    hmin = np.minimum(h.min(axis=1), 1.0)
    return np.array([2.0 * radius_m * math.asin(math.sqrt(v))
                     for v in hmin.tolist()], dtype=np.float64)
