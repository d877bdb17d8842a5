#!/usr/bin/env python3
"""Compare the compiled and pure-python kernel backends.

Times the five hot kernels and the full four-scale field build on one
million synthetic movement vectors, printing one row per (function,
backend). Run:

    python3 benchmarks/bench_kernels.py [n_vectors]
"""

import sys
import time

import numpy as np

from mdemap import DEFAULT_AOI, FieldAccumulator, MovementBatch, kernels
from mdemap.mesh import inverse_project, LocalCoord, project_arrays

SCALES = (100, 1000, 2000, 4000)


def make_batch(n: int) -> MovementBatch:
    rng = np.random.default_rng(20240817)
    x = rng.uniform(0.0, DEFAULT_AOI.width_m, n)
    y = rng.uniform(0.0, DEFAULT_AOI.height_m, n)
    theta = rng.uniform(0.0, 2.0 * np.pi, n)
    sw = DEFAULT_AOI.south_west
    mid = np.cos(np.radians(DEFAULT_AOI.mid_lat))
    from mdemap.mesh import METERS_PER_DEGREE as M
    lat = sw.lat + y / M
    lon = sw.lon + x / (M * mid)
    x, y = project_arrays(lat, lon, DEFAULT_AOI)
    t = np.full(n, 1.6e9)
    uid = np.zeros(n, dtype=object)
    ones = np.ones(n)
    return MovementBatch(DEFAULT_AOI, uid, t, lat, lon, x, y, theta,
                         ones * 50.0, ones * 60.0)


def timed(fn, *args, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> None:
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 1_000_000
    batch = make_batch(n)
    theta = batch.theta
    ncols, _ = DEFAULT_AOI.grid_shape(100)
    flat = (batch.y // 100).astype(np.int64) * ncols \
        + (batch.x // 100).astype(np.int64)
    rng = np.random.default_rng(7)
    a_lat = rng.uniform(35.5, 35.85, 300)
    a_lon = rng.uniform(139.3, 140.0, 300)
    b_lat = rng.uniform(35.5, 35.85, 50)
    b_lon = rng.uniform(139.3, 140.0, 50)

    rows = []
    results = {}
    for backend in kernels.available_backends():
        kernels.set_backend(backend)
        t, bins = timed(kernels.direction_bins, theta)
        rows.append((f"direction_bins({n})", backend, t))
        t, (keys, counts) = timed(kernels.count_mesh_bins, flat, bins)
        rows.append((f"count_mesh_bins({n})", backend, t))
        t, _ = timed(kernels.group_counts, keys, counts)
        rows.append((f"group_counts({keys.size})", backend, t))
        t, ent = timed(kernels.field_entropy, keys, counts, 30)
        rows.append((f"field_entropy({keys.size})", backend, t))
        t, _ = timed(kernels.min_haversine_m, a_lat, a_lon, b_lat, b_lon)
        rows.append(("min_haversine_m(300x50)", backend, t))

        def full():
            fields = []
            for s in SCALES:
                acc = FieldAccumulator(DEFAULT_AOI, s)
                acc.add(batch)
                fields.append(acc.finish())
            return fields
        t, fields = timed(full, repeat=1)
        rows.append((f"four-scale fields({n})", backend, t))
        results[backend] = (bins, ent, [f.entries for f in fields])

    if len(results) == 2:
        c, p = results["c"], results["python"]
        same = (np.array_equal(c[0], p[0])
                and np.array_equal(c[1], p[1], equal_nan=True)
                and c[2] == p[2])
        print(f"backend outputs identical: {same}")
    print(f"{'kernel':<28} {'backend':<8} {'seconds':>10}")
    for name, backend, t in rows:
        print(f"{name:<28} {backend:<8} {t:>10.4f}")


if __name__ == "__main__":
    main()
