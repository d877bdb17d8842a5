"""Direction binning, entropy, and field accumulation."""

import math

import numpy as np
import pytest

from mdemap import (ALL_TIME, DirectionHistogram, EmptyHistogramError,
                    FieldAccumulator, InvalidAngleError, MAX_ENTROPY,
                    MeshEntry, MovementVector, N_BINS, TimeWindow, bin_of,
                    compute_field, entropy, entropy_norm, ConfigError,
                    GeoPoint, MeshId)
from mdemap.mesh import inverse_project, LocalCoord

from conftest import make_vectors

# frozen oracle: -(0.75 ln 0.75 + 0.25 ln 0.25), 50-digit arithmetic
H_75_25 = 0.5623351446188083
LN_100 = 4.605170185988091


def test_bin_width_covers_circle():
    assert N_BINS == 100
    assert MAX_ENTROPY == math.log(100)


def test_bin_of_cardinal_angles():
    assert bin_of(0.0) == 0
    assert bin_of(math.pi / 2) == 25
    assert bin_of(math.pi) == 50
    assert bin_of(3 * math.pi / 2) == 75


def test_bin_of_boundaries_and_wrap():
    w = 2 * math.pi / 100
    assert bin_of(w) == 1
    assert bin_of(math.nextafter(w, 0.0)) == 0
    assert bin_of(2 * math.pi) == 0
    assert bin_of(math.nextafter(2 * math.pi, 0.0)) == 99
    assert bin_of(-w / 2) == 99
    assert bin_of(-2 * math.pi) == 0
    # a tiny negative angle pushed to exactly 2*pi by rounding stays in range
    assert bin_of(-1e-18) in (0, 99)


def test_bin_of_rejects_non_finite():
    for bad in (math.nan, math.inf, -math.inf):
        with pytest.raises(InvalidAngleError):
            bin_of(bad)


def test_entropy_uniform_hits_ln100():
    h = DirectionHistogram(np.ones(100, dtype=np.int64))
    assert abs(entropy(h) - LN_100) < 1e-12


def test_entropy_single_bin_is_exactly_zero():
    counts = np.zeros(100, dtype=np.int64)
    counts[37] = 12345
    h = entropy(DirectionHistogram(counts))
    assert h == 0.0
    assert math.copysign(1.0, h) == 1.0  # +0.0, not -0.0


def test_entropy_75_25_oracle():
    counts = np.zeros(100, dtype=np.int64)
    counts[3], counts[71] = 75, 25
    assert entropy(DirectionHistogram(counts)) == pytest.approx(
        H_75_25, abs=1e-12)


def test_entropy_empty_raises():
    with pytest.raises(EmptyHistogramError):
        entropy(DirectionHistogram())


def test_entropy_norm_range():
    assert entropy_norm(LN_100) == pytest.approx(1.0, abs=1e-15)
    assert entropy_norm(0.0) == 0.0


def test_histogram_add_and_merge():
    a = DirectionHistogram()
    a.add(0.0)
    a.add(math.pi, weight=3)
    b = DirectionHistogram.from_thetas([0.0, math.pi / 2])
    m = a.merge(b)
    assert m.total == 6
    assert m.counts[0] == 2 and m.counts[50] == 3 and m.counts[25] == 1


def test_histogram_rejects_bad_shapes():
    with pytest.raises(ConfigError):
        DirectionHistogram(np.ones(99, dtype=np.int64))
    with pytest.raises(ConfigError):
        DirectionHistogram(np.full(100, -1, dtype=np.int64))


def test_time_window_half_open():
    w = TimeWindow(10.0, 20.0)
    assert w.contains(10.0) and w.contains(19.999)
    assert not w.contains(20.0) and not w.contains(9.999)
    assert ALL_TIME.contains(-1e18) and ALL_TIME.contains(1e18)


def _vec(aoi, x, y, theta, t=0.0):
    origin = inverse_project(LocalCoord(x, y), aoi)
    return MovementVector("u", t, origin, theta, 25.0, 60.0)


def test_compute_field_zero_movements(small_aoi):
    f = compute_field([], small_aoi, 100)
    assert f.entries == {}
    assert f.n_defined == 0


def test_compute_field_uniform_mesh_hits_ln100(small_aoi):
    w = 2 * math.pi / 100
    vecs = [_vec(small_aoi, 150.0, 150.0, (i + 0.5) * w) for i in range(100)]
    f = compute_field(vecs, small_aoi, 100, min_samples=30)
    m = MeshId(100, 1, 1)
    assert set(f.entries) == {m}
    assert f.entries[m].count == 100
    assert abs(f.entries[m].entropy - LN_100) < 1e-12


def test_min_samples_boundary(small_aoi):
    vecs = [_vec(small_aoi, 50.0, 50.0, 0.1 * i) for i in range(29)]
    f29 = compute_field(vecs, small_aoi, 100, min_samples=30)
    assert f29.entries[MeshId(100, 0, 0)] == MeshEntry(29, None)
    assert f29.n_defined == 0
    f29b = compute_field(vecs + [_vec(small_aoi, 50.0, 50.0, 1.0)],
                         small_aoi, 100, min_samples=30)
    e = f29b.entries[MeshId(100, 0, 0)]
    assert e.count == 30 and e.entropy is not None


def test_window_filters_by_origin_time(small_aoi):
    inside = [_vec(small_aoi, 50.0, 50.0, 0.0, t=100.0 + i) for i in range(40)]
    outside = [_vec(small_aoi, 50.0, 50.0, math.pi, t=500.0 + i)
               for i in range(40)]
    f = compute_field(inside + outside, small_aoi, 100,
                      window=TimeWindow(100.0, 200.0), min_samples=30)
    e = f.entries[MeshId(100, 0, 0)]
    assert e.count == 40
    assert e.entropy == 0.0  # only the northbound half is inside the window


def test_out_of_area_dropped_and_counted(small_aoi):
    vecs = [_vec(small_aoi, 50.0, 50.0, 0.0) for _ in range(35)]
    vecs.append(MovementVector("u", 0.0, GeoPoint(35.49, 139.31), 0.0,
                               25.0, 60.0))
    vecs.append(MovementVector("u", 0.0, GeoPoint(35.51, 139.40), 0.0,
                               25.0, 60.0))
    f = compute_field(vecs, small_aoi, 100)
    assert f.dropped_out_of_area == 2
    assert f.entries[MeshId(100, 0, 0)].count == 35


def test_rotation_invariance_small(small_aoi):
    rng = np.random.default_rng(2024)
    vecs = make_vectors(rng, 2000, small_aoi)
    base = compute_field(vecs, small_aoi, 100)
    w = 2 * math.pi / 100
    for k in (1, 17, 99):
        rot = [v._replace(theta=(v.theta + k * w) % (2 * math.pi))
               for v in vecs]
        f = compute_field(rot, small_aoi, 100)
        assert set(f.entries) == set(base.entries)
        for m, e in base.entries.items():
            assert f.entries[m].count == e.count
            if e.entropy is None:
                assert f.entries[m].entropy is None
            else:
                assert abs(f.entries[m].entropy - e.entropy) < 1e-12


def test_chunk_parity_small(small_aoi):
    rng = np.random.default_rng(7)
    vecs = make_vectors(rng, 5000, small_aoi)
    whole = FieldAccumulator(small_aoi, 100)
    whole.add(vecs)
    ref = whole.finish()
    for n_chunks in (3, 11):
        acc = FieldAccumulator(small_aoi, 100)
        bounds = sorted(rng.integers(0, len(vecs), n_chunks - 1).tolist())
        prev = 0
        for b in bounds + [len(vecs)]:
            acc.add(vecs[prev:b])
            prev = b
        assert acc.finish() == ref


def test_merge_accumulators(small_aoi):
    rng = np.random.default_rng(8)
    vecs = make_vectors(rng, 3000, small_aoi)
    whole = FieldAccumulator(small_aoi, 1000)
    whole.add(vecs)
    a = FieldAccumulator(small_aoi, 1000)
    b = FieldAccumulator(small_aoi, 1000)
    a.add(vecs[:1000])
    b.add(vecs[1000:])
    a.merge(b)
    assert a.finish() == whole.finish()


def test_merge_rejects_mismatched_setup(small_aoi):
    a = FieldAccumulator(small_aoi, 100)
    b = FieldAccumulator(small_aoi, 1000)
    with pytest.raises(ConfigError):
        a.merge(b)


def test_accumulator_validation(small_aoi):
    with pytest.raises(Exception):
        FieldAccumulator(small_aoi, 0)
    with pytest.raises(ConfigError):
        FieldAccumulator(small_aoi, 100, min_samples=0)
    with pytest.raises(ConfigError):
        FieldAccumulator(small_aoi, 100, window=TimeWindow(5.0, 5.0))


def test_histograms_match_brute_force(small_aoi):
    rng = np.random.default_rng(31)
    vecs = make_vectors(rng, 4000, small_aoi)
    acc = FieldAccumulator(small_aoi, 1000)
    acc.add(vecs)
    got = acc.histograms()
    want: dict = {}
    from mdemap import mesh_of, project
    for v in vecs:
        m = mesh_of(project(v.origin, small_aoi), 1000)
        want.setdefault(m, np.zeros(100, dtype=np.int64))[bin_of(v.theta)] += 1
    assert set(got) == set(want)
    for m in want:
        assert np.array_equal(got[m], want[m])


def test_parent_histogram_is_sum_of_children(small_aoi):
    rng = np.random.default_rng(77)
    vecs = make_vectors(rng, 6000, small_aoi)
    fine = FieldAccumulator(small_aoi, 100)
    coarse = FieldAccumulator(small_aoi, 1000)
    fine.add(vecs)
    coarse.add(vecs)
    from mdemap import parent_of
    fine_h = fine.histograms()
    coarse_h = coarse.histograms()
    rolled: dict = {}
    for m, h in fine_h.items():
        p = parent_of(m, 1000)
        rolled[p] = rolled.get(p, 0) + h
    assert set(rolled) == set(coarse_h)
    for m in rolled:
        assert np.array_equal(rolled[m], coarse_h[m])


def test_grouping_inequality_parent_vs_children(small_aoi):
    # pooling directions cannot lose entropy vs the count-weighted mean
    rng = np.random.default_rng(123)
    vecs = make_vectors(rng, 8000, small_aoi)
    from mdemap import parent_of
    fine = FieldAccumulator(small_aoi, 100, min_samples=1)
    fine.add(vecs)
    coarse = FieldAccumulator(small_aoi, 1000, min_samples=1)
    coarse.add(vecs)
    ff, cf = fine.finish(), coarse.finish()
    mix: dict = {}
    for m, e in ff.entries.items():
        p = parent_of(m, 1000)
        acc = mix.setdefault(p, [0, 0.0])
        acc[0] += e.count
        acc[1] += e.count * e.entropy
    for p, (n, s) in mix.items():
        assert cf.entries[p].entropy >= s / n - 1e-12
