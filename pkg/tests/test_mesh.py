"""Projection, mesh indexing, and great-circle distance."""

import math

import numpy as np
import pytest

from mdemap import (AreaOfInterest, DEFAULT_AOI, GeoPoint, LocalCoord,
                    MeshId, METERS_PER_DEGREE, ConfigError, InvalidScaleError,
                    OutOfAreaError, geo_distance, inverse_project,
                    mesh_center, mesh_corners, mesh_of, parent_of, project)
from mdemap.mesh import project_arrays

# frozen oracle values, 50-digit arithmetic on the R=6,371,000 m sphere
EW_SPAN_M = 63367.72784198471      # haversine (35.5,139.3)-(35.5,140.0)
NS_SPAN_M = 38918.224325595555     # haversine (35.5,139.3)-(35.85,139.3)
AOI_WIDTH_M = 63229.51027569304    # 0.7 deg * M * cos(35.675 deg)
AOI_HEIGHT_M = 38918.224325595555  # 0.35 deg * M


def test_meters_per_degree_is_mean_radius_arc():
    assert METERS_PER_DEGREE == pytest.approx(111194.92664455873, abs=1e-6)
    assert METERS_PER_DEGREE == 6_371_000.0 * math.pi / 180.0


def test_project_anchor_is_sw_corner():
    c = project(GeoPoint(35.5, 139.3), DEFAULT_AOI)
    assert (c.x, c.y) == (0.0, 0.0)


def test_project_ne_corner_extents():
    c = project(GeoPoint(35.85, 140.0), DEFAULT_AOI)
    assert c.x == pytest.approx(AOI_WIDTH_M, abs=1e-6)
    assert c.y == pytest.approx(AOI_HEIGHT_M, abs=1e-6)
    assert DEFAULT_AOI.width_m == c.x
    assert DEFAULT_AOI.height_m == c.y


def test_projection_vs_haversine_within_0p3_percent():
    # the flat projection compresses east-west spans vs the great circle
    assert abs(DEFAULT_AOI.width_m - EW_SPAN_M) / EW_SPAN_M < 3e-3
    assert abs(DEFAULT_AOI.height_m - NS_SPAN_M) / NS_SPAN_M < 1e-3


def test_project_outside_raises():
    with pytest.raises(OutOfAreaError):
        project(GeoPoint(35.4, 139.5), DEFAULT_AOI)
    with pytest.raises(OutOfAreaError):
        project(GeoPoint(35.6, 140.1), DEFAULT_AOI)


def test_project_inverse_roundtrip():
    rng = np.random.default_rng(404)
    lat = rng.uniform(35.5, 35.85, 500)
    lon = rng.uniform(139.3, 140.0, 500)
    x, y = project_arrays(lat, lon, DEFAULT_AOI)
    for i in range(lat.size):
        p = inverse_project(LocalCoord(x[i], y[i]), DEFAULT_AOI)
        assert p.lat == pytest.approx(lat[i], abs=1e-12)
        assert p.lon == pytest.approx(lon[i], abs=1e-12)


def test_mesh_of_floor_and_half_open():
    assert mesh_of(LocalCoord(0.0, 0.0), 100) == MeshId(100, 0, 0)
    assert mesh_of(LocalCoord(250.0, 150.0), 100) == MeshId(100, 2, 1)
    # boundary belongs to the higher-index cell
    assert mesh_of(LocalCoord(100.0, 0.0), 100) == MeshId(100, 1, 0)
    assert mesh_of(LocalCoord(99.999999, 0.0), 100) == MeshId(100, 0, 0)


def test_mesh_of_negative_raises():
    with pytest.raises(OutOfAreaError):
        mesh_of(LocalCoord(-0.001, 5.0), 100)


def test_parent_nesting_all_scale_pairs():
    rng = np.random.default_rng(11)
    pairs = [(100, 1000), (1000, 2000), (2000, 4000), (100, 4000)]
    for _ in range(300):
        x = rng.uniform(0, DEFAULT_AOI.width_m)
        y = rng.uniform(0, DEFAULT_AOI.height_m)
        for fine, coarse in pairs:
            child = mesh_of(LocalCoord(x, y), fine)
            parent = parent_of(child, coarse)
            # the same point indexed at the coarse scale
            assert parent == mesh_of(LocalCoord(x, y), coarse)


def test_parent_requires_divisible_scales():
    with pytest.raises(InvalidScaleError):
        parent_of(MeshId(1000, 1, 1), 2500)
    with pytest.raises(InvalidScaleError):
        parent_of(MeshId(1000, 1, 1), 100)  # finer, not coarser


def test_mesh_center_and_corners():
    m = MeshId(4000, 0, 0)
    c = mesh_center(m, DEFAULT_AOI)
    assert c.lat == pytest.approx(35.51798643211838, abs=1e-12)
    assert c.lon == pytest.approx(139.32214156007055, abs=1e-12)
    sw, se, ne, nw = mesh_corners(m, DEFAULT_AOI)
    assert sw == GeoPoint(35.5, 139.3)
    assert se.lat == sw.lat and nw.lon == sw.lon
    assert ne.lat > sw.lat and ne.lon > sw.lon
    # center is the corner midpoint in local coordinates
    mid = project(c, DEFAULT_AOI)
    assert mid.x == pytest.approx(2000.0, abs=1e-9)
    assert mid.y == pytest.approx(2000.0, abs=1e-9)


def test_grid_shape_covers_closed_ne_edge():
    ncols, nrows = DEFAULT_AOI.grid_shape(100)
    assert (ncols, nrows) == (633, 390)
    ne = project(GeoPoint(35.85, 140.0), DEFAULT_AOI)
    m = mesh_of(ne, 100)
    assert m.col < ncols and m.row < nrows


def test_geo_distance_oracle_values():
    assert geo_distance(GeoPoint(35.5, 139.3),
                        GeoPoint(35.5, 140.0)) == pytest.approx(
                            EW_SPAN_M, abs=1.0)
    assert geo_distance(GeoPoint(35.5, 139.3),
                        GeoPoint(35.85, 139.3)) == pytest.approx(
                            NS_SPAN_M, abs=1.0)
    assert geo_distance(GeoPoint(35.7, 139.5), GeoPoint(35.7, 139.5)) == 0.0


def test_geo_distance_symmetry_and_antipodal_cap():
    rng = np.random.default_rng(12)
    for _ in range(100):
        a = GeoPoint(rng.uniform(-90, 90), rng.uniform(-180, 180))
        b = GeoPoint(rng.uniform(-90, 90), rng.uniform(-180, 180))
        d_ab = geo_distance(a, b)
        assert d_ab == geo_distance(b, a)
        assert 0.0 <= d_ab <= math.pi * 6_371_000.0 + 1e-6


def test_aoi_validation():
    with pytest.raises(ConfigError):
        AreaOfInterest.from_bounds(140.0, 139.3, 35.5, 35.85)
    with pytest.raises(ConfigError):
        AreaOfInterest.from_bounds(139.3, 140.0, 35.85, 35.5)
    with pytest.raises(ConfigError):
        AreaOfInterest(GeoPoint(35.5, 139.3), GeoPoint(35.5, 140.0))


def test_contains_is_closed_on_boundary():
    assert DEFAULT_AOI.contains(GeoPoint(35.5, 139.3))
    assert DEFAULT_AOI.contains(GeoPoint(35.85, 140.0))
    assert not DEFAULT_AOI.contains(GeoPoint(35.85000001, 140.0))
