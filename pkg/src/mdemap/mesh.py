"""Nested square mesh grids over a local metric projection.

Coordinates are WGS84 decimal degrees. All analysis happens in a local
frame anchored at the south-west corner of a rectangular area of
interest: x meters east, y meters north, obtained by an equirectangular
projection scaled with the mean-Earth-radius degree length and the
cosine of the area's central latitude. Square meshes of side ``scale_m``
tile this frame. Because every scale shares the same anchor, grids of
scales that divide each other nest exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, InvalidScaleError, OutOfAreaError

EARTH_RADIUS_M = 6_371_000.0

# Arc length of one degree at mean Earth radius, ~111194.9 m. Shared with
# the haversine distance below so projected and great-circle lengths agree.
METERS_PER_DEGREE = EARTH_RADIUS_M * math.pi / 180.0

STANDARD_SCALES_M = (100, 1000, 2000, 4000)


class GeoPoint(NamedTuple):
    lat: float
    lon: float


class LocalCoord(NamedTuple):
    """Meters east (x) and north (y) of the area's south-west corner."""

    x: float
    y: float


class MeshId(NamedTuple):
    """Half-open square [col*s, (col+1)*s) x [row*s, (row+1)*s), s = scale_m."""

    scale_m: int
    col: int
    row: int


def _check_geo(p: GeoPoint) -> None:
    if not (-90.0 <= p.lat <= 90.0 and -180.0 <= p.lon <= 180.0):
        raise ConfigError(f"invalid WGS84 coordinate {p!r}")


def _check_scale(scale_m: int) -> None:
    if scale_m <= 0:
        raise InvalidScaleError(f"mesh scale must be positive, got {scale_m}")


@dataclass(frozen=True)
class AreaOfInterest:
    """Axis-aligned lat/lon rectangle; the anchor of every mesh grid."""

    south_west: GeoPoint
    north_east: GeoPoint

    def __post_init__(self):
        _check_geo(self.south_west)
        _check_geo(self.north_east)
        if not (self.north_east.lat > self.south_west.lat
                and self.north_east.lon > self.south_west.lon):
            raise ConfigError(
                "north_east corner must be strictly north and east of south_west")

    @classmethod
    def from_bounds(cls, lon_min, lon_max, lat_min, lat_max) -> "AreaOfInterest":
        return cls(GeoPoint(lat_min, lon_min), GeoPoint(lat_max, lon_max))

    @property
    def mid_lat(self) -> float:
        return 0.5 * (self.south_west.lat + self.north_east.lat)

    @property
    def meters_per_degree_lon(self) -> float:
        return METERS_PER_DEGREE * math.cos(math.radians(self.mid_lat))

    @property
    def width_m(self) -> float:
        return (self.north_east.lon - self.south_west.lon) * self.meters_per_degree_lon

    @property
    def height_m(self) -> float:
        return (self.north_east.lat - self.south_west.lat) * METERS_PER_DEGREE

    def contains(self, p: GeoPoint) -> bool:
        return (self.south_west.lat <= p.lat <= self.north_east.lat
                and self.south_west.lon <= p.lon <= self.north_east.lon)

    def grid_shape(self, scale_m: int) -> tuple[int, int]:
        """(ncols, nrows) of the mesh grid covering the area, closed edges included."""
        _check_scale(scale_m)
        return int(self.width_m // scale_m) + 1, int(self.height_m // scale_m) + 1


# The default analysis window: a ~63 x 39 km rectangle west of Tokyo Bay.
DEFAULT_AOI = AreaOfInterest.from_bounds(139.3, 140.0, 35.5, 35.85)


def project(p: GeoPoint, aoi: AreaOfInterest) -> LocalCoord:
    """Project ``p`` into the local metric frame anchored at ``aoi``'s SW corner."""
    if not aoi.contains(p):
        raise OutOfAreaError(f"{p!r} outside area of interest")
    y = (p.lat - aoi.south_west.lat) * METERS_PER_DEGREE
    x = (p.lon - aoi.south_west.lon) * aoi.meters_per_degree_lon
    return LocalCoord(x, y)


def project_arrays(lat: np.ndarray, lon: np.ndarray,
                   aoi: AreaOfInterest) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`project` without the containment check."""
    y = (lat - aoi.south_west.lat) * METERS_PER_DEGREE
    x = (lon - aoi.south_west.lon) * aoi.meters_per_degree_lon
    return x, y


def inverse_project(c: LocalCoord, aoi: AreaOfInterest) -> GeoPoint:
    lat = aoi.south_west.lat + c.y / METERS_PER_DEGREE
    lon = aoi.south_west.lon + c.x / aoi.meters_per_degree_lon
    return GeoPoint(lat, lon)


def mesh_of(c: LocalCoord, scale_m: int) -> MeshId:
    """Mesh containing ``c``; boundaries belong to the higher-index cell."""
    _check_scale(scale_m)
    if c.x < 0 or c.y < 0:
        raise OutOfAreaError(f"negative local coordinate {c!r}")
    return MeshId(scale_m, int(c.x // scale_m), int(c.y // scale_m))


def parent_of(m: MeshId, coarser_scale_m: int) -> MeshId:
    """Mesh of the coarser grid containing ``m``. Scales must divide."""
    _check_scale(coarser_scale_m)
    if coarser_scale_m % m.scale_m != 0:
        raise InvalidScaleError(
            f"scale {coarser_scale_m} is not a multiple of {m.scale_m}")
    return MeshId(coarser_scale_m,
                  m.col * m.scale_m // coarser_scale_m,
                  m.row * m.scale_m // coarser_scale_m)


def mesh_center(m: MeshId, aoi: AreaOfInterest) -> GeoPoint:
    c = LocalCoord((m.col + 0.5) * m.scale_m, (m.row + 0.5) * m.scale_m)
    return inverse_project(c, aoi)


def mesh_corners(m: MeshId, aoi: AreaOfInterest) -> list[GeoPoint]:
    """Corners in ring order sw, se, ne, nw (not closed)."""
    s = m.scale_m
    x0, y0 = m.col * s, m.row * s
    return [inverse_project(LocalCoord(x, y), aoi)
            for x, y in ((x0, y0), (x0 + s, y0), (x0 + s, y0 + s), (x0, y0 + s))]


def geo_distance(a: GeoPoint, b: GeoPoint) -> float:
    """Haversine great-circle distance in meters, mean Earth radius."""
    p1 = math.radians(a.lat)
    p2 = math.radians(b.lat)
    dp = p2 - p1
    dl = math.radians(b.lon - a.lon)
    h = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))
