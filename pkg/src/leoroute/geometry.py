"""Walker star constellation geometry.

Satellites move on circular polar orbits. Plane ``a`` (0-based here) has
azimuth ``a * pi / M`` measured from the inertial x axis, and a satellite's
polar angle ``theta`` is its angular position along the plane, measured from
the ascending equator crossing. With that convention a satellite sits at::

    r * (cos(eps) cos(theta), sin(eps) cos(theta), sin(theta))

so ``theta = +-pi/2`` are the pole crossings.

Ground stations are points on the spherical Earth. Their longitude is offset
by the accumulated Earth rotation angle carried by the :class:`Constellation`.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigurationError

EARTH_RADIUS_KM = 6371.0
MU_EARTH_KM3_S2 = 398600.4418
EARTH_ROTATION_RATE = 7.2921159e-5  # rad/s, sidereal

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ConstellationConfig:
    num_planes: int = 5
    sats_per_plane: int = 40
    base_altitude_km: float = 1000.0
    altitude_step_km: float = 10.0
    earth_radius_km: float = EARTH_RADIUS_KM

    def __post_init__(self):
        if self.num_planes < 1:
            raise ConfigurationError(f"num_planes must be >= 1, got {self.num_planes}")
        if self.sats_per_plane < 3:
            raise ConfigurationError(f"sats_per_plane must be >= 3, got {self.sats_per_plane}")
        if self.base_altitude_km <= 0:
            raise ConfigurationError(f"base_altitude_km must be > 0, got {self.base_altitude_km}")
        if self.earth_radius_km <= 0:
            raise ConfigurationError("earth_radius_km must be > 0")
        if self.base_altitude_km + self.altitude_step_km * (self.num_planes - 1) <= 0:
            raise ConfigurationError("altitude_step_km drives a plane below the surface")

    @property
    def num_satellites(self) -> int:
        return self.num_planes * self.sats_per_plane

    def altitude_km(self, plane: int) -> float:
        """Altitude of 0-based ``plane``."""
        return self.base_altitude_km + self.altitude_step_km * plane

    def altitudes_km(self) -> np.ndarray:
        return self.base_altitude_km + self.altitude_step_km * np.arange(self.num_planes)


@dataclass(frozen=True)
class GroundStation:
    name: str
    latitude_deg: float
    longitude_deg: float

    def __post_init__(self):
        if not -90.0 <= self.latitude_deg <= 90.0:
            raise ConfigurationError(f"{self.name}: latitude {self.latitude_deg} out of range")
        if not -180.0 <= self.longitude_deg <= 180.0:
            raise ConfigurationError(f"{self.name}: longitude {self.longitude_deg} out of range")


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Constellation:
    """Instantaneous state of a Walker star constellation.

    Satellite ``i`` belongs to plane ``i // N_a`` and has index ``i % N_a``
    within the plane.
    """

    config: ConstellationConfig
    plane_angles: np.ndarray
    anomalies: np.ndarray
    earth_rotation_rad: float = 0.0
    elapsed_s: float = 0.0
    plane_of: np.ndarray = field(init=False, repr=False)
    radii_km: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        cfg = self.config
        object.__setattr__(self, "plane_angles", _frozen(self.plane_angles))
        object.__setattr__(self, "anomalies", _frozen(self.anomalies))
        plane_of = np.repeat(np.arange(cfg.num_planes), cfg.sats_per_plane)
        plane_of.setflags(write=False)
        object.__setattr__(self, "plane_of", plane_of)
        radii = cfg.earth_radius_km + cfg.altitudes_km()[plane_of]
        object.__setattr__(self, "radii_km", _frozen(radii))

    @property
    def num_satellites(self) -> int:
        return self.config.num_satellites

    @property
    def num_planes(self) -> int:
        return self.config.num_planes

    def plane_members(self, plane: int) -> np.ndarray:
        n = self.config.sats_per_plane
        return np.arange(plane * n, (plane + 1) * n)

    def satellite_positions(self) -> np.ndarray:
        """Cartesian positions in km, shape ``(N, 3)``."""
        eps = self.plane_angles[self.plane_of]
        th = self.anomalies
        r = self.radii_km
        return np.column_stack(
            (r * np.cos(eps) * np.cos(th), r * np.sin(eps) * np.cos(th), r * np.sin(th))
        )

    def satellite_position(self, i: int) -> np.ndarray:
        eps = self.plane_angles[self.plane_of[i]]
        th = self.anomalies[i]
        r = self.radii_km[i]
        return np.array([r * math.cos(eps) * math.cos(th), r * math.sin(eps) * math.cos(th), r * math.sin(th)])

    def ground_position(self, gs: GroundStation) -> np.ndarray:
        lat = math.radians(gs.latitude_deg)
        lon = math.radians(gs.longitude_deg) + self.earth_rotation_rad
        r = self.config.earth_radius_km
        return np.array([r * math.cos(lat) * math.cos(lon), r * math.cos(lat) * math.sin(lon), r * math.sin(lat)])

    def ground_positions(self, stations: Sequence[GroundStation]) -> np.ndarray:
        if not stations:
            return np.zeros((0, 3))
        return np.vstack([self.ground_position(gs) for gs in stations])


def build_constellation(cfg: ConstellationConfig, initial_anomalies=None) -> Constellation:
    """Deploy ``N_a`` evenly spaced satellites on each of ``M`` polar planes.

    ``initial_anomalies`` gives the polar angle of the first satellite of each
    plane (radians); it defaults to zero for every plane.
    """
    if initial_anomalies is None:
        initial_anomalies = np.zeros(cfg.num_planes)
    initial_anomalies = np.asarray(initial_anomalies, dtype=float)
    if initial_anomalies.shape != (cfg.num_planes,):
        raise ConfigurationError(
            f"expected {cfg.num_planes} initial anomalies, got shape {initial_anomalies.shape}"
        )
    plane_angles = np.arange(cfg.num_planes) * math.pi / cfg.num_planes
    k = np.arange(cfg.sats_per_plane) * TWO_PI / cfg.sats_per_plane
    theta = np.mod(initial_anomalies[:, None] + k[None, :], TWO_PI).ravel()
    return Constellation(cfg, plane_angles, theta)


def mean_motion(cfg: ConstellationConfig) -> np.ndarray:
    """Angular velocity of each plane in rad/s."""
    r = cfg.earth_radius_km + cfg.altitudes_km()
    return np.sqrt(MU_EARTH_KM3_S2 / r**3)


def orbital_period(altitude_km: float, earth_radius_km: float = EARTH_RADIUS_KM) -> float:
    r = earth_radius_km + altitude_km
    return TWO_PI * math.sqrt(r**3 / MU_EARTH_KM3_S2)


def propagate(c: Constellation, dt: float, rotate_earth: bool = True) -> Constellation:
    """Advance every satellite along its orbit by ``dt`` seconds.

    The anomaly advance is computed from the first satellite of each plane
    and the plane's offsets are re-applied, so spacing within a plane stays
    exactly ``2 pi / N_a`` irrespective of round-off.
    """
    if dt < 0:
        raise ValueError(f"dt must be >= 0, got {dt}")
    if dt == 0:
        return c
    cfg = c.config
    n = cfg.sats_per_plane
    first = c.anomalies[::n]
    new_first = np.mod(first + mean_motion(cfg) * dt, TWO_PI)
    offsets = c.anomalies.reshape(cfg.num_planes, n) - first[:, None]
    theta = np.mod(new_first[:, None] + offsets, TWO_PI).ravel()
    rot = c.earth_rotation_rad
    if rotate_earth:
        rot = math.fmod(rot + EARTH_ROTATION_RATE * dt, TWO_PI)
    return replace(c, anomalies=theta, earth_rotation_rad=rot, elapsed_s=c.elapsed_s + dt)


def segment_clearance(p1, p2) -> float:
    """Minimum distance from the Earth's centre to the segment ``p1``-``p2``."""
    p1 = np.asarray(p1, dtype=float)
    d = np.asarray(p2, dtype=float) - p1
    dd = float(d @ d)
    if dd == 0.0:
        return float(np.linalg.norm(p1))
    t = min(1.0, max(0.0, -float(p1 @ d) / dd))
    return float(np.linalg.norm(p1 + t * d))


def slant_range(p1, p2, earth_radius_km: float = EARTH_RADIUS_KM, margin_km: float = 0.0) -> float:
    """Line-of-sight distance in km, or ``math.inf`` when the Earth blocks it."""
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    # order the endpoints so the result is bitwise symmetric
    if tuple(p2) < tuple(p1):
        p1, p2 = p2, p1
    if segment_clearance(p1, p2) < earth_radius_km + margin_km:
        return math.inf
    return float(np.linalg.norm(p2 - p1))


def slant_ranges(p1: np.ndarray, p2: np.ndarray, earth_radius_km: float = EARTH_RADIUS_KM,
                 margin_km: float = 0.0) -> np.ndarray:
    """Vectorised :func:`slant_range` over row-paired endpoint arrays."""
    p1 = np.atleast_2d(np.asarray(p1, dtype=float))
    p2 = np.atleast_2d(np.asarray(p2, dtype=float))
    d = p2 - p1
    dd = np.einsum("ij,ij->i", d, d)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(dd > 0, -np.einsum("ij,ij->i", p1, d) / dd, 0.0)
    t = np.clip(t, 0.0, 1.0)
    clearance = np.linalg.norm(p1 + t[:, None] * d, axis=1)
    dist = np.sqrt(dd)
    return np.where(clearance < earth_radius_km + margin_km, np.inf, dist)


def intra_plane_spacing_km(cfg: ConstellationConfig, plane: int) -> float:
    """Chord between consecutive satellites of ``plane``."""
    return 2.0 * (cfg.earth_radius_km + cfg.altitude_km(plane)) * math.sin(math.pi / cfg.sats_per_plane)


def parse_ground_stations(lines: Iterable[str]) -> list[GroundStation]:
    stations = []
    rows = csv.reader(line for line in lines if line.strip() and not line.lstrip().startswith("#"))
    for row in rows:
        if len(row) < 3:
            raise ConfigurationError(f"ground station row needs name,lat,lon: {row!r}")
        name, lat, lon = (x.strip() for x in row[:3])
        stations.append(GroundStation(name, float(lat), float(lon)))
    return stations


def load_ground_stations(path: str | Path | None = None) -> list[GroundStation]:
    """Read a ground station table; ``None`` loads the bundled default set."""
    if path is None:
        text = resources.files("leoroute.data").joinpath("ksat_stations.csv").read_text()
    else:
        text = Path(path).read_text()
    stations = parse_ground_stations(text.splitlines())
    if not stations:
        raise ConfigurationError("ground station table is empty")
    return stations
