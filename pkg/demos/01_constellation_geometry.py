"""Build the default polar constellation, rotate it and look at link lengths."""
import numpy as np

from leoroute import geometry
from leoroute.geometry import ConstellationConfig

cfg = ConstellationConfig()  # 5 planes x 40 satellites, 1000 km + 10 km per plane
c = geometry.build_constellation(cfg)
print("satellites:", c.num_satellites)
print("altitudes (km):", cfg.altitudes_km())
print("plane azimuths (deg):", np.degrees(c.plane_angles))

# intra-plane neighbours sit on a chord of fixed length
for a in range(cfg.num_planes):
    print(f"plane {a}: spacing {geometry.intra_plane_spacing_km(cfg, a):.2f} km, "
          f"period {geometry.orbital_period(cfg.altitude_km(a)) / 60:.2f} min")

# rotating by dt advances each plane at its own rate, so planes drift apart
later = geometry.propagate(c, 5e5)
pos = later.satellite_positions()
print("plane 0 vs plane 1 anomaly offset after 5e5 s (deg):",
      np.degrees((later.anomalies[40] - later.anomalies[0]) % (2 * np.pi)))

# line of sight: the Earth blocks nearly antipodal pairs
print("sat 0 -> sat 20 (same plane, opposite side):",
      geometry.slant_range(pos[0], pos[20], cfg.earth_radius_km))
print("sat 0 -> sat 1:", geometry.slant_range(pos[0], pos[1], cfg.earth_radius_km))

stations = geometry.load_ground_stations()
print(len(stations), "ground stations, first three:", [s.name for s in stations[:3]])
