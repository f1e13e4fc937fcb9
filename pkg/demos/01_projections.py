"""Tour of the projection math: equirectangular pixels, stereo panoramas,
and the viewing-circle geometry that gives omnidirectional disparity.

Run: python3 demos/01_projections.py
"""

import numpy as np

from msi_forge.geometry import (
    ViewingCircle,
    angles_to_direction,
    erp_pixel_to_angles,
    ods_ray,
    project_point_erp,
    project_point_ods,
)

# An equirectangular image maps pixel x linearly to azimuth and pixel y
# linearly to elevation. The image center looks straight down +x.
width, height = 8, 4
theta, phi = erp_pixel_to_angles(width / 2 - 0.5, height / 2 - 0.5, width, height)
print(f"center pixel -> azimuth {theta:+.3f}, elevation {phi:+.3f}")
print(f"  direction  -> {angles_to_direction(theta, phi).round(3)}")

# A stereo panorama replaces the single center of projection with a circle:
# every ray is tangent to a horizontal circle of radius r (half the eye
# separation), so every azimuth carries left/right disparity.
vc = ViewingCircle(0.032)
point = np.array([2.0, 0.0, 0.0])  # 2 m straight ahead
theta_l, _ = project_point_ods(point, vc, "left")
theta_r, _ = project_point_ods(point, vc, "right")
print(f"\npoint 2 m ahead: left azimuth {theta_l:+.6f}, right {theta_r:+.6f}")
print(f"disparity {theta_l - theta_r:.6f} rad = 2*arcsin(r/rho) "
      f"= {2 * np.arcsin(vc.radius_r / 2.0):.6f}")

# The disparity shrinks with distance — that's the depth cue the fit uses.
print("\ndistance -> disparity (rad)")
for rho in (1.0, 2.0, 5.0, 20.0):
    tl, _ = project_point_ods(np.array([rho, 0.0, 0.0]), vc, "left")
    tr, _ = project_point_ods(np.array([rho, 0.0, 0.0]), vc, "right")
    print(f"  {rho:5.1f} m  -> {tl - tr:.6f}")

# Rays can be reconstructed from panorama angles: each starts on the viewing
# circle and runs tangent to it.
origin, direction = ods_ray(0.0, 0.0, vc, "left")
print(f"\nforward left-eye ray: origin {origin.round(4)}, direction {direction}")

# With r = 0 everything collapses to the single-viewpoint panorama.
mono = ViewingCircle(0.0)
t0, p0 = project_point_ods(point, mono, "left")
t1, p1 = project_point_erp(point)
print(f"r=0 degenerates to ERP: ({t0:.3f}, {p0:.3f}) == ({t1:.3f}, {p1:.3f})")
