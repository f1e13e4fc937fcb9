"""Sphere sweep volumes: reprojection of an ODS/ERP source onto concentric spheres."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import geometry, imaging
from .geometry import Pose, ViewingCircle
from .imaging import ErpImage

# Back-projected points that fall inside the viewing cylinder have their
# horizontal distance clamped just outside it so projection stays total.
_CYLINDER_CLEARANCE = 1.0 + 1e-6


@dataclass(frozen=True)
class SphereSweepVolume:
    """Stack of ERP reprojections of one source image, one per sphere radius."""

    radii: np.ndarray  # (N,)
    layers: np.ndarray  # (N, H, W, 3)
    source_eye: str  # left | right | mono
    rig_transform: Pose = field(default_factory=Pose.identity)

    def __post_init__(self):
        radii = np.asarray(self.radii, dtype=float)
        layers = np.asarray(self.layers, dtype=float)
        if layers.ndim != 4 or layers.shape[0] != radii.size:
            raise ValueError("layer count must equal radii count")
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "layers", layers)

    @property
    def width(self) -> int:
        return self.layers.shape[2]

    @property
    def height(self) -> int:
        return self.layers.shape[1]


def build_sweep(
    src: ErpImage,
    src_kind: str,
    vc: ViewingCircle,
    radii,
    out_width: int,
    out_height: int,
    rig_transform: Pose | None = None,
) -> SphereSweepVolume:
    """Reproject the source onto each concentric sphere.

    For every output pixel, the pixel direction is scaled to the (optionally
    rig-transformed) sphere of radius r_i, projected back into the source view
    and bilinearly sampled.
    """
    if src_kind not in ("erp", "ods-left", "ods-right"):
        raise ValueError(f"unknown source kind {src_kind!r}")
    radii = np.asarray(radii, dtype=float)
    if np.any(np.diff(radii) <= 0):
        raise ValueError("radii must be strictly increasing")
    if rig_transform is None:
        rig_transform = Pose.identity()

    xs = np.arange(out_width, dtype=float)
    ys = np.arange(out_height, dtype=float)
    gx, gy = np.meshgrid(xs, ys)
    theta, phi = geometry.erp_pixel_to_angles(gx, gy, out_width, out_height)
    dirs = geometry.angles_to_direction(theta, phi).reshape(-1, 3)

    layers = np.empty((radii.size, out_height, out_width, src.channels))
    for i, radius in enumerate(radii):
        points = rig_transform.apply(radius * dirs)
        if src_kind == "erp":
            s_theta, s_phi = geometry.project_point_erp(points)
        else:
            eye = "left" if src_kind == "ods-left" else "right"
            s_theta, s_phi = _project_ods_clamped(points, vc, eye)
        sx, sy = geometry.angles_to_erp_pixel(s_theta, s_phi, src.width, src.height)
        layers[i] = imaging.bilinear_sample(src, sx, sy).reshape(
            out_height, out_width, src.channels
        )
    eye_tag = {"erp": "mono", "ods-left": "left", "ods-right": "right"}[src_kind]
    return SphereSweepVolume(radii, layers, eye_tag, rig_transform)


def _project_ods_clamped(points: np.ndarray, vc: ViewingCircle, eye: str):
    """ODS projection with the horizontal distance clamped outside the cylinder."""
    p = np.array(points, dtype=float)
    if vc.radius_r > 0:
        rho = np.hypot(p[:, 0], p[:, 2])
        min_rho = vc.radius_r * _CYLINDER_CLEARANCE
        bad = rho < min_rho
        if np.any(bad):
            scale = min_rho / np.maximum(rho[bad], 1e-300)
            p[bad, 0] *= scale
            p[bad, 2] *= scale
        return geometry.project_point_ods(p, vc, eye)
    return geometry.project_point_erp(p)


def transformed_sweep_pair(
    left: ErpImage,
    right: ErpImage,
    vc: ViewingCircle,
    radii,
    transform: Pose,
    out_width: int,
    out_height: int,
):
    """Left and right sweeps with the concentric spheres rigidly transformed."""
    return (
        build_sweep(left, "ods-left", vc, radii, out_width, out_height, transform),
        build_sweep(right, "ods-right", vc, radii, out_width, out_height, transform),
    )
