"""Spherical / omnidirectional-stereo projection math, rays and pose algebra.

Axis convention throughout the package: x points forward, z points left and
elevation is measured towards +y. Azimuth theta is in [-pi, pi] and wraps,
elevation phi is in [-pi/2, pi/2]. All functions broadcast over numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.transform import Rotation

from .errors import GeometryDomainError

DEFAULT_VIEWING_RADIUS = 0.032  # metres, half the ODS baseline


def wrap_angle(theta):
    """Wrap azimuth into [-pi, pi] (pi maps to -pi)."""
    return np.mod(np.asarray(theta, dtype=float) + np.pi, 2.0 * np.pi) - np.pi


@dataclass(frozen=True)
class ViewingCircle:
    """Horizontal circle to which all ODS camera rays are tangent."""

    radius_r: float = DEFAULT_VIEWING_RADIUS

    def __post_init__(self):
        if self.radius_r < 0:
            raise ValueError(f"viewing-circle radius must be >= 0, got {self.radius_r}")


@dataclass(frozen=True)
class Pose:
    """Rigid camera-to-world transform: rotation (3x3) and translation in metres."""

    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        rot = np.asarray(self.rotation, dtype=float).reshape(3, 3)
        trans = np.asarray(self.translation, dtype=float).reshape(3)
        if not np.allclose(rot @ rot.T, np.eye(3), atol=1e-9):
            raise ValueError("rotation matrix is not orthonormal")
        if not math.isclose(float(np.linalg.det(rot)), 1.0, abs_tol=1e-9):
            raise ValueError("rotation matrix determinant is not +1")
        object.__setattr__(self, "rotation", rot)
        object.__setattr__(self, "translation", trans)

    @classmethod
    def identity(cls) -> "Pose":
        return cls()

    @classmethod
    def from_translation(cls, t) -> "Pose":
        return cls(np.eye(3), np.asarray(t, dtype=float))

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Transform points of shape (..., 3)."""
        pts = np.asarray(points, dtype=float)
        return pts @ self.rotation.T + self.translation

    def rotate(self, vectors: np.ndarray) -> np.ndarray:
        """Rotate direction vectors of shape (..., 3) (no translation)."""
        return np.asarray(vectors, dtype=float) @ self.rotation.T

    def to_json(self) -> dict:
        return {
            "rotation": [float(v) for v in self.rotation.reshape(-1)],
            "translation": [float(v) for v in self.translation],
            "units": "metres",
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Pose":
        return cls(
            np.asarray(obj["rotation"], dtype=float).reshape(3, 3),
            np.asarray(obj["translation"], dtype=float),
        )


def pose_compose(a: Pose, b: Pose) -> Pose:
    """Pose applying b first, then a: apply(compose(a, b), x) == a(b(x))."""
    return Pose(a.rotation @ b.rotation, a.rotation @ b.translation + a.translation)


def pose_invert(p: Pose) -> Pose:
    rt = p.rotation.T
    return Pose(rt, -rt @ p.translation)


def pose_apply(p: Pose, x) -> np.ndarray:
    return p.apply(x)


def sample_transform(
    rng: np.random.Generator,
    rot_range: float = math.radians(1.7),
    trans_range: float = 0.01,
    scale: float = 1.0,
) -> Pose:
    """Draw a random small rigid transform, uniform per Euler angle and axis."""
    if rot_range < 0 or trans_range < 0 or scale < 0:
        raise ValueError("ranges and scale must be non-negative")
    angles = rng.uniform(-1.0, 1.0, 3) * rot_range * scale
    trans = rng.uniform(-1.0, 1.0, 3) * trans_range * scale
    rot = Rotation.from_euler("xyz", angles).as_matrix()
    return Pose(rot, trans)


# ---------------------------------------------------------------------------
# ERP <-> angles


def erp_pixel_to_angles(x, y, width: int, height: int):
    """Continuous pixel coordinates (pixel-center convention) to (theta, phi)."""
    if width < 1 or height < 1:
        raise ValueError("image dimensions must be >= 1")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x < 0) or np.any(x >= width) or np.any(y < 0) or np.any(y >= height):
        raise ValueError("pixel coordinates out of range")
    theta = np.pi * (2.0 * (x + 0.5) / width - 1.0)
    phi = np.pi * (0.5 - (y + 0.5) / height)
    return theta, phi


def angles_to_erp_pixel(theta, phi, width: int, height: int):
    """Inverse of erp_pixel_to_angles (continuous, no wrapping applied)."""
    x = (np.asarray(theta, dtype=float) / np.pi + 1.0) * width / 2.0 - 0.5
    y = (0.5 - np.asarray(phi, dtype=float) / np.pi) * height - 0.5
    return x, y


def angles_to_direction(theta, phi) -> np.ndarray:
    """Unit direction for (theta, phi); stacks along a trailing axis of size 3."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    cp = np.cos(phi)
    return np.stack(
        [cp * np.cos(theta), np.sin(phi) * np.ones_like(theta), -cp * np.sin(theta)],
        axis=-1,
    )


def project_point_erp(p: np.ndarray):
    """Project points (..., 3) to (theta, phi)."""
    p = np.asarray(p, dtype=float)
    px, py, pz = p[..., 0], p[..., 1], p[..., 2]
    rho = np.hypot(px, pz)
    if np.any((rho == 0) & (py == 0)):
        raise GeometryDomainError("cannot project the zero vector")
    theta = -np.arctan2(pz, px)
    phi = np.arctan2(py, rho)
    return theta, phi


# ---------------------------------------------------------------------------
# ODS projection


def project_point_ods(p: np.ndarray, vc: ViewingCircle, eye: str):
    """Project points (..., 3) into the left or right ODS image."""
    sign = _eye_sign(eye)
    p = np.asarray(p, dtype=float)
    px, py, pz = p[..., 0], p[..., 1], p[..., 2]
    rho = np.hypot(px, pz)
    if np.any(rho <= vc.radius_r):
        raise GeometryDomainError(
            "point lies inside or on the viewing cylinder "
            f"(radius {vc.radius_r} m)"
        )
    theta = wrap_angle(sign * np.arcsin(vc.radius_r / rho) - np.arctan2(pz, px))
    phi = np.arctan2(py, np.sqrt(rho * rho - vc.radius_r**2))
    return theta, phi


def ods_ray(theta, phi, vc: ViewingCircle, eye: str):
    """Tangent ray for ODS pixel angles; returns (origins, directions)."""
    sign = _eye_sign(eye)
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    zeros = np.zeros_like(theta)
    origin = sign * vc.radius_r * np.stack([np.sin(theta), zeros, np.cos(theta)], axis=-1)
    return origin, angles_to_direction(theta, phi)


def _eye_sign(eye: str) -> float:
    if eye == "left":
        return 1.0
    if eye == "right":
        return -1.0
    raise ValueError(f"eye must be 'left' or 'right', got {eye!r}")


# ---------------------------------------------------------------------------
# Pinhole


@dataclass(frozen=True)
class PinholeIntrinsics:
    focal: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if self.focal <= 0:
            raise ValueError("focal length must be positive")


def pinhole_ray(x, y, intr: PinholeIntrinsics, pose: Pose):
    """Ray through continuous pixel (x, y); x-forward, image-right maps to -z."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = np.stack(
        [
            np.ones_like(x),
            (y - intr.cy) / intr.focal,
            -(x - intr.cx) / intr.focal,
        ],
        axis=-1,
    )
    d = d / np.linalg.norm(d, axis=-1, keepdims=True)
    origin = np.broadcast_to(pose.translation, d.shape)
    return origin.copy(), pose.rotate(d)


# ---------------------------------------------------------------------------
# Sphere intersection, area weights, V coordinate


def ray_sphere_exit(origins: np.ndarray, directions: np.ndarray, radius: float):
    """Parameter t of the exit intersection with the origin-centred sphere.

    Origins must lie strictly inside the sphere; directions must be unit length.
    """
    o = np.asarray(origins, dtype=float)
    d = np.asarray(directions, dtype=float)
    oo = np.sum(o * o, axis=-1)
    if np.any(oo >= radius * radius):
        raise GeometryDomainError(
            f"ray origin lies outside sphere of radius {radius} m"
        )
    od = np.sum(o * d, axis=-1)
    return -od + np.sqrt(od * od + radius * radius - oo)


def area_weights(width: int, height: int) -> np.ndarray:
    """Per-pixel solid angle subtended on the unit sphere, shape (H, W)."""
    if width < 1 or height < 1:
        raise ValueError("image dimensions must be >= 1")
    y_edges = np.arange(height + 1, dtype=float)
    phi_edges = np.pi * (0.5 - y_edges / height)
    # cos of the polar angle == sin of the elevation; sin is monotone over
    # the elevation range, so the row areas telescope to exactly 4*pi.
    row = (2.0 * np.pi / width) * np.abs(np.diff(np.sin(phi_edges)))
    return np.tile(row[:, None], (1, width))


def v_coordinate(y, height: int):
    """|sin(phi)| at the pixel-centre elevation of row y."""
    y = np.asarray(y, dtype=float)
    if np.any(y < 0) or np.any(y >= height):
        raise ValueError("row index out of range")
    phi = np.pi * (0.5 - (y + 0.5) / height)
    return np.abs(np.sin(phi))
