"""Multi-sphere image representation and its differentiable-friendly renderer.

An MSI is an ordered stack of concentric spherical RGBA layers, stored
near-to-far. Rendering intersects each camera ray with every sphere,
bilinearly samples the layers and over-composites front to back.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import geometry, imaging
from .errors import HeadboxError, ImageIOError
from .geometry import Pose, ViewingCircle

HEADBOX_FRACTION = 0.9
_MSI_MAGIC = b"MSI1"
_MSI_VERSION = 1
MODE_BAKED_RGBA = 1
MODE_RGBA_BETA = 2


@dataclass(frozen=True)
class Projection:
    """Target projection for rendering: kind, image size and parameters."""

    kind: str  # erp | ods-left | ods-right | pinhole
    width: int
    height: int
    viewing_circle: ViewingCircle = ViewingCircle()
    intrinsics: geometry.PinholeIntrinsics | None = None

    def __post_init__(self):
        if self.kind not in ("erp", "ods-left", "ods-right", "pinhole"):
            raise ValueError(f"unknown projection kind {self.kind!r}")
        if self.kind == "pinhole" and self.intrinsics is None:
            raise ValueError("pinhole projection requires intrinsics")


def camera_rays(proj: Projection):
    """Camera-frame rays for every pixel; returns (origins, dirs), (P, 3)."""
    xs = np.arange(proj.width, dtype=float)
    ys = np.arange(proj.height, dtype=float)
    x, y = np.meshgrid(xs, ys)
    if proj.kind == "pinhole":
        o, d = geometry.pinhole_ray(x, y, proj.intrinsics, Pose.identity())
    else:
        theta, phi = geometry.erp_pixel_to_angles(x, y, proj.width, proj.height)
        if proj.kind == "erp":
            o = np.zeros(theta.shape + (3,))
            d = geometry.angles_to_direction(theta, phi)
        else:
            eye = "left" if proj.kind == "ods-left" else "right"
            o, d = geometry.ods_ray(theta, phi, proj.viewing_circle, eye)
    return o.reshape(-1, 3), d.reshape(-1, 3)


@dataclass(frozen=True)
class Msi:
    """Concentric RGBA sphere layers (near to far) with optional blend weights."""

    radii: np.ndarray  # (N,)
    layers: np.ndarray  # (N, H, W, 4), RGBA with straight alpha
    beta: np.ndarray | None = None  # (N, H, W) left/right blending weights

    def __post_init__(self):
        radii = np.asarray(self.radii, dtype=float)
        layers = np.asarray(self.layers, dtype=float)
        if radii.ndim != 1 or np.any(np.diff(radii) <= 0) or radii[0] <= 0:
            raise ValueError("radii must be positive and strictly increasing")
        if layers.ndim != 4 or layers.shape[0] != radii.size or layers.shape[3] != 4:
            raise ValueError(f"layers must be (N, H, W, 4), got {layers.shape}")
        if np.any(layers[..., 3] < 0) or np.any(layers[..., 3] > 1):
            raise ValueError("alpha values must lie in [0, 1]")
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "layers", layers)
        if self.beta is not None:
            beta = np.asarray(self.beta, dtype=float)
            if beta.shape != layers.shape[:3]:
                raise ValueError("beta grids must match layer resolution")
            if np.any(beta < 0) or np.any(beta > 1):
                raise ValueError("beta values must lie in [0, 1]")
            object.__setattr__(self, "beta", beta)

    @property
    def n_layers(self) -> int:
        return self.radii.size

    @property
    def width(self) -> int:
        return self.layers.shape[2]

    @property
    def height(self) -> int:
        return self.layers.shape[1]


def layer_radii(n: int = 32, r_near: float = 1.0, r_far: float = 100.0) -> np.ndarray:
    """Radii with reciprocal depths linearly spaced from 1/r_near to 1/r_far."""
    if n < 2:
        raise ValueError("need at least 2 layers")
    if not 0 < r_near < r_far:
        raise ValueError("require 0 < r_near < r_far")
    return 1.0 / np.linspace(1.0 / r_near, 1.0 / r_far, n)


def blend_layers(
    sweep_left: np.ndarray, sweep_right: np.ndarray, beta: np.ndarray
) -> np.ndarray:
    """Per-layer colours beta*left + (1-beta)*right; beta broadcast over RGB."""
    sweep_left = np.asarray(sweep_left, dtype=float)
    sweep_right = np.asarray(sweep_right, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if sweep_left.shape != sweep_right.shape or beta.shape != sweep_left.shape[:-1]:
        raise ValueError("sweep/beta dimensions do not match")
    if np.any(beta < 0) or np.any(beta > 1):
        raise ValueError("beta values must lie in [0, 1]")
    b = beta[..., None]
    return b * sweep_left + (1.0 - b) * sweep_right


def composite_ray(colors: np.ndarray, alphas: np.ndarray):
    """Front-to-back over-compositing along the leading (layer) axis.

    colors: (N, ..., C), alphas: (N, ...). Returns (color, transmittance)
    where the per-layer net opacities plus transmittance sum to 1 exactly.
    """
    colors = np.asarray(colors, dtype=float)
    alphas = np.asarray(alphas, dtype=float)
    if colors.shape[: alphas.ndim] != alphas.shape:
        raise ValueError("colors and alphas must share leading dimensions")
    trans = _transmittances(alphas)
    # w_i = T_i - T_{i+1} telescopes, so sum(w) + T_N is exactly 1.
    weights = trans[:-1] - trans[1:]
    extra = colors.ndim - alphas.ndim
    w = weights.reshape(weights.shape + (1,) * extra)
    return np.sum(w * colors, axis=0), trans[-1]


def net_opacities(alphas: np.ndarray) -> np.ndarray:
    """Per-layer compositing weights alpha_i * prod_{j<i}(1 - alpha_j)."""
    trans = _transmittances(np.asarray(alphas, dtype=float))
    return trans[:-1] - trans[1:]


def _transmittances(alphas: np.ndarray) -> np.ndarray:
    """T_i = prod_{j<i}(1 - alpha_j), shape (N+1, ...); T_1 = 1."""
    ones = np.ones((1,) + alphas.shape[1:])
    return np.concatenate([ones, np.cumprod(1.0 - alphas, axis=0)], axis=0)


# ---------------------------------------------------------------------------
# Rendering


def world_rays(pose: Pose, proj: Projection):
    """World-space rays for a camera with the given pose and projection."""
    o, d = camera_rays(proj)
    return pose.apply(o), pose.rotate(d)


def check_headbox(origins: np.ndarray, inner_radius: float, allow_outside: bool):
    """Reject ray origins too close to (or beyond) the innermost sphere."""
    max_norm = float(np.max(np.linalg.norm(origins, axis=-1)))
    if max_norm >= inner_radius:
        raise HeadboxError(max_norm, inner_radius)
    if max_norm >= HEADBOX_FRACTION * inner_radius and not allow_outside:
        raise HeadboxError(max_norm, inner_radius)


def layer_sample_coords(radii: np.ndarray, origins: np.ndarray, dirs: np.ndarray,
                        width: int, height: int):
    """Ray/sphere-stack intersections as layer texture coordinates.

    Returns (ts, xs, ys), each (N, P): ray parameter at each sphere and the
    continuous ERP pixel coordinates of the intersection point.
    """
    n = len(radii)
    ts = np.empty((n, origins.shape[0]))
    xs = np.empty_like(ts)
    ys = np.empty_like(ts)
    for i, radius in enumerate(radii):
        t = geometry.ray_sphere_exit(origins, dirs, radius)
        theta, phi = geometry.project_point_erp(origins + t[:, None] * dirs)
        x, y = geometry.angles_to_erp_pixel(theta, phi, width, height)
        ts[i], xs[i], ys[i] = t, x, y
    return ts, xs, ys


def _sample_layers(msi: Msi, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    sampled = np.empty((msi.n_layers, xs.shape[1], 4))
    for i in range(msi.n_layers):
        sampled[i] = imaging.sample_grid(msi.layers[i], xs[i], ys[i])
    return sampled


def render(
    msi: Msi, pose: Pose, proj: Projection, *, allow_outside_headbox: bool = False
) -> imaging.ErpImage:
    """Render the MSI from a novel pose. Output is RGB over black."""
    origins, dirs = world_rays(pose, proj)
    check_headbox(origins, msi.radii[0], allow_outside_headbox)
    _, xs, ys = layer_sample_coords(msi.radii, origins, dirs, msi.width, msi.height)
    sampled = _sample_layers(msi, xs, ys)
    color, _ = composite_ray(sampled[..., :3], sampled[..., 3])
    return imaging.ErpImage(color.reshape(proj.height, proj.width, 3))


def render_rays(msi: Msi, origins: np.ndarray, dirs: np.ndarray,
                *, allow_outside_headbox: bool = False) -> np.ndarray:
    """Render arbitrary world-space rays; returns (P, 3) colours."""
    check_headbox(origins, msi.radii[0], allow_outside_headbox)
    _, xs, ys = layer_sample_coords(msi.radii, origins, dirs, msi.width, msi.height)
    sampled = _sample_layers(msi, xs, ys)
    color, _ = composite_ray(sampled[..., :3], sampled[..., 3])
    return color


def expected_depth(
    msi: Msi, pose: Pose, proj: Projection, *, allow_outside_headbox: bool = False
) -> imaging.ErpImage:
    """Opacity-weighted ray distance; residual transmittance hits the far layer."""
    origins, dirs = world_rays(pose, proj)
    check_headbox(origins, msi.radii[0], allow_outside_headbox)
    ts, xs, ys = layer_sample_coords(msi.radii, origins, dirs, msi.width, msi.height)
    sampled = _sample_layers(msi, xs, ys)
    depth, trans = composite_ray(ts[..., None], sampled[..., 3])
    depth = depth[:, 0] + trans * ts[-1]
    return imaging.ErpImage(depth.reshape(proj.height, proj.width, 1))


# ---------------------------------------------------------------------------
# Container I/O and web export


def msi_write(path, msi: Msi) -> None:
    """Write the binary MSI container (float32 planar data)."""
    path = Path(path)
    mode = MODE_BAKED_RGBA if msi.beta is None else MODE_RGBA_BETA
    header = _MSI_MAGIC + struct.pack(
        "<HBIII", _MSI_VERSION, mode, msi.width, msi.height, msi.n_layers
    )
    radii = msi.radii.astype("<f8").tobytes()
    planes = msi.layers.transpose(0, 3, 1, 2)  # (N, C, H, W)
    if msi.beta is not None:
        planes = np.concatenate([planes, msi.beta[:, None]], axis=1)
    try:
        path.write_bytes(header + radii + planes.astype("<f4").tobytes())
    except OSError as exc:
        raise ImageIOError(f"failed to write {path}: {exc}") from exc


def msi_read(path) -> Msi:
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as exc:
        raise ImageIOError(f"failed to read {path}: {exc}") from exc
    if len(blob) < 19 or blob[:4] != _MSI_MAGIC:
        raise ImageIOError(f"bad magic in MSI container: {path}")
    version, mode, w, h, n = struct.unpack("<HBIII", blob[4:19])
    if version != _MSI_VERSION:
        raise ImageIOError(f"unsupported MSI container version {version}: {path}")
    if mode not in (MODE_BAKED_RGBA, MODE_RGBA_BETA):
        raise ImageIOError(f"unsupported MSI container mode {mode}: {path}")
    channels = 4 if mode == MODE_BAKED_RGBA else 5
    offset = 19 + 8 * n
    expected = offset + 4 * n * channels * h * w
    if len(blob) != expected:
        raise ImageIOError(
            f"truncated MSI container {path}: {len(blob)} bytes, expected {expected}"
        )
    radii = np.frombuffer(blob[19:offset], dtype="<f8").astype(float)
    planes = np.frombuffer(blob[offset:], dtype="<f4").reshape(n, channels, h, w)
    layers = planes[:, :4].transpose(0, 2, 3, 1).astype(float)
    beta = planes[:, 4].astype(float) if channels == 5 else None
    return Msi(radii, layers, beta)


def export_web(msi: Msi, out_dir) -> None:
    """Write one straight-alpha RGBA PNG per layer plus a metadata JSON."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    meta = {
        "width": msi.width,
        "height": msi.height,
        "n_layers": msi.n_layers,
        "radii_metres": [float(r) for r in msi.radii],
        "axis_convention": "x-forward, z-left, elevation +y",
        "straight_alpha": True,
        "layers": [f"layer_{i:03d}.png" for i in range(msi.n_layers)],
    }
    (out_dir / "metadata.json").write_text(json.dumps(meta, indent=2, sort_keys=True))
    for i in range(msi.n_layers):
        rgba = np.clip(msi.layers[i], 0.0, 1.0)
        imaging.image_write(out_dir / f"layer_{i:03d}.png", imaging.ErpImage(rgba))
