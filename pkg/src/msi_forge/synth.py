"""Analytic ground-truth scenes: ray casting, view rendering, dataset generation.

Scenes are unlit (albedo only) so that ground truth is exactly multi-view
consistent. Every scene carries an enclosing textured sphere shell so each
ray is guaranteed to hit something.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import geometry, imaging, msi as msi_mod
from .errors import ImageIOError
from .geometry import Pose, ViewingCircle
from .imaging import ErpImage
from .msi import Projection

_EPS = 1e-9


# ---------------------------------------------------------------------------
# Procedural textures


@dataclass(frozen=True)
class Solid:
    color: tuple

    def eval(self, points: np.ndarray) -> np.ndarray:
        return np.broadcast_to(np.asarray(self.color, dtype=float),
                               points.shape[:-1] + (3,)).copy()


@dataclass(frozen=True)
class Checker:
    scale: float
    color_a: tuple
    color_b: tuple

    def eval(self, points: np.ndarray) -> np.ndarray:
        cells = np.floor(points / self.scale).astype(np.int64)
        parity = (cells.sum(axis=-1) & 1).astype(bool)
        a = np.asarray(self.color_a, dtype=float)
        b = np.asarray(self.color_b, dtype=float)
        return np.where(parity[..., None], b, a)


@dataclass(frozen=True)
class Bands:
    """Horizontal colour bands cycling with height (world y)."""

    period: float
    palette: tuple  # tuple of RGB tuples

    def eval(self, points: np.ndarray) -> np.ndarray:
        pal = np.asarray(self.palette, dtype=float)
        idx = np.floor(points[..., 1] / self.period).astype(np.int64) % len(pal)
        return pal[idx]


def _texture_from_json(obj: dict):
    kind = obj["kind"]
    if kind == "solid":
        return Solid(tuple(obj["color"]))
    if kind == "checker":
        return Checker(obj["scale"], tuple(obj["color_a"]), tuple(obj["color_b"]))
    if kind == "horizontal-bands":
        return Bands(obj["period"], tuple(tuple(c) for c in obj["palette"]))
    raise ValueError(f"unknown texture kind {kind!r}")


# ---------------------------------------------------------------------------
# Primitives


@dataclass(frozen=True)
class Sphere:
    center: np.ndarray
    radius: float
    texture: object

    def intersect(self, origins, dirs):
        oc = origins - np.asarray(self.center, dtype=float)
        b = np.sum(oc * dirs, axis=-1)
        c = np.sum(oc * oc, axis=-1) - self.radius**2
        disc = b * b - c
        hit = disc >= 0
        sq = np.sqrt(np.where(hit, disc, 0.0))
        t_near = -b - sq
        t_far = -b + sq
        t = np.where(t_near > _EPS, t_near, t_far)
        return np.where(hit & (t > _EPS), t, np.inf)


@dataclass(frozen=True)
class Plane:
    point: np.ndarray
    normal: np.ndarray
    texture: object

    def intersect(self, origins, dirs):
        n = np.asarray(self.normal, dtype=float)
        n = n / np.linalg.norm(n)
        denom = dirs @ n
        num = (np.asarray(self.point, dtype=float) - origins) @ n
        with np.errstate(divide="ignore", invalid="ignore"):
            t = num / denom
        return np.where((np.abs(denom) > _EPS) & (t > _EPS), t, np.inf)


@dataclass(frozen=True)
class Box:
    bmin: np.ndarray
    bmax: np.ndarray
    texture: object

    def intersect(self, origins, dirs):
        bmin = np.asarray(self.bmin, dtype=float)
        bmax = np.asarray(self.bmax, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = 1.0 / dirs
        t0 = (bmin - origins) * inv
        t1 = (bmax - origins) * inv
        t_near = np.max(np.minimum(t0, t1), axis=-1)
        t_far = np.min(np.maximum(t0, t1), axis=-1)
        hit = t_far >= np.maximum(t_near, 0.0)
        t = np.where(t_near > _EPS, t_near, t_far)
        return np.where(hit & (t > _EPS), t, np.inf)


_PRIM_KINDS = {"sphere": Sphere, "infinite-plane": Plane, "axis-aligned-box": Box}


def _primitive_from_json(obj: dict):
    kind = obj["kind"]
    tex = _texture_from_json(obj["texture"])
    if kind == "sphere":
        return Sphere(np.asarray(obj["center"], dtype=float), float(obj["radius"]), tex)
    if kind == "infinite-plane":
        return Plane(np.asarray(obj["point"], dtype=float),
                     np.asarray(obj["normal"], dtype=float), tex)
    if kind == "axis-aligned-box":
        return Box(np.asarray(obj["min"], dtype=float),
                   np.asarray(obj["max"], dtype=float), tex)
    raise ValueError(f"unknown primitive kind {kind!r}")


@dataclass(frozen=True)
class SceneSpec:
    """Analytic primitives plus an enclosing textured sphere shell."""

    primitives: tuple
    enclosure: Sphere = field(
        default_factory=lambda: Sphere(
            np.zeros(3), 50.0, Checker(10.0, (0.7, 0.7, 0.7), (0.3, 0.3, 0.3))
        )
    )

    @classmethod
    def from_json(cls, obj: dict) -> "SceneSpec":
        prims = tuple(_primitive_from_json(p) for p in obj.get("primitives", []))
        enc = obj.get("enclosure")
        if enc is not None:
            enclosure = Sphere(
                np.asarray(enc.get("center", [0, 0, 0]), dtype=float),
                float(enc.get("radius", 50.0)),
                _texture_from_json(enc["texture"]),
            )
            return cls(prims, enclosure)
        return cls(prims)

    @classmethod
    def load(cls, path) -> "SceneSpec":
        path = Path(path)
        try:
            return cls.from_json(json.loads(path.read_text()))
        except OSError as exc:
            raise ImageIOError(f"failed to read scene {path}: {exc}") from exc


def bundled_scene_path(name: str) -> Path:
    """Path to one of the example scenes shipped with the package."""
    ref = resources.files("msi_forge") / "scenes" / f"{name}.json"
    with resources.as_file(ref) as p:
        return Path(p)


def load_bundled_scene(name: str) -> SceneSpec:
    return SceneSpec.load(bundled_scene_path(name))


BUNDLED_SCENES = ("three-depth-shells", "room-box-with-pillar", "textured-corridor")


# ---------------------------------------------------------------------------
# Ray casting and view rendering


def raycast_scene(scene: SceneSpec, origins: np.ndarray, dirs: np.ndarray):
    """Nearest-hit colours and depths for rays; returns ((P, 3), (P,))."""
    origins = np.atleast_2d(np.asarray(origins, dtype=float))
    dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
    prims = list(scene.primitives) + [scene.enclosure]
    ts = np.stack([p.intersect(origins, dirs) for p in prims], axis=0)
    best = np.argmin(ts, axis=0)
    t_hit = np.take_along_axis(ts, best[None], axis=0)[0]
    points = origins + t_hit[:, None] * dirs
    colors = np.zeros(origins.shape[:-1] + (3,))
    for k, prim in enumerate(prims):
        mask = best == k
        if np.any(mask):
            colors[mask] = prim.texture.eval(points[mask])
    return colors, t_hit


def render_view(
    scene: SceneSpec, pose: Pose, proj: Projection, supersample: int = 1
):
    """Ray-cast at supersample resolution, then antialias down to target size.

    Returns (color ErpImage, depth ErpImage in metres). Depth uses the
    nearest-of-centre subsample rather than averaging.
    """
    if supersample < 1 or int(supersample) != supersample:
        raise ValueError("supersample must be a positive integer")
    k = int(supersample)
    hi = Projection(proj.kind, proj.width * k, proj.height * k,
                    proj.viewing_circle, _scaled_intrinsics(proj.intrinsics, k))
    origins, dirs = msi_mod.world_rays(pose, hi)
    colors, depths = raycast_scene(scene, origins, dirs)
    color_hi = ErpImage(colors.reshape(hi.height, hi.width, 3))
    if k == 1:
        color = color_hi
        depth = depths.reshape(proj.height, proj.width, 1)
    else:
        color = imaging.antialiased_downsample(color_hi, proj.width, proj.height)
        grid = depths.reshape(proj.height, k, proj.width, k)
        depth = grid[:, k // 2, :, k // 2][:, :, None]
    return color, ErpImage(depth)


def _scaled_intrinsics(intr, k: int):
    if intr is None:
        return None
    return geometry.PinholeIntrinsics(
        intr.focal * k,
        (intr.cx + 0.5) * k - 0.5,
        (intr.cy + 0.5) * k - 0.5,
        intr.width * k,
        intr.height * k,
    )


# ---------------------------------------------------------------------------
# Dataset generation


@dataclass(frozen=True)
class GenConfig:
    width: int = 256
    height: int = 128
    supersample: int = 4
    viewing_radius: float = geometry.DEFAULT_VIEWING_RADIUS
    extrap_offset_min: float = 0.02
    extrap_offset_max: float = 0.36
    motion_step: float = 0.01  # metres per frame along +x
    seed: int = 0

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}

    @classmethod
    def from_json(cls, obj: dict) -> "GenConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(obj) - known
        if unknown:
            raise ValueError(f"unknown generator config keys: {sorted(unknown)}")
        return cls(**obj)


def generate_dataset(
    scene: SceneSpec,
    n_frames: int,
    out_dir,
    config: GenConfig | None = None,
    threads: int | None = None,
) -> dict:
    """Render ODS pairs plus ERP target triplets for n_frames rig positions.

    Per frame: the rig translates by motion_step * frame_index along +x; one
    interpolation target lies inside the viewing circle and two extrapolation
    targets have per-axis offsets drawn from the configured range. Returns the
    manifest (also written to manifest.json). Fully seed-deterministic.
    """
    if config is None:
        config = GenConfig()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(config.seed)
    vc = ViewingCircle(config.viewing_radius)
    proj = Projection("erp", config.width, config.height, vc)

    # Draw all per-frame randomness up front so threading cannot reorder it.
    frame_specs = []
    for f in range(n_frames):
        rig = Pose.from_translation([config.motion_step * f, 0.0, 0.0])
        offsets = [_interp_offset(rng, vc.radius_r)]
        offsets += [_extrap_offset(rng, config) for _ in range(2)]
        frame_specs.append((f, rig, offsets))

    def render_frame(spec):
        f, rig, offsets = spec
        entry = {"index": f, "rig_pose": rig.to_json(), "targets": []}
        for eye in ("left", "right"):
            p = Projection(f"ods-{eye}", config.width, config.height, vc)
            color, _ = render_view(scene, rig, p, config.supersample)
            name = f"frame{f:03d}_ods_{eye}.png"
            imaging.image_write(out_dir / name, color)
            entry[f"ods_{eye}"] = name
        for j, (label, offset) in enumerate(offsets):
            pose = Pose.from_translation(rig.translation + offset)
            color, depth = render_view(scene, pose, proj, config.supersample)
            img_name = f"frame{f:03d}_target{j}.png"
            dep_name = f"frame{f:03d}_target{j}_depth.erpf"
            imaging.image_write(out_dir / img_name, color)
            imaging.image_write(out_dir / dep_name, depth)
            entry["targets"].append(
                {
                    "kind": label,
                    "projection": "erp",
                    "pose": pose.to_json(),
                    "image": img_name,
                    "depth": dep_name,
                }
            )
        return entry

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            frames = list(pool.map(render_frame, frame_specs))
    else:
        frames = [render_frame(s) for s in frame_specs]

    manifest = {
        "config": config.to_json(),
        "seed": config.seed,
        "n_frames": n_frames,
        "frames": frames,
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True)
    )
    return manifest


def _interp_offset(rng: np.random.Generator, radius: float):
    angle = rng.uniform(0.0, 2.0 * np.pi)
    rho = radius * np.sqrt(rng.uniform(0.0, 1.0))
    return "interpolation", np.array([rho * np.cos(angle), 0.0, rho * np.sin(angle)])


def _extrap_offset(rng: np.random.Generator, config: GenConfig):
    mag = rng.uniform(config.extrap_offset_min, config.extrap_offset_max, 3)
    sign = rng.choice([-1.0, 1.0], 3)
    return "extrapolation", mag * sign
