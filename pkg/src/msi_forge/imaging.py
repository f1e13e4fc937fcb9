"""Equirectangular image container, sub-pixel sampling, filters and file I/O.

Horizontal boundaries wrap (azimuth is periodic); vertical boundaries clamp.
Pixel data is stored row-major as float64 in [0, 1] for colour/alpha channels.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image
from scipy.ndimage import convolve1d

from .errors import ImageIOError

# Coordinates this close to a texel centre sample it exactly, so that
# projection round-trips reproduce source pixels bit-for-bit.
_CENTER_SNAP = 1e-9

_RAW_MAGIC = b"ERPF"


@dataclass(frozen=True)
class ErpImage:
    """Equirectangular grid of samples, shape (height, width, channels)."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=float)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        if arr.ndim != 3 or not 1 <= arr.shape[2] <= 4:
            raise ValueError(f"expected (H, W, 1..4) data, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("image contains non-finite samples")
        object.__setattr__(self, "data", arr)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    @classmethod
    def constant(cls, width: int, height: int, values) -> "ErpImage":
        values = np.atleast_1d(np.asarray(values, dtype=float))
        return cls(np.tile(values, (height, width, 1)))


def _snap(coords: np.ndarray) -> np.ndarray:
    rounded = np.round(coords)
    return np.where(np.abs(coords - rounded) < _CENTER_SNAP, rounded, coords)


def bilinear_sample(img: ErpImage, x, y) -> np.ndarray:
    """Sample at continuous pixel coordinates; returns shape x.shape + (C,)."""
    return sample_grid(img.data, np.asarray(x, dtype=float), np.asarray(y, dtype=float))


def sample_grid(data: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """bilinear_sample on a bare (H, W, C) array."""
    h, w = data.shape[:2]
    x = _snap(np.mod(x, w))
    y = _snap(np.clip(y, 0.0, h - 1.0))
    x0 = np.floor(x)
    y0 = np.floor(y)
    fx = (x - x0)[..., None]
    fy = (y - y0)[..., None]
    ix0 = x0.astype(np.intp) % w
    ix1 = (ix0 + 1) % w
    iy0 = np.minimum(y0.astype(np.intp), h - 1)
    iy1 = np.minimum(iy0 + 1, h - 1)
    v00 = data[iy0, ix0]
    v01 = data[iy0, ix1]
    v10 = data[iy1, ix0]
    v11 = data[iy1, ix1]
    top = v00 * (1.0 - fx) + v01 * fx
    bot = v10 * (1.0 - fx) + v11 * fx
    return top * (1.0 - fy) + bot * fy


def bilinear_footprint(data_shape, x: np.ndarray, y: np.ndarray):
    """Flat indices and weights of the 4 texels a bilinear sample touches.

    Returns (indices, weights), each of shape x.shape + (4,). The same
    wrap/clamp/snap rules as sample_grid, so gather(indices, weights) is
    identical to sampling.
    """
    h, w = data_shape[:2]
    x = _snap(np.mod(np.asarray(x, dtype=float), w))
    y = _snap(np.clip(np.asarray(y, dtype=float), 0.0, h - 1.0))
    x0 = np.floor(x)
    y0 = np.floor(y)
    fx = x - x0
    fy = y - y0
    ix0 = x0.astype(np.intp) % w
    ix1 = (ix0 + 1) % w
    iy0 = np.minimum(y0.astype(np.intp), h - 1)
    iy1 = np.minimum(iy0 + 1, h - 1)
    idx = np.stack(
        [iy0 * w + ix0, iy0 * w + ix1, iy1 * w + ix0, iy1 * w + ix1], axis=-1
    )
    wts = np.stack(
        [
            (1.0 - fx) * (1.0 - fy),
            fx * (1.0 - fy),
            (1.0 - fx) * fy,
            fx * fy,
        ],
        axis=-1,
    )
    return idx, wts


# ---------------------------------------------------------------------------
# Filters


def _gauss_kernel(sigma: float) -> np.ndarray:
    radius = int(np.ceil(3.0 * sigma))
    t = np.arange(-radius, radius + 1, dtype=float)
    return np.exp(-0.5 * (t / sigma) ** 2)


def gaussian_blur(img: ErpImage, sigma: float) -> ErpImage:
    """Separable Gaussian blur; wraps horizontally, clamps vertically."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    if sigma == 0:
        return ErpImage(img.data.copy())
    kernel = _gauss_kernel(sigma)

    def conv2(arr):
        tmp = convolve1d(arr, kernel, axis=1, mode="wrap")
        return convolve1d(tmp, kernel, axis=0, mode="nearest")

    # Normalize by the identically-convolved unit image so constants survive
    # the filter exactly (the raw kernel sum is not exactly 1 in floats).
    norm = conv2(np.ones(img.data.shape[:2]))
    return ErpImage(conv2(img.data) / norm[:, :, None])


def antialiased_downsample(img: ErpImage, out_width: int, out_height: int) -> ErpImage:
    """Gaussian pre-blur (sigma = ratio/2) followed by exact area reduction."""
    if out_width > img.width or out_height > img.height:
        raise ValueError("output must not exceed input dimensions")
    if img.width % out_width or img.height % out_height:
        raise ValueError("downsample ratios must be integer")
    rx = img.width // out_width
    ry = img.height // out_height
    blurred = gaussian_blur(img, 0.5 * rx)
    data = blurred.data.reshape(out_height, ry, out_width, rx, img.channels)
    return ErpImage(data.mean(axis=(1, 3)))


def jbu_upsample(
    low: ErpImage,
    guide: ErpImage,
    spatial_sigma: float = 1.0,
    range_sigma: float = 0.1,
    radius: int = 2,
) -> ErpImage:
    """Joint bilateral upsampling of a 1-channel image guided by RGB detail.

    spatial_sigma and radius are in low-resolution pixels; range_sigma is in
    intensity units of the guide. Horizontal boundaries wrap.
    """
    if low.channels != 1 or guide.channels != 3:
        raise ValueError("expected 1-channel low image and 3-channel guide")
    if guide.width % low.width or guide.height % low.height:
        raise ValueError("guide dimensions must be integer multiples of low's")
    kx = guide.width // low.width
    ky = guide.height // low.height

    gx = (np.arange(guide.width, dtype=float) + 0.5) / kx - 0.5  # low-res coords
    gy = (np.arange(guide.height, dtype=float) + 0.5) / ky - 0.5
    lx = gx[None, :]
    ly = gy[:, None]
    cx = np.round(lx).astype(np.intp)
    cy = np.round(ly).astype(np.intp)

    low_data = low.data[:, :, 0]
    guide_hr = guide.data
    num = np.zeros((guide.height, guide.width))
    den = np.zeros((guide.height, guide.width))
    inv2_sp = 0.5 / (spatial_sigma**2)
    inv2_rg = 0.5 / (range_sigma**2) if range_sigma > 0 else None

    for dy in range(-radius, radius + 1):
        qy = np.clip(cy + dy, 0, low.height - 1)
        for dx in range(-radius, radius + 1):
            qx = np.mod(cx + dx, low.width)
            # Horizontal distance respects the azimuth wrap.
            dwx = np.abs(lx - qx)
            dwx = np.minimum(dwx, low.width - dwx)
            dist2 = dwx**2 + (ly - qy) ** 2
            wgt = np.exp(-dist2 * inv2_sp)
            if inv2_rg is not None:
                # Guide value at the low-res texel centre, in high-res coords.
                gqx = np.mod((qx + 0.5) * kx - 0.5, guide.width)
                gqy = np.clip((qy + 0.5) * ky - 0.5, 0, guide.height - 1)
                gq = sample_grid(guide_hr, np.broadcast_to(gqx, num.shape),
                                 np.broadcast_to(gqy, num.shape))
                diff2 = np.sum((guide_hr - gq) ** 2, axis=-1)
                wgt = wgt * np.exp(-diff2 * inv2_rg)
            num += wgt * low_data[qy, qx]
            den += wgt
    return ErpImage((num / den)[:, :, None])


# ---------------------------------------------------------------------------
# File I/O


def image_write(path, img: ErpImage) -> None:
    path = Path(path)
    suffix = path.suffix.lower()
    try:
        if suffix == ".png":
            _write_png(path, img)
        elif suffix == ".erpf":
            _write_raw(path, img)
        else:
            raise ImageIOError(f"unsupported image format: {path}")
    except OSError as exc:
        if isinstance(exc, ImageIOError):
            raise
        raise ImageIOError(f"failed to write {path}: {exc}") from exc


def image_read(path) -> ErpImage:
    path = Path(path)
    suffix = path.suffix.lower()
    try:
        if suffix == ".png":
            return _read_png(path)
        if suffix == ".erpf":
            return _read_raw(path)
        raise ImageIOError(f"unsupported image format: {path}")
    except OSError as exc:
        if isinstance(exc, ImageIOError):
            raise
        raise ImageIOError(f"failed to read {path}: {exc}") from exc


_PNG_MODES = {1: "L", 2: "LA", 3: "RGB", 4: "RGBA"}


def _write_png(path: Path, img: ErpImage) -> None:
    if np.any(img.data < 0) or np.any(img.data > 1):
        raise ImageIOError(f"PNG output requires values in [0, 1]: {path}")
    arr = np.round(img.data * 255.0).astype(np.uint8)
    if img.channels == 1:
        arr = arr[:, :, 0]
    Image.fromarray(arr, mode=_PNG_MODES[img.channels]).save(path)


def _read_png(path: Path) -> ErpImage:
    try:
        with Image.open(path) as im:
            im.load()
            if im.mode not in _PNG_MODES.values():
                im = im.convert("RGB")
            arr = np.asarray(im, dtype=float) / 255.0
    except Exception as exc:
        raise ImageIOError(f"failed to read {path}: {exc}") from exc
    return ErpImage(arr)


def _write_raw(path: Path, img: ErpImage) -> None:
    header = _RAW_MAGIC + struct.pack("<III", img.width, img.height, img.channels)
    payload = img.data.transpose(2, 0, 1).astype("<f4").tobytes()
    path.write_bytes(header + payload)


def _read_raw(path: Path) -> ErpImage:
    blob = path.read_bytes()
    if len(blob) < 16 or blob[:4] != _RAW_MAGIC:
        raise ImageIOError(f"not a raw ERPF container: {path}")
    w, h, c = struct.unpack("<III", blob[4:16])
    expected = 16 + 4 * w * h * c
    if len(blob) != expected:
        raise ImageIOError(
            f"truncated or oversized ERPF container {path}: "
            f"{len(blob)} bytes, expected {expected}"
        )
    data = np.frombuffer(blob[16:], dtype="<f4").reshape(c, h, w)
    return ErpImage(data.transpose(1, 2, 0).astype(float))
