"""Image-quality and temporal-consistency metrics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import gaussian_filter

from . import geometry
from .imaging import ErpImage, gaussian_blur

PSNR_CAP_DB = 99.0

_LUMA = np.array([0.299, 0.587, 0.114])
_SSIM_SIGMA = 1.5
_SSIM_WINDOW = 11
_SSIM_K1 = 0.01
_SSIM_K2 = 0.03


@dataclass
class MetricReport:
    psnr: float = float("nan")
    ssim: float = float("nan")
    f2f_rgb: float | None = None
    f2f_depth: float | None = None
    per_frame: list = field(default_factory=list)

    def to_json(self) -> dict:
        out = {"psnr_db": self.psnr, "ssim": self.ssim, "per_frame": self.per_frame}
        if self.f2f_rgb is not None:
            out["f2f_rgb"] = self.f2f_rgb
        if self.f2f_depth is not None:
            out["f2f_depth"] = self.f2f_depth
        return out


def psnr(a: ErpImage, b: ErpImage, spherical: bool = False) -> float:
    """Peak signal-to-noise ratio in dB, capped at 99 dB for identical images."""
    if a.data.shape != b.data.shape:
        raise ValueError("image dimensions do not match")
    diff2 = (a.data - b.data) ** 2
    if spherical:
        w = geometry.area_weights(a.width, a.height)
        mse = float(np.sum(w[:, :, None] * diff2) / (np.sum(w) * a.channels))
    else:
        mse = float(np.mean(diff2))
    if mse == 0:
        return PSNR_CAP_DB
    return min(PSNR_CAP_DB, 10.0 * np.log10(1.0 / mse))


def _to_gray(img: ErpImage) -> np.ndarray:
    if img.channels == 3:
        return img.data @ _LUMA
    if img.channels == 1:
        return img.data[:, :, 0]
    raise ValueError("ssim expects 1- or 3-channel images")


def ssim(a: ErpImage, b: ErpImage) -> float:
    """Mean structural similarity, Gaussian 11x11 window, dynamic range 1."""
    if a.data.shape != b.data.shape:
        raise ValueError("image dimensions do not match")
    if a.width < _SSIM_WINDOW or a.height < _SSIM_WINDOW:
        raise ValueError(f"images must be at least {_SSIM_WINDOW} pixels per side")
    x = _to_gray(a)
    y = _to_gray(b)
    truncate = (_SSIM_WINDOW - 1) / 2 / _SSIM_SIGMA

    def favg(arr):
        return gaussian_filter(arr, _SSIM_SIGMA, truncate=truncate)

    mu_x = favg(x)
    mu_y = favg(y)
    var_x = favg(x * x) - mu_x**2
    var_y = favg(y * y) - mu_y**2
    cov = favg(x * y) - mu_x * mu_y
    c1 = _SSIM_K1**2
    c2 = _SSIM_K2**2
    num = (2 * mu_x * mu_y + c1) * (2 * cov + c2)
    den = (mu_x**2 + mu_y**2 + c1) * (var_x + var_y + c2)
    return float(np.mean(num / den))


def f2f_metric(frames, sigma: float = 11.0) -> float:
    """Mean absolute difference between consecutive low-pass-filtered frames."""
    frames = list(frames)
    if len(frames) < 2:
        raise ValueError("f2f metric needs at least 2 frames")
    shape = frames[0].data.shape
    if any(f.data.shape != shape for f in frames):
        raise ValueError("frames must share dimensions")
    blurred = [gaussian_blur(f, sigma).data for f in frames]
    diffs = [np.mean(np.abs(b1 - b0)) for b0, b1 in zip(blurred, blurred[1:])]
    return float(np.mean(diffs))
