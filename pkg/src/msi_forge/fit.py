"""Gradient-based fitting of MSI alphas and blending weights to target views.

The unknowns are per-layer, per-texel logits; alpha = sigmoid(alpha_logit)
and beta = sigmoid(beta_logit). The forward pass blends sweep colours,
renders every target view and scores a (spherically weighted) squared error;
the backward pass is the analytic chain rule through the sigmoid, the
left/right blend, bilinear sampling and the over-compositing weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from . import geometry, imaging, msi as msi_mod
from .errors import NumericalError
from .geometry import Pose
from .imaging import ErpImage
from .msi import Msi, Projection
from .sweep import SphereSweepVolume

_ALPHA_CLIP = 1e-12


@dataclass(frozen=True)
class FitConfig:
    learning_rate: float = 0.02
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    iterations: int = 300
    lambda_data: float = 1.0
    lambda_ti: float = 10.0
    loss_kind: str = "erp-l2"  # l2 | erp-l2
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0 or self.iterations < 0:
            raise ValueError("learning rate must be positive, iterations >= 0")
        if self.loss_kind not in ("l2", "erp-l2"):
            raise ValueError(f"unknown loss kind {self.loss_kind!r}")

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}

    @classmethod
    def from_json(cls, obj: dict) -> "FitConfig":
        unknown = set(obj) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown fit config keys: {sorted(unknown)}")
        return cls(**obj)


@dataclass
class FitParams:
    """Free parameters: one alpha logit and one blend logit per layer texel."""

    alpha_logits: np.ndarray  # (N, H, W)
    beta_logits: np.ndarray  # (N, H, W)

    @classmethod
    def initial(cls, n_layers: int, height: int, width: int) -> "FitParams":
        # alpha = 2/N gives roughly uniform initial net opacities; beta = 0.5.
        a0 = math.log((2.0 / n_layers) / (1.0 - 2.0 / n_layers))
        return cls(
            np.full((n_layers, height, width), a0),
            np.zeros((n_layers, height, width)),
        )

    def alphas(self) -> np.ndarray:
        return _sigmoid(self.alpha_logits)

    def betas(self) -> np.ndarray:
        return _sigmoid(self.beta_logits)

    def copy(self) -> "FitParams":
        return FitParams(self.alpha_logits.copy(), self.beta_logits.copy())


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x, dtype=float)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return np.clip(out, _ALPHA_CLIP, 1.0 - _ALPHA_CLIP)


# ---------------------------------------------------------------------------
# Image losses


def loss_l2(rendered: ErpImage, target: ErpImage) -> float:
    """Mean over pixels and channels of squared differences."""
    if rendered.data.shape != target.data.shape:
        raise ValueError("image dimensions do not match")
    return float(np.mean((rendered.data - target.data) ** 2))


def loss_erp_l2(rendered: ErpImage, target: ErpImage) -> float:
    """Solid-angle-weighted squared error, normalized so constants give delta^2."""
    if rendered.data.shape != target.data.shape:
        raise ValueError("image dimensions do not match")
    w = geometry.area_weights(rendered.width, rendered.height)
    w = w / w.sum()
    diff2 = np.mean((rendered.data - target.data) ** 2, axis=-1)
    return float(np.sum(w * diff2))


def pixel_weights(loss_kind: str, width: int, height: int) -> np.ndarray:
    """Flat per-pixel loss weights summing to 1."""
    if loss_kind == "l2":
        return np.full(width * height, 1.0 / (width * height))
    if loss_kind == "erp-l2":
        w = geometry.area_weights(width, height).reshape(-1)
        return w / w.sum()
    raise ValueError(f"unknown loss kind {loss_kind!r}")


# ---------------------------------------------------------------------------
# Differentiable render pass


class RenderPass:
    """Frozen ray/texture sampling structure for one (pose, projection) pair.

    The sample positions depend only on the camera and the sphere radii, so
    each layer's bilinear gather is a precomputed sparse matrix; its transpose
    scatters gradients back to the layer texels.
    """

    def __init__(self, radii, height, width, pose: Pose, proj: Projection,
                 allow_outside_headbox: bool = False):
        origins, dirs = msi_mod.world_rays(pose, proj)
        msi_mod.check_headbox(origins, radii[0], allow_outside_headbox)
        ts, xs, ys = msi_mod.layer_sample_coords(radii, origins, dirs, width, height)
        self.ts = ts
        self.n_pixels = origins.shape[0]
        self.shape = (proj.height, proj.width)
        n_tex = height * width
        rows = np.repeat(np.arange(self.n_pixels), 4)
        self.mats = []
        for i in range(len(radii)):
            idx, wts = imaging.bilinear_footprint((height, width), xs[i], ys[i])
            m = sparse.csr_matrix(
                (wts.ravel(), (rows, idx.ravel())), shape=(self.n_pixels, n_tex)
            )
            self.mats.append(m)

    def forward(self, colors_flat: np.ndarray, alphas_flat: np.ndarray):
        """colors_flat (N, HW, 3), alphas_flat (N, HW) -> ((P, 3), cache)."""
        n = len(self.mats)
        chat = np.stack([self.mats[i] @ colors_flat[i] for i in range(n)])
        ahat = np.stack([self.mats[i] @ alphas_flat[i] for i in range(n)])
        ones = np.ones((1, self.n_pixels))
        tcum = np.concatenate([ones, np.cumprod(1.0 - ahat, axis=0)], axis=0)
        w = ahat * tcum[:-1]
        out = np.einsum("np,npc->pc", w, chat)
        return out, (chat, ahat, tcum, w)

    def backward(self, cache, g_out: np.ndarray):
        """Backpropagate d(loss)/d(out) to flat colour and alpha gradients."""
        chat, ahat, tcum, w = cache
        cw = w[..., None] * chat
        suffix = np.flip(np.cumsum(np.flip(cw, 0), 0), 0) - cw
        d_ahat = chat * tcum[:-1, :, None] - suffix / (1.0 - ahat)[..., None]
        g_ahat = np.einsum("pc,npc->np", g_out, d_ahat)
        n = len(self.mats)
        dc = np.stack([self.mats[i].T @ (w[i, :, None] * g_out) for i in range(n)])
        da = np.stack([self.mats[i].T @ g_ahat[i] for i in range(n)])
        return dc, da


@dataclass
class TargetPass:
    """A supervision view: its sampler, flattened pixels and loss weights."""

    render: RenderPass
    pixels: np.ndarray  # (P, 3)
    weights: np.ndarray  # (P,), sums to 1


def make_target_pass(radii, height, width, image: ErpImage, pose: Pose,
                     proj: Projection, loss_kind: str) -> TargetPass:
    rp = RenderPass(radii, height, width, pose, proj)
    return TargetPass(
        rp,
        image.data.reshape(-1, image.channels).astype(float),
        pixel_weights(loss_kind, proj.width, proj.height),
    )


def _forward_backward_data(params_fwd, passes, scale: float):
    """Data loss and gradients for one frame. params_fwd = (c_flat, a_flat)."""
    c_flat, a_flat = params_fwd
    total = 0.0
    dc = np.zeros_like(c_flat)
    da = np.zeros_like(a_flat)
    for tp in passes:
        out, cache = tp.render.forward(c_flat, a_flat)
        diff = out - tp.pixels
        total += float(np.sum(tp.weights * np.mean(diff * diff, axis=-1)))
        g_out = (2.0 / diff.shape[1]) * tp.weights[:, None] * diff * scale
        dci, dai = tp.render.backward(cache, g_out)
        dc += dci
        da += dai
    return total, dc, da


def _params_forward(params: FitParams, sweep_l, sweep_r):
    """Sigmoid + Eq.-style blend down to flat textures, plus local partials."""
    a = params.alphas()
    b = params.betas()
    sl = sweep_l.layers
    sr = sweep_r.layers
    colors = b[..., None] * sl + (1.0 - b[..., None]) * sr
    n, h, w = a.shape
    return (colors.reshape(n, h * w, 3), a.reshape(n, h * w)), (a, b, sl - sr)


def _params_backward(local, dc_flat, da_flat):
    a, b, sdiff = local
    n, h, w = a.shape
    dc = dc_flat.reshape(n, h, w, 3)
    da = da_flat.reshape(n, h, w)
    g_beta = np.sum(dc * sdiff, axis=-1) * b * (1.0 - b)
    g_alpha = da * a * (1.0 - a)
    return g_alpha, g_beta


def loss_and_grad(
    params: FitParams,
    sweep_left: SphereSweepVolume,
    sweep_right: SphereSweepVolume,
    targets,
    config: FitConfig,
):
    """Average data loss over targets plus analytic gradients w.r.t. logits.

    targets may be a list of (image, pose, projection) tuples or prebuilt
    TargetPass objects.
    """
    passes = _as_passes(sweep_left, targets, params, config)
    fwd, local = _params_forward(params, sweep_left, sweep_right)
    scale = config.lambda_data / len(passes)
    loss, dc, da = _forward_backward_data(fwd, passes, scale)
    loss *= scale
    g_alpha, g_beta = _params_backward(local, dc, da)
    return loss, (g_alpha, g_beta)


def _as_passes(sweep_left, targets, params, config):
    passes = []
    h, w = params.alpha_logits.shape[1:]
    for t in targets:
        if isinstance(t, TargetPass):
            passes.append(t)
        else:
            image, pose, proj = t
            passes.append(
                make_target_pass(sweep_left.radii, h, w, image, pose, proj,
                                 config.loss_kind)
            )
    if not passes:
        raise ValueError("at least one target view is required")
    return passes


# ---------------------------------------------------------------------------
# Optimizer


class Adam:
    def __init__(self, lr: float, beta1: float, beta2: float, eps: float):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.t = 0
        self.m = None
        self.v = None

    def step(self, grads):
        if self.m is None:
            self.m = [np.zeros_like(g) for g in grads]
            self.v = [np.zeros_like(g) for g in grads]
        self.t += 1
        bc1 = 1.0 - self.beta1**self.t
        bc2 = 1.0 - self.beta2**self.t
        updates = []
        for i, g in enumerate(grads):
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g
            updates.append(
                self.lr * (self.m[i] / bc1) / (np.sqrt(self.v[i] / bc2) + self.eps)
            )
        return updates


# ---------------------------------------------------------------------------
# Frame fitting


@dataclass
class FitResult:
    msi: Msi
    params: FitParams
    loss_curve: list  # rows of (iteration, total, data, ti)


def bake_msi(params: FitParams, sweep_left: SphereSweepVolume,
             sweep_right: SphereSweepVolume) -> Msi:
    """Materialize an Msi (blended colours + alphas + betas) from parameters."""
    a = params.alphas()
    b = params.betas()
    colors = msi_mod.blend_layers(sweep_left.layers, sweep_right.layers, b)
    layers = np.concatenate([colors, a[..., None]], axis=-1)
    return Msi(sweep_left.radii, layers, b)


def fit_frame(
    sweep_left: SphereSweepVolume,
    sweep_right: SphereSweepVolume,
    targets,
    config: FitConfig | None = None,
    progress=None,
) -> FitResult:
    """Adam-optimize alphas and blending weights against the target views."""
    if config is None:
        config = FitConfig()
    n, h, w = sweep_left.layers.shape[:3]
    params = FitParams.initial(n, h, w)
    passes = _as_passes(sweep_left, targets, params, config)
    opt = Adam(config.learning_rate, config.adam_beta1, config.adam_beta2,
               config.adam_eps)
    curve = []
    for it in range(config.iterations):
        loss, (ga, gb) = loss_and_grad(params, sweep_left, sweep_right, passes,
                                       config)
        if not np.isfinite(loss):
            raise NumericalError(f"non-finite loss at iteration {it}")
        curve.append((it, loss, loss, 0.0))
        ua, ub = opt.step([ga, gb])
        params.alpha_logits -= ua
        params.beta_logits -= ub
        if progress is not None:
            progress(it, loss)
    return FitResult(bake_msi(params, sweep_left, sweep_right), params, curve)


# ---------------------------------------------------------------------------
# Transform-inverse consistency


def ti_loss(msi_a: Msi, msi_b: Msi, transform: Pose, pose: Pose,
            proj: Projection, loss_kind: str = "erp-l2") -> float:
    """Render-consistency distance between an MSI pair related by a transform.

    Compares render(msi_b, pose) against render(msi_a, transform @ pose),
    where msi_b was fitted from transform-resampled sweeps.
    """
    img_b = msi_mod.render(msi_b, pose, proj)
    img_a = msi_mod.render(msi_a, geometry.pose_compose(transform, pose), proj)
    fn = loss_l2 if loss_kind == "l2" else loss_erp_l2
    return fn(img_b, img_a)


def fit_sequence(
    frames,
    motions,
    config: FitConfig | None = None,
    ti_projection: Projection | None = None,
    progress=None,
):
    """Jointly fit a frame sequence with a transform-inverse coupling penalty.

    frames: list of (sweep_left, sweep_right, targets); motions: list of
    Poses, one per consecutive pair, mapping frame-k rig coordinates into
    frame-(k+1) rig coordinates. The total objective is the sum of per-frame
    data losses plus lambda_ti times the pairwise render-consistency losses;
    gradients flow into both frames of every pair. Returns a list of
    FitResult, one per frame.
    """
    if config is None:
        config = FitConfig()
    frames = list(frames)
    if len(frames) < 2:
        raise ValueError("fit_sequence requires at least 2 frames")
    if len(motions) != len(frames) - 1:
        raise ValueError("need exactly one motion per consecutive frame pair")

    n, h, w = frames[0][0].layers.shape[:3]
    radii = frames[0][0].radii
    params = [FitParams.initial(n, h, w) for _ in frames]
    data_passes = [
        _as_passes(sl, targets, params[k], config)
        for k, (sl, _, targets) in enumerate(frames)
    ]
    if ti_projection is None:
        ti_projection = Projection("erp", w, h)
    ti_weights = pixel_weights(config.loss_kind, ti_projection.width,
                               ti_projection.height)
    probe = Pose.identity()
    ti_passes = []
    if config.lambda_ti > 0:
        for t in motions:
            rp_b = RenderPass(radii, h, w, probe, ti_projection)
            rp_a = RenderPass(radii, h, w, geometry.pose_compose(t, probe),
                              ti_projection)
            ti_passes.append((rp_a, rp_b))

    opt = Adam(config.learning_rate, config.adam_beta1, config.adam_beta2,
               config.adam_eps)
    curve = []
    for it in range(config.iterations):
        fwds, locals_ = zip(*(
            _params_forward(p, sl, sr)
            for p, (sl, sr, _) in zip(params, frames)
        ))
        dcs = [np.zeros_like(f[0]) for f in fwds]
        das = [np.zeros_like(f[1]) for f in fwds]

        data_total = 0.0
        for k, passes in enumerate(data_passes):
            scale = config.lambda_data / len(passes)
            loss_k, dc, da = _forward_backward_data(fwds[k], passes, scale)
            data_total += loss_k * scale
            dcs[k] += dc
            das[k] += da

        ti_total = 0.0
        for k, (rp_a, rp_b) in enumerate(ti_passes):
            out_a, cache_a = rp_a.forward(*fwds[k])
            out_b, cache_b = rp_b.forward(*fwds[k + 1])
            diff = out_b - out_a
            ti_total += float(np.sum(ti_weights * np.mean(diff * diff, axis=-1)))
            g_out = (2.0 / diff.shape[1]) * config.lambda_ti \
                * ti_weights[:, None] * diff
            dc_b, da_b = rp_b.backward(cache_b, g_out)
            dcs[k + 1] += dc_b
            das[k + 1] += da_b
            dc_a, da_a = rp_a.backward(cache_a, -g_out)
            dcs[k] += dc_a
            das[k] += da_a

        total = data_total + config.lambda_ti * ti_total
        if not np.isfinite(total):
            raise NumericalError(f"non-finite loss at iteration {it}")
        curve.append((it, total, data_total, ti_total))

        grads = []
        for k in range(len(frames)):
            ga, gb = _params_backward(locals_[k], dcs[k], das[k])
            grads.extend([ga, gb])
        updates = opt.step(grads)
        for k, p in enumerate(params):
            p.alpha_logits -= updates[2 * k]
            p.beta_logits -= updates[2 * k + 1]
        if progress is not None:
            progress(it, total)

    return [
        FitResult(bake_msi(p, sl, sr), p, curve)
        for p, (sl, sr, _) in zip(params, frames)
    ]
