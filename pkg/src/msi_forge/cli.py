"""Command-line entry point: dataset generation, fitting, rendering, evaluation.

Exit codes: 0 success, 1 runtime failure, 2 usage/config error. Every command
echoes its effective configuration next to its outputs for reproducibility.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import fit as fit_mod
from . import geometry, hires, imaging, metrics, msi as msi_mod, sweep as sweep_mod
from . import synth
from .errors import MsiForgeError, NumericalError
from .geometry import Pose, ViewingCircle
from .imaging import ErpImage
from .msi import Projection

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MsiForgeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="msi-forge",
        description="Fit multi-sphere images to ODS panoramas and render 6DoF views.",
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=int(os.environ.get("MSI_FORGE_THREADS", "1")),
        help="worker cap for parallel stages (env: MSI_FORGE_THREADS)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic ODS dataset")
    p.add_argument("scene", help="scene JSON file or bundled scene name")
    p.add_argument("out_dir")
    p.add_argument("--frames", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--res", default=None, help="WxH, e.g. 256x128")
    p.add_argument("--supersample", type=int, default=None)
    p.add_argument("--config", default=None, help="generator config JSON")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("fit", help="fit an MSI to a generated dataset")
    p.add_argument("manifest")
    p.add_argument("out_msi")
    p.add_argument("--config", default=None, help="fit config JSON")
    p.add_argument("--frame", type=int, default=0)
    p.add_argument("--sequence", action="store_true",
                   help="jointly fit all frames with the TI coupling penalty")
    p.add_argument("--lambda-ti", type=float, default=None)
    p.add_argument("--iterations", type=int, default=None)
    p.add_argument("--layers", type=int, default=32)
    p.add_argument("--radii", type=float, nargs=2, default=(1.0, 100.0),
                   metavar=("NEAR", "FAR"))
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("render", help="render a novel view from an MSI file")
    p.add_argument("in_msi")
    p.add_argument("out_image")
    p.add_argument("--pose", default=None, help="pose JSON file (default identity)")
    p.add_argument("--proj", default="erp",
                   choices=["erp", "ods-left", "ods-right", "pinhole"])
    p.add_argument("--res", default=None, help="WxH (default MSI resolution)")
    p.add_argument("--fov", type=float, default=75.0,
                   help="vertical field of view in degrees (pinhole only)")
    p.add_argument("--hires", nargs=2, metavar=("LEFT", "RIGHT"), default=None,
                   help="full-resolution ODS pair for the high-res path")
    p.add_argument("--jbu-range-sigma", type=float, default=0.1)
    p.add_argument("--jbu-spatial-sigma", type=float, default=1.0)
    p.add_argument("--jbu-radius", type=int, default=2)
    p.add_argument("--allow-outside-headbox", action="store_true")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("eval", help="compare a rendered directory to ground truth")
    p.add_argument("rendered_dir")
    p.add_argument("truth_dir")
    p.add_argument("--f2f", action="store_true",
                   help="also report frame-to-frame flicker metrics")
    p.add_argument("--out", default=None, help="write the report JSON here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("export-web", help="export an MSI for the browser viewer")
    p.add_argument("in_msi")
    p.add_argument("out_dir")
    p.set_defaults(func=cmd_export_web)
    return parser


def _parse_res(text, default):
    if text is None:
        return default
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError as exc:
        raise UsageError(f"bad resolution {text!r}, expected WxH") from exc


def _load_json(path, what):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise UsageError(f"{what} not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON in {what} {path}: {exc}") from exc


def _echo_config(out_dir: Path, name: str, config: dict) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / name).write_text(json.dumps(config, indent=2, sort_keys=True))


# ---------------------------------------------------------------------------


def cmd_synth(args) -> int:
    scene_path = Path(args.scene)
    if not scene_path.exists():
        if args.scene in synth.BUNDLED_SCENES:
            scene_path = synth.bundled_scene_path(args.scene)
        else:
            raise UsageError(f"scene file not found: {args.scene}")
    scene = synth.SceneSpec.load(scene_path)

    cfg = dict(_load_json(args.config, "generator config")) if args.config else {}
    if args.res is not None:
        cfg["width"], cfg["height"] = _parse_res(args.res, None)
    if args.supersample is not None:
        cfg["supersample"] = args.supersample
    cfg["seed"] = args.seed
    try:
        config = synth.GenConfig.from_json(cfg)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc

    out_dir = Path(args.out_dir)
    synth.generate_dataset(scene, args.frames, out_dir, config, threads=args.threads)
    _echo_config(out_dir, "effective_config.json",
                 {"command": "synth", "frames": args.frames,
                  "scene": str(scene_path), **config.to_json()})
    print(f"wrote {args.frames} frame(s) to {out_dir}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def _load_manifest(path):
    manifest = _load_json(path, "manifest")
    base = Path(path).parent
    return manifest, base


def _frame_inputs(manifest, base, index, radii, fit_cfg):
    cfg = manifest["config"]
    frame = manifest["frames"][index]
    vc = ViewingCircle(cfg["viewing_radius"])
    w, h = cfg["width"], cfg["height"]
    left = imaging.image_read(base / frame["ods_left"])
    right = imaging.image_read(base / frame["ods_right"])
    sl = sweep_mod.build_sweep(left, "ods-left", vc, radii, w, h)
    sr = sweep_mod.build_sweep(right, "ods-right", vc, radii, w, h)
    targets = []
    for t in frame["targets"]:
        img = imaging.image_read(base / t["image"])
        pose = Pose.from_json(t["pose"])
        targets.append((img, pose, Projection("erp", img.width, img.height, vc)))
    return sl, sr, targets


def _write_loss_curve(path, curve):
    lines = ["iteration,total,data,ti"]
    lines += [f"{it},{total:.10g},{data:.10g},{ti:.10g}"
              for it, total, data, ti in curve]
    Path(path).write_text("\n".join(lines) + "\n")


def cmd_fit(args) -> int:
    manifest, base = _load_manifest(args.manifest)
    cfg = dict(_load_json(args.config, "fit config")) if args.config else {}
    if args.lambda_ti is not None:
        cfg["lambda_ti"] = args.lambda_ti
    if args.iterations is not None:
        cfg["iterations"] = args.iterations
    try:
        config = fit_mod.FitConfig.from_json(cfg)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    radii = msi_mod.layer_radii(args.layers, args.radii[0], args.radii[1])

    out_path = Path(args.out_msi)
    out_dir = out_path.parent if str(out_path.parent) else Path(".")
    _echo_config(out_dir, out_path.stem + ".config.json",
                 {"command": "fit", "manifest": args.manifest,
                  "layers": args.layers, "radii": list(args.radii),
                  "sequence": bool(args.sequence), **config.to_json()})

    try:
        if args.sequence:
            n = manifest["n_frames"]
            if n < 2:
                raise UsageError("--sequence requires a manifest with >= 2 frames")
            frames = [_frame_inputs(manifest, base, k, radii, config)
                      for k in range(n)]
            poses = [Pose.from_json(f["rig_pose"]) for f in manifest["frames"]]
            motions = [
                geometry.pose_compose(geometry.pose_invert(poses[k + 1]), poses[k])
                for k in range(n - 1)
            ]
            results = fit_mod.fit_sequence(frames, motions, config)
            for k, res in enumerate(results):
                msi_mod.msi_write(_indexed_path(out_path, k), res.msi)
            _write_loss_curve(out_path.with_suffix(".loss.csv"),
                              results[0].loss_curve)
            print(f"wrote {len(results)} MSI file(s)")
        else:
            if not 0 <= args.frame < manifest["n_frames"]:
                raise UsageError(f"frame {args.frame} out of range")
            sl, sr, targets = _frame_inputs(manifest, base, args.frame, radii, config)
            result = fit_mod.fit_frame(sl, sr, targets, config)
            msi_mod.msi_write(out_path, result.msi)
            _write_loss_curve(out_path.with_suffix(".loss.csv"), result.loss_curve)
            print(f"wrote {out_path}")
    except NumericalError as exc:
        failed = out_path.with_suffix(out_path.suffix + ".failed")
        failed.write_text(str(exc))
        raise
    return EXIT_OK


def _indexed_path(path: Path, k: int) -> Path:
    return path.with_name(f"{path.stem}_{k:03d}{path.suffix}")


# ---------------------------------------------------------------------------


def cmd_render(args) -> int:
    m = msi_mod.msi_read(args.in_msi)
    pose = Pose.from_json(_load_json(args.pose, "pose")) if args.pose else Pose.identity()

    if args.hires is not None:
        left = imaging.image_read(args.hires[0])
        right = imaging.image_read(args.hires[1])
        m = hires.upscale_msi(
            m, ErpImage(left.data[:, :, :3]), ErpImage(right.data[:, :, :3]),
            ViewingCircle(),
            args.jbu_spatial_sigma, args.jbu_range_sigma, args.jbu_radius,
        )
    width, height = _parse_res(args.res, (m.width, m.height))
    if args.proj == "pinhole":
        focal = 0.5 * height / np.tan(0.5 * np.radians(args.fov))
        intr = geometry.PinholeIntrinsics(
            focal, (width - 1) / 2.0, (height - 1) / 2.0, width, height
        )
        proj = Projection("pinhole", width, height, intrinsics=intr)
    else:
        proj = Projection(args.proj, width, height)
    img = msi_mod.render(m, pose, proj,
                         allow_outside_headbox=args.allow_outside_headbox)
    imaging.image_write(args.out_image, ErpImage(np.clip(img.data, 0.0, 1.0)))
    print(f"wrote {args.out_image}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def cmd_eval(args) -> int:
    rendered_dir = Path(args.rendered_dir)
    truth_dir = Path(args.truth_dir)
    if not rendered_dir.is_dir() or not truth_dir.is_dir():
        raise UsageError("both arguments must be directories")

    def listing(d):
        return sorted(p.name for p in d.iterdir()
                      if p.suffix.lower() in (".png", ".erpf"))

    ra, rb = listing(rendered_dir), listing(truth_dir)
    if ra != rb:
        missing = sorted(set(ra) ^ set(rb))
        print("error: file sets differ: " + ", ".join(missing), file=sys.stderr)
        return EXIT_RUNTIME

    report = metrics.MetricReport()
    rgb_frames, depth_frames = [], []
    psnrs, ssims = [], []
    for name in ra:
        a = imaging.image_read(rendered_dir / name)
        b = imaging.image_read(truth_dir / name)
        if name.endswith(".erpf"):
            depth_frames.append(a)
            continue
        p = metrics.psnr(a, b)
        s = metrics.ssim(a, b)
        psnrs.append(p)
        ssims.append(s)
        rgb_frames.append(a)
        report.per_frame.append({"file": name, "psnr_db": p, "ssim": s})
    report.psnr = float(np.mean(psnrs)) if psnrs else float("nan")
    report.ssim = float(np.mean(ssims)) if ssims else float("nan")
    if args.f2f:
        if len(rgb_frames) >= 2:
            report.f2f_rgb = metrics.f2f_metric(rgb_frames)
        if len(depth_frames) >= 2:
            report.f2f_depth = metrics.f2f_metric(depth_frames)

    obj = report.to_json()
    print(f"{'metric':<12}{'value':>12}")
    for key in ("psnr_db", "ssim", "f2f_rgb", "f2f_depth"):
        if key in obj and obj[key] is not None:
            print(f"{key:<12}{obj[key]:>12.4f}")
    if args.out:
        Path(args.out).write_text(json.dumps(obj, indent=2, sort_keys=True))
    return EXIT_OK


# ---------------------------------------------------------------------------


def cmd_export_web(args) -> int:
    m = msi_mod.msi_read(args.in_msi)
    msi_mod.export_web(m, args.out_dir)
    print(f"exported {m.n_layers} layer(s) to {args.out_dir}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
