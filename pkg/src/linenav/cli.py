"""Command-line entry point: calibrate, detect, simulate, render.

Exit codes: 0 success, 2 no path detected / insufficient path pixels,
3 configuration or usage error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import command_link, contour
from .colorspace import (HueWrapError, derive_range, fit_channel_stats, hsv_histogram,
                         rgb_to_hsv_planes, threshold_mask)
from .config import (ConfigError, ToolConfig, load_config, threshold_from_dict,
                     threshold_to_dict)
from .imaging import PpmError, RasterImage, decode_ppm, encode_ppm
from .simulator import VehicleState, cross_track_error, render_frame, run_episode
from .steering import (PathObservation, ReferenceFrame, path_angle, rad_to_deg,
                       steering_command)

EXIT_OK = 0
EXIT_NO_PATH = 2
EXIT_CONFIG = 3
EXIT_IO = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems are configuration errors (exit 3)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _read_ppm(path: str) -> RasterImage:
    try:
        with open(path, "rb") as fh:
            return decode_ppm(fh.read())
    except OSError as e:
        raise IOError(f"cannot read {path}: {e}") from None


def _write_ppm(path: str, image: RasterImage) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_ppm(image))


def _load(args) -> ToolConfig:
    if getattr(args, "config", None):
        cfg = load_config(args.config)
    else:
        cfg = ToolConfig()
    overrides = {}
    if getattr(args, "threshold", None):
        # calibration output from `linenav calibrate` plugs in directly
        try:
            with open(args.threshold, "r", encoding="utf-8") as fh:
                overrides["threshold"] = threshold_from_dict(json.load(fh))
        except OSError as e:
            raise IOError(f"cannot read threshold {args.threshold}: {e}") from None
        except json.JSONDecodeError as e:
            raise ConfigError(f"{args.threshold}: invalid JSON: {e.msg}") from None
    if getattr(args, "sigma", None) is not None:
        overrides["sigma"] = args.sigma
    if getattr(args, "k", None) is not None:
        overrides["k"] = args.k
    if overrides:
        cfg = ToolConfig(**{**_as_kwargs(cfg), **overrides})
    return cfg


def _as_kwargs(cfg: ToolConfig) -> dict:
    return {"threshold": cfg.threshold, "sigma": cfg.sigma, "k": cfg.k,
            "min_area": cfg.min_area, "limits": cfg.limits, "camera": cfg.camera,
            "vehicle": cfg.vehicle, "course": cfg.course, "start": cfg.start}


def cmd_calibrate(args) -> int:
    if args.masks and len(args.masks) != len(args.samples):
        print("error: need one mask per sample image", file=sys.stderr)
        return EXIT_CONFIG
    planes = {"h": [], "s": [], "v": []}
    for idx, sample_path in enumerate(args.samples):
        image = _read_ppm(sample_path)
        h, s, v = rgb_to_hsv_planes(image.pixels)
        if args.masks:
            mask_img = _read_ppm(args.masks[idx])
            if (mask_img.height, mask_img.width) != (image.height, image.width):
                print(f"error: mask {args.masks[idx]} is {mask_img.width}x{mask_img.height}, "
                      f"sample is {image.width}x{image.height}", file=sys.stderr)
                return EXIT_CONFIG
            selected = mask_img.pixels.max(axis=2) >= 128
        else:
            # coarse pre-filter: drop dark and near-gray pixels
            selected = (v > 0.2) & (s > 0.2)
        planes["h"].append(h[selected])
        planes["s"].append(s[selected])
        planes["v"].append(v[selected])

    h = np.concatenate(planes["h"])
    s = np.concatenate(planes["s"])
    v = np.concatenate(planes["v"])
    if h.size < 2:
        print("error: insufficient data: no path pixels found", file=sys.stderr)
        return EXIT_NO_PATH
    try:
        rng = derive_range(fit_channel_stats(h), fit_channel_stats(s),
                           fit_channel_stats(v), args.k)
    except HueWrapError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    payload = threshold_to_dict(rng, k=args.k, sample_count=int(h.size))
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")

    hist = hsv_histogram(np.stack([h, s, v], axis=1), args.bins)
    hist_path = args.hist_out or os.path.splitext(args.out)[0] + ".hist.csv"
    with open(hist_path, "w", encoding="utf-8") as fh:
        fh.write("channel,bin,lo,hi,count\n")
        for ci, name in enumerate("hsv"):
            for b in range(hist.bins_per_channel):
                lo = b / hist.bins_per_channel
                hi = (b + 1) / hist.bins_per_channel
                fh.write(f"{name},{b},{lo!r},{hi!r},{hist.counts[ci, b]}\n")

    print(f"calibrated from {h.size} pixels (k={args.k}): "
          f"H [{rng.h_lo:.4f}, {rng.h_hi:.4f}] "
          f"S [{rng.s_lo:.4f}, {rng.s_hi:.4f}] "
          f"V [{rng.v_lo:.4f}, {rng.v_hi:.4f}]")
    print(f"wrote {args.out} and {hist_path}")
    return EXIT_OK


def cmd_detect(args) -> int:
    cfg = _load(args)
    image = _read_ppm(args.frame)
    mask = threshold_mask(image, cfg.threshold, cfg.sigma)
    selected = contour.select_path_contour(contour.trace_contours(mask), cfg.min_area)
    out_path = args.out or os.path.splitext(args.frame)[0] + ".annotated.ppm"
    if selected is None:
        print("no path detected")
        return EXIT_NO_PATH

    center = contour.centroid(contour.region_moments(mask, selected))
    anchor = ReferenceFrame.bottom_center(image.width, image.height)
    raw_deg = rad_to_deg(path_angle(center, anchor))
    cmd = steering_command(center, anchor, cfg.limits)
    observation = PathObservation(center, cmd.angle_deg, cmd.valid)
    frame_bytes = command_link.encode_frame(cmd, seq=0)

    _write_ppm(out_path, contour.annotate_frame(image, selected, center,
                                                (anchor.anchor_x, anchor.anchor_y)))
    print(f"centroid=({observation.center.x:.2f}, {observation.center.y:.2f}) "
          f"raw_deg={raw_deg:.2f} steering_deg={observation.angle_deg:.2f} "
          f"area={selected.area} frame_hex={frame_bytes.hex().upper()}")
    print(f"wrote {out_path}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _load(args)
    trace: list = []
    frame_hook = None
    if args.frames_every:
        os.makedirs(args.frames_dir, exist_ok=True)
        anchor = ReferenceFrame.bottom_center(cfg.camera.image_width, cfg.camera.image_height)

        def frame_hook(tick, frame, selected, center):
            if tick % args.frames_every:
                return
            annotated = contour.annotate_frame(frame, selected, center,
                                               (anchor.anchor_x, anchor.anchor_y))
            _write_ppm(os.path.join(args.frames_dir, f"tick_{tick:05d}.ppm"), annotated)

    metrics = run_episode(
        cfg.course, cfg.threshold, cfg.limits, cfg.camera,
        speed=cfg.vehicle.speed_mps, dt=cfg.vehicle.dt_s, max_time=cfg.vehicle.max_time_s,
        sigma=cfg.sigma, min_area=cfg.min_area, wheelbase=cfg.vehicle.wheelbase_m,
        path_lost_limit=cfg.vehicle.path_lost_limit, noise=cfg.vehicle.noise,
        seed=args.seed, start=cfg.start, trace=trace, frame_hook=frame_hook)

    new_file = not (os.path.exists(args.out) and os.path.getsize(args.out) > 0)
    with open(args.out, "a", encoding="utf-8") as fh:
        if new_file:
            fh.write("distance_m,elapsed_s,mean_abs_cross_track_m,error_pct,completed,frames\n")
        fh.write(f"{metrics.distance_traveled!r},{metrics.elapsed!r},"
                 f"{metrics.mean_abs_cross_track!r},{metrics.error_pct!r},"
                 f"{str(metrics.completed).lower()},{metrics.frames}\n")
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write("t,x,y,heading,angle_deg,cross_track\n")
            for r in trace:
                fh.write(f"{r.t!r},{r.x!r},{r.y!r},{r.heading!r},"
                         f"{r.angle_deg!r},{r.cross_track!r}\n")

    print(f"completed={str(metrics.completed).lower()} frames={metrics.frames} "
          f"elapsed={metrics.elapsed:.3f}s distance={metrics.distance_traveled:.2f}m "
          f"mean|ct|={metrics.mean_abs_cross_track * 1000:.2f}mm "
          f"error_pct={metrics.error_pct:.3f}")
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_render(args) -> int:
    cfg = _load(args)
    first = cfg.course.waypoints[0]
    direction = cfg.course.waypoints[1] - first
    state = VehicleState(
        x=first[0] if args.x is None else args.x,
        y=first[1] if args.y is None else args.y,
        heading=(math.atan2(direction[1], direction[0]) if args.heading_deg is None
                 else math.radians(args.heading_deg)),
        speed=cfg.vehicle.speed_mps)
    frame = render_frame(cfg.course, state, cfg.camera)
    _write_ppm(args.out, frame)
    print(f"wrote {args.out} (pose x={state.x:.3f} y={state.y:.3f} "
          f"heading={math.degrees(state.heading):.2f} deg, "
          f"cross_track={cross_track_error(state, cfg.course):.4f} m)")
    return EXIT_OK


def _build_parser() -> _Parser:
    parser = _Parser(prog="linenav",
                     description="Color-line path detection and closed-loop simulation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", help="derive an HSV threshold from sample frames")
    p.add_argument("samples", nargs="+", help="sample PPM frames of the path color")
    p.add_argument("--masks", nargs="*", default=[],
                   help="one PPM mask per sample; white pixels mark the path")
    p.add_argument("--k", type=float, default=2.0, help="std-deviation multiplier")
    p.add_argument("--bins", type=int, default=32, help="histogram bins per channel")
    p.add_argument("--out", default="threshold.json")
    p.add_argument("--hist-out", default=None, help="histogram CSV (default: <out>.hist.csv)")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("detect", help="detect the path in one frame")
    p.add_argument("frame", help="input PPM frame")
    p.add_argument("--config", default=None)
    p.add_argument("--threshold", default=None, help="calibration JSON overriding the range")
    p.add_argument("--sigma", type=float, default=None, help="override smoothing sigma")
    p.add_argument("--k", type=float, default=None, help="override calibration k")
    p.add_argument("--out", default=None, help="annotated PPM (default: <frame>.annotated.ppm)")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("simulate", help="run one closed-loop episode")
    p.add_argument("--config", default=None)
    p.add_argument("--threshold", default=None, help="calibration JSON overriding the range")
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--k", type=float, default=None)
    p.add_argument("--out", default="metrics.csv", help="metrics CSV, one row appended")
    p.add_argument("--trace", default=None, help="per-tick trace CSV")
    p.add_argument("--frames-every", type=int, default=0, metavar="K",
                   help="dump an annotated frame every K ticks")
    p.add_argument("--frames-dir", default="frames")
    p.add_argument("--seed", type=int, default=0, help="sensor-noise seed")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("render", help="render a frame for a given vehicle pose")
    p.add_argument("--config", default=None)
    p.add_argument("--out", default="render.ppm")
    p.add_argument("--x", type=float, default=None)
    p.add_argument("--y", type=float, default=None)
    p.add_argument("--heading-deg", type=float, default=None)
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except PpmError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
