"""JSON configuration for the toolkit: threshold, camera, vehicle, and course.

Unknown keys are rejected everywhere so silent typos cannot change behavior.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .colorspace import HsvPixel, HsvRange, YELLOW_RANGE
from .simulator import CameraModel, CourseSpec, VehicleState
from .steering import SteeringLimits


class ConfigError(ValueError):
    """Configuration file failed validation; message names the offending field."""


@dataclass(frozen=True)
class VehicleParams:
    wheelbase_m: float = 0.3
    speed_mps: float = 6.111
    dt_s: float = 0.05
    max_time_s: float = 120.0
    path_lost_limit: int = 10
    noise: int = 0

    def __post_init__(self):
        if self.wheelbase_m <= 0 or self.speed_mps < 0 or self.dt_s <= 0:
            raise ConfigError("vehicle: wheelbase/dt must be positive, speed nonnegative")
        if self.max_time_s <= 0 or self.path_lost_limit < 1 or self.noise < 0:
            raise ConfigError("vehicle: max_time/path_lost_limit must be positive, noise >= 0")


def _default_course() -> CourseSpec:
    return CourseSpec(
        waypoints=np.array([[0.0, 0.0], [20.0, 0.0]]),
        line_width=0.25,
        line_color=HsvPixel(1.0 / 6.0, 0.9, 0.9),
        floor_color=HsvPixel(0.0, 0.05, 0.5),
    )


@dataclass(frozen=True)
class ToolConfig:
    threshold: HsvRange = YELLOW_RANGE
    sigma: float = 1.0
    k: float = 2.0
    min_area: int = 50
    limits: SteeringLimits = field(default_factory=SteeringLimits)
    camera: CameraModel = field(default_factory=CameraModel)
    vehicle: VehicleParams = field(default_factory=VehicleParams)
    course: CourseSpec = field(default_factory=_default_course)
    start: Optional[VehicleState] = None  # defaults to the course start pose

    def __post_init__(self):
        if self.sigma <= 0:
            raise ConfigError("sigma must be positive")
        if self.k <= 0:
            raise ConfigError("k must be positive")
        if self.min_area < 0:
            raise ConfigError("min_area must be nonnegative")


def _require_keys(obj: dict, allowed: set[str], where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")


def _number(obj: dict, key: str, where: str, default=None):
    if key not in obj:
        if default is None:
            raise ConfigError(f"{where}: missing required key '{key}'")
        return default
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{key}: expected a number, got {value!r}")
    return value


def _hsv_pixel(obj, where: str) -> HsvPixel:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object with h, s, v")
    _require_keys(obj, {"h", "s", "v"}, where)
    try:
        return HsvPixel(_number(obj, "h", where), _number(obj, "s", where),
                        _number(obj, "v", where))
    except ValueError as e:
        raise ConfigError(f"{where}: {e}") from None


def threshold_from_dict(obj: dict, where: str = "threshold") -> HsvRange:
    _require_keys(obj, {"h_lo", "h_hi", "s_lo", "s_hi", "v_lo", "v_hi", "k", "sample_count"},
                  where)
    try:
        return HsvRange(*(_number(obj, key, where)
                          for key in ("h_lo", "h_hi", "s_lo", "s_hi", "v_lo", "v_hi")))
    except ValueError as e:
        raise ConfigError(f"{where}: {e}") from None


def threshold_to_dict(rng: HsvRange, k: Optional[float] = None,
                      sample_count: Optional[int] = None) -> dict:
    out = {"h_lo": rng.h_lo, "h_hi": rng.h_hi, "s_lo": rng.s_lo, "s_hi": rng.s_hi,
           "v_lo": rng.v_lo, "v_hi": rng.v_hi}
    if k is not None:
        out["k"] = k
    if sample_count is not None:
        out["sample_count"] = sample_count
    return out


def config_from_dict(obj: dict) -> ToolConfig:
    if not isinstance(obj, dict):
        raise ConfigError("top level: expected a JSON object")
    _require_keys(obj, {"threshold", "sigma", "k", "min_area", "limits", "camera",
                        "vehicle", "course", "start"}, "top level")
    kwargs = {}
    if "threshold" in obj:
        kwargs["threshold"] = threshold_from_dict(obj["threshold"])
    for key in ("sigma", "k"):
        if key in obj:
            kwargs[key] = float(_number(obj, key, "top level"))
    if "min_area" in obj:
        kwargs["min_area"] = int(_number(obj, "min_area", "top level"))

    if "limits" in obj:
        lim = obj["limits"]
        _require_keys(lim, {"min_deg", "max_deg", "raw_min_deg", "raw_max_deg"}, "limits")
        try:
            kwargs["limits"] = SteeringLimits(
                _number(lim, "min_deg", "limits", -30.0),
                _number(lim, "max_deg", "limits", 30.0),
                _number(lim, "raw_min_deg", "limits", -90.0),
                _number(lim, "raw_max_deg", "limits", 90.0))
        except ValueError as e:
            raise ConfigError(f"limits: {e}") from None

    if "camera" in obj:
        cam = obj["camera"]
        _require_keys(cam, {"image_width", "image_height", "footprint_width_m",
                            "footprint_depth_m"}, "camera")
        try:
            kwargs["camera"] = CameraModel(
                int(_number(cam, "image_width", "camera", 640)),
                int(_number(cam, "image_height", "camera", 480)),
                _number(cam, "footprint_width_m", "camera", 1.6),
                _number(cam, "footprint_depth_m", "camera", 1.2))
        except ValueError as e:
            raise ConfigError(f"camera: {e}") from None

    if "vehicle" in obj:
        veh = obj["vehicle"]
        _require_keys(veh, {"wheelbase_m", "speed_mps", "dt_s", "max_time_s",
                            "path_lost_limit", "noise"}, "vehicle")
        kwargs["vehicle"] = VehicleParams(
            _number(veh, "wheelbase_m", "vehicle", 0.3),
            _number(veh, "speed_mps", "vehicle", 6.111),
            _number(veh, "dt_s", "vehicle", 0.05),
            _number(veh, "max_time_s", "vehicle", 120.0),
            int(_number(veh, "path_lost_limit", "vehicle", 10)),
            int(_number(veh, "noise", "vehicle", 0)))

    if "course" in obj:
        crs = obj["course"]
        _require_keys(crs, {"waypoints", "line_width_m", "line_color", "floor_color"},
                      "course")
        wps = crs.get("waypoints")
        if (not isinstance(wps, list) or len(wps) < 2
                or any(not isinstance(p, list) or len(p) != 2 for p in wps)):
            raise ConfigError("course.waypoints: expected a list of [x, y] pairs (>= 2)")
        try:
            kwargs["course"] = CourseSpec(
                np.array(wps, dtype=np.float64),
                _number(crs, "line_width_m", "course"),
                _hsv_pixel(crs.get("line_color"), "course.line_color"),
                _hsv_pixel(crs.get("floor_color"), "course.floor_color"))
        except ConfigError:
            raise
        except ValueError as e:
            raise ConfigError(f"course: {e}") from None

    if "start" in obj and obj["start"] is not None:
        st = obj["start"]
        _require_keys(st, {"x", "y", "heading_deg"}, "start")
        speed = kwargs.get("vehicle", VehicleParams()).speed_mps
        kwargs["start"] = VehicleState(
            _number(st, "x", "start"), _number(st, "y", "start"),
            np.radians(_number(st, "heading_deg", "start")), speed)

    return ToolConfig(**kwargs)


def config_to_dict(cfg: ToolConfig) -> dict:
    out = {
        "threshold": threshold_to_dict(cfg.threshold),
        "sigma": cfg.sigma,
        "k": cfg.k,
        "min_area": cfg.min_area,
        "limits": {"min_deg": cfg.limits.min_deg, "max_deg": cfg.limits.max_deg,
                   "raw_min_deg": cfg.limits.raw_min_deg,
                   "raw_max_deg": cfg.limits.raw_max_deg},
        "camera": {"image_width": cfg.camera.image_width,
                   "image_height": cfg.camera.image_height,
                   "footprint_width_m": cfg.camera.footprint_width,
                   "footprint_depth_m": cfg.camera.footprint_depth},
        "vehicle": {"wheelbase_m": cfg.vehicle.wheelbase_m,
                    "speed_mps": cfg.vehicle.speed_mps,
                    "dt_s": cfg.vehicle.dt_s,
                    "max_time_s": cfg.vehicle.max_time_s,
                    "path_lost_limit": cfg.vehicle.path_lost_limit,
                    "noise": cfg.vehicle.noise},
        "course": {"waypoints": cfg.course.waypoints.tolist(),
                   "line_width_m": cfg.course.line_width,
                   "line_color": {"h": cfg.course.line_color.h,
                                  "s": cfg.course.line_color.s,
                                  "v": cfg.course.line_color.v},
                   "floor_color": {"h": cfg.course.floor_color.h,
                                   "s": cfg.course.floor_color.s,
                                   "v": cfg.course.floor_color.v}},
    }
    if cfg.start is not None:
        out["start"] = {"x": cfg.start.x, "y": cfg.start.y,
                        "heading_deg": float(np.degrees(cfg.start.heading))}
    return out


def load_config(path: str) -> ToolConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}:{e.lineno}: invalid JSON: {e.msg}") from None
    return config_from_dict(obj)
