"""Deterministic closed-loop harness: render, detect, steer, advance, measure.

World coordinates are meters with heading measured counterclockwise from +x.
A positive steering command turns the vehicle to the right (clockwise).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, NamedTuple, Optional

import numpy as np

from .colorspace import HsvPixel, HsvRange, hsv_to_rgb, threshold_mask
from .contour import centroid, region_moments, select_path_contour, trace_contours
from .imaging import RasterImage
from .steering import ReferenceFrame, SteeringCommand, SteeringLimits, steering_command

_TWO_PI = 2.0 * math.pi


def _normalize_angle(theta: float) -> float:
    """Wrap into (-pi, pi]."""
    wrapped = (theta + math.pi) % _TWO_PI - math.pi
    return math.pi if wrapped == -math.pi else wrapped


@dataclass(frozen=True)
class CourseSpec:
    """Path centerline as a waypoint polyline plus line/floor colors."""

    waypoints: np.ndarray  # (n, 2) float64 meters
    line_width: float
    line_color: HsvPixel
    floor_color: HsvPixel

    def __post_init__(self):
        wps = np.asarray(self.waypoints, dtype=np.float64)
        if wps.ndim != 2 or wps.shape[1] != 2 or wps.shape[0] < 2:
            raise ValueError(f"need at least 2 waypoints of shape (n, 2), got {wps.shape}")
        seg = np.diff(wps, axis=0)
        if (np.hypot(seg[:, 0], seg[:, 1]) == 0).any():
            raise ValueError("consecutive waypoints must be distinct")
        if self.line_width <= 0:
            raise ValueError("line_width must be positive")
        object.__setattr__(self, "waypoints", wps)

    @cached_property
    def _segment_lengths(self) -> np.ndarray:
        seg = np.diff(self.waypoints, axis=0)
        return np.hypot(seg[:, 0], seg[:, 1])

    @cached_property
    def _cumulative(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum(self._segment_lengths)])

    @property
    def length(self) -> float:
        return float(self._cumulative[-1])


@dataclass(frozen=True)
class VehicleState:
    x: float
    y: float
    heading: float  # radians, normalized to (-pi, pi]
    speed: float    # m/s, constant within an episode

    def __post_init__(self):
        if self.speed < 0:
            raise ValueError("speed must be nonnegative")
        object.__setattr__(self, "heading", _normalize_angle(self.heading))


@dataclass(frozen=True)
class CameraModel:
    """Orthographic top-down view of the ground patch ahead of the vehicle."""

    image_width: int = 640
    image_height: int = 480
    footprint_width: float = 1.6   # meters across, centered on the vehicle axis
    footprint_depth: float = 1.2   # meters ahead of the vehicle

    def __post_init__(self):
        if self.image_width < 1 or self.image_height < 1:
            raise ValueError("image dimensions must be positive")
        if self.footprint_width <= 0 or self.footprint_depth <= 0:
            raise ValueError("footprint dimensions must be positive")


@dataclass(frozen=True)
class EpisodeMetrics:
    distance_traveled: float
    elapsed: float
    mean_abs_cross_track: float
    error_pct: float  # 100 * mean |cross-track| / line_width
    completed: bool
    frames: int


class TickRecord(NamedTuple):
    t: float
    x: float
    y: float
    heading: float
    angle_deg: float
    valid: bool
    cross_track: float


def _project_to_polyline(point: np.ndarray, course: CourseSpec):
    """Distances and clamped parameters of the point against every segment."""
    wps = course.waypoints
    a = wps[:-1]
    ab = wps[1:] - a
    seg_len2 = (ab * ab).sum(axis=1)
    t = np.clip(((point - a) * ab).sum(axis=1) / seg_len2, 0.0, 1.0)
    nearest = a + t[:, None] * ab
    d = np.hypot(*(point - nearest).T)
    return d, t


def cross_track_error(state: VehicleState, course: CourseSpec) -> float:
    """Minimum distance from the vehicle position to the centerline polyline."""
    d, _ = _project_to_polyline(np.array([state.x, state.y]), course)
    return float(d.min())


def course_progress(state: VehicleState, course: CourseSpec) -> float:
    """Arc length along the course of the nearest centerline point."""
    d, t = _project_to_polyline(np.array([state.x, state.y]), course)
    i = int(d.argmin())
    return float(course._cumulative[i] + t[i] * course._segment_lengths[i])


def render_frame(course: CourseSpec, state: VehicleState, cam: CameraModel) -> RasterImage:
    """Orthographic projection of the camera footprint: line color within
    line_width/2 of the centerline, floor color elsewhere."""
    w, h = cam.image_width, cam.image_height
    u = np.array([math.cos(state.heading), math.sin(state.heading)])
    right = np.array([math.sin(state.heading), -math.cos(state.heading)])
    lateral = (np.arange(w) - w / 2.0) * (cam.footprint_width / w)
    forward = (h - 1.0 - np.arange(h)) * (cam.footprint_depth / h)
    wx = state.x + forward[:, None] * u[0] + lateral[None, :] * right[0]
    wy = state.y + forward[:, None] * u[1] + lateral[None, :] * right[1]

    half = course.line_width / 2.0
    reach = math.hypot(cam.footprint_width, cam.footprint_depth) + half
    pos = np.array([state.x, state.y])
    d2min = np.full((h, w), np.inf)
    wps = course.waypoints
    for k in range(len(wps) - 1):
        a, b = wps[k], wps[k + 1]
        lo = np.minimum(a, b) - reach
        hi = np.maximum(a, b) + reach
        if not (lo[0] <= pos[0] <= hi[0] and lo[1] <= pos[1] <= hi[1]):
            continue  # segment cannot intersect the camera footprint
        ab = b - a
        t = np.clip(((wx - a[0]) * ab[0] + (wy - a[1]) * ab[1]) / (ab @ ab), 0.0, 1.0)
        d2 = (wx - (a[0] + t * ab[0])) ** 2 + (wy - (a[1] + t * ab[1])) ** 2
        np.minimum(d2min, d2, out=d2min)

    on_line = d2min <= half * half
    px = np.empty((h, w, 3), dtype=np.uint8)
    px[on_line] = hsv_to_rgb(course.line_color)
    px[~on_line] = hsv_to_rgb(course.floor_color)
    return RasterImage(px)


def step_vehicle(state: VehicleState, cmd: SteeringCommand, dt: float,
                 wheelbase: float) -> VehicleState:
    """Kinematic bicycle step; invalid commands hold the current course.

    The command is right-positive, so the mathematical (counterclockwise)
    wheel angle is its negation.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if wheelbase <= 0:
        raise ValueError("wheelbase must be positive")
    delta = -math.radians(cmd.angle_deg) if cmd.valid else 0.0
    dheading = state.speed / wheelbase * math.tan(delta) * dt
    mean_heading = state.heading + dheading / 2.0
    return VehicleState(
        x=state.x + state.speed * dt * math.cos(mean_heading),
        y=state.y + state.speed * dt * math.sin(mean_heading),
        heading=state.heading + dheading,
        speed=state.speed,
    )


def _noisy(image: RasterImage, rng: np.random.Generator, amplitude: int) -> RasterImage:
    noise = rng.integers(-amplitude, amplitude + 1, size=image.pixels.shape, dtype=np.int16)
    return RasterImage(np.clip(image.pixels.astype(np.int16) + noise, 0, 255).astype(np.uint8))


def run_episode(course: CourseSpec, color_range: HsvRange, limits: SteeringLimits,
                cam: CameraModel, speed: float, dt: float, max_time: float,
                *, sigma: float = 1.0, min_area: int = 50, wheelbase: float = 0.3,
                path_lost_limit: int = 10, noise: int = 0, seed: int = 0,
                start: Optional[VehicleState] = None,
                trace: Optional[list] = None,
                frame_hook: Optional[Callable] = None) -> EpisodeMetrics:
    """Run the full detection/steering loop until the course end, a timeout,
    or the path staying lost for path_lost_limit consecutive frames.

    The loop is deterministic: identical inputs give bit-identical metrics.
    Pass a list as `trace` to capture one TickRecord per frame; frame_hook,
    if given, is called with (tick, frame, selected, center) every tick.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if start is None:
        first = course.waypoints[0]
        direction = course.waypoints[1] - first
        start = VehicleState(float(first[0]), float(first[1]),
                             math.atan2(direction[1], direction[0]), speed)
    state = VehicleState(start.x, start.y, start.heading, speed)
    frame_ref = ReferenceFrame.bottom_center(cam.image_width, cam.image_height)
    rng = np.random.default_rng(seed)

    max_frames = int(math.ceil(max_time / dt))
    abs_ct_sum = 0.0
    frames = 0
    lost_run = 0
    completed = False
    while frames < max_frames:
        frame = render_frame(course, state, cam)
        if noise > 0:
            frame = _noisy(frame, rng, noise)
        mask = threshold_mask(frame, color_range, sigma)
        selected = select_path_contour(trace_contours(mask), min_area)
        center = None
        if selected is not None:
            center = centroid(region_moments(mask, selected))
        cmd = steering_command(center, frame_ref, limits)
        if frame_hook is not None:
            frame_hook(frames, frame, selected, center)

        ct = cross_track_error(state, course)
        abs_ct_sum += abs(ct)
        if trace is not None:
            trace.append(TickRecord(frames * dt, state.x, state.y, state.heading,
                                    cmd.angle_deg, cmd.valid, ct))
        lost_run = 0 if cmd.valid else lost_run + 1

        state = step_vehicle(state, cmd, dt, wheelbase)
        frames += 1
        if course_progress(state, course) >= course.length - 1e-9:
            completed = True
            break
        if lost_run >= path_lost_limit:
            break

    elapsed = frames * dt
    mean_ct = abs_ct_sum / frames if frames else 0.0
    return EpisodeMetrics(
        distance_traveled=speed * elapsed,
        elapsed=elapsed,
        mean_abs_cross_track=mean_ct,
        error_pct=100.0 * mean_ct / course.line_width,
        completed=completed,
        frames=frames,
    )
