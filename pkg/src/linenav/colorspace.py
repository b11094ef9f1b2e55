"""RGB/HSV conversion, pixel-statistics calibration, and path-color masking.

Hue is a fraction of a full turn in [0, 1); saturation and value are in
[0, 1]. Achromatic pixels (s == 0) carry the canonical hue 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .imaging import RasterImage, smooth_rgb


class CalibrationError(ValueError):
    """Not enough samples to calibrate a channel."""


class HueWrapError(ValueError):
    """Derived hue interval crosses the 0/1 seam (wraparound unsupported)."""


@dataclass(frozen=True)
class HsvPixel:
    h: float
    s: float
    v: float

    def __post_init__(self):
        if not (0.0 <= self.h < 1.0):
            raise ValueError(f"hue must lie in [0, 1), got {self.h}")
        if not (0.0 <= self.s <= 1.0 and 0.0 <= self.v <= 1.0):
            raise ValueError(f"saturation/value must lie in [0, 1], got s={self.s} v={self.v}")
        if self.s == 0.0 and self.h != 0.0:
            raise ValueError("achromatic pixels carry the canonical hue 0")


@dataclass(frozen=True)
class HsvRange:
    """Per-channel inclusion intervals; a pixel matches when all three fall inside."""

    h_lo: float
    h_hi: float
    s_lo: float
    s_hi: float
    v_lo: float
    v_hi: float

    def __post_init__(self):
        for name in ("h", "s", "v"):
            lo = getattr(self, name + "_lo")
            hi = getattr(self, name + "_hi")
            if not (0.0 <= lo <= hi <= 1.0):
                raise ValueError(f"{name} bounds must satisfy 0 <= lo <= hi <= 1, "
                                 f"got [{lo}, {hi}]")

    def contains(self, p: HsvPixel) -> bool:
        return (self.h_lo <= p.h <= self.h_hi and self.s_lo <= p.s <= self.s_hi
                and self.v_lo <= p.v <= self.v_hi)


# Calibrated detection range for a yellow guide line.
YELLOW_RANGE = HsvRange(0.11, 0.22, 0.4, 1.0, 0.4, 1.0)


@dataclass(frozen=True)
class ChannelStats:
    mean: float
    std: float
    count: int

    def __post_init__(self):
        if self.std < 0:
            raise ValueError("std must be nonnegative")
        if self.count < 1:
            raise ValueError("count must be at least 1")


@dataclass(frozen=True)
class HsvHistogram:
    """Equal-width per-channel bin counts over each channel's full range."""

    bins_per_channel: int
    counts: np.ndarray  # (3, bins) int64, rows ordered h, s, v

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if self.bins_per_channel < 2:
            raise ValueError("need at least 2 bins")
        if c.shape != (3, self.bins_per_channel):
            raise ValueError(f"counts must have shape (3, {self.bins_per_channel})")
        totals = c.sum(axis=1)
        if not (totals[0] == totals[1] == totals[2]):
            raise ValueError("per-channel totals must agree")
        object.__setattr__(self, "counts", c)

    @property
    def total(self) -> int:
        return int(self.counts[0].sum())


@dataclass(frozen=True)
class BinaryMask:
    """Boolean path-membership grid; True marks path-colored pixels."""

    bits: np.ndarray  # (height, width) bool

    def __post_init__(self):
        b = np.asarray(self.bits, dtype=bool)
        if b.ndim != 2 or b.shape[0] < 1 or b.shape[1] < 1:
            raise ValueError(f"bits must be 2-D and non-empty, got shape {b.shape}")
        object.__setattr__(self, "bits", b)

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]


def rgb_to_hsv_planes(pixels: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized hexcone conversion of a (..., 3) uint8 array to h, s, v planes."""
    arr = np.asarray(pixels, dtype=np.float64) / 255.0
    r, g, b = arr[..., 0], arr[..., 1], arr[..., 2]
    mx = arr.max(axis=-1)
    mn = arr.min(axis=-1)
    delta = mx - mn
    s = np.divide(delta, mx, out=np.zeros_like(mx), where=mx > 0)
    chromatic = delta > 0
    safe = np.where(chromatic, delta, 1.0)
    h = np.zeros_like(mx)
    is_r = chromatic & (r == mx)
    is_g = chromatic & (g == mx) & ~is_r
    is_b = chromatic & ~is_r & ~is_g
    h = np.where(is_r, ((g - b) / safe) % 6.0, h)
    h = np.where(is_g, (b - r) / safe + 2.0, h)
    h = np.where(is_b, (r - g) / safe + 4.0, h)
    h = (h / 6.0) % 1.0
    return h, s, mx


def rgb_to_hsv(r: int, g: int, b: int) -> HsvPixel:
    """Standard hexcone conversion of one 8-bit RGB pixel."""
    for name, c in (("r", r), ("g", g), ("b", b)):
        if not (0 <= c <= 255):
            raise ValueError(f"channel {name} must lie in [0, 255], got {c}")
    h, s, v = rgb_to_hsv_planes(np.array([r, g, b], dtype=np.uint8))
    return HsvPixel(float(h), float(s), float(v))


def hsv_to_rgb(p: HsvPixel) -> tuple[int, int, int]:
    """Inverse hexcone conversion, requantized to 8 bits (half away from zero)."""
    sector = int(p.h * 6.0) % 6
    f = p.h * 6.0 - int(p.h * 6.0)
    v = p.v
    a = v * (1.0 - p.s)
    q = v * (1.0 - f * p.s)
    t = v * (1.0 - (1.0 - f) * p.s)
    r, g, b = ((v, t, a), (q, v, a), (a, v, t), (a, q, v), (t, a, v), (v, a, q))[sector]
    return tuple(int(np.floor(c * 255.0 + 0.5)) for c in (r, g, b))


def _as_hsv_array(pixels) -> np.ndarray:
    if isinstance(pixels, np.ndarray):
        arr = np.asarray(pixels, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] != 3:
            raise ValueError(f"expected an (n, 3) array, got shape {arr.shape}")
        return arr
    return np.array([[p.h, p.s, p.v] for p in pixels], dtype=np.float64).reshape(-1, 3)


def hsv_histogram(pixels, bins: int) -> HsvHistogram:
    """Histogram HSV samples per channel; values at a range maximum land in the last bin.

    Accepts a sequence of HsvPixel or an (n, 3) float array.
    """
    if bins < 2:
        raise ValueError(f"need at least 2 bins, got {bins}")
    arr = _as_hsv_array(pixels)
    if arr.shape[0] == 0:
        raise ValueError("empty pixel list")
    idx = np.minimum((arr * bins).astype(np.int64), bins - 1)
    counts = np.zeros((3, bins), dtype=np.int64)
    for c in range(3):
        counts[c] = np.bincount(idx[:, c], minlength=bins)
    return HsvHistogram(bins, counts)


def fit_channel_stats(samples) -> ChannelStats:
    """Arithmetic mean and population standard deviation of one channel."""
    arr = np.asarray(samples, dtype=np.float64).ravel()
    if arr.size < 2:
        raise CalibrationError(f"need at least 2 samples, got {arr.size}")
    return ChannelStats(float(arr.mean()), float(arr.std()), int(arr.size))


def derive_range(h: ChannelStats, s: ChannelStats, v: ChannelStats, k: float = 2.0) -> HsvRange:
    """Build per-channel intervals mean +/- k*std, clipping saturation and value to [0, 1].

    A hue interval reaching past 0 or 1 would need wraparound support and is
    rejected instead.
    """
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")
    h_lo, h_hi = h.mean - k * h.std, h.mean + k * h.std
    if h_lo < 0.0 or h_hi > 1.0:
        raise HueWrapError(f"hue interval [{h_lo:.4f}, {h_hi:.4f}] crosses the 0/1 seam")
    s_lo, s_hi = max(0.0, s.mean - k * s.std), min(1.0, s.mean + k * s.std)
    v_lo, v_hi = max(0.0, v.mean - k * v.std), min(1.0, v.mean + k * v.std)
    return HsvRange(h_lo, h_hi, s_lo, s_hi, v_lo, v_hi)


def threshold_mask(image: RasterImage, rng: HsvRange, sigma: float = 1.0) -> BinaryMask:
    """Smooth the frame, convert to HSV, and keep pixels inside the range (inclusive)."""
    smoothed = smooth_rgb(image, sigma)
    h, s, v = rgb_to_hsv_planes(smoothed.pixels)
    bits = ((h >= rng.h_lo) & (h <= rng.h_hi)
            & (s >= rng.s_lo) & (s <= rng.s_hi)
            & (v >= rng.v_lo) & (v <= rng.v_hi))
    return BinaryMask(bits)
