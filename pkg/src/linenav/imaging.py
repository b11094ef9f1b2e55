"""Raster frames, Gaussian smoothing, and binary PPM (P6) I/O.

Coordinate convention used throughout the toolkit: origin at the top-left
corner, x grows rightward (column index), y grows downward (row index).
Arrays are indexed [y, x].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class PpmError(ValueError):
    """Base class for malformed binary-pixmap data."""


class PpmMagicError(PpmError):
    """Missing or unsupported magic number (only P6 is accepted)."""


class PpmHeaderError(PpmError):
    """Unparseable or non-positive header dimensions."""


class PpmMaxvalError(PpmError):
    """Maxval other than 255."""


class PpmTruncatedError(PpmError):
    """Pixel payload shorter than width * height * 3 bytes."""


def _round_half_away(values: np.ndarray) -> np.ndarray:
    # np.round would round half to even; quantization here must be symmetric.
    return np.sign(values) * np.floor(np.abs(values) + 0.5)


@dataclass(frozen=True)
class RasterImage:
    """Camera frame: height x width grid of 8-bit RGB pixels."""

    pixels: np.ndarray  # (height, width, 3) uint8, row-major

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.uint8)
        if px.ndim != 3 or px.shape[2] != 3:
            raise ValueError(f"pixels must have shape (h, w, 3), got {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("image must be at least 1x1")
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @classmethod
    def filled(cls, width: int, height: int, rgb: tuple[int, int, int]) -> "RasterImage":
        """Uniform frame of a single color."""
        px = np.empty((height, width, 3), dtype=np.uint8)
        px[:] = rgb
        return cls(px)


@dataclass(frozen=True)
class GrayImage:
    """Single-channel image with real intensities in [0, 1]."""

    values: np.ndarray  # (height, width) float64

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise ValueError(f"values must be 2-D, got shape {v.shape}")
        if v.shape[0] < 1 or v.shape[1] < 1:
            raise ValueError("image must be at least 1x1")
        if v.size and (v.min() < 0.0 or v.max() > 1.0):
            raise ValueError("intensities must lie in [0, 1]")
        object.__setattr__(self, "values", v)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class Kernel:
    """Square convolution kernel; weights sum to 1 and are reflection-symmetric."""

    weights: np.ndarray  # (2r+1, 2r+1) float64
    sigma: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] % 2 == 0 or w.shape[0] < 3:
            raise ValueError(f"weights must be square with odd size >= 3, got {w.shape}")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if abs(w.sum() - 1.0) > 1e-9:
            raise ValueError("weights must sum to 1 within 1e-9")
        if not (np.array_equal(w, w[::-1, :]) and np.array_equal(w, w[:, ::-1])
                and np.array_equal(w, w.T)):
            raise ValueError("weights must be symmetric under reflection")
        object.__setattr__(self, "weights", w)

    @property
    def radius(self) -> int:
        return self.weights.shape[0] // 2


def gaussian_kernel(sigma: float, radius: int) -> Kernel:
    """Normalized isotropic Gaussian with weights exp(-(dx^2 + dy^2) / (2 sigma^2))."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if radius < 1:
        raise ValueError(f"radius must be at least 1, got {radius}")
    ax = np.arange(-radius, radius + 1, dtype=np.float64)
    sq = ax[:, None] ** 2 + ax[None, :] ** 2
    w = np.exp(-sq / (2.0 * sigma * sigma))
    return Kernel(w / w.sum(), sigma)


def convolve(image: GrayImage, kernel: Kernel) -> GrayImage:
    """Convolve with edge replication at the borders; output clamped to [0, 1]."""
    r = kernel.radius
    h, w = image.values.shape
    padded = np.pad(image.values, r, mode="edge")
    acc = np.zeros((h, w), dtype=np.float64)
    kw = kernel.weights
    for dy in range(2 * r + 1):
        for dx in range(2 * r + 1):
            acc += kw[dy, dx] * padded[dy:dy + h, dx:dx + w]
    return GrayImage(np.clip(acc, 0.0, 1.0))


def smooth_rgb(image: RasterImage, sigma: float) -> RasterImage:
    """Gaussian-smooth each channel; kernel radius ceil(3 sigma), 8-bit requantized."""
    kernel = gaussian_kernel(sigma, max(1, math.ceil(3.0 * sigma)))
    out = np.empty_like(image.pixels)
    for c in range(3):
        channel = GrayImage(image.pixels[:, :, c].astype(np.float64) / 255.0)
        smoothed = convolve(channel, kernel).values
        out[:, :, c] = _round_half_away(smoothed * 255.0).astype(np.uint8)
    return RasterImage(out)


def encode_ppm(image: RasterImage) -> bytes:
    """Serialize to binary PPM: header "P6\\n<w> <h>\\n255\\n" then raw RGB triples."""
    header = b"P6\n%d %d\n255\n" % (image.width, image.height)
    return header + image.pixels.tobytes()


def _next_token(data: bytes, pos: int) -> tuple[bytes, int]:
    # skip whitespace and '#' comments, then read one token
    n = len(data)
    while pos < n:
        b = data[pos]
        if b in b" \t\r\n\v\f":
            pos += 1
        elif b == ord("#"):
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
        else:
            break
    start = pos
    while pos < n and data[pos] not in b" \t\r\n\v\f":
        pos += 1
    if start == pos:
        raise PpmHeaderError("unexpected end of header")
    return data[start:pos], pos


def decode_ppm(data: bytes) -> RasterImage:
    """Parse a binary PPM (P6, maxval 255); inverse of encode_ppm."""
    if len(data) < 2 or data[0:1] != b"P":
        raise PpmMagicError("not a portable pixmap")
    if data[0:2] != b"P6":
        raise PpmMagicError(f"unsupported format {data[0:2].decode('ascii', 'replace')!r}, expected P6")
    pos = 2
    fields = []
    for name in ("width", "height", "maxval"):
        token, pos = _next_token(data, pos)
        try:
            fields.append(int(token))
        except ValueError:
            raise PpmHeaderError(f"invalid {name}: {token!r}") from None
    width, height, maxval = fields
    if width <= 0 or height <= 0:
        raise PpmHeaderError(f"dimensions must be positive, got {width}x{height}")
    if maxval != 255:
        raise PpmMaxvalError(f"only maxval 255 is supported, got {maxval}")
    pos += 1  # single whitespace byte after maxval
    needed = width * height * 3
    payload = data[pos:pos + needed]
    if len(payload) < needed:
        raise PpmTruncatedError(f"expected {needed} pixel bytes, got {len(payload)}")
    px = np.frombuffer(payload, dtype=np.uint8).reshape(height, width, 3)
    return RasterImage(px.copy())
