"""Border-following contour extraction and region/contour moments.

Foreground components are 8-connected, background holes 4-connected (the
Jordan-consistent pairing). Outer borders are traced counterclockwise as
displayed (y down); hole borders the opposite way.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .colorspace import BinaryMask
from .imaging import RasterImage

# 8-neighborhood ring in clockwise display order starting east: (dy, dx)
_RING = ((0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1))
_RING_INDEX = {d: i for i, d in enumerate(_RING)}


class DegenerateRegionError(ValueError):
    """Region or contour has no interior to take moments over."""


@dataclass(frozen=True)
class Contour:
    """Closed 8-connected border walk; points are (x, y) pixel coordinates.

    area caches the filled pixel count of the traced component (outer
    borders only) so contours can be ranked without re-reading the mask.
    """

    points: np.ndarray  # (n, 2) int32
    is_outer: bool
    area: Optional[int] = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.int32)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 1:
            raise ValueError(f"points must be a non-empty (n, 2) array, got {pts.shape}")
        if pts.shape[0] > 1:
            step = np.abs(np.diff(np.vstack([pts, pts[:1]]), axis=0))
            if step.max() > 1 or (step.sum(axis=1) == 0).any():
                raise ValueError("consecutive points (cyclically) must be distinct 8-neighbors")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class Moments:
    """Raw spatial moments m_ji = sum of x^j y^i over a region."""

    m00: float
    m10: float
    m01: float
    m20: float
    m11: float
    m02: float


@dataclass(frozen=True)
class CentralMoments:
    mu20: float
    mu11: float
    mu02: float


@dataclass(frozen=True)
class Centroid:
    x: float
    y: float


def trace_contours(mask: BinaryMask) -> list[Contour]:
    """Trace every outer and hole border of a binary mask.

    One outer border per 8-connected foreground component, one hole border
    per enclosed 4-connected background region, in raster discovery order.
    """
    bits = mask.bits
    h, w = bits.shape
    f = np.zeros((h + 2, w + 2), dtype=np.int32)
    f[1:-1, 1:-1] = bits

    # A border can only start where the west or east neighbor is background;
    # zero-ness never changes while tracing, so candidates are precomputable.
    fg = f != 0
    start_w = np.zeros_like(fg)
    start_e = np.zeros_like(fg)
    start_w[:, 1:] = fg[:, 1:] & ~fg[:, :-1]
    start_e[:, :-1] = fg[:, :-1] & ~fg[:, 1:]
    candidates = np.argwhere(start_w | start_e).tolist()

    contours = []
    nbd = 1
    for i, j in candidates:
        if f[i, j] == 1 and f[i, j - 1] == 0:
            is_outer = True
            i2, j2 = i, j - 1
        elif f[i, j] >= 1 and f[i, j + 1] == 0:
            is_outer = False
            i2, j2 = i, j + 1
        else:
            continue
        nbd += 1
        walk = _follow_border(f, i, j, i2, j2, nbd)
        pts = np.array([(x - 1, y - 1) for y, x in walk], dtype=np.int32)
        area = None
        if is_outer:
            area = int(_component_fill(bits, int(pts[0, 0]), int(pts[0, 1])).sum())
        contours.append(Contour(pts, is_outer, area))
    return contours


def _follow_border(f, i, j, i2, j2, nbd):
    """Walk one border starting at (i, j) with known background neighbor (i2, j2)."""
    start = _RING_INDEX[(i2 - i, j2 - j)]
    for t in range(8):  # clockwise sweep for the first border neighbor
        dy, dx = _RING[(start + t) % 8]
        if f[i + dy, j + dx] != 0:
            i1, j1 = i + dy, j + dx
            break
    else:
        f[i, j] = -nbd
        return [(i, j)]

    i2, j2 = i1, j1
    i3, j3 = i, j
    walk = [(i, j)]
    while True:
        # counterclockwise sweep around the current pixel, resuming just
        # past the previously visited neighbor
        start = _RING_INDEX[(i2 - i3, j2 - j3)]
        east_was_zero = False
        for t in range(1, 9):
            dy, dx = _RING[(start - t) % 8]
            if f[i3 + dy, j3 + dx] != 0:
                i4, j4 = i3 + dy, j3 + dx
                break
            if dy == 0 and dx == 1:
                east_was_zero = True
        if east_was_zero:
            f[i3, j3] = -nbd  # border exits to the right here
        elif f[i3, j3] == 1:
            f[i3, j3] = nbd
        if (i4, j4) == (i, j) and (i3, j3) == (i1, j1):
            return walk
        i2, j2 = i3, j3
        i3, j3 = i4, j4
        walk.append((i3, j3))


def _component_fill(bits: np.ndarray, seed_x: int, seed_y: int) -> np.ndarray:
    """Scanline flood fill of the 8-connected foreground component at the seed."""
    h, w = bits.shape
    filled = np.zeros_like(bits)
    stack = [(seed_y, seed_x)]
    while stack:
        y, x = stack.pop()
        if filled[y, x] or not bits[y, x]:
            continue
        row = bits[y]
        gaps = np.flatnonzero(~row[:x + 1])
        lo = int(gaps[-1]) + 1 if gaps.size else 0
        gaps = np.flatnonzero(~row[x:])
        hi = x + int(gaps[0]) - 1 if gaps.size else w - 1
        filled[y, lo:hi + 1] = True
        # 8-connectivity: adjacent rows may continue one column past the run
        for y2 in (y - 1, y + 1):
            if not (0 <= y2 < h):
                continue
            a = max(lo - 1, 0)
            b = min(hi + 1, w - 1)
            seg = bits[y2, a:b + 1] & ~filled[y2, a:b + 1]
            if not seg.any():
                continue
            starts = np.flatnonzero(seg & ~np.roll(seg, 1))
            if seg[0] and (starts.size == 0 or starts[0] != 0):
                stack.append((y2, a))
            for s in starts:
                stack.append((y2, a + int(s)))
    return filled


def region_pixels(mask: BinaryMask, region: Contour) -> np.ndarray:
    """Boolean image of the filled component traced by an outer contour."""
    if not region.is_outer:
        raise DegenerateRegionError("moments are taken over outer contours only")
    x0, y0 = int(region.points[0, 0]), int(region.points[0, 1])
    if not (0 <= y0 < mask.height and 0 <= x0 < mask.width) or not mask.bits[y0, x0]:
        raise DegenerateRegionError("contour does not lie on mask foreground")
    return _component_fill(mask.bits, x0, y0)


def select_path_contour(contours: list[Contour], min_area: int = 50) -> Optional[Contour]:
    """Largest outer contour by filled pixel area, or None below min_area.

    Ties keep the earliest raster-discovered contour.
    """
    best = None
    best_area = 0
    for c in contours:
        if not c.is_outer or c.area is None:
            continue
        if c.area > best_area:
            best = c
            best_area = c.area
    if best is None or best_area < min_area:
        return None
    return best


def region_moments(mask: BinaryMask, region: Contour) -> Moments:
    """Raw moments of the filled region, unit weight per foreground pixel."""
    filled = region_pixels(mask, region)
    ys, xs = np.nonzero(filled)
    if xs.size == 0:
        raise DegenerateRegionError("region has no pixels")
    xs = xs.astype(np.int64)
    ys = ys.astype(np.int64)
    return Moments(
        m00=float(xs.size),
        m10=float(xs.sum()),
        m01=float(ys.sum()),
        m20=float((xs * xs).sum()),
        m11=float((xs * ys).sum()),
        m02=float((ys * ys).sum()),
    )


def central_moments(m: Moments) -> CentralMoments:
    """Second-order moments about the center of mass."""
    if m.m00 <= 0:
        raise DegenerateRegionError("m00 must be positive")
    x_bar = m.m10 / m.m00
    y_bar = m.m01 / m.m00
    return CentralMoments(
        mu20=m.m20 - x_bar * m.m10,
        mu11=m.m11 - x_bar * m.m01,
        mu02=m.m02 - y_bar * m.m01,
    )


def centroid(m: Moments) -> Centroid:
    """Center of mass (m10/m00, m01/m00)."""
    if m.m00 <= 0:
        raise DegenerateRegionError("m00 must be positive")
    return Centroid(m.m10 / m.m00, m.m01 / m.m00)


def contour_moments_green(c) -> Moments:
    """Moments of the polygon through the contour vertices via the boundary integral.

    The closed-curve line integral reduces each area moment to a sum over
    polygon edges (the shoelace pattern); orientation is normalized so that
    m00 is nonnegative. Accepts a traced Contour or a plain (n, 2) vertex
    array (synthetic polygons need not be 8-connected walks).
    """
    pts = (c.points if isinstance(c, Contour) else np.asarray(c)).astype(np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
        raise DegenerateRegionError(f"need at least 3 polygon vertices, got shape {pts.shape}")
    x, y = pts[:, 0], pts[:, 1]
    xp, yp = np.roll(x, 1), np.roll(y, 1)
    cross = xp * y - x * yp
    a00 = cross.sum() / 2.0
    a10 = (cross * (xp + x)).sum() / 6.0
    a01 = (cross * (yp + y)).sum() / 6.0
    a20 = (cross * (xp * xp + xp * x + x * x)).sum() / 12.0
    a11 = (cross * (xp * (2.0 * yp + y) + x * (yp + 2.0 * y))).sum() / 24.0
    a02 = (cross * (yp * yp + yp * y + y * y)).sum() / 12.0
    if a00 < 0:
        a00, a10, a01, a20, a11, a02 = -a00, -a10, -a01, -a20, -a11, -a02
    return Moments(a00, a10, a01, a20, a11, a02)


def annotate_frame(image: RasterImage, contour: Optional[Contour] = None,
                   center: Optional[Centroid] = None,
                   anchor: Optional[tuple[float, float]] = None) -> RasterImage:
    """Overlay the selected contour, centroid cross, and anchor-to-centroid ray."""
    px = image.pixels.copy()
    h, w = px.shape[:2]
    if contour is not None:
        px[contour.points[:, 1], contour.points[:, 0]] = (255, 0, 0)
    if center is not None and anchor is not None:
        for x, y in _line_pixels(int(round(anchor[0])), int(round(anchor[1])),
                                 int(round(center.x)), int(round(center.y))):
            if 0 <= x < w and 0 <= y < h:
                px[y, x] = (0, 0, 255)
    if center is not None:
        cx, cy = int(round(center.x)), int(round(center.y))
        for d in range(-4, 5):
            if 0 <= cx + d < w and 0 <= cy < h:
                px[cy, cx + d] = (255, 255, 255)
            if 0 <= cx < w and 0 <= cy + d < h:
                px[cy + d, cx] = (255, 255, 255)
    return RasterImage(px)


def _line_pixels(x0, y0, x1, y1):
    """Bresenham walk from (x0, y0) to (x1, y1) inclusive."""
    dx = abs(x1 - x0)
    dy = -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    while True:
        yield x0, y0
        if x0 == x1 and y0 == y1:
            return
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy
