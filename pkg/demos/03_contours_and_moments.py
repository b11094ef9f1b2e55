"""Trace borders on a binary mask and compare both moment routes.

A wide band plays the path; a small blob plays clutter. Border following
finds both; area selection keeps the band; its centroid comes out of the
pixel moments, and the boundary-integral (polygon) moments land nearby.
"""

import os

import numpy as np

from linenav import (BinaryMask, RasterImage, annotate_frame, centroid,
                     contour_moments_green, encode_ppm, region_moments,
                     select_path_contour, trace_contours)

out_dir = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(out_dir, exist_ok=True)

bits = np.zeros((120, 160), dtype=bool)
bits[10:110, 60:100] = True     # path band
bits[20:35, 120:140] = True     # ambiguous object
bits[50:70, 70:90] = False      # a hole inside the band

mask = BinaryMask(bits)
contours = trace_contours(mask)
for i, c in enumerate(contours):
    kind = "outer" if c.is_outer else "hole"
    print(f"contour {i}: {kind}, {len(c)} boundary points, area={c.area}")

band = select_path_contour(contours, min_area=50)
m = region_moments(mask, band)
c = centroid(m)
print(f"selected band: area={m.m00:.0f} centroid=({c.x:.2f}, {c.y:.2f})")

g = contour_moments_green(band)
print(f"pixel-moment area {m.m00:.0f} vs boundary-integral area {g.m00:.1f}")
print("  (the boundary integral spans everything inside the outer border,")
print("   hole included; pixel moments count only foreground pixels)")

gray = np.where(bits[..., None], 200, 30).astype(np.uint8).repeat(3, axis=2)
annotated = annotate_frame(RasterImage(gray), band, c, anchor=(80.0, 119.0))
with open(os.path.join(out_dir, "contours.ppm"), "wb") as fh:
    fh.write(encode_ppm(annotated))
print("wrote", out_dir + "/contours.ppm")
