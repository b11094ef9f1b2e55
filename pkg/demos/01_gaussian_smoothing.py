"""Build Gaussian kernels and smooth a speckled synthetic frame.

Writes demos/out/noisy.ppm and demos/out/smoothed.ppm for side-by-side
viewing (any PPM-capable viewer works).
"""

import os

import numpy as np

from linenav import RasterImage, encode_ppm, gaussian_kernel, smooth_rgb

out_dir = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(out_dir, exist_ok=True)

# kernel weights fall off with distance; the 3x3 sigma=1 kernel keeps about
# 20% of the mass in the center
k = gaussian_kernel(sigma=1.0, radius=1)
print("3x3 kernel, sigma=1:")
print(np.round(k.weights, 4))
print("sum of weights:", k.weights.sum())

# a yellow band on gray floor, peppered with dropout pixels
rng = np.random.RandomState(0)
px = np.empty((240, 320, 3), dtype=np.uint8)
px[:] = (179, 170, 170)
px[:, 130:190] = (230, 230, 23)
speckle = rng.random((240, 320)) < 0.02
px[speckle] = (0, 0, 0)

noisy = RasterImage(px)
smoothed = smooth_rgb(noisy, sigma=1.0)

with open(os.path.join(out_dir, "noisy.ppm"), "wb") as fh:
    fh.write(encode_ppm(noisy))
with open(os.path.join(out_dir, "smoothed.ppm"), "wb") as fh:
    fh.write(encode_ppm(smoothed))

# smoothing pulls dropout pixels back toward their surroundings
dark_before = (noisy.pixels.sum(axis=2) < 60).sum()
dark_after = (smoothed.pixels.sum(axis=2) < 60).sum()
print(f"near-black pixels before: {dark_before}, after: {dark_after}")
print("wrote", out_dir + "/noisy.ppm", "and", out_dir + "/smoothed.ppm")
