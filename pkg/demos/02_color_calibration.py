"""Calibrate an HSV detection range from pixel statistics.

Draws samples around a nominal line color, fits per-channel mean and
standard deviation, and derives the mean +/- 2*std detection intervals.
"""

import numpy as np

from linenav import YELLOW_RANGE, derive_range, fit_channel_stats, hsv_histogram

rng = np.random.RandomState(7)
n = 50000

# what a camera might report for a yellow guide line under varying light
h = rng.normal(1.0 / 6.0, 0.015, n).clip(0.05, 0.3)
s = rng.normal(0.75, 0.1, n).clip(0.0, 1.0)
v = rng.normal(0.7, 0.12, n).clip(0.0, 1.0)

hist = hsv_histogram(np.stack([h, s, v], axis=1), bins=16)
peak = hist.counts[0].argmax()
print(f"hue histogram peaks in bin {peak} "
      f"[{peak / 16:.3f}, {(peak + 1) / 16:.3f})  (1/6 = {1 / 6:.3f})")

stats = [fit_channel_stats(chan) for chan in (h, s, v)]
for name, st in zip("hsv", stats):
    print(f"{name}: mean={st.mean:.4f} std={st.std:.4f} n={st.count}")

derived = derive_range(*stats, k=2.0)
print(f"derived range: H [{derived.h_lo:.3f}, {derived.h_hi:.3f}] "
      f"S [{derived.s_lo:.3f}, {derived.s_hi:.3f}] "
      f"V [{derived.v_lo:.3f}, {derived.v_hi:.3f}]")
print(f"reference yellow range: H [{YELLOW_RANGE.h_lo}, {YELLOW_RANGE.h_hi}] "
      f"S,V [{YELLOW_RANGE.s_lo}, {YELLOW_RANGE.s_hi}]")

# the same flow is available from the shell:
#   linenav calibrate sample1.ppm sample2.ppm --k 2 --out threshold.json
