"""Run the bundled 100 m S-curve episode and look at what the vehicle saw.

The loop per tick: render the camera's ground footprint, threshold to the
calibrated color range, trace and select the path contour, steer toward
its centroid, advance the kinematic model.
"""

import os

from linenav import annotate_frame, encode_ppm, run_episode
from linenav.config import load_config

here = os.path.dirname(__file__)
out_dir = os.path.join(here, "out")
os.makedirs(out_dir, exist_ok=True)

cfg = load_config(os.path.join(here, "..", "configs", "s_curve_100m.json"))
print(f"course: {cfg.course.length:.1f} m, line {cfg.course.line_width} m wide, "
      f"{cfg.vehicle.speed_mps} m/s, dt {cfg.vehicle.dt_s} s")

snapshots = {}


def keep_some_frames(tick, frame, selected, center):
    if tick in (0, 150, 300):
        snapshots[tick] = annotate_frame(
            frame, selected, center,
            anchor=(cfg.camera.image_width / 2.0, cfg.camera.image_height - 1.0))


trace = []
metrics = run_episode(cfg.course, cfg.threshold, cfg.limits, cfg.camera,
                      speed=cfg.vehicle.speed_mps, dt=cfg.vehicle.dt_s,
                      max_time=cfg.vehicle.max_time_s, sigma=cfg.sigma,
                      min_area=cfg.min_area, wheelbase=cfg.vehicle.wheelbase_m,
                      trace=trace, frame_hook=keep_some_frames)

print(f"completed={metrics.completed} in {metrics.elapsed:.2f} s "
      f"({metrics.frames} frames, {metrics.distance_traveled:.1f} m)")
print(f"mean |cross-track| = {metrics.mean_abs_cross_track * 1000:.2f} mm "
      f"-> {metrics.error_pct:.2f}% of line width")
worst = max(trace, key=lambda r: abs(r.cross_track))
print(f"worst cross-track {worst.cross_track * 1000:.2f} mm at t={worst.t:.2f} s")

for tick, shot in snapshots.items():
    path = os.path.join(out_dir, f"episode_tick{tick:03d}.ppm")
    with open(path, "wb") as fh:
        fh.write(encode_ppm(shot))
    print("wrote", path)

with open(os.path.join(out_dir, "episode_trace.csv"), "w") as fh:
    fh.write("t,x,y,heading,angle_deg,cross_track\n")
    for r in trace:
        fh.write(f"{r.t!r},{r.x!r},{r.y!r},{r.heading!r},"
                 f"{r.angle_deg!r},{r.cross_track!r}\n")
print("wrote", os.path.join(out_dir, "episode_trace.csv"))

# the same run from the shell:
#   linenav simulate --config configs/s_curve_100m.json --out metrics.csv --trace trace.csv
