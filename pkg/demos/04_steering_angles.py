"""From centroid to steering command, step by step.

Sweeps a centroid across the frame and prints the raw angle, the angle
mapped into the vehicle's rotation bounds, and the serial frame that
would carry it. Also shows the coarse three-region baseline the dynamic
angle replaces.
"""

from linenav import (Centroid, ReferenceFrame, SteeringLimits, classify_region,
                     encode_frame, path_angle, rad_to_deg, steering_command)

frame = ReferenceFrame.bottom_center(640, 480)
limits = SteeringLimits()  # raw [-90, 90] -> vehicle [-30, 30]

print(f"anchor at ({frame.anchor_x:.0f}, {frame.anchor_y:.0f}), "
      f"limits [{limits.min_deg}, {limits.max_deg}] deg")
print(f"{'centroid x':>10} {'raw deg':>9} {'mapped':>7} {'region':>7}   frame bytes")
seq = 0
for cx in (40.0, 160.0, 280.0, 320.0, 360.0, 480.0, 600.0):
    c = Centroid(cx, 240.0)
    raw = rad_to_deg(path_angle(c, frame))
    cmd = steering_command(c, frame, limits)
    wire = encode_frame(cmd, seq)
    region = classify_region(c, 640).value
    print(f"{cx:10.0f} {raw:9.2f} {cmd.angle_deg:7.2f} {region:>7}   {wire.hex()}")
    seq = (seq + 1) % 256

# a lost path gives an invalid command: zero angle, cleared valid bit
cmd = steering_command(None, frame, limits)
print(f"\nno centroid -> valid={cmd.valid}, wire={encode_frame(cmd, seq).hex()}")
