"""linenav: monocular color-line path detection with a closed-loop simulator.

Pipeline: Gaussian smoothing, HSV thresholding, border-following contour
extraction, centroid moments, and a bounded steering angle, validated in a
deterministic render/detect/steer/advance loop.
"""

from .colorspace import (BinaryMask, ChannelStats, HsvHistogram, HsvPixel, HsvRange,
                         YELLOW_RANGE, derive_range, fit_channel_stats, hsv_histogram,
                         hsv_to_rgb, rgb_to_hsv, rgb_to_hsv_planes, threshold_mask)
from .command_link import decode_frame, encode_frame
from .config import ToolConfig, config_from_dict, config_to_dict, load_config
from .contour import (CentralMoments, Centroid, Contour, Moments, annotate_frame,
                      central_moments, centroid, contour_moments_green, region_moments,
                      region_pixels, select_path_contour, trace_contours)
from .imaging import (GrayImage, Kernel, RasterImage, convolve, decode_ppm, encode_ppm,
                      gaussian_kernel, smooth_rgb)
from .simulator import (CameraModel, CourseSpec, EpisodeMetrics, TickRecord, VehicleState,
                        course_progress, cross_track_error, render_frame, run_episode,
                        step_vehicle)
from .steering import (PathObservation, ReferenceFrame, Region, SteeringCommand,
                       SteeringLimits, classify_region, path_angle, rad_to_deg,
                       steering_command, transform_range)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
