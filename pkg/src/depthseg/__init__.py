"""depthseg: depth-image segmentation and driver-motion tracking.

Single-channel depth frames (millimeters, 0 = invalid) are segmented
into human-scale objects via histogram-of-depth splitting plus adaptive
region growing, and monitored for motion by differencing against a
reference frame inside the driver's bounding box.
"""

from .detection import (
    BodyCandidate,
    DetectorConfig,
    FrameSegmentation,
    classify_regions,
    locate_driver,
    segment_frame,
    select_driver,
)
from .errors import (
    DepthsegError,
    EmptyHistogramError,
    NoDriverFoundError,
    PgmError,
    SceneSpecError,
)
from .frames import DepthFrame, PixelMask, Rect, crop, crop_mask, valid_pixel_count
from .growing import (
    GrownRegion,
    GrowthParams,
    Seed,
    adaptive_threshold,
    find_seed,
    grow_region,
    segment_objects,
    similarity,
)
from .histogram import (
    DepthHistogram,
    DepthInterval,
    PeakSet,
    SegmentationParams,
    build_histogram,
    detect_peaks,
    extract_roi,
    split_regions,
    widen_and_snap,
)
from .pgm import load_depth_frame, load_mask, save_depth_frame, save_mask
from .synth import (
    BlobSpec,
    FrameOracle,
    MotionSpec,
    RampSpec,
    SceneOracle,
    SceneSpec,
    SequenceSpec,
    gen_scene,
    gen_sequence,
    load_spec,
    scene_at,
)
from .tracking import (
    AlertEvent,
    ChangedArea,
    DiffImage,
    MonitorSession,
    MotionReport,
    ReferenceFrame,
    TrackerConfig,
    changed_metrics,
    connected_components,
    downsample_max,
    evaluate_distraction,
    recalibrate_gray,
    set_reference,
    subtract,
)

__version__ = "0.1.0"
