"""motkit: tracking-by-detection over files, with a matching evaluation
harness.

The engine consumes per-frame detections (and optional appearance
embeddings) from files, associates them into identity-stable tracks with
a Kalman filter, an appearance matching cascade and IoU recovery, and
scores result files against ground truth with CLEAR/identity metrics.
"""

from .association import CHI2_GATE_4DOF, FeatureGallery, GateConfig
from .errors import MotError
from .kalman import NoiseProfile, TrackState
from .model import BoundingBox, Detection, StateVector, box_to_state, iou, state_to_box
from .tracker import FrameOutput, Track, Tracker, TrackerConfig, run_sequence

__version__ = "0.1.0"

__all__ = [
    "BoundingBox",
    "CHI2_GATE_4DOF",
    "Detection",
    "FeatureGallery",
    "FrameOutput",
    "GateConfig",
    "MotError",
    "NoiseProfile",
    "StateVector",
    "Track",
    "Tracker",
    "TrackerConfig",
    "TrackState",
    "box_to_state",
    "iou",
    "run_sequence",
    "state_to_box",
    "__version__",
]
