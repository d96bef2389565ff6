"""Track lifecycle and the per-frame tracking step.

A frame step runs predict -> associate -> update matched -> retire missed
-> initiate new -> emit. Tracks start Tentative, confirm after n_init
hits, and are deleted either while still tentative and unmatched or after
coasting unmatched for more than max_age frames. Only confirmed tracks
that were updated in the current frame are emitted, so coasting
predictions never reach the output.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from . import association, kalman
from .association import FeatureGallery, GateConfig
from .errors import SequencingError
from .model import BoundingBox, Detection, StateVector, box_to_state, state_to_box


class TrackStatus(enum.Enum):
    TENTATIVE = "tentative"
    CONFIRMED = "confirmed"
    DELETED = "deleted"


@dataclass
class Track:
    """One target's identity, state estimate and bookkeeping counters."""

    id: int
    state: kalman.TrackState
    status: TrackStatus
    gallery: FeatureGallery
    hits: int = 1
    age: int = 1
    time_since_update: int = 0

    def is_tentative(self) -> bool:
        return self.status is TrackStatus.TENTATIVE

    def is_confirmed(self) -> bool:
        return self.status is TrackStatus.CONFIRMED

    def is_deleted(self) -> bool:
        return self.status is TrackStatus.DELETED

    def to_box(self) -> BoundingBox:
        return state_to_box(StateVector.from_array(self.state.mean))


@dataclass(frozen=True)
class TrackerConfig:
    n_init: int = 3
    max_age: int = 30
    min_confidence: float = 0.3
    min_box_height: float = 0.0
    gate: GateConfig = field(default_factory=GateConfig)

    def __post_init__(self):
        if self.n_init < 1:
            raise ValueError("n_init must be at least 1")
        if self.max_age < 1:
            raise ValueError("max_age must be at least 1")
        if self.min_box_height < 0:
            raise ValueError("min_box_height must be nonnegative")


@dataclass(frozen=True)
class FrameOutput:
    """Confirmed tracks updated in one frame, as (track id, box) records."""

    frame: int
    records: tuple[tuple[int, BoundingBox], ...]


class Tracker:
    """Single-sequence tracker; owns all mutable track state.

    Instances are not thread-safe; run one instance per sequence.
    """

    def __init__(
        self,
        config: TrackerConfig | None = None,
        noise: kalman.NoiseProfile | None = None,
    ):
        self.config = config if config is not None else TrackerConfig()
        self.noise = noise if noise is not None else kalman.NoiseProfile()
        self.tracks: list[Track] = []
        self._next_id = 1
        self._last_frame = 0

    def step(self, frame: int, detections: list[Detection]) -> FrameOutput:
        """Advance the tracker by one frame of detections."""
        if frame <= self._last_frame:
            raise SequencingError(
                f"frame {frame} is not after previous frame {self._last_frame}"
            )
        bad = [d for d in detections if d.frame != frame]
        if bad:
            raise SequencingError(
                f"detection from frame {bad[0].frame} fed to step for frame {frame}"
            )
        self._last_frame = frame

        kept = [
            d
            for d in detections
            if d.confidence >= self.config.min_confidence
            and d.box.height >= self.config.min_box_height
        ]

        for track in self.tracks:
            track.state = kalman.predict(track.state, self.noise)
            track.age += 1
            track.time_since_update += 1

        result = association.associate(self.tracks, kept, self.config.gate, self.noise)

        for track_idx, det_idx in result.matches:
            self._update_track(self.tracks[track_idx], kept[det_idx])
        for track_idx in result.unmatched_rows:
            self._mark_missed(self.tracks[track_idx])
        for det_idx in result.unmatched_cols:
            self.tracks.append(self._initiate_track(kept[det_idx]))

        self.tracks = [t for t in self.tracks if not t.is_deleted()]

        records = tuple(
            (t.id, t.to_box())
            for t in self.tracks
            if t.is_confirmed() and t.time_since_update == 0
        )
        return FrameOutput(frame=frame, records=records)

    def _update_track(self, track: Track, detection: Detection) -> None:
        measurement = box_to_state(detection.box).positional
        track.state = kalman.update(track.state, measurement, self.noise)
        track.time_since_update = 0
        track.hits += 1
        if detection.embedding is not None:
            track.gallery.add(detection.embedding)
        if track.is_tentative() and track.hits >= self.config.n_init:
            track.status = TrackStatus.CONFIRMED

    def _mark_missed(self, track: Track) -> None:
        if track.is_tentative():
            track.status = TrackStatus.DELETED
        elif track.time_since_update > self.config.max_age:
            track.status = TrackStatus.DELETED

    def _initiate_track(self, detection: Detection) -> Track:
        gallery = FeatureGallery(self.config.gate.gallery_budget)
        if detection.embedding is not None:
            gallery.add(detection.embedding)
        status = (
            TrackStatus.CONFIRMED if self.config.n_init <= 1 else TrackStatus.TENTATIVE
        )
        track = Track(
            id=self._next_id,
            state=kalman.initiate(
                box_to_state(detection.box).positional, self.noise
            ),
            status=status,
            gallery=gallery,
        )
        self._next_id += 1
        return track


def run_sequence(bundle, config: TrackerConfig | None = None,
                 noise: kalman.NoiseProfile | None = None) -> list[FrameOutput]:
    """Track a whole sequence, stepping through every frame in order.

    Frames with no detections still advance prediction and aging, so
    max_age counts wall-clock frames rather than detection rows.
    """
    tracker = Tracker(config, noise)
    outputs = []
    for frame in range(1, bundle.frame_count + 1):
        outputs.append(tracker.step(frame, bundle.detections.get(frame, [])))
    return outputs
