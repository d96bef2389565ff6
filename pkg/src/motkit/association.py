"""Gated cost construction and the two-stage association step.

Stage 1 is an appearance matching cascade over confirmed tracks: tracks
seen most recently get strict priority, candidate pairs are scored by
cosine distance against each track's feature gallery, and a chi-square
bound on the squared Mahalanobis distance vetoes motion-implausible
pairs. Stage 2 recovers the remainder (fresh tracks and tracks missed for
exactly one frame) by IoU matching, which tolerates appearance changes
from partial occlusion.

Track arguments are duck-typed: they need ``state`` (a
:class:`~motkit.kalman.TrackState`), ``gallery``, ``time_since_update``
and ``is_confirmed()``. The tracker module owns the concrete type.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from . import kalman
from .assignment import INFEASIBLE, Assignment, min_cost_matching
from .errors import MissingFeatureError
from .model import StateVector, box_to_state, iou, state_to_box

# 0.95 quantile of the chi-square distribution with 4 degrees of freedom,
# the dimensionality of the measurement space.
CHI2_GATE_4DOF = 9.4877


@dataclass(frozen=True)
class GateConfig:
    """Thresholds for the two association stages."""

    max_cosine_distance: float = 0.2
    gating_chi2_threshold: float = CHI2_GATE_4DOF
    max_iou_distance: float = 0.7
    gallery_budget: int = 100

    def __post_init__(self):
        if not 0 < self.max_cosine_distance <= 2:
            raise ValueError("max_cosine_distance must be in (0, 2]")
        if self.gating_chi2_threshold <= 0:
            raise ValueError("gating_chi2_threshold must be positive")
        if not 0 < self.max_iou_distance <= 1:
            raise ValueError("max_iou_distance must be in (0, 1]")
        if self.gallery_budget < 1:
            raise ValueError("gallery_budget must be at least 1")


class FeatureGallery:
    """Ring buffer of the most recent unit-norm embeddings of one track."""

    def __init__(self, budget: int):
        if budget < 1:
            raise ValueError("gallery budget must be at least 1")
        self._vectors: deque[np.ndarray] = deque(maxlen=budget)

    def add(self, vector) -> None:
        vec = np.asarray(vector, dtype=float).reshape(-1)
        norm = float(np.linalg.norm(vec))
        if abs(norm - 1.0) > 1e-6:
            raise ValueError(f"gallery vectors must be unit-norm, got norm {norm}")
        if self._vectors and vec.shape != self._vectors[0].shape:
            raise ValueError(
                f"embedding dimension changed: {self._vectors[0].shape[0]} "
                f"vs {vec.shape[0]}"
            )
        self._vectors.append(vec)

    def __len__(self) -> int:
        return len(self._vectors)

    def as_matrix(self) -> np.ndarray:
        return np.stack(list(self._vectors))


def cosine_cost(gallery: FeatureGallery, detections) -> np.ndarray:
    """Per-detection cosine distance to the nearest gallery vector.

    Entry j is min over gallery vectors g of 1 - g . e_j, in [0, 2].
    """
    if len(gallery) == 0:
        raise ValueError("cosine_cost needs a nonempty gallery")
    embeddings = []
    for det in detections:
        if det.embedding is None:
            raise MissingFeatureError(
                f"detection {det.source_index} in frame {det.frame} has no embedding"
            )
        embeddings.append(det.embedding)
    stacked = np.stack(embeddings)
    if stacked.shape[1] != gallery.as_matrix().shape[1]:
        raise ValueError(
            f"embedding dimension mismatch: gallery {gallery.as_matrix().shape[1]}, "
            f"detections {stacked.shape[1]}"
        )
    return np.min(1.0 - gallery.as_matrix() @ stacked.T, axis=0)


def gate_cost_matrix(
    costs: np.ndarray,
    track_states,
    detections,
    chi2_threshold: float,
    noise: kalman.NoiseProfile = kalman.NoiseProfile(),
) -> np.ndarray:
    """Mark entries infeasible where the squared Mahalanobis distance of
    the detection to the track's projected state exceeds the gate.

    Feasible entries keep their values untouched.
    """
    gated = np.asarray(costs, dtype=float).copy()
    if gated.shape != (len(track_states), len(detections)):
        raise ValueError(
            f"cost shape {gated.shape} does not match "
            f"{len(track_states)} tracks x {len(detections)} detections"
        )
    if not detections:
        return gated
    measurements = np.array([box_to_state(d.box).positional for d in detections])
    for i, state in enumerate(track_states):
        distances = kalman.gating_distance(state, measurements, noise)
        gated[i, distances > chi2_threshold] = INFEASIBLE
    return gated


def _track_box(track):
    return state_to_box(StateVector.from_array(track.state.mean))


def iou_cost(tracks, detections) -> np.ndarray:
    """Cost matrix of 1 - IoU between current track boxes and detections."""
    costs = np.zeros((len(tracks), len(detections)))
    for i, track in enumerate(tracks):
        box = _track_box(track)
        for j, det in enumerate(detections):
            costs[i, j] = 1.0 - iou(box, det.box)
    return costs


def matching_cascade(
    tracks,
    detections,
    config: GateConfig,
    noise: kalman.NoiseProfile = kalman.NoiseProfile(),
) -> Assignment:
    """Appearance matching with strict recency priority.

    Confirmed tracks are grouped by time_since_update and matched level by
    level, most recently seen first; a level's matches are final before
    older tracks get to compete. Only detections carrying embeddings and
    tracks with nonempty galleries participate; the rest come back
    unmatched.
    """
    matches: list[tuple[int, int]] = []
    eligible_tracks = [
        i
        for i, t in enumerate(tracks)
        if t.is_confirmed() and len(t.gallery) > 0
    ]
    remaining = [j for j, d in enumerate(detections) if d.embedding is not None]
    levels = sorted({tracks[i].time_since_update for i in eligible_tracks})
    for level in levels:
        if not remaining:
            break
        level_tracks = [
            i for i in eligible_tracks if tracks[i].time_since_update == level
        ]
        level_dets = [detections[j] for j in remaining]
        costs = np.stack(
            [cosine_cost(tracks[i].gallery, level_dets) for i in level_tracks]
        )
        gated = gate_cost_matrix(
            costs,
            [tracks[i].state for i in level_tracks],
            level_dets,
            config.gating_chi2_threshold,
            noise,
        )
        result = min_cost_matching(gated, config.max_cosine_distance)
        for row, col in result.matches:
            matches.append((level_tracks[row], remaining[col]))
        remaining = [remaining[col] for col in result.unmatched_cols]

    matched_tracks = {i for i, _ in matches}
    matched_dets = {j for _, j in matches}
    return Assignment(
        matches=tuple(matches),
        unmatched_rows=tuple(i for i in range(len(tracks)) if i not in matched_tracks),
        unmatched_cols=tuple(
            j for j in range(len(detections)) if j not in matched_dets
        ),
    )


def associate(
    tracks,
    detections,
    config: GateConfig,
    noise: kalman.NoiseProfile = kalman.NoiseProfile(),
) -> Assignment:
    """Run both association stages and merge their matches.

    When no detection in the frame carries an embedding the cascade is
    skipped and IoU matching runs over every track (detector-only mode);
    otherwise stage 2 sees unconfirmed tracks plus confirmed tracks that
    stage 1 left unmatched for exactly one frame.
    """
    have_appearance = any(d.embedding is not None for d in detections)
    if have_appearance:
        cascade = matching_cascade(tracks, detections, config, noise)
        matches = list(cascade.matches)
        cascade_unmatched = set(cascade.unmatched_rows)
        iou_track_idx = [
            i
            for i, t in enumerate(tracks)
            if i in cascade_unmatched
            and (not t.is_confirmed() or t.time_since_update == 1)
        ]
        remaining_dets = list(cascade.unmatched_cols)
    else:
        matches = []
        iou_track_idx = list(range(len(tracks)))
        remaining_dets = list(range(len(detections)))

    if iou_track_idx and remaining_dets:
        costs = iou_cost(
            [tracks[i] for i in iou_track_idx],
            [detections[j] for j in remaining_dets],
        )
        result = min_cost_matching(costs, config.max_iou_distance)
        for row, col in result.matches:
            matches.append((iou_track_idx[row], remaining_dets[col]))

    matched_tracks = {i for i, _ in matches}
    matched_dets = {j for _, j in matches}
    return Assignment(
        matches=tuple(sorted(matches)),
        unmatched_rows=tuple(i for i in range(len(tracks)) if i not in matched_tracks),
        unmatched_cols=tuple(
            j for j in range(len(detections)) if j not in matched_dets
        ),
    )
