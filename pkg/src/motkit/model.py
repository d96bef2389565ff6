"""Core value types and bounding-box geometry.

Boxes follow the MOTChallenge convention (left, top, width, height) in
real-valued pixels and are never clamped to image bounds: public ground
truth files contain out-of-image boxes, and clamping would corrupt the
overlap-based precision metric.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericDegeneracyError


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box as (left, top, width, height), width/height > 0."""

    left: float
    top: float
    width: float
    height: float

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError(
                f"box must have positive size, got {self.width}x{self.height}"
            )

    @property
    def right(self) -> float:
        return self.left + self.width

    @property
    def bottom(self) -> float:
        return self.top + self.height

    @property
    def area(self) -> float:
        return self.width * self.height


@dataclass(frozen=True, eq=False)
class Detection:
    """One detector output: a box with a confidence and an optional
    unit-norm appearance embedding.

    ``source_index`` is the 0-based position of the detection within its
    frame in the originating file; embedding sidecar records are keyed on
    (frame, source_index).
    """

    frame: int
    box: BoundingBox
    confidence: float
    embedding: np.ndarray | None = None
    source_index: int = 0

    def __post_init__(self):
        if self.embedding is not None:
            norm = float(np.linalg.norm(self.embedding))
            if abs(norm - 1.0) > 1e-6:
                raise ValueError(f"embedding must be unit-norm, got norm {norm}")


@dataclass(frozen=True)
class StateVector:
    """Center-form box state with per-frame velocities.

    (u, v) is the box center, gamma the aspect ratio width/height, h the
    box height; (du, dv, dgamma, dh) are per-frame velocities.
    """

    u: float
    v: float
    gamma: float
    h: float
    du: float = 0.0
    dv: float = 0.0
    dgamma: float = 0.0
    dh: float = 0.0

    def to_array(self) -> np.ndarray:
        return np.array(
            [self.u, self.v, self.gamma, self.h, self.du, self.dv, self.dgamma, self.dh],
            dtype=float,
        )

    @property
    def positional(self) -> np.ndarray:
        """The measured components (u, v, gamma, h) as a 4-vector."""
        return np.array([self.u, self.v, self.gamma, self.h], dtype=float)

    @classmethod
    def from_array(cls, arr) -> StateVector:
        a = np.asarray(arr, dtype=float).reshape(8)
        return cls(*a.tolist())


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection-over-union of two boxes, in [0, 1]."""
    iw = min(a.right, b.right) - max(a.left, b.left)
    ih = min(a.bottom, b.bottom) - max(a.top, b.top)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    # Areas recomputed from the same rounded edges as the intersection, so
    # inter <= min(area) holds exactly in floating point and iou stays <= 1.
    area_a = (a.right - a.left) * (a.bottom - a.top)
    area_b = (b.right - b.left) * (b.bottom - b.top)
    return inter / (area_a + area_b - inter)


def box_to_state(box: BoundingBox) -> StateVector:
    """Convert a box to center form with zero velocities."""
    return StateVector(
        u=box.left + box.width / 2.0,
        v=box.top + box.height / 2.0,
        gamma=box.width / box.height,
        h=box.height,
    )


def state_to_box(state: StateVector) -> BoundingBox:
    """Invert :func:`box_to_state` on the positional components."""
    if state.h <= 0 or state.gamma <= 0:
        raise NumericDegeneracyError(
            f"state is not a valid box: gamma={state.gamma}, h={state.h}"
        )
    width = state.gamma * state.h
    return BoundingBox(
        left=state.u - width / 2.0,
        top=state.v - state.h / 2.0,
        width=width,
        height=state.h,
    )
