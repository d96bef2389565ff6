"""Hand-built synthetic sequences with documented expected counts."""

from __future__ import annotations

import numpy as np

from motkit.model import BoundingBox, Detection


def unit_axis(dim: int, axis: int) -> np.ndarray:
    v = np.zeros(dim)
    v[axis] = 1.0
    return v


def two_separated_targets(n_frames: int = 20) -> dict[int, list[Detection]]:
    """Two constant-velocity targets far apart, one detection each per frame."""
    frames = {}
    for f in range(1, n_frames + 1):
        frames[f] = [
            Detection(f, BoundingBox(10 + 4 * f, 100, 30, 60), 1.0,
                      unit_axis(4, 0), 0),
            Detection(f, BoundingBox(600 - 4 * f, 400, 30, 60), 1.0,
                      unit_axis(4, 1), 1),
        ]
    return frames


def crossing_detections(with_embeddings: bool) -> dict[int, list[Detection]]:
    """Two targets approach head-on, vanish for two frames around the
    meeting point, and reappear moving back the way they came (an occluded
    bounce).

    Coasted constant-velocity predictions sail through the meeting point,
    so after the gap each prediction overlaps the *other* target's box far
    better than its own: IoU-only matching with a tight ceiling is forced
    to swap the ids, while appearance matching recovers the truth.
    """
    e1 = unit_axis(4, 0)
    e2 = unit_axis(4, 1)
    frames: dict[int, list[Detection]] = {}
    for f in range(1, 51):
        if f in (21, 22):
            frames[f] = []
            continue
        if f <= 20:
            xa = 10.0 + 2.0 * f   # reaches 50 at the gap
            xb = 94.0 - 2.0 * f   # reaches 54 at the gap
        else:
            xa = 44.0 - 2.0 * (f - 23)
            xb = 60.0 + 2.0 * (f - 23)
        frames[f] = [
            Detection(f, BoundingBox(xa, 100.0, 20.0, 40.0), 1.0,
                      e1 if with_embeddings else None, 0),
            Detection(f, BoundingBox(xb, 100.0, 20.0, 40.0), 1.0,
                      e2 if with_embeddings else None, 1),
        ]
    return frames


def crossing_ground_truth() -> dict[int, list[tuple[int, BoundingBox]]]:
    """The crossing sequence's true (id, box) lists per frame."""
    gt = {}
    for frame, dets in crossing_detections(False).items():
        if dets:
            gt[frame] = [(i + 1, d.box) for i, d in enumerate(dets)]
    return gt


def mota_toy_fixture():
    """5-frame fixture scoring MOTA = 1 - (FN + FP + IDS)/num_gt = 0.6.

    Hand count (iou threshold 0.5, all matched boxes exact):

    * gt 1 at x = 10 * frame, frames 1..5; gt 2 at x = 500 + 10 * frame,
      frames 1..5 -> num_gt = 10.
    * hyp 11 covers gt 1 in frames 1..2, then disappears; hyp 13 covers
      gt 1 in frames 3..5. Frame 3 re-matches gt 1 to a new id -> 1 switch.
    * hyp 12 covers gt 2 in frames 1..3 only -> gt 2 missed in frames
      4..5 -> 2 FN.
    * hyp 99 floats in empty space in frame 2 -> 1 FP.

    Matches = 5 (gt 1) + 3 (gt 2) = 8; FN = 10 - 8 = 2; FP = 9 - 8 = 1;
    IDS = 1; MOTA = 1 - (2 + 1 + 1)/10 = 0.6. All matched boxes coincide
    exactly, so MOTP = 1. gt 1 covered 5/5 (mostly tracked); gt 2 covered
    3/5 (neither) -> MT 50%, ML 0%.
    """
    box = lambda x: BoundingBox(x, 100.0, 20.0, 40.0)
    gt = {
        f: [(1, box(10.0 * f)), (2, box(500.0 + 10.0 * f))] for f in range(1, 6)
    }
    hyp = {
        1: [(11, box(10.0)), (12, box(510.0))],
        2: [(11, box(20.0)), (12, box(520.0)), (99, box(900.0))],
        3: [(13, box(30.0)), (12, box(530.0))],
        4: [(13, box(40.0))],
        5: [(13, box(50.0))],
    }
    return gt, hyp


def idf1_split_fixture():
    """Single 10-frame trajectory covered by two hypothesis ids (6 + 4).

    The optimal identity mapping pairs gt 1 with hyp 7 (6 shared frames),
    leaving hyp 8's 4 frames as IDFP and gt 1's remaining 4 frames as
    IDFN: IDF1 = 2*6 / (2*6 + 4 + 4) = 0.6.
    """
    box = lambda x: BoundingBox(x, 50.0, 20.0, 40.0)
    gt = {f: [(1, box(10.0 * f))] for f in range(1, 11)}
    hyp = {}
    for f in range(1, 7):
        hyp[f] = [(7, box(10.0 * f))]
    for f in range(7, 11):
        hyp[f] = [(8, box(10.0 * f))]
    return gt, hyp
