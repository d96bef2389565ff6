"""CLEAR-style multi-object tracking evaluation.

Frame-level correspondence follows the CLEAR protocol: correspondences
carry over from frame to frame while both parties persist and still
overlap, remaining pairs are Hungarian-matched on 1 - IoU, and an id
switch is counted whenever a ground-truth object is matched to a
hypothesis id that differs from its most recent prior match. Sequence
scores follow the MOTChallenge summary: MOTA, MOTP (mean overlap of
matches, higher is better), IDF1 under the optimal global identity
mapping, id switches, MT/ML coverage ratios, FP and FN.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .assignment import INFEASIBLE, min_cost_matching, solve
from .errors import EmptyGroundTruthError, InputFormatError
from .model import BoundingBox, iou

# MOT16 ground-truth annotation classes.
PEDESTRIAN_CLASS = 1
DISTRACTOR_CLASSES = frozenset({2, 7, 8, 12})

DEFAULT_IOU_THRESHOLD = 0.5


@dataclass(frozen=True)
class FrameEvaluation:
    """Correspondence events of a single frame."""

    frame: int
    matches: tuple[tuple[int, int, float], ...]  # (gt id, hyp id, iou)
    fp: int
    fn: int
    id_switches: int


@dataclass(frozen=True)
class Idf1Counts:
    idf1: float
    idtp: int
    idfp: int
    idfn: int


@dataclass(frozen=True)
class MetricsSummary:
    """Sequence-level tracking scores; ratios are stored in [0, 1]."""

    mota: float
    motp: float
    idf1: float
    ids: int
    mt_ratio: float
    ml_ratio: float
    fp: int
    fn: int
    num_gt: int


def _check_unique(ids: list[int], frame: int, side: str) -> None:
    if len(set(ids)) != len(ids):
        seen = set()
        for i in ids:
            if i in seen:
                raise InputFormatError(f"duplicate {side} id {i} in frame {frame}")
            seen.add(i)


def match_frame(
    gt: list[tuple[int, BoundingBox]],
    hyp: list[tuple[int, BoundingBox]],
    prev: Mapping[int, int],
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
    frame: int = 0,
) -> FrameEvaluation:
    """Match one frame's ground truth against hypotheses.

    ``prev`` maps each ground-truth id to the hypothesis id of its most
    recent prior match; pairs still present and overlapping at least
    ``iou_threshold`` are carried over before any re-matching.
    """
    gt_ids = [g for g, _ in gt]
    hyp_ids = [h for h, _ in hyp]
    _check_unique(gt_ids, frame, "ground-truth")
    _check_unique(hyp_ids, frame, "hypothesis")

    gt_box = dict(gt)
    hyp_box = dict(hyp)
    matches: list[tuple[int, int, float]] = []
    free_gt = set(gt_ids)
    free_hyp = set(hyp_ids)

    for gid in gt_ids:
        hid = prev.get(gid)
        if hid is None or hid not in free_hyp or gid not in free_gt:
            continue
        overlap = iou(gt_box[gid], hyp_box[hid])
        if overlap >= iou_threshold:
            matches.append((gid, hid, overlap))
            free_gt.discard(gid)
            free_hyp.discard(hid)

    rest_gt = [g for g in gt_ids if g in free_gt]
    rest_hyp = [h for h in hyp_ids if h in free_hyp]
    if rest_gt and rest_hyp:
        costs = np.array(
            [[1.0 - iou(gt_box[g], hyp_box[h]) for h in rest_hyp] for g in rest_gt]
        )
        result = min_cost_matching(costs, 1.0 - iou_threshold)
        for row, col in result.matches:
            gid, hid = rest_gt[row], rest_hyp[col]
            matches.append((gid, hid, 1.0 - costs[row, col]))
            free_gt.discard(gid)
            free_hyp.discard(hid)

    switches = sum(
        1 for gid, hid, _ in matches if gid in prev and prev[gid] != hid
    )
    return FrameEvaluation(
        frame=frame,
        matches=tuple(matches),
        fp=len(free_hyp),
        fn=len(free_gt),
        id_switches=switches,
    )


def accumulate(
    frames: Iterable[FrameEvaluation],
    gt_lengths: Mapping[int, int],
    identity: Idf1Counts | None = None,
) -> MetricsSummary:
    """Fold per-frame evaluations into a sequence summary.

    ``gt_lengths`` maps each ground-truth id to the number of frames it
    appears in; MT counts trajectories matched in at least 80% of those
    frames, ML in at most 20%. IDF1 is a global quantity computed by
    :func:`idf1` and passed in via ``identity``.
    """
    frames = list(frames)
    total_fp = sum(f.fp for f in frames)
    total_fn = sum(f.fn for f in frames)
    total_ids = sum(f.id_switches for f in frames)
    num_matches = sum(len(f.matches) for f in frames)
    num_gt = num_matches + total_fn
    if num_gt == 0:
        raise EmptyGroundTruthError("no ground-truth detections to score")

    iou_sum = sum(overlap for f in frames for _, _, overlap in f.matches)
    motp = iou_sum / num_matches if num_matches else 0.0
    mota = 1.0 - (total_fn + total_fp + total_ids) / num_gt

    covered: dict[int, int] = defaultdict(int)
    for f in frames:
        for gid, _, _ in f.matches:
            covered[gid] += 1
    trajectories = len(gt_lengths)
    mostly_tracked = sum(
        1 for gid, length in gt_lengths.items() if covered[gid] / length >= 0.8
    )
    mostly_lost = sum(
        1 for gid, length in gt_lengths.items() if covered[gid] / length <= 0.2
    )

    return MetricsSummary(
        mota=mota,
        motp=motp,
        idf1=identity.idf1 if identity is not None else float("nan"),
        ids=total_ids,
        mt_ratio=mostly_tracked / trajectories if trajectories else 0.0,
        ml_ratio=mostly_lost / trajectories if trajectories else 0.0,
        fp=total_fp,
        fn=total_fn,
        num_gt=num_gt,
    )


def idf1(
    gt_frames: Mapping[int, list[tuple[int, BoundingBox]]],
    hyp_frames: Mapping[int, list[tuple[int, BoundingBox]]],
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
) -> Idf1Counts:
    """Identity-F1 under the optimal global gt-to-hypothesis id mapping.

    Each (gt id, hyp id) pair is weighted by the number of frames in which
    the two boxes overlap at least ``iou_threshold``; the identity
    assignment (with dummies, so ids may stay unmapped) minimizes the sum
    of per-pair misses and false positives.
    """
    overlap: dict[tuple[int, int], int] = defaultdict(int)
    len_gt: dict[int, int] = defaultdict(int)
    len_hyp: dict[int, int] = defaultdict(int)
    for frame in sorted(set(gt_frames) | set(hyp_frames)):
        gt = gt_frames.get(frame, [])
        hyp = hyp_frames.get(frame, [])
        _check_unique([g for g, _ in gt], frame, "ground-truth")
        _check_unique([h for h, _ in hyp], frame, "hypothesis")
        for gid, _ in gt:
            len_gt[gid] += 1
        for hid, _ in hyp:
            len_hyp[hid] += 1
        for gid, gbox in gt:
            for hid, hbox in hyp:
                if iou(gbox, hbox) >= iou_threshold:
                    overlap[(gid, hid)] += 1

    gt_ids = sorted(len_gt)
    hyp_ids = sorted(len_hyp)
    total_gt = sum(len_gt.values())
    total_hyp = sum(len_hyp.values())
    n_gt, n_hyp = len(gt_ids), len(hyp_ids)

    costs = np.full((n_gt + n_hyp, n_hyp + n_gt), INFEASIBLE)
    for i, gid in enumerate(gt_ids):
        for j, hid in enumerate(hyp_ids):
            costs[i, j] = (
                len_gt[gid] + len_hyp[hid] - 2 * overlap.get((gid, hid), 0)
            )
        costs[i, n_hyp + i] = len_gt[gid]
    for j, hid in enumerate(hyp_ids):
        costs[n_gt + j, j] = len_hyp[hid]
    costs[n_gt:, n_hyp:] = 0.0

    idtp = 0
    for row, col in solve(costs).matches:
        if row < n_gt and col < n_hyp:
            idtp += overlap.get((gt_ids[row], hyp_ids[col]), 0)
    idfn = total_gt - idtp
    idfp = total_hyp - idtp
    denominator = 2 * idtp + idfp + idfn
    score = 2 * idtp / denominator if denominator else 0.0
    return Idf1Counts(idf1=score, idtp=idtp, idfp=idfp, idfn=idfn)


def evaluate_sequence(
    gt_frames: Mapping[int, list[tuple[int, BoundingBox]]],
    hyp_frames: Mapping[int, list[tuple[int, BoundingBox]]],
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
) -> MetricsSummary:
    """Score one sequence of (id, box) lists against ground truth."""
    prev: dict[int, int] = {}
    evaluations = []
    for frame in sorted(set(gt_frames) | set(hyp_frames)):
        ev = match_frame(
            gt_frames.get(frame, []),
            hyp_frames.get(frame, []),
            prev,
            iou_threshold,
            frame=frame,
        )
        evaluations.append(ev)
        for gid, hid, _ in ev.matches:
            prev[gid] = hid

    gt_lengths: dict[int, int] = defaultdict(int)
    for frame_gt in gt_frames.values():
        for gid, _ in frame_gt:
            gt_lengths[gid] += 1

    identity = idf1(gt_frames, hyp_frames, iou_threshold)
    return accumulate(evaluations, gt_lengths, identity)


def filter_mot16(
    gt_records: Mapping[int, list],
    hyp_frames: Mapping[int, list[tuple[int, BoundingBox]]],
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
) -> tuple[dict[int, list[tuple[int, BoundingBox]]], dict[int, list[tuple[int, BoundingBox]]]]:
    """Apply the MOTChallenge scoring protocol to raw annotations.

    Only pedestrian entries with a nonzero evaluation flag are scored.
    Entries flagged out or belonging to distractor classes act as ignore
    regions: hypotheses matched to them are dropped before counting false
    positives.
    """
    scored: dict[int, list[tuple[int, BoundingBox]]] = {}
    cleaned: dict[int, list[tuple[int, BoundingBox]]] = {}
    for frame in sorted(set(gt_records) | set(hyp_frames)):
        records = gt_records.get(frame, [])
        hyps = list(hyp_frames.get(frame, []))
        keep = [
            (r.id, r.box)
            for r in records
            if r.flag != 0 and r.cls == PEDESTRIAN_CLASS
        ]
        ignore = [
            r.box
            for r in records
            if r.flag == 0 or r.cls in DISTRACTOR_CLASSES
        ]
        if keep:
            scored[frame] = keep
        if not hyps:
            continue
        if ignore:
            all_boxes = [box for _, box in keep] + ignore
            costs = np.array(
                [[1.0 - iou(box, hbox) for _, hbox in hyps] for box in all_boxes]
            )
            result = min_cost_matching(costs, 1.0 - iou_threshold)
            suppressed = {
                col for row, col in result.matches if row >= len(keep)
            }
            hyps = [h for j, h in enumerate(hyps) if j not in suppressed]
        if hyps:
            cleaned[frame] = hyps
    return scored, cleaned
