"""Readers and writers for the on-disk formats.

Text formats follow the public MOTChallenge layouts byte for byte:

* detections: ``frame,-1,bb_left,bb_top,bb_width,bb_height,conf,-1,-1,-1``
* ground truth: ``frame,id,bb_left,bb_top,bb_width,bb_height,flag,class,visibility``
* results: ``frame,id,bb_left,bb_top,bb_width,bb_height,1,-1,-1,-1`` with
  box values printed to two decimals

Appearance embeddings live in a binary sidecar so detection files stay
byte-compatible with the public ones: magic ``MOTEMB01``, then
little-endian u32 dimension and u32 record count, then records of
(u32 frame, u32 det_index, dimension x f32). Configuration is a flat
``key = value`` file with ``#`` comments.

Frames are 1-based everywhere.
"""

from __future__ import annotations

import configparser
import struct
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable

import numpy as np

from .association import GateConfig
from .errors import ConfigError, DataError, FormatError, InputFormatError, ParseError
from .kalman import NoiseProfile
from .model import BoundingBox, Detection
from .tracker import FrameOutput, TrackerConfig

SIDECAR_MAGIC = b"MOTEMB01"


@dataclass(frozen=True)
class GroundTruthRecord:
    id: int
    box: BoundingBox
    flag: int
    cls: int
    visibility: float


@dataclass(frozen=True)
class SequenceMetadata:
    name: str | None = None
    width: int | None = None
    height: int | None = None
    frame_rate: float | None = None
    frame_count: int | None = None


@dataclass(frozen=True)
class RejectedRow:
    line_no: int
    reason: str


@dataclass
class DetectionLoad:
    by_frame: dict[int, list[Detection]]
    rejected: list[RejectedRow] = field(default_factory=list)


@dataclass(frozen=True)
class EmbeddingSidecar:
    dimension: int
    records: tuple[tuple[int, int, np.ndarray], ...]


@dataclass
class SequenceBundle:
    """Everything needed to track and evaluate one sequence."""

    name: str
    frame_count: int
    detections: dict[int, list[Detection]]
    ground_truth: dict[int, list[GroundTruthRecord]] | None = None
    metadata: SequenceMetadata | None = None


@dataclass(frozen=True)
class RunConfig:
    """All knobs read from a config file."""

    tracker: TrackerConfig = field(default_factory=TrackerConfig)
    noise: NoiseProfile = field(default_factory=NoiseProfile)
    iou_threshold: float = 0.5


def _read_lines(path) -> list[str]:
    return Path(path).read_text(encoding="utf-8").splitlines()


def _split_csv(line: str) -> list[str]:
    return [part.strip() for part in line.strip().split(",")]


def _parse_float(token: str, path, line_no: int, what: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise ParseError(path, line_no, f"bad {what}: {token!r}") from None


def _parse_int(token: str, path, line_no: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(path, line_no, f"bad {what}: {token!r}") from None


def read_detections(path) -> DetectionLoad:
    """Load a detection file into per-frame lists.

    Rows with non-positive width or height are not loaded; they are
    reported in the returned summary instead of raising.
    """
    by_frame: dict[int, list[Detection]] = {}
    rejected: list[RejectedRow] = []
    for line_no, raw in enumerate(_read_lines(path), start=1):
        if not raw.strip():
            continue
        parts = _split_csv(raw)
        if len(parts) < 7:
            raise ParseError(path, line_no, f"expected at least 7 fields, got {len(parts)}")
        frame = _parse_int(parts[0], path, line_no, "frame index")
        if frame < 1:
            raise ParseError(path, line_no, f"frame index must be >= 1, got {frame}")
        left = _parse_float(parts[2], path, line_no, "bb_left")
        top = _parse_float(parts[3], path, line_no, "bb_top")
        width = _parse_float(parts[4], path, line_no, "bb_width")
        height = _parse_float(parts[5], path, line_no, "bb_height")
        confidence = _parse_float(parts[6], path, line_no, "confidence")
        if width <= 0 or height <= 0:
            rejected.append(
                RejectedRow(line_no, f"non-positive box size {width}x{height}")
            )
            continue
        dets = by_frame.setdefault(frame, [])
        dets.append(
            Detection(
                frame=frame,
                box=BoundingBox(left, top, width, height),
                confidence=confidence,
                source_index=len(dets),
            )
        )
    return DetectionLoad(by_frame=by_frame, rejected=rejected)


def read_ground_truth(path) -> dict[int, list[GroundTruthRecord]]:
    """Load a ground-truth annotation file into per-frame lists."""
    by_frame: dict[int, list[GroundTruthRecord]] = {}
    seen: set[tuple[int, int]] = set()
    for line_no, raw in enumerate(_read_lines(path), start=1):
        if not raw.strip():
            continue
        parts = _split_csv(raw)
        if len(parts) < 9:
            raise ParseError(path, line_no, f"expected at least 9 fields, got {len(parts)}")
        frame = _parse_int(parts[0], path, line_no, "frame index")
        target = _parse_int(parts[1], path, line_no, "target id")
        if frame < 1:
            raise ParseError(path, line_no, f"frame index must be >= 1, got {frame}")
        if (frame, target) in seen:
            raise InputFormatError(
                f"{path}:{line_no}: duplicate ground-truth entry for "
                f"frame {frame}, id {target}"
            )
        seen.add((frame, target))
        left = _parse_float(parts[2], path, line_no, "bb_left")
        top = _parse_float(parts[3], path, line_no, "bb_top")
        width = _parse_float(parts[4], path, line_no, "bb_width")
        height = _parse_float(parts[5], path, line_no, "bb_height")
        flag = _parse_int(parts[6], path, line_no, "flag")
        cls = _parse_int(parts[7], path, line_no, "class")
        visibility = _parse_float(parts[8], path, line_no, "visibility")
        if width <= 0 or height <= 0:
            raise ParseError(path, line_no, f"non-positive box size {width}x{height}")
        by_frame.setdefault(frame, []).append(
            GroundTruthRecord(
                id=target,
                box=BoundingBox(left, top, width, height),
                flag=flag,
                cls=cls,
                visibility=visibility,
            )
        )
    return {frame: by_frame[frame] for frame in sorted(by_frame)}


def write_results(path, outputs: Iterable[FrameOutput]) -> None:
    """Write tracker output in the result-file layout.

    The confidence column is a constant 1; scoring ignores it.
    """
    lines = []
    for output in outputs:
        for track_id, box in output.records:
            lines.append(
                f"{output.frame},{track_id},{box.left:.2f},{box.top:.2f},"
                f"{box.width:.2f},{box.height:.2f},1,-1,-1,-1"
            )
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def read_results(path) -> dict[int, list[tuple[int, BoundingBox]]]:
    """Load a result file into per-frame (track id, box) lists."""
    by_frame: dict[int, list[tuple[int, BoundingBox]]] = {}
    seen: set[tuple[int, int]] = set()
    for line_no, raw in enumerate(_read_lines(path), start=1):
        if not raw.strip():
            continue
        parts = _split_csv(raw)
        if len(parts) < 6:
            raise ParseError(path, line_no, f"expected at least 6 fields, got {len(parts)}")
        frame = _parse_int(parts[0], path, line_no, "frame index")
        track = _parse_int(parts[1], path, line_no, "track id")
        if (frame, track) in seen:
            raise InputFormatError(
                f"{path}:{line_no}: duplicate result entry for "
                f"frame {frame}, id {track}"
            )
        seen.add((frame, track))
        left = _parse_float(parts[2], path, line_no, "bb_left")
        top = _parse_float(parts[3], path, line_no, "bb_top")
        width = _parse_float(parts[4], path, line_no, "bb_width")
        height = _parse_float(parts[5], path, line_no, "bb_height")
        if width <= 0 or height <= 0:
            raise ParseError(path, line_no, f"non-positive box size {width}x{height}")
        by_frame.setdefault(frame, []).append(
            (track, BoundingBox(left, top, width, height))
        )
    return {frame: by_frame[frame] for frame in sorted(by_frame)}


def write_embeddings(
    path, dimension: int, records: Iterable[tuple[int, int, np.ndarray]]
) -> None:
    """Write the binary embedding sidecar; vectors are stored as f32."""
    records = list(records)
    blob = bytearray()
    blob += SIDECAR_MAGIC
    blob += struct.pack("<II", dimension, len(records))
    for frame, det_index, vector in records:
        vec = np.asarray(vector, dtype=np.float32).reshape(dimension)
        blob += struct.pack("<II", frame, det_index)
        blob += vec.tobytes()
    Path(path).write_bytes(bytes(blob))


def read_embeddings(path) -> EmbeddingSidecar:
    """Load the binary embedding sidecar.

    Vectors within 1e-3 of unit norm are re-normalized exactly; anything
    further off is rejected as corrupt data.
    """
    data = Path(path).read_bytes()
    if len(data) < len(SIDECAR_MAGIC) + 8:
        raise FormatError(f"{path}: truncated header")
    if data[: len(SIDECAR_MAGIC)] != SIDECAR_MAGIC:
        raise FormatError(f"{path}: bad magic {data[:len(SIDECAR_MAGIC)]!r}")
    dimension, count = struct.unpack_from("<II", data, len(SIDECAR_MAGIC))
    if dimension == 0:
        raise FormatError(f"{path}: embedding dimension must be positive")
    offset = len(SIDECAR_MAGIC) + 8
    record_size = 8 + 4 * dimension
    expected = offset + count * record_size
    if len(data) < expected:
        raise FormatError(
            f"{path}: truncated after {len(data)} bytes, expected {expected}"
        )
    if len(data) > expected:
        raise FormatError(f"{path}: {len(data) - expected} trailing bytes")

    records = []
    seen: set[tuple[int, int]] = set()
    for index in range(count):
        frame, det_index = struct.unpack_from("<II", data, offset)
        offset += 8
        vector = np.frombuffer(data, dtype="<f4", count=dimension, offset=offset)
        offset += 4 * dimension
        vector = vector.astype(float)
        norm = float(np.linalg.norm(vector))
        if abs(norm - 1.0) > 1e-3:
            raise DataError(
                f"{path}: record {index} (frame {frame}, det {det_index}) "
                f"has norm {norm:.6f}, expected 1"
            )
        if (frame, det_index) in seen:
            raise DataError(
                f"{path}: record {index} duplicates (frame {frame}, det {det_index})"
            )
        seen.add((frame, det_index))
        records.append((frame, det_index, vector / norm))
    return EmbeddingSidecar(dimension=dimension, records=tuple(records))


def attach_embeddings(
    by_frame: dict[int, list[Detection]], sidecar: EmbeddingSidecar
) -> dict[int, list[Detection]]:
    """Return detection lists with sidecar vectors attached by
    (frame, det_index); every record must resolve to a detection."""
    out = {frame: list(dets) for frame, dets in by_frame.items()}
    for frame, det_index, vector in sidecar.records:
        dets = out.get(frame)
        if dets is None or det_index >= len(dets):
            raise DataError(
                f"embedding record (frame {frame}, det {det_index}) has no "
                "matching detection"
            )
        dets[det_index] = replace(dets[det_index], embedding=vector)
    return out


_INT_KEYS = {"n_init", "max_age", "gallery_budget"}
_FLOAT_KEYS = {
    "min_confidence",
    "min_box_height",
    "max_cosine_distance",
    "gating_chi2_threshold",
    "max_iou_distance",
    "std_weight_position",
    "std_weight_velocity",
    "iou_threshold",
}


def read_config(path) -> RunConfig:
    """Parse a flat ``key = value`` config file; unknown keys are errors
    and every key is optional with a documented default."""
    values: dict[str, float | int] = {}
    for line_no, raw in enumerate(_read_lines(path), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(path, line_no, line, "expected 'key = value'")
        key, _, token = line.partition("=")
        key = key.strip()
        token = token.strip()
        if key in values:
            raise ConfigError(path, line_no, key, "duplicate key")
        if key in _INT_KEYS:
            try:
                values[key] = int(token)
            except ValueError:
                raise ConfigError(path, line_no, key, f"bad integer {token!r}") from None
        elif key in _FLOAT_KEYS:
            try:
                values[key] = float(token)
            except ValueError:
                raise ConfigError(path, line_no, key, f"bad number {token!r}") from None
        else:
            raise ConfigError(path, line_no, key, "unknown key")
        _check_range(path, line_no, key, values[key])

    gate_kwargs = {
        k: values[k]
        for k in (
            "max_cosine_distance",
            "gating_chi2_threshold",
            "max_iou_distance",
            "gallery_budget",
        )
        if k in values
    }
    tracker_kwargs = {
        k: values[k]
        for k in ("n_init", "max_age", "min_confidence", "min_box_height")
        if k in values
    }
    noise_kwargs = {
        k: values[k]
        for k in ("std_weight_position", "std_weight_velocity")
        if k in values
    }
    return RunConfig(
        tracker=TrackerConfig(gate=GateConfig(**gate_kwargs), **tracker_kwargs),
        noise=NoiseProfile(**noise_kwargs),
        iou_threshold=values.get("iou_threshold", 0.5),
    )


def _check_range(path, line_no: int, key: str, value) -> None:
    checks = {
        "n_init": (value >= 1, "must be >= 1"),
        "max_age": (value >= 1, "must be >= 1"),
        "min_box_height": (value >= 0, "must be >= 0"),
        "max_cosine_distance": (0 < value <= 2, "must be in (0, 2]"),
        "gating_chi2_threshold": (value > 0, "must be positive"),
        "max_iou_distance": (0 < value <= 1, "must be in (0, 1]"),
        "gallery_budget": (value >= 1, "must be >= 1"),
        "std_weight_position": (value > 0, "must be positive"),
        "std_weight_velocity": (value > 0, "must be positive"),
        "iou_threshold": (0 < value <= 1, "must be in (0, 1]"),
    }
    if key in checks:
        ok, message = checks[key]
        if not ok:
            raise ConfigError(path, line_no, key, f"{value} {message}")


def read_seqinfo(path) -> SequenceMetadata:
    """Read the width/height/frame-rate/frame-count keys of a seqinfo.ini."""
    parser = configparser.ConfigParser()
    text = Path(path).read_text(encoding="utf-8")
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise FormatError(f"{path}: {exc}") from exc
    if not parser.has_section("Sequence"):
        raise FormatError(f"{path}: missing [Sequence] section")
    section = parser["Sequence"]

    def _get(key, cast):
        if key not in section:
            return None
        try:
            return cast(section[key])
        except ValueError:
            raise FormatError(f"{path}: bad value for {key}: {section[key]!r}") from None

    return SequenceMetadata(
        name=section.get("name"),
        width=_get("imWidth", int),
        height=_get("imHeight", int),
        frame_rate=_get("frameRate", float),
        frame_count=_get("seqLength", int),
    )


def load_bundle(
    detections_path,
    embeddings_path=None,
    gt_path=None,
    seqinfo_path=None,
    name: str | None = None,
) -> tuple[SequenceBundle, list[RejectedRow]]:
    """Assemble a sequence bundle from its on-disk parts."""
    load = read_detections(detections_path)
    detections = load.by_frame
    if embeddings_path is not None:
        detections = attach_embeddings(detections, read_embeddings(embeddings_path))
    ground_truth = read_ground_truth(gt_path) if gt_path is not None else None
    metadata = read_seqinfo(seqinfo_path) if seqinfo_path is not None else None

    last_frame = 0
    if detections:
        last_frame = max(detections)
    if ground_truth:
        last_frame = max(last_frame, max(ground_truth))
    frame_count = last_frame
    if metadata is not None and metadata.frame_count is not None:
        frame_count = metadata.frame_count
        if last_frame > frame_count:
            raise DataError(
                f"data reaches frame {last_frame} but sequence metadata "
                f"declares {frame_count} frames"
            )

    if name is None:
        name = (metadata.name if metadata and metadata.name else None) or Path(
            detections_path
        ).stem
    bundle = SequenceBundle(
        name=name,
        frame_count=frame_count,
        detections={frame: detections[frame] for frame in sorted(detections)},
        ground_truth=ground_truth,
        metadata=metadata,
    )
    return bundle, load.rejected
