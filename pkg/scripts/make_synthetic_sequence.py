#!/usr/bin/env python3
"""Regenerate the bundled 50-frame synthetic sequence under tests/data/.

Three constant-velocity pedestrians with distinct one-hot appearance
embeddings; the detector is perfect (detections equal ground truth with
confidence 1), so the only tracking losses are the n_init warm-up frames.
The expected metrics row is produced by actually running the pipeline;
the engine is deterministic, so a regeneration reproduces the frozen
files byte for byte.
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from motkit.cli import main as cli_main  # noqa: E402
from motkit.model import BoundingBox  # noqa: E402
from motkit.motio import write_embeddings  # noqa: E402

OUT = REPO / "tests" / "data" / "synthetic50"

N_FRAMES = 50
DIM = 8

# (start x, start y, vx, vy, width, height)
TARGETS = [
    (20.0, 100.0, 4.0, 0.0, 30.0, 60.0),
    (500.0, 300.0, -4.0, 0.0, 30.0, 60.0),
    (300.0, 40.0, 0.0, 3.0, 24.0, 48.0),
]


def target_box(index: int, frame: int) -> BoundingBox:
    x0, y0, vx, vy, w, h = TARGETS[index]
    return BoundingBox(x0 + vx * frame, y0 + vy * frame, w, h)


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)

    det_lines = []
    gt_lines = []
    emb_records = []
    for frame in range(1, N_FRAMES + 1):
        for index in range(len(TARGETS)):
            box = target_box(index, frame)
            det_lines.append(
                f"{frame},-1,{box.left:.2f},{box.top:.2f},"
                f"{box.width:.2f},{box.height:.2f},1.0,-1,-1,-1"
            )
            gt_lines.append(
                f"{frame},{index + 1},{box.left:.2f},{box.top:.2f},"
                f"{box.width:.2f},{box.height:.2f},1,1,1.0"
            )
            vector = np.zeros(DIM)
            vector[index] = 1.0
            emb_records.append((frame, index, vector))

    (OUT / "det.txt").write_text("\n".join(det_lines) + "\n")
    (OUT / "gt.txt").write_text("\n".join(gt_lines) + "\n")
    write_embeddings(OUT / "emb.bin", DIM, emb_records)
    (OUT / "seqinfo.ini").write_text(
        "[Sequence]\nname=synthetic50\nimWidth=640\nimHeight=480\n"
        "frameRate=30\nseqLength=50\n"
    )

    results = OUT / "results.txt"
    status = cli_main(
        [
            "track",
            "--detections", str(OUT / "det.txt"),
            "--embeddings", str(OUT / "emb.bin"),
            "--seqinfo", str(OUT / "seqinfo.ini"),
            "--output", str(results),
        ]
    )
    if status != 0:
        raise SystemExit(f"track failed with status {status}")
    status = cli_main(
        [
            "evaluate",
            "--gt", str(OUT / "gt.txt"),
            "--results", str(results),
            "--name", "synthetic50",
            "--csv", str(OUT / "expected_row.csv"),
        ]
    )
    if status != 0:
        raise SystemExit(f"evaluate failed with status {status}")
    results.unlink()
    print(f"wrote fixture to {OUT}")
    print((OUT / "expected_row.csv").read_text().strip())


if __name__ == "__main__":
    main()
