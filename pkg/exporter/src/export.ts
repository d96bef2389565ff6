/**
 * The batch export job: run a detector and an embedder over a frame
 * directory and write the detection file plus the embedding sidecar.
 */

import { readdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { encodeSidecar, formatDetRow, SidecarRecord, unitNormalize } from "./formats.js";
import { readNetpbm } from "./image.js";
import { getDetector, getEmbedder } from "./models.js";

export interface ExportJob {
  framesDir: string;
  detectorId: string;
  embedderId: string;
  confidenceFloor: number;
  detOut: string;
  sidecarOut: string;
}

export interface ExportResult {
  frames: number;
  detections: number;
}

const FRAME_EXTENSIONS = new Set(["pgm", "ppm"]);

/** Frame files sorted by their numeric stem; frame indices are 1-based. */
export function listFrames(framesDir: string): string[] {
  const numbered: Array<{ order: number; name: string }> = [];
  for (const name of readdirSync(framesDir)) {
    const match = /^(\d+)\.([a-z]+)$/i.exec(name);
    if (!match || !FRAME_EXTENSIONS.has(match[2].toLowerCase())) continue;
    numbered.push({ order: parseInt(match[1], 10), name });
  }
  numbered.sort((a, b) => a.order - b.order);
  return numbered.map((entry) => join(framesDir, entry.name));
}

export function runExport(job: ExportJob): ExportResult {
  const detector = getDetector(job.detectorId);
  const embedder = getEmbedder(job.embedderId);
  const framePaths = listFrames(job.framesDir);

  const rows: string[] = [];
  const records: SidecarRecord[] = [];
  for (let i = 0; i < framePaths.length; i++) {
    const frame = i + 1;
    const image = readNetpbm(framePaths[i]);
    const boxes = detector
      .detect(image)
      .filter((box) => box.confidence >= job.confidenceFloor);
    boxes.forEach((box, detIndex) => {
      rows.push(formatDetRow(frame, box));
      records.push({
        frame,
        detIndex,
        vector: unitNormalize(embedder.embed(image, box)),
      });
    });
  }

  writeFileSync(job.detOut, rows.map((row) => row + "\n").join(""));
  writeFileSync(job.sidecarOut, encodeSidecar(embedder.dimension, records));
  return { frames: framePaths.length, detections: rows.length };
}
