import { mkdtempSync, readFileSync, mkdirSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { decodeSidecar, SIDECAR_MAGIC } from "../src/formats.js";
import { listFrames, runExport } from "../src/export.js";
import { encodePgm } from "../src/image.js";
import { getDetector, getEmbedder, lumaBlobDetector } from "../src/models.js";
import { blankImage, paintRect, writeThreeFrameFixture } from "./fixtures.js";

function tempDir(): string {
  return mkdtempSync(join(tmpdir(), "mot-exporter-"));
}

function exportFixture(framesDir: string) {
  const out = tempDir();
  const job = {
    framesDir,
    detectorId: "luma-blob",
    embedderId: "patch-hist",
    confidenceFloor: 0.5,
    detOut: join(out, "det.txt"),
    sidecarOut: join(out, "emb.bin"),
  };
  return { job, result: runExport(job) };
}

describe("listFrames", () => {
  it("orders frames numerically, not lexically", () => {
    const dir = tempDir();
    writeThreeFrameFixture(dir);
    // add a 10th frame whose name sorts lexically before 000002
    const img = blankImage(64, 48);
    paintRect(img, 10, 10, 6, 6, 0.9);
    writeFileSync(join(dir, "10.pgm"), encodePgm(img));
    const names = listFrames(dir).map((p) => p.split("/").pop());
    expect(names).toEqual(["000001.pgm", "000002.pgm", "000003.pgm", "10.pgm"]);
  });
});

describe("runExport", () => {
  it("empty frame directory produces empty outputs", () => {
    const dir = tempDir();
    mkdirSync(join(dir, "frames"));
    const { job, result } = exportFixture(join(dir, "frames"));
    expect(result.frames).toBe(0);
    expect(result.detections).toBe(0);
    expect(readFileSync(job.detOut, "utf-8")).toBe("");
    const sidecar = decodeSidecar(readFileSync(job.sidecarOut));
    expect(sidecar.records).toHaveLength(0);
  });

  it("sidecar record count equals detection row count", () => {
    const dir = tempDir();
    writeThreeFrameFixture(dir);
    const { job, result } = exportFixture(dir);
    const rows = readFileSync(job.detOut, "utf-8").trim().split("\n");
    const sidecar = decodeSidecar(readFileSync(job.sidecarOut));
    expect(result.detections).toBe(rows.length);
    expect(sidecar.records).toHaveLength(rows.length);
    // 2 rectangles per frame, both above the confidence floor
    expect(rows).toHaveLength(6);
  });

  it("keys match row order and vectors are unit-norm within 1e-6", () => {
    const dir = tempDir();
    writeThreeFrameFixture(dir);
    const { job } = exportFixture(dir);
    const rows = readFileSync(job.detOut, "utf-8").trim().split("\n");
    const sidecar = decodeSidecar(readFileSync(job.sidecarOut));
    const seenPerFrame = new Map<number, number>();
    rows.forEach((row, i) => {
      const frame = parseInt(row.split(",")[0], 10);
      const expectedIndex = seenPerFrame.get(frame) ?? 0;
      seenPerFrame.set(frame, expectedIndex + 1);
      expect(sidecar.records[i].frame).toBe(frame);
      expect(sidecar.records[i].detIndex).toBe(expectedIndex);
      const norm = Math.sqrt(
        sidecar.records[i].vector.reduce((acc, x) => acc + x * x, 0)
      );
      expect(Math.abs(norm - 1)).toBeLessThan(1e-6);
    });
  });

  it("detection rows follow the MOT det layout", () => {
    const dir = tempDir();
    writeThreeFrameFixture(dir);
    const { job } = exportFixture(dir);
    const rows = readFileSync(job.detOut, "utf-8").trim().split("\n");
    const layout = /^\d+,-1,\d+\.\d{2},\d+\.\d{2},\d+\.\d{2},\d+\.\d{2},\d+\.\d{6},-1,-1,-1$/;
    for (const row of rows) {
      expect(row).toMatch(layout);
    }
  });

  it("recovers the painted rectangles", () => {
    const dir = tempDir();
    const truth = writeThreeFrameFixture(dir);
    const { job } = exportFixture(dir);
    const rows = readFileSync(job.detOut, "utf-8").trim().split("\n");
    const frameOne = rows
      .filter((row) => row.startsWith("1,"))
      .map((row) => row.split(",").slice(2, 6).map(Number));
    expect(frameOne).toEqual(
      truth[0].map((b) => [b.left, b.top, b.width, b.height])
    );
  });

  it("confidence floor filters dim blobs", () => {
    const dir = tempDir();
    writeThreeFrameFixture(dir);
    const out = tempDir();
    const result = runExport({
      framesDir: dir,
      detectorId: "luma-blob",
      embedderId: "patch-hist",
      confidenceFloor: 0.8, // the 0.7-bright rectangle drops out
      detOut: join(out, "det.txt"),
      sidecarOut: join(out, "emb.bin"),
    });
    expect(result.detections).toBe(3);
  });

  it("sidecar header carries the magic and dimension", () => {
    const dir = tempDir();
    writeThreeFrameFixture(dir);
    const { job } = exportFixture(dir);
    const raw = readFileSync(job.sidecarOut);
    expect(raw.subarray(0, 8).toString("ascii")).toBe(SIDECAR_MAGIC);
    expect(raw.readUInt32LE(8)).toBe(getEmbedder("patch-hist").dimension);
  });
});

describe("models", () => {
  it("unknown identifiers fail with a diagnostic", () => {
    expect(() => getDetector("yolo-nono")).toThrow(/cannot load detector/);
    expect(() => getEmbedder("resnet-nope")).toThrow(/cannot load embedder/);
  });

  it("blob detector separates disjoint components", () => {
    const img = blankImage(32, 32);
    paintRect(img, 2, 2, 5, 5, 1.0);
    paintRect(img, 20, 20, 4, 6, 0.9);
    const boxes = lumaBlobDetector().detect(img);
    expect(boxes).toHaveLength(2);
    expect(boxes[0]).toMatchObject({ left: 2, top: 2, width: 5, height: 5 });
    expect(boxes[1]).toMatchObject({ left: 20, top: 20, width: 4, height: 6 });
  });

  it("embedder distinguishes bright from dim patches", () => {
    const img = blankImage(32, 32);
    paintRect(img, 2, 2, 6, 6, 0.95);
    paintRect(img, 20, 20, 6, 6, 0.65);
    const embedder = getEmbedder("patch-hist");
    const bright = embedder.embed(img, { left: 2, top: 2, width: 6, height: 6, confidence: 1 });
    const dim = embedder.embed(img, { left: 20, top: 20, width: 6, height: 6, confidence: 1 });
    const dot = bright.reduce((acc, x, i) => acc + x * dim[i], 0);
    expect(dot).toBeLessThan(0.2);
  });
});
