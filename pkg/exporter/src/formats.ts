/**
 * Writers for the two output formats the tracking engine consumes:
 * MOT-layout detection rows and the MOTEMB01 binary embedding sidecar.
 */

export const SIDECAR_MAGIC = "MOTEMB01";

export interface DetectionBox {
  left: number;
  top: number;
  width: number;
  height: number;
  confidence: number;
}

export interface SidecarRecord {
  frame: number;
  detIndex: number;
  vector: number[];
}

export function formatDetRow(frame: number, box: DetectionBox): string {
  const cells = [
    frame.toString(),
    "-1",
    box.left.toFixed(2),
    box.top.toFixed(2),
    box.width.toFixed(2),
    box.height.toFixed(2),
    box.confidence.toFixed(6),
    "-1",
    "-1",
    "-1",
  ];
  return cells.join(",");
}

/** L2-normalize a vector; rejects the zero vector. */
export function unitNormalize(vector: number[]): number[] {
  const norm = Math.sqrt(vector.reduce((acc, x) => acc + x * x, 0));
  if (!(norm > 0)) {
    throw new Error("cannot normalize a zero embedding vector");
  }
  return vector.map((x) => x / norm);
}

export function encodeSidecar(dimension: number, records: SidecarRecord[]): Buffer {
  if (dimension <= 0) {
    throw new Error(`embedding dimension must be positive, got ${dimension}`);
  }
  const recordSize = 8 + 4 * dimension;
  const buffer = Buffer.alloc(8 + 8 + records.length * recordSize);
  buffer.write(SIDECAR_MAGIC, 0, "ascii");
  buffer.writeUInt32LE(dimension, 8);
  buffer.writeUInt32LE(records.length, 12);
  let offset = 16;
  for (const record of records) {
    if (record.vector.length !== dimension) {
      throw new Error(
        `record (frame ${record.frame}, det ${record.detIndex}) has ` +
          `${record.vector.length} values, expected ${dimension}`
      );
    }
    buffer.writeUInt32LE(record.frame, offset);
    buffer.writeUInt32LE(record.detIndex, offset + 4);
    offset += 8;
    for (const value of record.vector) {
      buffer.writeFloatLE(value, offset);
      offset += 4;
    }
  }
  return buffer;
}

/** Inverse of encodeSidecar, used by the tests to check the layout. */
export function decodeSidecar(buffer: Buffer): { dimension: number; records: SidecarRecord[] } {
  if (buffer.subarray(0, 8).toString("ascii") !== SIDECAR_MAGIC) {
    throw new Error("bad sidecar magic");
  }
  const dimension = buffer.readUInt32LE(8);
  const count = buffer.readUInt32LE(12);
  const records: SidecarRecord[] = [];
  let offset = 16;
  for (let i = 0; i < count; i++) {
    const frame = buffer.readUInt32LE(offset);
    const detIndex = buffer.readUInt32LE(offset + 4);
    offset += 8;
    const vector: number[] = [];
    for (let d = 0; d < dimension; d++) {
      vector.push(buffer.readFloatLE(offset));
      offset += 4;
    }
    records.push({ frame, detIndex, vector });
  }
  if (offset !== buffer.length) {
    throw new Error(`sidecar has ${buffer.length - offset} trailing bytes`);
  }
  return { dimension, records };
}
