/**
 * Minimal raster loading for the exporter: binary PGM (P5) and PPM (P6).
 * Pixels come back as grayscale luminance in [0, 1].
 */

import { readFileSync } from "node:fs";

export interface GrayImage {
  width: number;
  height: number;
  /** Row-major luminance, length width * height, values in [0, 1]. */
  gray: Float64Array;
}

function parseHeader(data: Buffer): { magic: string; values: number[]; offset: number } {
  // magic, width, height, maxval separated by whitespace; '#' starts a comment
  const magic = data.subarray(0, 2).toString("ascii");
  let offset = 2;
  const values: number[] = [];
  while (values.length < 3) {
    if (offset >= data.length) {
      throw new Error("truncated netpbm header");
    }
    const byte = data[offset];
    if (byte === 0x23 /* # */) {
      while (offset < data.length && data[offset] !== 0x0a) offset++;
      offset++;
      continue;
    }
    if (byte === 0x20 || byte === 0x09 || byte === 0x0a || byte === 0x0d) {
      offset++;
      continue;
    }
    let end = offset;
    while (end < data.length && data[end] >= 0x30 && data[end] <= 0x39) end++;
    if (end === offset) {
      throw new Error(`bad netpbm header byte at ${offset}`);
    }
    values.push(parseInt(data.subarray(offset, end).toString("ascii"), 10));
    offset = end;
  }
  offset++; // single whitespace after maxval
  return { magic, values, offset };
}

export function readNetpbm(path: string): GrayImage {
  const data = readFileSync(path);
  const { magic, values, offset } = parseHeader(data);
  const [width, height, maxval] = values;
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 255) {
    throw new Error(`${path}: unsupported netpbm geometry ${width}x${height}/${maxval}`);
  }
  const pixels = width * height;
  const gray = new Float64Array(pixels);
  if (magic === "P5") {
    if (data.length < offset + pixels) {
      throw new Error(`${path}: truncated P5 payload`);
    }
    for (let i = 0; i < pixels; i++) {
      gray[i] = data[offset + i] / maxval;
    }
  } else if (magic === "P6") {
    if (data.length < offset + 3 * pixels) {
      throw new Error(`${path}: truncated P6 payload`);
    }
    for (let i = 0; i < pixels; i++) {
      const r = data[offset + 3 * i];
      const g = data[offset + 3 * i + 1];
      const b = data[offset + 3 * i + 2];
      gray[i] = (0.299 * r + 0.587 * g + 0.114 * b) / maxval;
    }
  } else {
    throw new Error(`${path}: unsupported image magic '${magic}' (need binary PGM/PPM)`);
  }
  return { width, height, gray };
}

export function encodePgm(img: GrayImage): Buffer {
  const header = Buffer.from(`P5\n${img.width} ${img.height}\n255\n`, "ascii");
  const body = Buffer.alloc(img.width * img.height);
  for (let i = 0; i < body.length; i++) {
    body[i] = Math.max(0, Math.min(255, Math.round(img.gray[i] * 255)));
  }
  return Buffer.concat([header, body]);
}
