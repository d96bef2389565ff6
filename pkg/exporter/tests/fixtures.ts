/** Synthetic 3-frame fixture: two bright rectangles drifting on a dark field. */

import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { encodePgm, GrayImage } from "../src/image.js";

export function blankImage(width: number, height: number, value = 0.1): GrayImage {
  return { width, height, gray: new Float64Array(width * height).fill(value) };
}

export function paintRect(
  img: GrayImage,
  left: number,
  top: number,
  width: number,
  height: number,
  value: number
): void {
  for (let y = top; y < top + height; y++) {
    for (let x = left; x < left + width; x++) {
      if (x >= 0 && x < img.width && y >= 0 && y < img.height) {
        img.gray[y * img.width + x] = value;
      }
    }
  }
}

/** Writes 3 PGM frames into dir and returns the true boxes per frame. */
export function writeThreeFrameFixture(dir: string) {
  mkdirSync(dir, { recursive: true });
  const truth: Array<Array<{ left: number; top: number; width: number; height: number }>> = [];
  for (let frame = 1; frame <= 3; frame++) {
    const img = blankImage(64, 48);
    const a = { left: 4 + 2 * frame, top: 8, width: 6, height: 10 };
    const b = { left: 40, top: 20 + 3 * frame, width: 8, height: 8 };
    paintRect(img, a.left, a.top, a.width, a.height, 0.95);
    paintRect(img, b.left, b.top, b.width, b.height, 0.7);
    writeFileSync(join(dir, `${String(frame).padStart(6, "0")}.pgm`), encodePgm(img));
    truth.push([a, b]);
  }
  return truth;
}
