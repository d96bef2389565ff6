/**
 * Pluggable detector and embedder models, selected by identifier.
 *
 * The built-ins are deterministic, dependency-free reference models so
 * the export pipeline runs anywhere; heavier neural models plug in
 * through the same two interfaces.
 */

import { GrayImage } from "./image.js";
import { DetectionBox, unitNormalize } from "./formats.js";

export interface Detector {
  readonly id: string;
  detect(image: GrayImage): DetectionBox[];
}

export interface Embedder {
  readonly id: string;
  readonly dimension: number;
  embed(image: GrayImage, box: DetectionBox): number[];
}

/**
 * Bright-blob detector: thresholds luminance and reports the bounding box
 * of each 4-connected component, with the component's mean luminance as
 * the confidence. Components touching fewer than minArea pixels are noise.
 */
export function lumaBlobDetector(threshold = 0.5, minArea = 4): Detector {
  return {
    id: "luma-blob",
    detect(image: GrayImage): DetectionBox[] {
      const { width, height, gray } = image;
      const label = new Int32Array(width * height).fill(-1);
      const boxes: DetectionBox[] = [];
      let next = 0;
      const stack: number[] = [];
      for (let start = 0; start < gray.length; start++) {
        if (gray[start] < threshold || label[start] >= 0) continue;
        let minX = width, minY = height, maxX = -1, maxY = -1;
        let sum = 0;
        let area = 0;
        stack.push(start);
        label[start] = next;
        while (stack.length > 0) {
          const at = stack.pop()!;
          const x = at % width;
          const y = (at - x) / width;
          minX = Math.min(minX, x);
          maxX = Math.max(maxX, x);
          minY = Math.min(minY, y);
          maxY = Math.max(maxY, y);
          sum += gray[at];
          area++;
          const neighbors = [
            x > 0 ? at - 1 : -1,
            x + 1 < width ? at + 1 : -1,
            y > 0 ? at - width : -1,
            y + 1 < height ? at + width : -1,
          ];
          for (const n of neighbors) {
            if (n >= 0 && label[n] < 0 && gray[n] >= threshold) {
              label[n] = next;
              stack.push(n);
            }
          }
        }
        next++;
        if (area >= minArea) {
          boxes.push({
            left: minX,
            top: minY,
            width: maxX - minX + 1,
            height: maxY - minY + 1,
            confidence: sum / area,
          });
        }
      }
      // stable output order: top-to-bottom, then left-to-right
      boxes.sort((a, b) => a.top - b.top || a.left - b.left);
      return boxes;
    },
  };
}

/**
 * Patch-histogram embedder: a luminance histogram over the box interior,
 * L2-normalized. Crude, but distinct appearance patterns land far apart.
 */
export function patchHistogramEmbedder(dimension = 16): Embedder {
  return {
    id: "patch-hist",
    dimension,
    embed(image: GrayImage, box: DetectionBox): number[] {
      const histogram = new Array(dimension).fill(0);
      const x0 = Math.max(0, Math.floor(box.left));
      const y0 = Math.max(0, Math.floor(box.top));
      const x1 = Math.min(image.width, Math.ceil(box.left + box.width));
      const y1 = Math.min(image.height, Math.ceil(box.top + box.height));
      let count = 0;
      for (let y = y0; y < y1; y++) {
        for (let x = x0; x < x1; x++) {
          const value = image.gray[y * image.width + x];
          const bin = Math.min(dimension - 1, Math.floor(value * dimension));
          histogram[bin] += 1;
          count++;
        }
      }
      if (count === 0) {
        throw new Error("detection box lies outside the image");
      }
      return unitNormalize(histogram);
    },
  };
}

const DETECTORS: Record<string, () => Detector> = {
  "luma-blob": () => lumaBlobDetector(),
};

const EMBEDDERS: Record<string, () => Embedder> = {
  "patch-hist": () => patchHistogramEmbedder(),
};

export function getDetector(id: string): Detector {
  const factory = DETECTORS[id];
  if (!factory) {
    throw new Error(
      `cannot load detector model '${id}' (available: ${Object.keys(DETECTORS).join(", ")})`
    );
  }
  return factory();
}

export function getEmbedder(id: string): Embedder {
  const factory = EMBEDDERS[id];
  if (!factory) {
    throw new Error(
      `cannot load embedder model '${id}' (available: ${Object.keys(EMBEDDERS).join(", ")})`
    );
  }
  return factory();
}
