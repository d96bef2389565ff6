#!/usr/bin/env node
/**
 * Usage:
 *   mot-export --frames DIR --det-out PATH --emb-out PATH
 *              [--detector luma-blob] [--embedder patch-hist]
 *              [--min-confidence 0.5]
 */

import { runExport } from "./export.js";

interface CliOptions {
  frames?: string;
  detOut?: string;
  embOut?: string;
  detector: string;
  embedder: string;
  minConfidence: number;
}

function parseArgv(argv: string[]): CliOptions {
  const options: CliOptions = {
    detector: "luma-blob",
    embedder: "patch-hist",
    minConfidence: 0.5,
  };
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (value === undefined) {
      throw new Error(`flag ${flag} needs a value`);
    }
    switch (flag) {
      case "--frames":
        options.frames = value;
        break;
      case "--det-out":
        options.detOut = value;
        break;
      case "--emb-out":
        options.embOut = value;
        break;
      case "--detector":
        options.detector = value;
        break;
      case "--embedder":
        options.embedder = value;
        break;
      case "--min-confidence": {
        const parsed = Number(value);
        if (!Number.isFinite(parsed)) {
          throw new Error(`bad --min-confidence value '${value}'`);
        }
        options.minConfidence = parsed;
        break;
      }
      default:
        throw new Error(`unknown flag ${flag}`);
    }
  }
  if (!options.frames || !options.detOut || !options.embOut) {
    throw new Error("--frames, --det-out and --emb-out are required");
  }
  return options;
}

export function main(argv: string[]): number {
  let options: CliOptions;
  try {
    options = parseArgv(argv);
  } catch (error) {
    console.error(`error: ${(error as Error).message}`);
    return 2;
  }
  try {
    const result = runExport({
      framesDir: options.frames!,
      detectorId: options.detector,
      embedderId: options.embedder,
      confidenceFloor: options.minConfidence,
      detOut: options.detOut!,
      sidecarOut: options.embOut!,
    });
    console.log(
      `${options.frames}: ${result.frames} frames, ${result.detections} detections ` +
        `-> ${options.detOut} + ${options.embOut}`
    );
    return 0;
  } catch (error) {
    console.error(`error: ${(error as Error).message}`);
    return 1;
  }
}

process.exit(main(process.argv.slice(2)));
