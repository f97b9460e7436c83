/**
 * Reader for `.poses.json` camera manifests (version 1).
 *
 * Each frame record holds a row-major 3x3 camera-to-world rotation, a
 * world-space camera center, and a horizontal FoV in degrees.
 */

import { readFileSync } from "node:fs";

export class ManifestError extends Error {
  constructor(public readonly path: string, message: string, public readonly frame?: number) {
    super(frame === undefined ? `${path}: ${message}` : `${path}: frame ${frame}: ${message}`);
    this.name = "ManifestError";
  }
}

export interface PoseSet {
  frameCount: number;
  /** [frameCount * 9] row-major rotations, frame-major. */
  rotations: Float64Array;
  /** [frameCount * 3] camera centers. */
  translations: Float64Array;
  /** [frameCount] horizontal FoV, degrees. */
  fovDeg: Float64Array;
}

interface FrameRecord {
  index: number;
  rotation: number[];
  translation: number[];
  fov_deg: number;
}

export function readPoses(path: string): PoseSet {
  let doc: { version?: unknown; frames?: FrameRecord[] };
  try {
    doc = JSON.parse(readFileSync(path, "utf8"));
  } catch (err) {
    throw new ManifestError(path, `not valid JSON (${(err as Error).message})`);
  }
  if (doc.version !== 1) {
    throw new ManifestError(path, `unsupported manifest version ${JSON.stringify(doc.version)}`);
  }
  const frames = doc.frames;
  if (!Array.isArray(frames) || frames.length === 0) {
    throw new ManifestError(path, "manifest has no frames");
  }
  const n = frames.length;
  const out: PoseSet = {
    frameCount: n,
    rotations: new Float64Array(n * 9),
    translations: new Float64Array(n * 3),
    fovDeg: new Float64Array(n),
  };
  frames.forEach((fr, i) => {
    if (fr.index !== i) {
      throw new ManifestError(path, `non-contiguous index ${JSON.stringify(fr.index)}`, i);
    }
    if (!Array.isArray(fr.rotation) || fr.rotation.length !== 9) {
      throw new ManifestError(path, "rotation must have 9 entries", i);
    }
    if (!Array.isArray(fr.translation) || fr.translation.length !== 3) {
      throw new ManifestError(path, "translation must have 3 entries", i);
    }
    out.rotations.set(fr.rotation, i * 9);
    out.translations.set(fr.translation, i * 3);
    out.fovDeg[i] = fr.fov_deg;
  });
  return out;
}
