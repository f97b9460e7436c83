/**
 * Dataloader-facing entry points: load a panorama clip handle, then generate
 * training bundles by driving the `gravicam` CLI and parsing the bundle files
 * back into typed tensors.
 *
 * Each `generate` call runs in its own temporary directory with its own
 * subprocess, so calls are reentrant and safe to issue concurrently from
 * multiple workers without locking.
 */

import { execFile } from "node:child_process";
import { existsSync, mkdtempSync, readFileSync, readdirSync, rmSync, statSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { promisify } from "node:util";

import { decodePng } from "./png.js";
import { readPlucker, type PluckerTensor } from "./plk.js";
import { readPoses, type PoseSet } from "./poses.js";

const execFileAsync = promisify(execFile);

/** Kept in lockstep with the wrapped package's version. */
export const VERSION = "0.1.0";

export class GravicamError extends Error {
  constructor(message: string, public readonly exitCode?: number) {
    super(message);
    this.name = "GravicamError";
  }
}

export interface ClipHandle {
  /** Panorama image file or numbered frame directory. */
  path: string;
}

export interface GenerateOverrides {
  clipId?: string;
  renderWidth?: number;
  renderHeight?: number;
  pluckerWidth?: number;
  pluckerHeight?: number;
  nullPitchRate?: number;
  configPath?: string;
  jobs?: number;
}

export interface FrameTensor {
  /** [frames, height, width, channels] */
  dims: [number, number, number, number];
  /** Frame-major float32 in [0, 1]; single copy made while decoding PNGs. */
  data: Float32Array;
}

export interface BundleView {
  clipId: string;
  seed: number;
  frameCount: number;
  frames: FrameTensor;
  nullPitchFrames: FrameTensor;
  plucker: PluckerTensor;
  poses: PoseSet;
  nullPitchPoses: PoseSet;
  captionSource: "rotated" | "null_pitch";
}

function cliCommand(): { cmd: string; prefix: string[] } {
  const bin = process.env.GRAVICAM_BIN;
  if (bin) return { cmd: bin, prefix: [] };
  return { cmd: "python3", prefix: ["-m", "gravicam.cli"] };
}

export function loadClip(path: string): ClipHandle {
  const abs = resolve(path);
  if (!existsSync(abs)) {
    throw new GravicamError(`panorama clip not found: ${abs}`);
  }
  return { path: abs };
}

function readFrameDir(dir: string): FrameTensor {
  const names = readdirSync(dir)
    .filter((n) => /^frame_\d{5}\.png$/.test(n))
    .sort();
  if (names.length === 0) {
    throw new GravicamError(`no frames found in ${dir}`);
  }
  const first = decodePng(readFileSync(join(dir, names[0])));
  const { width, height, channels } = first;
  const frameLen = height * width * channels;
  const data = new Float32Array(names.length * frameLen);
  names.forEach((name, f) => {
    const img = f === 0 ? first : decodePng(readFileSync(join(dir, name)));
    if (img.width !== width || img.height !== height || img.channels !== channels) {
      throw new GravicamError(`${join(dir, name)}: frame shape differs from frame 0`);
    }
    const base = f * frameLen;
    for (let i = 0; i < frameLen; i++) data[base + i] = img.pixels[i] / 255;
  });
  return { dims: [names.length, height, width, channels], data };
}

export async function generate(
  clip: ClipHandle,
  sfmPath: string,
  seed: number,
  overrides: GenerateOverrides = {}
): Promise<BundleView> {
  const sfm = resolve(sfmPath);
  if (!existsSync(sfm) || !statSync(sfm).isFile()) {
    throw new GravicamError(`SfM manifest not found: ${sfm}`);
  }
  const clipId = overrides.clipId ?? "clip";
  const outRoot = mkdtempSync(join(tmpdir(), "gravicam-bundle-"));
  try {
    const { cmd, prefix } = cliCommand();
    const args = [
      ...prefix,
      "bundle",
      "--pano", clip.path,
      "--sfm", sfm,
      "--seed", String(seed),
      "--clip-id", clipId,
      "--out", outRoot,
    ];
    if (overrides.configPath) args.push("--config", resolve(overrides.configPath));
    if (overrides.renderWidth !== undefined) args.push("--render-width", String(overrides.renderWidth));
    if (overrides.renderHeight !== undefined) args.push("--render-height", String(overrides.renderHeight));
    if (overrides.pluckerWidth !== undefined) args.push("--plucker-width", String(overrides.pluckerWidth));
    if (overrides.pluckerHeight !== undefined) args.push("--plucker-height", String(overrides.pluckerHeight));
    if (overrides.nullPitchRate !== undefined) args.push("--null-pitch-rate", String(overrides.nullPitchRate));
    if (overrides.jobs !== undefined) args.push("--jobs", String(overrides.jobs));

    try {
      await execFileAsync(cmd, args, { maxBuffer: 16 * 1024 * 1024 });
    } catch (err) {
      const e = err as { code?: number; stderr?: string; message: string };
      throw new GravicamError(
        `bundle generation failed for clip ${clipId}, seed ${seed}: ${e.stderr?.trim() || e.message}`,
        typeof e.code === "number" ? e.code : undefined
      );
    }

    const dir = join(outRoot, clipId, String(seed));
    const meta = JSON.parse(readFileSync(join(dir, "meta.json"), "utf8"));
    return {
      clipId,
      seed,
      frameCount: meta.frame_count as number,
      frames: readFrameDir(join(dir, "frames")),
      nullPitchFrames: readFrameDir(join(dir, "null_pitch")),
      plucker: readPlucker(join(dir, "rays.plk")),
      poses: readPoses(join(dir, "poses.json")),
      nullPitchPoses: readPoses(join(dir, "null_pitch.poses.json")),
      captionSource: meta.caption_source as "rotated" | "null_pitch",
    };
  } finally {
    rmSync(outRoot, { recursive: true, force: true });
  }
}
