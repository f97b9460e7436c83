import { execFileSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { decodePng, readPlucker, readPoses, ManifestError, PlkFormatError, PngFormatError } from "../src/index.js";

let dir: string;

beforeAll(() => {
  dir = mkdtempSync(join(tmpdir(), "gravicam-formats-"));
});

afterAll(() => {
  rmSync(dir, { recursive: true, force: true });
});

describe("plk reader", () => {
  function writePlk(path: string, dims: number[], payloadFloats: number): void {
    const header = Buffer.from(
      JSON.stringify({ dims, dtype: "f32", channel_order: ["mx", "my", "mz", "dx", "dy", "dz"] })
    );
    const payload = Buffer.alloc(payloadFloats * 4);
    for (let i = 0; i < payloadFloats; i++) payload.writeFloatLE(i * 0.5, i * 4);
    const len = Buffer.alloc(4);
    len.writeUInt32LE(header.length);
    writeFileSync(path, Buffer.concat([Buffer.from("PLKRTEN1"), len, header, payload]));
  }

  it("parses a well-formed tensor", () => {
    const p = join(dir, "ok.plk");
    writePlk(p, [1, 2, 2, 6], 24);
    const t = readPlucker(p);
    expect(t.dims).toEqual([1, 2, 2, 6]);
    expect(t.data.length).toBe(24);
    expect(t.data[3]).toBeCloseTo(1.5, 6);
  });

  it("rejects bad magic", () => {
    const p = join(dir, "magic.plk");
    writeFileSync(p, Buffer.from("NOTAPLK0then some bytes"));
    expect(() => readPlucker(p)).toThrow(PlkFormatError);
  });

  it("rejects payload size mismatch with both byte counts", () => {
    const p = join(dir, "short.plk");
    writePlk(p, [1, 2, 2, 6], 20); // 16 floats missing
    expect(() => readPlucker(p)).toThrow(/expected 96 bytes, got 80/);
  });

  it("rejects wrong dtype", () => {
    const p = join(dir, "dtype.plk");
    const header = Buffer.from(JSON.stringify({ dims: [1, 1, 1, 6], dtype: "f64" }));
    const len = Buffer.alloc(4);
    len.writeUInt32LE(header.length);
    writeFileSync(p, Buffer.concat([Buffer.from("PLKRTEN1"), len, header, Buffer.alloc(48)]));
    expect(() => readPlucker(p)).toThrow(/dtype/);
  });
});

describe("pose manifest reader", () => {
  const frame = (index: number) => ({
    index,
    rotation: [1, 0, 0, 0, 1, 0, 0, 0, 1],
    translation: [index, 0, 0],
    fov_deg: 90,
  });

  it("parses frames in order", () => {
    const p = join(dir, "ok.poses.json");
    writeFileSync(p, JSON.stringify({ version: 1, frames: [frame(0), frame(1)] }));
    const ps = readPoses(p);
    expect(ps.frameCount).toBe(2);
    expect(Array.from(ps.rotations.subarray(0, 9))).toEqual([1, 0, 0, 0, 1, 0, 0, 0, 1]);
    expect(ps.translations[3]).toBe(1);
    expect(ps.fovDeg[1]).toBe(90);
  });

  it("rejects version and index problems naming the frame", () => {
    const v = join(dir, "v.poses.json");
    writeFileSync(v, JSON.stringify({ version: 2, frames: [frame(0)] }));
    expect(() => readPoses(v)).toThrow(ManifestError);

    const idx = join(dir, "idx.poses.json");
    writeFileSync(idx, JSON.stringify({ version: 1, frames: [frame(0), frame(5)] }));
    expect(() => readPoses(idx)).toThrow(/frame 1/);
  });

  it("rejects empty or invalid documents", () => {
    const e = join(dir, "empty.poses.json");
    writeFileSync(e, JSON.stringify({ version: 1, frames: [] }));
    expect(() => readPoses(e)).toThrow(/no frames/);
    const b = join(dir, "bad.poses.json");
    writeFileSync(b, "{nope");
    expect(() => readPoses(b)).toThrow(/JSON/);
  });
});

describe("png decoder", () => {
  it("decodes a gradient PNG written by the pipeline's writer", () => {
    const p = join(dir, "grad.png");
    execFileSync("python3", [
      "-c",
      `
import numpy as np
from gravicam import pano
h, w = 13, 17
img = ((np.arange(h)[:, None] + np.arange(w)[None, :])[..., None] % 256) / 255.0
img = np.repeat(img, 3, axis=2)
pano.save_image(${JSON.stringify("PATH")}, img.astype(np.float32))
`.replace('"PATH"', JSON.stringify(p)),
    ]);
    const img = decodePng(readFileSync(p));
    expect([img.height, img.width, img.channels]).toEqual([13, 17, 3]);
    for (let y = 0; y < img.height; y++) {
      for (let x = 0; x < img.width; x++) {
        const v = (y + x) % 256;
        for (let c = 0; c < 3; c++) {
          expect(img.pixels[(y * img.width + x) * 3 + c]).toBe(v);
        }
      }
    }
  });

  it("decodes grayscale masks", () => {
    const p = join(dir, "mask.png");
    execFileSync("python3", [
      "-c",
      `
import numpy as np
from gravicam import pano
mask = pano.EquirectMask(np.indices((8, 16)).sum(0) % 2 == 0)
pano.save_mask(${JSON.stringify(p)}, mask)
`,
    ]);
    const img = decodePng(readFileSync(p));
    expect([img.height, img.width, img.channels]).toEqual([8, 16, 1]);
    expect(img.pixels[0]).toBe(255);
    expect(img.pixels[1]).toBe(0);
  });

  it("rejects non-PNG bytes", () => {
    expect(() => decodePng(Buffer.from("definitely not a png"))).toThrow(PngFormatError);
  });
});
