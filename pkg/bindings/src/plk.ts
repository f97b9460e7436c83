/**
 * Reader for the `.plk` ray-tensor format.
 *
 * Layout: 8-byte magic "PLKRTEN1", uint32 LE header length, JSON header
 * {dims: [F, H, W, 6], dtype: "f32", channel_order}, then little-endian
 * float32 payload in frame-major order.
 */

import { readFileSync } from "node:fs";

const MAGIC = "PLKRTEN1";

export class PlkFormatError extends Error {
  constructor(public readonly path: string, message: string) {
    super(`${path}: ${message}`);
    this.name = "PlkFormatError";
  }
}

export interface PluckerTensor {
  /** [frames, height, width, channels(6)] */
  dims: [number, number, number, number];
  channelOrder: string[];
  /** Frame-major float32 buffer; single copy of the file payload. */
  data: Float32Array;
}

export function readPlucker(path: string): PluckerTensor {
  const raw = readFileSync(path);
  if (raw.length < 12 || raw.toString("latin1", 0, 8) !== MAGIC) {
    throw new PlkFormatError(path, `bad magic ${JSON.stringify(raw.toString("latin1", 0, 8))}`);
  }
  const headerLen = raw.readUInt32LE(8);
  if (12 + headerLen > raw.length) {
    throw new PlkFormatError(path, "truncated header");
  }
  let header: { dims?: unknown; dtype?: unknown; channel_order?: unknown };
  try {
    header = JSON.parse(raw.toString("utf8", 12, 12 + headerLen));
  } catch (err) {
    throw new PlkFormatError(path, `unreadable header (${(err as Error).message})`);
  }
  if (header.dtype !== "f32") {
    throw new PlkFormatError(path, `unsupported dtype ${JSON.stringify(header.dtype)}`);
  }
  const dims = header.dims;
  if (!Array.isArray(dims) || dims.length !== 4 || !dims.every((d) => Number.isInteger(d) && d > 0)) {
    throw new PlkFormatError(path, `bad dims ${JSON.stringify(dims)}`);
  }
  const count = dims.reduce((a: number, b: number) => a * b, 1);
  const payload = raw.subarray(12 + headerLen);
  if (payload.length !== count * 4) {
    throw new PlkFormatError(path, `payload size mismatch, expected ${count * 4} bytes, got ${payload.length}`);
  }
  // Copy into an aligned buffer: Buffer views are not guaranteed 4-aligned.
  const data = new Float32Array(count);
  new Uint8Array(data.buffer).set(payload);
  return {
    dims: dims as [number, number, number, number],
    channelOrder: (header.channel_order as string[]) ?? [],
    data,
  };
}
