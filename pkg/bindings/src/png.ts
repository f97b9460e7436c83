/**
 * Minimal PNG decoder for the bundle frame images: 8-bit depth, color types
 * 0 (gray), 2 (RGB), 4 (gray+alpha), 6 (RGBA), non-interlaced — which covers
 * everything the pipeline writes. Not a general-purpose PNG library.
 */

import { inflateSync } from "node:zlib";

const SIGNATURE = Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);
const CHANNELS: Record<number, number> = { 0: 1, 2: 3, 4: 2, 6: 4 };

export class PngFormatError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "PngFormatError";
  }
}

export interface DecodedPng {
  width: number;
  height: number;
  channels: number;
  /** Row-major interleaved 8-bit samples, [height * width * channels]. */
  pixels: Uint8Array;
}

export function decodePng(raw: Buffer): DecodedPng {
  if (raw.length < 8 || !raw.subarray(0, 8).equals(SIGNATURE)) {
    throw new PngFormatError("not a PNG file");
  }
  let width = 0;
  let height = 0;
  let channels = 0;
  const idat: Buffer[] = [];
  let off = 8;
  while (off + 8 <= raw.length) {
    const len = raw.readUInt32BE(off);
    const type = raw.toString("latin1", off + 4, off + 8);
    const body = raw.subarray(off + 8, off + 8 + len);
    if (type === "IHDR") {
      width = body.readUInt32BE(0);
      height = body.readUInt32BE(4);
      const bitDepth = body[8];
      const colorType = body[9];
      const interlace = body[12];
      if (bitDepth !== 8) throw new PngFormatError(`unsupported bit depth ${bitDepth}`);
      if (!(colorType in CHANNELS)) throw new PngFormatError(`unsupported color type ${colorType}`);
      if (interlace !== 0) throw new PngFormatError("interlaced PNGs are not supported");
      channels = CHANNELS[colorType];
    } else if (type === "IDAT") {
      idat.push(body);
    } else if (type === "IEND") {
      break;
    }
    off += 12 + len; // length + type + body + crc
  }
  if (!width || !height || !channels) throw new PngFormatError("missing IHDR");
  if (idat.length === 0) throw new PngFormatError("missing IDAT");

  const stride = width * channels;
  const decompressed = inflateSync(Buffer.concat(idat));
  if (decompressed.length !== height * (stride + 1)) {
    throw new PngFormatError(
      `scanline data mismatch, expected ${height * (stride + 1)} bytes, got ${decompressed.length}`
    );
  }
  const pixels = new Uint8Array(height * stride);
  for (let y = 0; y < height; y++) {
    const filter = decompressed[y * (stride + 1)];
    const line = decompressed.subarray(y * (stride + 1) + 1, (y + 1) * (stride + 1));
    const row = pixels.subarray(y * stride, (y + 1) * stride);
    const prev = y > 0 ? pixels.subarray((y - 1) * stride, y * stride) : null;
    unfilterRow(filter, line, row, prev, channels);
  }
  return { width, height, channels, pixels };
}

function unfilterRow(
  filter: number,
  line: Buffer,
  row: Uint8Array,
  prev: Uint8Array | null,
  bpp: number
): void {
  const n = line.length;
  switch (filter) {
    case 0: // none
      row.set(line);
      return;
    case 1: // sub
      for (let i = 0; i < n; i++) row[i] = (line[i] + (i >= bpp ? row[i - bpp] : 0)) & 0xff;
      return;
    case 2: // up
      for (let i = 0; i < n; i++) row[i] = (line[i] + (prev ? prev[i] : 0)) & 0xff;
      return;
    case 3: // average
      for (let i = 0; i < n; i++) {
        const left = i >= bpp ? row[i - bpp] : 0;
        const up = prev ? prev[i] : 0;
        row[i] = (line[i] + ((left + up) >> 1)) & 0xff;
      }
      return;
    case 4: // paeth
      for (let i = 0; i < n; i++) {
        const a = i >= bpp ? row[i - bpp] : 0;
        const b = prev ? prev[i] : 0;
        const c = prev && i >= bpp ? prev[i - bpp] : 0;
        const p = a + b - c;
        const pa = Math.abs(p - a);
        const pb = Math.abs(p - b);
        const pc = Math.abs(p - c);
        const pred = pa <= pb && pa <= pc ? a : pb <= pc ? b : c;
        row[i] = (line[i] + pred) & 0xff;
      }
      return;
    default:
      throw new PngFormatError(`unknown filter type ${filter}`);
  }
}
