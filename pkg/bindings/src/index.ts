export { VERSION, GravicamError, loadClip, generate } from "./client.js";
export type { BundleView, ClipHandle, FrameTensor, GenerateOverrides } from "./client.js";
export { readPlucker, PlkFormatError } from "./plk.js";
export type { PluckerTensor } from "./plk.js";
export { readPoses, ManifestError } from "./poses.js";
export type { PoseSet } from "./poses.js";
export { decodePng, PngFormatError } from "./png.js";
export type { DecodedPng } from "./png.js";
