import { execFileSync } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

/** Workspace with synthetic panoramas and an SfM manifest, built once. */
export interface Workspace {
  dir: string;
  panos: string[];
  sfm: string;
}

export function makeWorkspace(frameCount = 3): Workspace {
  const dir = mkdtempSync(join(tmpdir(), "gravicam-bindings-test-"));
  const script = `
import sys
import numpy as np
from PIL import Image

out_dir, n = sys.argv[1], int(sys.argv[2])
for k in range(2):
    rng = np.random.default_rng(100 + k)
    lat = np.linspace(0, np.pi, 64)[:, None]
    lon = np.linspace(0, 2 * np.pi, 128)[None, :]
    img = np.zeros((64, 128, 3))
    for c in range(3):
        img[..., c] = 0.5 + 0.25 * np.sin((c + 1) * lon + rng.uniform(0, 6)) * np.sin(lat)
    u8 = np.clip(np.rint(img * 255), 0, 255).astype(np.uint8)
    Image.fromarray(u8).save(f"{out_dir}/pano{k}.png")

from gravicam import geom, pose
rng = np.random.default_rng(7)
poses = [pose.CameraPose(geom.random_rotation(rng), rng.normal(size=3), 90.0) for _ in range(n)]
pose.write_manifest(poses, f"{out_dir}/sfm.poses.json")
`;
  execFileSync("python3", ["-c", script, dir, String(frameCount)]);
  return {
    dir,
    panos: [join(dir, "pano0.png"), join(dir, "pano1.png")],
    sfm: join(dir, "sfm.poses.json"),
  };
}

export function runCli(args: string[]): string {
  return execFileSync("python3", ["-m", "gravicam.cli", ...args], {
    encoding: "utf8",
    maxBuffer: 16 * 1024 * 1024,
  });
}
