#!/usr/bin/env python3
"""Generate a synthetic reference cloud, distorted versions and a manifest.

The output directory ends up with ref.ply, one PLY per distortion level and
a manifest.csv ready for `phm batch --manifest`.
"""

import argparse
import csv
from pathlib import Path

from phm.cloud import save_ply
from phm.synthetic import (
    mean_nn_spacing,
    synthetic_cloud,
    with_geometry_jitter,
    with_luminance_noise,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("synthetic_data"))
    ap.add_argument("--points", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--noise", type=float, nargs="*", default=[5, 10, 20, 40],
                    help="luminance noise sigmas (8-bit units)")
    ap.add_argument("--jitter", type=float, nargs="*", default=[0.1, 0.5, 1.0, 2.0],
                    help="geometric jitter sigmas (units of mean NN spacing)")
    ap.add_argument("--binary", action="store_true", help="write binary PLY")
    args = ap.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    ref = synthetic_cloud(args.points, seed=args.seed)
    ref_path = args.out / "ref.ply"
    save_ply(ref, ref_path, binary=args.binary)
    spacing = mean_nn_spacing(ref)
    print(f"wrote {ref_path} ({args.points} points, mean NN spacing {spacing:.3f})")

    rows = []
    for sigma in args.noise:
        cloud = with_luminance_noise(ref, sigma, seed=args.seed + 1)
        path = args.out / f"noise_{sigma:g}.ply"
        save_ply(cloud, path, binary=args.binary)
        rows.append((f"noise_{sigma:g}", path))
    for sigma in args.jitter:
        cloud = with_geometry_jitter(ref, sigma, seed=args.seed + 2, spacing=spacing)
        path = args.out / f"jitter_{sigma:g}.ply"
        save_ply(cloud, path, binary=args.binary)
        rows.append((f"jitter_{sigma:g}", path))

    manifest = args.out / "manifest.csv"
    with open(manifest, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["pair_id", "ref_path", "dist_path"])
        for pair_id, path in rows:
            w.writerow([pair_id, ref_path, path])
    print(f"wrote {manifest} with {len(rows)} rows")


if __name__ == "__main__":
    main()
