"""Cluster count versus radius on synthetic wiring with noisy breaks.

Generates ``--nets`` well-separated nets, each a polyline whose segments are
broken by gaps drawn from ``--gap-range`` (mimicking line-detector dropouts),
and reports how many clusters each radius yields against the true net count.
"""

from __future__ import annotations

import argparse
import random

from spicenet.geometry import ClusterConfig, Segment, cluster_segments


def synthetic_wiring(rng: random.Random, nets: int, pieces: int, gap_range: tuple[float, float],
                     spacing: float) -> list[Segment]:
    segments = []
    for k in range(nets):
        y = k * spacing
        x = 0.0
        for _ in range(pieces):
            length = rng.uniform(30, 120)
            segments.append(Segment((x, y), (x + length, y)))
            x += length + rng.uniform(*gap_range)
    return segments


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nets", type=int, default=12)
    ap.add_argument("--pieces", type=int, default=6)
    ap.add_argument("--gap-range", default="2,35", help="min,max break length in px")
    ap.add_argument("--spacing", type=float, default=90.0, help="distance between nets in px")
    ap.add_argument("--radii", default="5,10,20,30,40,50,60,80,100")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    lo, hi = (float(v) for v in args.gap_range.split(","))
    rng = random.Random(args.seed)
    segments = synthetic_wiring(rng, args.nets, args.pieces, (lo, hi), args.spacing)
    print(f"true nets: {args.nets}, segments: {len(segments)}")
    print("radius,clusters,status")
    for r in (float(v) for v in args.radii.split(",")):
        count = len(cluster_segments(segments, ClusterConfig(r)))
        status = "exact" if count == args.nets else ("split" if count > args.nets else "merged")
        print(f"{r:g},{count},{status}")


if __name__ == "__main__":
    main()
