"""Runtime of exact A* edit distance versus the assignment approximation.

For each graph size the script times both paths on random label-graph pairs
and reports how often the approximation is tight.
"""

from __future__ import annotations

import argparse
import random
import time

from spicenet.ged import GedCostConfig, approximate_ged, graph_edit_distance
from spicenet.graph import CircuitGraph


def random_graph(rng: random.Random, n: int, prefix: str, labels: str, p: float) -> CircuitGraph:
    nodes = [(f"{prefix}{i}", rng.choice(labels)) for i in range(n)]
    edges = [(nodes[i][0], nodes[j][0]) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return CircuitGraph.make("adjacency", nodes, edges)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="3,5,7,9,10")
    ap.add_argument("--pairs", type=int, default=10)
    ap.add_argument("--labels", default="RCLMV")
    ap.add_argument("--density", type=float, default=0.4)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    cfg = GedCostConfig(exact_node_limit=max(int(s) for s in args.sizes.split(",")))
    print("nodes,pairs,exact_s,approx_s,tight,mean_gap")
    for size in (int(s) for s in args.sizes.split(",")):
        t_exact = t_approx = 0.0
        tight, gaps = 0, []
        for _ in range(args.pairs):
            g1 = random_graph(rng, size, "a", args.labels, args.density)
            g2 = random_graph(rng, size, "b", args.labels, args.density)
            t0 = time.perf_counter()
            exact = graph_edit_distance(g1, g2, cfg).distance
            t1 = time.perf_counter()
            approx = approximate_ged(g1, g2, cfg)
            t2 = time.perf_counter()
            t_exact += t1 - t0
            t_approx += t2 - t1
            tight += approx == exact
            gaps.append(approx - exact)
        print(f"{size},{args.pairs},{t_exact:.3f},{t_approx:.3f},{tight},{sum(gaps) / len(gaps):.2f}")


if __name__ == "__main__":
    main()
