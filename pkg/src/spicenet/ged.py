"""Graph edit distance and the normalized similarity score.

Exact distances come from a best-first (A*) search over node assignments.
Large graphs fall back to an assignment-based upper bound refined by local
search; the result always reports which path was taken.
"""

from __future__ import annotations

import heapq
import math
from collections import Counter
from dataclasses import dataclass
from itertools import count

import networkx as nx
import numpy as np
from scipy.optimize import linear_sum_assignment

from .graph import CircuitGraph, GraphMode, build_graph
from .spice import Netlist

_EPS = 1e-9


class ModeMismatch(ValueError):
    pass


class SizeLimitExceeded(ValueError):
    pass


@dataclass(frozen=True)
class GedCostConfig:
    node_insert: float = 1.0
    node_delete: float = 1.0
    node_substitute_mismatch: float = 1.0
    edge_insert: float = 1.0
    edge_delete: float = 1.0
    exact_node_limit: int = 10

    def __post_init__(self) -> None:
        for name in ("node_insert", "node_delete", "node_substitute_mismatch", "edge_insert", "edge_delete"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {v}")
        if self.exact_node_limit < 0:
            raise ValueError("exact_node_limit must be >= 0")

    def substitute(self, a: str, b: str) -> float:
        return 0.0 if a == b else self.node_substitute_mismatch

    @property
    def symmetric(self) -> bool:
        return self.node_insert == self.node_delete and self.edge_insert == self.edge_delete


@dataclass(frozen=True)
class GedResult:
    distance: float
    ged_max: float
    similarity: float
    exact: bool
    mode: GraphMode

    def to_json(self) -> dict:
        return {
            "distance": self.distance,
            "ged_max": self.ged_max,
            "similarity": self.similarity,
            "exact": self.exact,
            "mode": self.mode.value,
        }


def normalized_similarity(distance: float, ged_max: float) -> float:
    """Percent similarity ``(1 - distance / ged_max) * 100`` clamped to [0, 100]."""
    if ged_max <= 0:
        return 100.0
    return min(100.0, max(0.0, (1.0 - distance / ged_max) * 100.0))


class _Indexed:
    """Index-based view of a graph; node indices follow lexicographic id order."""

    def __init__(self, g: CircuitGraph):
        self.ids = sorted(i for i, _ in g.nodes)
        pos = {nid: k for k, nid in enumerate(self.ids)}
        lab = g.labels
        self.labels = [lab[i] for i in self.ids]
        self.adj: list[set[int]] = [set() for _ in self.ids]
        self.edges: list[tuple[int, int]] = []
        for u, v in g.edges:
            a, b = pos[u], pos[v]
            self.adj[a].add(b)
            self.adj[b].add(a)
            self.edges.append((min(a, b), max(a, b)))
        self.edge_set = set(self.edges)
        self.n = len(self.ids)

    def has_edge(self, a: int, b: int) -> bool:
        return b in self.adj[a]


def _mapping_cost(x: _Indexed, y: _Indexed, mapping: list[int], cfg: GedCostConfig) -> float:
    """Cost of the edit path induced by a node mapping (-1 = delete)."""
    cost = 0.0
    used = set()
    for i, j in enumerate(mapping):
        if j < 0:
            cost += cfg.node_delete
        else:
            cost += cfg.substitute(x.labels[i], y.labels[j])
            used.add(j)
    cost += cfg.node_insert * (y.n - len(used))
    matched = 0
    for a, b in x.edges:
        ja, jb = mapping[a], mapping[b]
        if ja >= 0 and jb >= 0 and y.has_edge(ja, jb):
            matched += 1
        else:
            cost += cfg.edge_delete
    cost += cfg.edge_insert * (len(y.edges) - matched)
    return cost


def _node_lower_bound(l1: list[str], l2: list[str], cfg: GedCostConfig) -> float:
    """Optimal node-only cost between two label multisets (ignores edges)."""
    n1, n2 = len(l1), len(l2)
    common = sum((Counter(l1) & Counter(l2)).values())
    lb = (n1 - common) * cfg.node_delete + (n2 - common) * cfg.node_insert
    extra_pairs = min(n1, n2) - common
    gain = cfg.node_substitute_mismatch - cfg.node_delete - cfg.node_insert
    return lb + extra_pairs * min(0.0, gain)


def _edge_lower_bound(e1: int, e2: int, cfg: GedCostConfig) -> float:
    return max(0, e1 - e2) * cfg.edge_delete + max(0, e2 - e1) * cfg.edge_insert


def _astar(x: _Indexed, y: _Indexed, cfg: GedCostConfig, upper: float = math.inf) -> float:
    # high-degree nodes first tightens the bound early
    order = sorted(range(x.n), key=lambda i: (-len(x.adj[i]), i))
    n1, n2 = x.n, y.n
    delete = n2  # sentinel target index; sorts after real targets
    # edges of g1 entirely inside the first k processed nodes
    inside = [0] * (n1 + 1)
    placed: set[int] = set()
    for k, i in enumerate(order):
        inside[k + 1] = inside[k] + len(x.adj[i] & placed)
        placed.add(i)
    e1_total, e2_total = len(x.edges), len(y.edges)

    def heuristic(k: int, used: int, used_edges: int) -> float:
        rest1 = [x.labels[i] for i in order[k:]]
        rest2 = [y.labels[j] for j in range(n2) if not used >> j & 1]
        return _node_lower_bound(rest1, rest2, cfg) + _edge_lower_bound(
            e1_total - inside[k], e2_total - used_edges, cfg
        )

    tie = count()
    h0 = heuristic(0, 0, 0)
    heap = [(h0, 0, (), next(tie), 0.0, 0, 0)]
    while heap:
        f, negk, assign, _, g, used, used_edges = heapq.heappop(heap)
        k = -negk
        if k == n1 + 1:  # goal marker: insertions already added
            return g
        if k == n1:
            rest = n2 - bin(used).count("1")
            final = g + rest * cfg.node_insert + (e2_total - used_edges) * cfg.edge_insert
            if final <= upper + _EPS:
                heapq.heappush(heap, (final, -(n1 + 1), assign, next(tie), final, used, used_edges))
            continue
        u = order[k]
        prev = [(order[t], assign[t]) for t in range(k)]
        for j in [*range(n2), delete]:
            if j != delete and used >> j & 1:
                continue
            if j == delete:
                step = cfg.node_delete
                step += cfg.edge_delete * sum(1 for pu, _ in prev if x.has_edge(u, pu))
                new_used, new_edges = used, used_edges
            else:
                step = cfg.substitute(x.labels[u], y.labels[j])
                gained = 0
                for pu, pj in prev:
                    e1 = x.has_edge(u, pu)
                    e2 = pj != delete and y.has_edge(j, pj)
                    if e1 and not e2:
                        step += cfg.edge_delete
                    elif e2 and not e1:
                        step += cfg.edge_insert
                    if e2:
                        gained += 1
                new_used, new_edges = used | (1 << j), used_edges + gained
            g2 = g + step
            f2 = g2 + heuristic(k + 1, new_used, new_edges)
            if f2 > upper + _EPS:
                continue
            heapq.heappush(heap, (f2, -(k + 1), (*assign, j), next(tie), g2, new_used, new_edges))
    # only reachable if the upper bound was wrong
    raise RuntimeError("A* search exhausted without reaching a goal")


def _assignment_mapping(x: _Indexed, y: _Indexed, cfg: GedCostConfig) -> list[int]:
    n1, n2 = x.n, y.n
    size = n1 + n2
    big = 1e12
    cost = np.zeros((size, size))
    cost[:n1, n2:] = big
    cost[n1:, :n2] = big
    for i in range(n1):
        di = len(x.adj[i])
        for j in range(n2):
            dj = len(y.adj[j])
            edge = max(0, di - dj) * cfg.edge_delete + max(0, dj - di) * cfg.edge_insert
            cost[i, j] = cfg.substitute(x.labels[i], y.labels[j]) + 0.5 * edge
        cost[i, n2 + i] = cfg.node_delete + 0.5 * di * cfg.edge_delete
    for j in range(n2):
        cost[n1 + j, j] = cfg.node_insert + 0.5 * len(y.adj[j]) * cfg.edge_insert
    rows, cols = linear_sum_assignment(cost)
    mapping = [-1] * n1
    for r, c in zip(rows, cols):
        if r < n1 and c < n2:
            mapping[r] = int(c)
    return mapping


def _refine(x: _Indexed, y: _Indexed, mapping: list[int], cfg: GedCostConfig, max_passes: int = 20) -> tuple[list[int], float]:
    """First-improvement local search over swaps and reassignments."""
    best = _mapping_cost(x, y, mapping, cfg)
    for _ in range(max_passes):
        improved = False
        for a in range(x.n):
            free = sorted(set(range(y.n)) - set(mapping))
            for target in [*free, -1]:
                if target == mapping[a]:
                    continue
                trial = mapping.copy()
                trial[a] = target
                c = _mapping_cost(x, y, trial, cfg)
                if c < best - _EPS:
                    mapping, best, improved = trial, c, True
                    break
            for b in range(a + 1, x.n):
                if mapping[a] == mapping[b]:
                    continue
                trial = mapping.copy()
                trial[a], trial[b] = trial[b], trial[a]
                c = _mapping_cost(x, y, trial, cfg)
                if c < best - _EPS:
                    mapping, best, improved = trial, c, True
        if not improved:
            break
    return mapping, best


def approximate_ged(g1: CircuitGraph, g2: CircuitGraph, cfg: GedCostConfig | None = None) -> float:
    """Upper bound on the edit distance via bipartite assignment plus local search."""
    cfg = cfg or GedCostConfig()
    x, y = _Indexed(g1), _Indexed(g2)
    _, cost = _refine(x, y, _assignment_mapping(x, y, cfg), cfg)
    return cost


def _isomorphic(g1: CircuitGraph, g2: CircuitGraph) -> bool:
    if len(g1.nodes) != len(g2.nodes) or len(g1.edges) != len(g2.edges):
        return False
    if Counter(g1.labels.values()) != Counter(g2.labels.values()):
        return False
    return nx.is_isomorphic(
        g1.to_networkx(), g2.to_networkx(), node_match=lambda a, b: a["label"] == b["label"]
    )


def graph_edit_distance(g1: CircuitGraph, g2: CircuitGraph, cfg: GedCostConfig | None = None) -> GedResult:
    """Edit distance between two circuit graphs plus the normalized similarity.

    The normalizer is the total number of nodes and edges in both graphs.
    """
    cfg = cfg or GedCostConfig()
    if g1.mode != g2.mode:
        raise ModeMismatch(f"cannot compare {g1.mode.value} graph with {g2.mode.value} graph")
    ged_max = float(len(g1.nodes) + len(g1.edges) + len(g2.nodes) + len(g2.edges))
    if _isomorphic(g1, g2):
        return GedResult(0.0, ged_max, 100.0, True, g1.mode)

    x, y = _Indexed(g1), _Indexed(g2)
    _, upper = _refine(x, y, _assignment_mapping(x, y, cfg), cfg)
    if max(x.n, y.n) <= cfg.exact_node_limit:
        distance, exact = _astar(x, y, cfg, upper), True
    else:
        distance, exact = upper, False
    return GedResult(distance, ged_max, normalized_similarity(distance, ged_max), exact, g1.mode)


def similarity(
    n1: Netlist,
    n2: Netlist,
    mode: GraphMode | str = GraphMode.ADJACENCY,
    cfg: GedCostConfig | None = None,
) -> GedResult:
    return graph_edit_distance(build_graph(n1, mode), build_graph(n2, mode), cfg)


def brute_force_ged(g1: CircuitGraph, g2: CircuitGraph, cfg: GedCostConfig | None = None) -> float:
    """Exhaustive edit distance for tiny graphs (at most 6 nodes each).

    Enumerates every injective partial mapping of g1's nodes into g2's nodes;
    unmapped nodes on either side are deleted or inserted. Intended as a test
    oracle for :func:`graph_edit_distance`.
    """
    cfg = cfg or GedCostConfig()
    if len(g1.nodes) > 6 or len(g2.nodes) > 6:
        raise SizeLimitExceeded("brute_force_ged supports at most 6 nodes per graph")
    ids1 = [i for i, _ in g1.nodes]
    ids2 = [i for i, _ in g2.nodes]
    lab1, lab2 = g1.labels, g2.labels
    e1 = [tuple(e) for e in g1.edges]
    e2 = {frozenset(e) for e in g2.edges}

    def cost_of(phi: dict[str, str | None]) -> float:
        total = 0.0
        for u in ids1:
            total += cfg.node_delete if phi[u] is None else cfg.substitute(lab1[u], lab2[phi[u]])
        images = {v for v in phi.values() if v is not None}
        total += cfg.node_insert * sum(1 for v in ids2 if v not in images)
        kept = set()
        for u, w in e1:
            pu, pw = phi[u], phi[w]
            image = frozenset((pu, pw)) if pu is not None and pw is not None else None
            if image in e2:
                kept.add(image)
            else:
                total += cfg.edge_delete
        total += cfg.edge_insert * len(e2 - kept)
        return total

    best = math.inf

    def walk(k: int, phi: dict[str, str | None], taken: set[str]) -> None:
        nonlocal best
        if k == len(ids1):
            best = min(best, cost_of(phi))
            return
        u = ids1[k]
        for v in [None, *ids2]:
            if v is not None and v in taken:
                continue
            phi[u] = v
            if v is not None:
                taken.add(v)
            walk(k + 1, phi, taken)
            if v is not None:
                taken.discard(v)
        del phi[u]

    walk(0, {}, set())
    return best
