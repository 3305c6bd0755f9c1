"""Pixel-space geometry for detector output: boxes, wire segments, net clusters."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from networkx.utils import UnionFind
from scipy.spatial import cKDTree

from .spice import ComponentKind, Polarity

Point = tuple[float, float]

DEFAULT_RADIUS = 40.0
MIN_CLIPPED_LENGTH = 2.0


@dataclass(frozen=True)
class BBox:
    """Axis-aligned detection box in image coordinates (y grows downward)."""

    kind: ComponentKind
    x_min: float
    y_min: float
    x_max: float
    y_max: float
    confidence: float = 1.0
    id: str = ""
    polarity: Polarity | None = None

    def __post_init__(self) -> None:
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError(f"degenerate box {self.id!r}: {self.as_list()}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def center(self) -> Point:
        return ((self.x_min + self.x_max) / 2, (self.y_min + self.y_max) / 2)

    def as_list(self) -> list[float]:
        return [self.x_min, self.y_min, self.x_max, self.y_max]

    def inflate(self, margin: float) -> tuple[float, float, float, float]:
        return (self.x_min - margin, self.y_min - margin, self.x_max + margin, self.y_max + margin)


@dataclass(frozen=True)
class Segment:
    p1: Point
    p2: Point

    def __post_init__(self) -> None:
        if tuple(self.p1) == tuple(self.p2):
            raise ValueError(f"zero-length segment at {self.p1}")
        object.__setattr__(self, "p1", (float(self.p1[0]), float(self.p1[1])))
        object.__setattr__(self, "p2", (float(self.p2[0]), float(self.p2[1])))

    @property
    def length(self) -> float:
        return math.dist(self.p1, self.p2)

    @property
    def endpoints(self) -> tuple[Point, Point]:
        return (self.p1, self.p2)

    def key(self) -> tuple[Point, Point]:
        """Orientation-free sort key."""
        return (min(self.p1, self.p2), max(self.p1, self.p2))

    def order_key(self) -> tuple[Point, Point, Point]:
        """Total order: orientation-free key, then orientation."""
        return (*self.key(), self.p1)

    def point_at(self, t: float) -> Point:
        return (self.p1[0] + t * (self.p2[0] - self.p1[0]), self.p1[1] + t * (self.p2[1] - self.p1[1]))

    def distance_to(self, p: Point) -> float:
        (x1, y1), (x2, y2) = self.p1, self.p2
        dx, dy = x2 - x1, y2 - y1
        t = ((p[0] - x1) * dx + (p[1] - y1) * dy) / (dx * dx + dy * dy)
        return math.dist(p, self.point_at(min(1.0, max(0.0, t))))


@dataclass(frozen=True)
class NetCluster:
    id: int
    segments: tuple[Segment, ...] = field(default_factory=tuple)

    @property
    def endpoints(self) -> tuple[Point, ...]:
        return tuple(sorted({p for s in self.segments for p in s.endpoints}))

    @property
    def centroid(self) -> Point:
        pts = self.endpoints
        return (sum(p[0] for p in pts) / len(pts), sum(p[1] for p in pts) / len(pts))


@dataclass(frozen=True)
class ClusterConfig:
    radius: float = DEFAULT_RADIUS
    merge_on_body_proximity: bool = False

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise ValueError("radius must be > 0")


def _clip_interval(seg: Segment, rect: tuple[float, float, float, float]) -> tuple[float, float] | None:
    """Liang-Barsky: parameter range of ``seg`` inside the closed rectangle, or None."""
    x_min, y_min, x_max, y_max = rect
    (x1, y1), (x2, y2) = seg.p1, seg.p2
    dx, dy = x2 - x1, y2 - y1
    t0, t1 = 0.0, 1.0
    for p, q in ((-dx, x1 - x_min), (dx, x_max - x1), (-dy, y1 - y_min), (dy, y_max - y1)):
        if p == 0:
            if q < 0:
                return None
            continue
        r = q / p
        if p < 0:
            t0 = max(t0, r)
        else:
            t1 = min(t1, r)
        if t0 > t1:
            return None
    return (t0, t1)


def mask_segments(segments: list[Segment], boxes: list[BBox], margin: float = 0.0) -> list[Segment]:
    """Remove the parts of wire segments that fall inside component boxes.

    Segments crossing a box are split at its boundary; leftover pieces shorter
    than 2 px are discarded.
    """
    if margin < 0:
        raise ValueError("margin must be >= 0")
    rects = [b.inflate(margin) for b in boxes]
    out: list[Segment] = []
    for seg in segments:
        cuts = sorted(iv for r in rects if (iv := _clip_interval(seg, r)) is not None)
        if not cuts:
            out.append(seg)
            continue
        keep: list[tuple[float, float]] = []
        cursor = 0.0
        for a, b in cuts:
            if a > cursor:
                keep.append((cursor, a))
            cursor = max(cursor, b)
        if cursor < 1.0:
            keep.append((cursor, 1.0))
        for a, b in keep:
            if (b - a) * seg.length >= MIN_CLIPPED_LENGTH:
                out.append(Segment(seg.point_at(a), seg.point_at(b)))
    return out


def cluster_segments(segments: list[Segment], cfg: ClusterConfig | None = None) -> list[NetCluster]:
    """Group segments into nets by endpoint proximity (union-find, transitive).

    Cluster ids are dense and assigned in order of each cluster's smallest
    endpoint, so the result does not depend on input order.
    """
    cfg = cfg or ClusterConfig()
    segs = sorted(segments, key=Segment.order_key)
    if not segs:
        return []
    uf = UnionFind(range(len(segs)))
    points = [p for s in segs for p in s.endpoints]
    owner = [i for i in range(len(segs)) for _ in range(2)]
    for a, b in cKDTree(points).query_pairs(cfg.radius):
        uf.union(owner[a], owner[b])
    if cfg.merge_on_body_proximity:
        for i, s in enumerate(segs):
            for j, t in enumerate(segs):
                if i != j and any(t.distance_to(p) <= cfg.radius for p in s.endpoints):
                    uf.union(i, j)

    groups = [sorted((segs[i] for i in grp), key=Segment.order_key) for grp in uf.to_sets()]
    groups.sort(key=lambda g: min(p for s in g for p in s.endpoints))
    return [NetCluster(k, tuple(g)) for k, g in enumerate(groups)]
