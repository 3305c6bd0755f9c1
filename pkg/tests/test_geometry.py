import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import clip_by_sampling
from spicenet.geometry import BBox, ClusterConfig, Segment, cluster_segments, mask_segments
from spicenet.spice import ComponentKind

R = ComponentKind.RESISTOR


def test_bbox_validation():
    with pytest.raises(ValueError):
        BBox(R, 10, 0, 5, 10)
    with pytest.raises(ValueError):
        BBox(R, 0, 0, 5, 10, confidence=1.5)


def test_segment_rejects_zero_length():
    with pytest.raises(ValueError):
        Segment((1, 1), (1, 1))


def test_cluster_config_validation():
    with pytest.raises(ValueError):
        ClusterConfig(radius=0)


def test_mask_inside_removed():
    assert mask_segments([Segment((45, 50), (55, 50))], [BBox(R, 40, 40, 60, 60)]) == []


def test_mask_outside_unchanged():
    seg = Segment((0, 0), (30, 0))
    assert mask_segments([seg], [BBox(R, 40, 40, 60, 60)]) == [seg]


def test_mask_crossing_split():
    out = mask_segments([Segment((0, 50), (100, 50))], [BBox(R, 40, 40, 60, 60)])
    assert out == [Segment((0, 50), (40, 50)), Segment((60, 50), (100, 50))]


def test_mask_crossing_matches_sampling_oracle():
    seg = Segment((0, 50), (100, 50))
    ref = clip_by_sampling(seg.p1, seg.p2, (40, 40, 60, 60))
    out = mask_segments([seg], [BBox(R, 40, 40, 60, 60)])
    assert len(out) == len(ref)
    for s, (a, b) in zip(out, ref):
        assert math.dist(s.p1, a) < 0.01 and math.dist(s.p2, b) < 0.01


def test_mask_drops_short_remnants():
    # only 1 px sticks out on the left
    out = mask_segments([Segment((39, 50), (100, 50))], [BBox(R, 40, 40, 60, 60)])
    assert out == [Segment((60, 50), (100, 50))]


def test_mask_margin():
    out = mask_segments([Segment((0, 50), (100, 50))], [BBox(R, 40, 40, 60, 60)], margin=5)
    assert out == [Segment((0, 50), (35, 50)), Segment((65, 50), (100, 50))]
    with pytest.raises(ValueError):
        mask_segments([], [], margin=-1)


def test_mask_overlapping_boxes():
    boxes = [BBox(R, 20, 40, 50, 60), BBox(R, 40, 40, 70, 60)]
    assert mask_segments([Segment((0, 50), (100, 50))], boxes) == [
        Segment((0, 50), (20, 50)), Segment((70, 50), (100, 50)),
    ]


def _gap(g):
    return [Segment((0, 0), (100, 0)), Segment((100 + g, 0), (200 + g, 0))]


def test_cluster_small_gap():
    assert len(cluster_segments(_gap(10))) == 1


def test_cluster_large_gap():
    clusters = cluster_segments(_gap(45))
    assert [c.id for c in clusters] == [0, 1]
    assert clusters[0].segments == (Segment((0, 0), (100, 0)),)


def test_cluster_chain_transitive():
    segs = [Segment((0, 0), (70, 0)), Segment((100, 0), (140, 0)), Segment((170, 0), (200, 0))]
    (c,) = cluster_segments(segs)
    assert len(c.segments) == 3


def test_cluster_boundary_is_inclusive():
    assert len(cluster_segments(_gap(40))) == 1
    assert len(cluster_segments(_gap(40.5))) == 2


def test_body_proximity_merges_t_junction():
    segs = [Segment((0, 0), (200, 0)), Segment((100, 10), (100, 100))]
    assert len(cluster_segments(segs)) == 2
    assert len(cluster_segments(segs, ClusterConfig(merge_on_body_proximity=True))) == 1


def test_cluster_empty():
    assert cluster_segments([]) == []


# -- properties ---------------------------------------------------------------

coord = st.integers(0, 400)
segment = st.tuples(coord, coord, coord, coord).filter(lambda t: t[:2] != t[2:]).map(
    lambda t: Segment((t[0], t[1]), (t[2], t[3]))
)
segment_lists = st.lists(segment, max_size=25)


def _partition(clusters):
    return [sorted(s.key() for s in c.segments) for c in clusters]


@given(segment_lists, st.floats(1, 120))
def test_clustering_is_partition(segs, radius):
    clusters = cluster_segments(segs, ClusterConfig(radius))
    assert sorted(s.key() for c in clusters for s in c.segments) == sorted(s.key() for s in segs)
    assert [c.id for c in clusters] == list(range(len(clusters)))


@given(segment_lists, st.randoms(use_true_random=False))
def test_clustering_order_invariant(segs, rnd):
    shuffled = list(segs)
    rnd.shuffle(shuffled)
    flipped = [Segment(s.p2, s.p1) for s in shuffled]
    assert cluster_segments(shuffled) == cluster_segments(segs)
    assert _partition(cluster_segments(flipped)) == _partition(cluster_segments(segs))


@given(segment_lists, st.floats(1, 100), st.floats(0, 100))
def test_clustering_monotone_in_radius(segs, r, extra):
    assert len(cluster_segments(segs, ClusterConfig(r + extra))) <= len(cluster_segments(segs, ClusterConfig(r)))


@given(segment_lists, st.lists(st.tuples(coord, coord, st.integers(1, 80), st.integers(1, 80)), max_size=5),
       st.floats(0, 10))
def test_masking_never_lengthens(segs, raw_boxes, margin):
    boxes = [BBox(R, x, y, x + w, y + h) for x, y, w, h in raw_boxes]
    out = mask_segments(segs, boxes, margin)
    assert sum(s.length for s in out) <= sum(s.length for s in segs) + 1e-9


@given(segment, st.tuples(coord, coord, st.integers(1, 120), st.integers(1, 120)))
def test_masked_pieces_lie_outside(seg, raw):
    x, y, w, h = raw
    box = BBox(R, x, y, x + w, y + h)
    for s in mask_segments([seg], [box]):
        mid = s.point_at(0.5)
        assert not (x < mid[0] < x + w and y < mid[1] < y + h)


def test_random_masking_against_oracle():
    rng = random.Random(5)
    for _ in range(30):
        rect = (rng.uniform(50, 150), rng.uniform(50, 150))
        rect = (*rect, rect[0] + rng.uniform(10, 80), rect[1] + rng.uniform(10, 80))
        seg = Segment((rng.uniform(0, 300), rng.uniform(0, 300)), (rng.uniform(0, 300), rng.uniform(0, 300)))
        ref = [(a, b) for a, b in clip_by_sampling(seg.p1, seg.p2, rect) if math.dist(a, b) >= 2.5]
        out = mask_segments([seg], [BBox(R, *rect)])
        assert len(out) == len(ref)
        for s, (a, b) in zip(out, ref):
            assert math.dist(s.p1, a) <= 0.5 and math.dist(s.p2, b) <= 0.5
