"""Annotated schematics: terminal anchors, net bindings, JSON/SVG export.

Terminal anchor templates are heuristics on the box shape; nothing here looks
at pixels. MOSFET source/drain disambiguation is left to the LLM prompt.
"""

from __future__ import annotations

import json
import math
import xml.etree.ElementTree as ET
from collections.abc import Iterable
from dataclasses import dataclass, field

from .geometry import (
    BBox,
    ClusterConfig,
    NetCluster,
    Point,
    Segment,
    cluster_segments,
    mask_segments,
)
from .lint import Code, DEFAULT_SEVERITY, Diagnostic
from .spice import Component, ComponentKind, Netlist, Polarity

DEFAULT_MAX_BIND_DIST = 60.0

# Class order of the 12-class detector export ("class cx cy w h" lines).
DETECTOR_CLASSES: tuple[ComponentKind, ...] = (
    ComponentKind.AC_SOURCE,
    ComponentKind.BJT,
    ComponentKind.BATTERY,
    ComponentKind.CAPACITOR,
    ComponentKind.DC_SOURCE,
    ComponentKind.DIODE,
    ComponentKind.GROUND,
    ComponentKind.INDUCTOR,
    ComponentKind.MOSFET,
    ComponentKind.RESISTOR,
    ComponentKind.CURRENT_SOURCE,
    ComponentKind.VOLTAGE_SOURCE,
)

_CLASS_ALIASES: dict[str, tuple[ComponentKind, Polarity | None]] = {
    "nmos": (ComponentKind.MOSFET, Polarity.N),
    "pmos": (ComponentKind.MOSFET, Polarity.P),
    "npn": (ComponentKind.BJT, Polarity.N),
    "pnp": (ComponentKind.BJT, Polarity.P),
    "gnd": (ComponentKind.GROUND, None),
    "acsource": (ComponentKind.AC_SOURCE, None),
    "dcsource": (ComponentKind.DC_SOURCE, None),
    "currentsource": (ComponentKind.CURRENT_SOURCE, None),
    "voltagesource": (ComponentKind.VOLTAGE_SOURCE, None),
}


class NoTemplate(ValueError):
    pass


class UnboundTerminals(ValueError):
    def __init__(self, missing: list[tuple[str, str]]):
        self.missing = missing
        pairs = ", ".join(f"{box}.{role}" for box, role in missing)
        super().__init__(f"unbound terminals: {pairs}")


def parse_class(name: str | int) -> tuple[ComponentKind, Polarity | None]:
    """Map a detector class label (or class index) to a kind and optional polarity."""
    if isinstance(name, int):
        return DETECTOR_CLASSES[name], None
    key = "".join(ch for ch in name.lower() if ch.isalnum())
    if key.isdigit():
        return DETECTOR_CLASSES[int(key)], None
    if key in _CLASS_ALIASES:
        return _CLASS_ALIASES[key]
    for kind in ComponentKind:
        if key == kind.value.lower():
            return kind, None
    raise ValueError(f"unknown detector class {name!r}")


def boxes_from_json(items: list[dict]) -> list[BBox]:
    """Read ``[{class, bbox: [x_min, y_min, x_max, y_max], confidence}, ...]``."""
    boxes = []
    for k, item in enumerate(items):
        kind, pol = parse_class(item["class"])
        pol = Polarity(item["polarity"]) if item.get("polarity") else pol
        x0, y0, x1, y1 = item["bbox"]
        boxes.append(BBox(kind, x0, y0, x1, y1, item.get("confidence", 1.0), str(item.get("id", f"b{k}")), pol))
    return boxes


def boxes_from_yolo(text: str, width: int, height: int) -> list[BBox]:
    """Convert normalized ``class cx cy w h [conf]`` lines to pixel boxes."""
    boxes = []
    for line in text.splitlines():
        parts = line.split()
        if not parts:
            continue
        cls = int(parts[0])
        cx, cy, w, h = (float(v) for v in parts[1:5])
        conf = float(parts[5]) if len(parts) > 5 else 1.0
        kind, pol = parse_class(cls)
        boxes.append(BBox(
            kind,
            (cx - w / 2) * width, (cy - h / 2) * height,
            (cx + w / 2) * width, (cy + h / 2) * height,
            conf, f"b{len(boxes)}", pol,
        ))
    return boxes


def segments_from_json(items: list[dict]) -> list[Segment]:
    return [Segment((s["x1"], s["y1"]), (s["x2"], s["y2"])) for s in items]


def segments_to_json(segments: Iterable[Segment]) -> list[dict]:
    return [{"x1": s.p1[0], "y1": s.p1[1], "x2": s.p2[0], "y2": s.p2[1]} for s in segments]


def terminal_anchors(b: BBox) -> list[tuple[str, Point]]:
    """Pixel anchor for each terminal of the component in ``b``.

    Two-terminal parts anchor at the midpoints of the two shorter sides
    (square boxes count as horizontal). Transistors put the control terminal
    on one long side and the other two at the ends of the opposite side.
    Ground has a single anchor at top-center.
    """
    x0, y0, x1, y1 = b.as_list()
    cx, cy = b.center
    kind = b.kind
    if kind is ComponentKind.GROUND:
        return [("gnd", (cx, y0))]
    if kind in (ComponentKind.MOSFET, ComponentKind.BJT):
        names = ("drain", "gate", "source") if kind is ComponentKind.MOSFET else ("collector", "base", "emitter")
        if b.height >= b.width:
            return [(names[0], (x1, y0)), (names[1], (x0, cy)), (names[2], (x1, y1))]
        return [(names[0], (x0, y0)), (names[1], (cx, y1)), (names[2], (x1, y0))]
    if len(kind.roles) == 2:
        if b.width >= b.height:
            return [("pos", (x0, cy)), ("neg", (x1, cy))]
        return [("pos", (cx, y0)), ("neg", (cx, y1))]
    raise NoTemplate(f"no terminal template for {kind.value}")


@dataclass
class Annotation:
    """Everything known about one schematic image after the geometry stage.

    ``bindings`` maps box id -> terminal role -> cluster id (None when unbound).
    """

    image_ref: str = ""
    boxes: list[BBox] = field(default_factory=list)
    clusters: list[NetCluster] = field(default_factory=list)
    bindings: dict[str, dict[str, int | None]] = field(default_factory=dict)

    def validate(self) -> None:
        ids = {c.id for c in self.clusters}
        for box_id, roles in self.bindings.items():
            for role, cid in roles.items():
                if cid is not None and cid not in ids:
                    raise ValueError(f"{box_id}.{role} bound to unknown cluster {cid}")
        for b in self.boxes:
            missing = {r for r, _ in terminal_anchors(b)} - set(self.bindings.get(b.id, {}))
            if missing:
                raise ValueError(f"box {b.id} lacks binding entries for {sorted(missing)}")

    def unbound(self) -> list[tuple[str, str]]:
        return [
            (box_id, role)
            for box_id, roles in self.bindings.items()
            for role, cid in roles.items()
            if cid is None
        ]

    def to_json(self) -> dict:
        return {
            "image_ref": self.image_ref,
            "boxes": [
                {
                    "id": b.id,
                    "class": b.kind.value,
                    "polarity": b.polarity.value if b.polarity else None,
                    "bbox": b.as_list(),
                    "confidence": b.confidence,
                }
                for b in self.boxes
            ],
            "clusters": [
                {"id": c.id, "segments": segments_to_json(c.segments)} for c in self.clusters
            ],
            "bindings": {box: dict(roles) for box, roles in self.bindings.items()},
        }

    @classmethod
    def from_json(cls, obj: dict | str) -> Annotation:
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(
            image_ref=obj.get("image_ref", ""),
            boxes=boxes_from_json(obj.get("boxes", [])),
            clusters=[
                NetCluster(c["id"], tuple(segments_from_json(c["segments"])))
                for c in obj.get("clusters", [])
            ],
            bindings={box: dict(roles) for box, roles in obj.get("bindings", {}).items()},
        )


def bind_terminals(
    boxes: list[BBox],
    clusters: list[NetCluster],
    max_dist: float = DEFAULT_MAX_BIND_DIST,
) -> dict[str, dict[str, int | None]]:
    """Bind each terminal anchor to the cluster with the nearest endpoint.

    Anchors farther than ``max_dist`` from every endpoint stay unbound (None);
    equal distances go to the lower cluster id.
    """
    bindings: dict[str, dict[str, int | None]] = {}
    for b in boxes:
        roles: dict[str, int | None] = {}
        for role, anchor in terminal_anchors(b):
            best: tuple[float, int] | None = None
            for c in clusters:
                d = min(math.dist(anchor, p) for p in c.endpoints)
                if d <= max_dist and (best is None or (d, c.id) < best):
                    best = (d, c.id)
            roles[role] = best[1] if best else None
        bindings[b.id] = roles
    return bindings


def annotate(
    image_ref: str,
    boxes: list[BBox],
    segments: list[Segment],
    cluster_cfg: ClusterConfig | None = None,
    margin: float = 0.0,
    max_dist: float = DEFAULT_MAX_BIND_DIST,
) -> Annotation:
    """Mask, cluster and bind in one step."""
    wires = mask_segments(segments, boxes, margin)
    clusters = cluster_segments(wires, cluster_cfg)
    return Annotation(image_ref, list(boxes), clusters, bind_terminals(boxes, clusters, max_dist))


def lint_annotation(a: Annotation) -> list[Diagnostic]:
    return [
        Diagnostic(
            Code.UNBOUND_TERMINAL, DEFAULT_SEVERITY[Code.UNBOUND_TERMINAL], box_id,
            f"terminal {role} of box {box_id} is not near any net",
            {"box": box_id, "role": role},
        )
        for box_id, role in sorted(a.unbound())
    ]


_NAME_PREFIX = {
    ComponentKind.RESISTOR: "R",
    ComponentKind.CAPACITOR: "C",
    ComponentKind.INDUCTOR: "L",
    ComponentKind.MOSFET: "M",
    ComponentKind.BJT: "Q",
    ComponentKind.DIODE: "D",
    ComponentKind.VOLTAGE_SOURCE: "V",
    ComponentKind.CURRENT_SOURCE: "I",
    ComponentKind.AC_SOURCE: "VAC",
    ComponentKind.DC_SOURCE: "VDC",
    ComponentKind.BATTERY: "VBAT",
}
# keeps the source flavour recoverable when the netlist is parsed back
_SOURCE_VALUE = {ComponentKind.AC_SOURCE: "AC 1", ComponentKind.DC_SOURCE: "DC 1"}


def _model_for(b: BBox) -> str | None:
    if b.kind is ComponentKind.MOSFET:
        return {Polarity.N: "NMOS", Polarity.P: "PMOS"}.get(b.polarity, "UNKNOWN")
    if b.kind is ComponentKind.BJT:
        return {Polarity.N: "NPN", Polarity.P: "PNP"}.get(b.polarity, "UNKNOWN")
    return None


def annotation_to_netlist(a: Annotation) -> Netlist:
    """Deterministic netlist from bindings: cluster k becomes net ``Nk``, ground clusters ``0``."""
    missing = [
        (b.id, role)
        for b in a.boxes
        for role, _ in terminal_anchors(b)
        if a.bindings.get(b.id, {}).get(role) is None
    ]
    if missing:
        raise UnboundTerminals(missing)

    ground = {a.bindings[b.id]["gnd"] for b in a.boxes if b.kind is ComponentKind.GROUND}

    def net(cid: int) -> str:
        return "0" if cid in ground else f"N{cid}"

    counters: dict[str, int] = {}
    comps = []
    for b in a.boxes:
        if b.kind is ComponentKind.GROUND:
            continue
        prefix = _NAME_PREFIX[b.kind]
        counters[prefix] = counters.get(prefix, 0) + 1
        roles = a.bindings[b.id]
        if b.kind is ComponentKind.MOSFET:
            terms = [(r, net(roles[r])) for r in ("drain", "gate", "source")]
            terms.append(("bulk", terms[2][1]))
        else:
            terms = [(r, net(roles[r])) for r in b.kind.roles]
        comps.append(Component(
            f"{prefix}{counters[prefix]}", b.kind, tuple(terms),
            value=_SOURCE_VALUE.get(b.kind), model=_model_for(b),
        ))
    return Netlist(tuple(comps))


KIND_COLORS = {
    ComponentKind.RESISTOR: "#1f77b4",
    ComponentKind.CAPACITOR: "#ff7f0e",
    ComponentKind.INDUCTOR: "#2ca02c",
    ComponentKind.MOSFET: "#9467bd",
    ComponentKind.BJT: "#8c564b",
    ComponentKind.DIODE: "#e377c2",
    ComponentKind.VOLTAGE_SOURCE: "#7f7f7f",
    ComponentKind.CURRENT_SOURCE: "#bcbd22",
    ComponentKind.AC_SOURCE: "#17becf",
    ComponentKind.DC_SOURCE: "#393b79",
    ComponentKind.BATTERY: "#637939",
    ComponentKind.GROUND: "#000000",
}


def _cluster_color(cid: int) -> str:
    # golden-angle hue walk; red is reserved for labels
    hue = (60 + cid * 137.508) % 300 + 30
    return f"hsl({hue:.1f},70%,45%)"


def _fmt(v: float) -> str:
    return f"{v:g}"


def export_svg(a: Annotation) -> str:
    xs = [b.x_max for b in a.boxes] + [p[0] for c in a.clusters for p in c.endpoints]
    ys = [b.y_max for b in a.boxes] + [p[1] for c in a.clusters for p in c.endpoints]
    width = math.ceil(max(xs, default=0) + 20)
    height = math.ceil(max(ys, default=0) + 20)
    svg = ET.Element("svg", {
        "xmlns": "http://www.w3.org/2000/svg",
        "width": str(width), "height": str(height),
        "viewBox": f"0 0 {width} {height}",
    })
    if a.image_ref:
        ET.SubElement(svg, "image", {"href": a.image_ref, "x": "0", "y": "0", "width": str(width), "height": str(height)})
    boxes = ET.SubElement(svg, "g", {"id": "components"})
    for b in a.boxes:
        ET.SubElement(boxes, "rect", {
            "x": _fmt(b.x_min), "y": _fmt(b.y_min),
            "width": _fmt(b.width), "height": _fmt(b.height),
            "fill": "none", "stroke": KIND_COLORS[b.kind], "stroke-width": "2",
            "data-id": b.id, "data-class": b.kind.value,
        })
    nets = ET.SubElement(svg, "g", {"id": "nets"})
    for c in a.clusters:
        group = ET.SubElement(nets, "g", {"data-net": f"N{c.id}"})
        for s in c.segments:
            ET.SubElement(group, "polyline", {
                "points": f"{_fmt(s.p1[0])},{_fmt(s.p1[1])} {_fmt(s.p2[0])},{_fmt(s.p2[1])}",
                "fill": "none", "stroke": _cluster_color(c.id), "stroke-width": "3",
            })
    labels = ET.SubElement(svg, "g", {"id": "labels"})
    for c in a.clusters:
        x, y = c.centroid
        text = ET.SubElement(labels, "text", {
            "x": _fmt(round(x, 2)), "y": _fmt(round(y, 2)),
            "fill": "red", "font-size": "14", "font-family": "monospace",
        })
        text.text = f"N{c.id}"
    return ET.tostring(svg, encoding="unicode") + "\n"


def export_annotation(a: Annotation, format: str = "json") -> bytes:
    if format == "json":
        return (json.dumps(a.to_json(), indent=2, sort_keys=True) + "\n").encode()
    if format == "svg":
        return export_svg(a).encode()
    raise ValueError(f"unknown annotation format {format!r}")
