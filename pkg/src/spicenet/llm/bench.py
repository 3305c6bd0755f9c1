"""Benchmark harness: n sampled generations per design description."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from ..ged import similarity
from ..graph import GraphMode
from ..lint import Severity, lint
from ..spice import Netlist, NetlistError, parse_netlist
from .client import LlmClient, TransportError
from .prompts import NoNetlistFound, build_generation_prompt, extract_netlist_from_response

log = logging.getLogger(__name__)

DEFAULT_SAMPLES = 10
DEFAULT_THRESHOLD = 100.0
DEFAULT_WORKERS = 4
SAMPLING_TEMPERATURE = 1.0

CATEGORIES = ("Easy", "Medium", "Hard")

DEFAULT_SUITE: tuple[tuple[int, str], ...] = (
    (1, "Common-source amplifier"),
    (2, "2-stage common source amplifier with resistive load"),
    (3, "Common-drain amplifier"),
    (4, "common-gate amplifier"),
    (5, "Single-Stage RC Low-Pass Filter"),
    (6, "Source Degenerated Amplifier"),
    (7, "Current Mirror"),
    (8, "Common-source amplifier using active load"),
    (9, "Cascode amplifier using NMOS and resistive load"),
    (10, "1-stage differential amplifier"),
    (11, "Diode-connected Amplifier"),
    (12, "Buffer design using MOSFET"),
    (13, "2-input NAND gate"),
    (14, "2-stage amplifier with miller compensation"),
    (15, "SRAM cell with 6 transistors"),
    (16, "2-stage op-amp with differential inputs and single-handled output"),
    (17, "Fully Differential Amplifier with Common-Mode Feedback"),
    (18, "Cross-coupled LC oscillator"),
    (19, "Telescopic cascode operational amplifier"),
    (20, "Bandgap Reference Amplifier"),
)


def category_for(design_id: int) -> str:
    if 1 <= design_id <= 7:
        return "Easy"
    if 8 <= design_id <= 14:
        return "Medium"
    if 15 <= design_id <= 20:
        return "Hard"
    raise ValueError(f"design id {design_id} outside 1..20")


@dataclass(frozen=True)
class BenchmarkDesign:
    id: int
    description: str
    reference_netlist: Netlist | None = None

    def __post_init__(self) -> None:
        category_for(self.id)

    @property
    def category(self) -> str:
        return category_for(self.id)


def default_suite() -> list[BenchmarkDesign]:
    return [BenchmarkDesign(i, d) for i, d in DEFAULT_SUITE]


def load_suite(path: str | Path) -> list[BenchmarkDesign]:
    """Read ``[{id, description, reference_netlist?}]``; references are SPICE text."""
    designs = []
    for item in json.loads(Path(path).read_text(encoding="utf-8")):
        ref = item.get("reference_netlist")
        designs.append(BenchmarkDesign(int(item["id"]), item["description"], parse_netlist(ref) if ref else None))
    return designs


@dataclass
class BenchRow:
    id: int
    description: str
    category: str
    successes: int
    n: int
    failures: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "description": self.description,
            "category": self.category,
            "successes": self.successes,
            "n": self.n,
            "failures": self.failures,
        }


@dataclass
class BenchTable:
    rows: list[BenchRow]
    n: int
    threshold: float
    mode: GraphMode

    def category_counts(self) -> dict[str, int]:
        return {c: sum(1 for r in self.rows if r.category == c) for c in CATEGORIES}

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "similarity_threshold": self.threshold,
            "mode": self.mode.value,
            "categories": self.category_counts(),
            "rows": [r.to_json() for r in self.rows],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    def render_text(self) -> str:
        out = [f"ID, Circuit Description, Successes (out of {self.n})"]
        for cat in CATEGORIES:
            rows = [r for r in self.rows if r.category == cat]
            if rows:
                out.append(f"# {cat}")
                out.extend(f"{r.id}, {r.description}, {r.successes}" for r in rows)
        return "\n".join(out) + "\n"


def evaluate_sample(
    reply: str,
    reference: Netlist | None,
    threshold: float = DEFAULT_THRESHOLD,
    mode: GraphMode = GraphMode.ADJACENCY,
) -> str | None:
    """Failure reason for one generated reply, or None when it counts as a success."""
    try:
        netlist = extract_netlist_from_response(reply)
    except (NoNetlistFound, NetlistError) as exc:
        return f"extract: {exc}"
    errors = sorted({d.code.value for d in lint(netlist) if d.severity is Severity.ERROR})
    if errors:
        return f"lint: {', '.join(errors)}"
    if reference is not None:
        score = similarity(netlist, reference, mode).similarity
        if score < threshold:
            return f"similarity {score:.2f} < {threshold:g}"
    return None


def _run_design(design, client, n, threshold, mode) -> BenchRow:
    row = BenchRow(design.id, design.description, design.category, 0, n)
    messages = build_generation_prompt(design.description)
    for k in range(n):
        try:
            reply = client.complete(messages, temperature=SAMPLING_TEMPERATURE)
        except TransportError as exc:
            row.failures.append({"sample": k, "reason": f"transport: {exc}"})
            continue
        reason = evaluate_sample(reply, design.reference_netlist, threshold, mode)
        if reason is None:
            row.successes += 1
        else:
            row.failures.append({"sample": k, "reason": reason})
    return row


def run_benchmark(
    designs: list[BenchmarkDesign],
    client: LlmClient,
    n: int = DEFAULT_SAMPLES,
    similarity_threshold: float = DEFAULT_THRESHOLD,
    mode: GraphMode | str = GraphMode.ADJACENCY,
    workers: int = DEFAULT_WORKERS,
) -> BenchTable:
    """Score each design by how many of ``n`` samples are usable.

    A sample succeeds when a netlist can be extracted, lint reports no errors
    and, if the design has a reference, similarity reaches the threshold.
    Designs run on a thread pool unless the client is single-consumer.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    mode = GraphMode(mode)
    if workers > 1 and client.concurrent_safe:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda d: _run_design(d, client, n, similarity_threshold, mode), designs))
    else:
        rows = [_run_design(d, client, n, similarity_threshold, mode) for d in designs]
    return BenchTable(rows, n, similarity_threshold, mode)
