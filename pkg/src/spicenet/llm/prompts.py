"""Prompt templates and netlist extraction from free-form model replies."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from ..annotation import Annotation
from ..lint import Diagnostic
from ..spice import Netlist, NetlistError, parse_component, parse_netlist, serialize_netlist

EXPERT_PREAMBLE = (
    "You are an expert analog designer. You will be provided with a schematic, "
    "your task is to follow the below instructions carefully:"
)

COMPONENT_ID_INSTRUCTIONS = (
    "To identify the NMOS and PMOS MOSFET, follow the instructions carefully. "
    "For NMOS, the arrow on the source terminal points outwards from the transistor. "
    "For PMOS, the arrow on the source terminal points inward towards the transistor.",
    "List all the components correctly.",
)

NETLIST_INSTRUCTIONS = (
    "List all the components which you can observe from the figure.",
    "MOSFET are 3 terminal devices with (drain, gate, source).",
    "For each component, look at the net number highlighted in red.",
    "To identify the source terminal of a MOSFET, choose the net highlighted in red "
    "which is nearest to the arrow of the MOSFET.",
    "Write a SPICE netlist.",
)

# Repair and generation wording below is our own.
REPAIR_SYSTEM = (
    "You are an expert analog designer reviewing a SPICE netlist that failed "
    "structural verification. Correct the netlist so that every reported error "
    "is resolved while keeping the intended circuit topology. Reply with the "
    "complete corrected netlist inside a ```spice code block."
)

GENERATION_SYSTEM = (
    "You are an expert analog designer. Write a flat SPICE netlist for the circuit "
    "the user describes. Use default component values, tie the ground net to 0, "
    "and reply with the netlist inside a ```spice code block."
)

ROLES = ("system", "user", "assistant")


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str
    image: str | None = None

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ValueError(f"unknown chat role {self.role!r}")
        if not self.content:
            raise ValueError("chat message content must be nonempty")

    def to_json(self) -> dict:
        return {"role": self.role, "content": self.content}


def _numbered(items: tuple[str, ...]) -> str:
    return "\n".join(f"{k}. {text}" for k, text in enumerate(items, start=1))


def build_component_id_prompt(image_ref: str = "schematic.png") -> list[ChatMessage]:
    system = f"{EXPERT_PREAMBLE}\n{_numbered(COMPONENT_ID_INSTRUCTIONS)}"
    return [
        ChatMessage("system", system),
        ChatMessage("user", f"Schematic image: {image_ref}", image=image_ref),
    ]


def net_legend(a: Annotation) -> str:
    lines = [f"Nets highlighted in red: {', '.join(f'N{c.id}' for c in a.clusters) or '(none)'}"]
    for c in a.clusters:
        x, y = c.centroid
        lines.append(f"N{c.id}: {len(c.segments)} wire segment(s), label at ({x:.0f}, {y:.0f})")
    return "\n".join(lines)


def build_netlist_prompt(a: Annotation) -> list[ChatMessage]:
    system = f"{EXPERT_PREAMBLE}\n{_numbered(NETLIST_INSTRUCTIONS)}"
    image = a.image_ref or "annotated_schematic.svg"
    user = f"Annotated schematic image: {image}\n{net_legend(a)}"
    return [ChatMessage("system", system), ChatMessage("user", user, image=image)]


def build_repair_prompt(n: Netlist, diags: list[Diagnostic]) -> list[ChatMessage]:
    report = json.dumps([d.to_json() for d in diags], indent=2, sort_keys=True)
    user = (
        "Netlist:\n```spice\n"
        f"{serialize_netlist(n)}"
        "```\n\n"
        "Verification diagnostics (JSON):\n"
        f"{report}\n\n"
        "Fix every diagnostic with severity \"Error\". Every net other than ground "
        "must connect at least two terminals and component names must be unique. "
        "Return the full corrected netlist."
    )
    return [ChatMessage("system", REPAIR_SYSTEM), ChatMessage("user", user)]


def build_generation_prompt(description: str) -> list[ChatMessage]:
    return [
        ChatMessage("system", GENERATION_SYSTEM),
        ChatMessage("user", f"Write a SPICE netlist for: {description}"),
    ]


class NoNetlistFound(ValueError):
    pass


_FENCE = re.compile(r"```[^\n`]*\n(.*?)```", re.S)
_FRAGMENT_SPLIT = re.compile(r":\s+|[.!?](?:\s+|$)")
_BULLET = re.compile(r"^(?:[-\u2022]\s+|\d+[.)]\s+)")
_PROSE_WORDS = frozenset(
    "is are was the and between connected with from this that which here there "
    "will would should can cannot please hope".split()
)


def _candidate_line(fragment: str, strict: bool) -> bool:
    """True when ``fragment`` reads as a SPICE component, comment or directive."""
    text = fragment.strip().rstrip(".,;")
    if not text:
        return False
    if text.startswith(".") and re.match(r"^\.[a-zA-Z]+", text):
        return True
    if text.startswith("*"):
        return not strict
    try:
        comp = parse_component(text)
    except NetlistError:
        return False
    if not strict:
        return True
    tokens = text.split()
    if not any(ch.isdigit() for ch in comp.name):
        return False
    return not any(t.lower() in _PROSE_WORDS for t in tokens)


def _longest_block(lines: list[str], strict: bool) -> list[str]:
    best: list[str] = []
    run: list[str] = []
    for line in lines:
        if _candidate_line(line, strict):
            run.append(line.strip().rstrip(",;") if strict else line.strip())
            if len(run) > len(best):
                best = list(run)
        else:
            run = []
    return best


def _has_component(lines: list[str]) -> bool:
    return any(not ln.startswith((".", "*")) for ln in lines)


def extract_netlist_from_response(text: str) -> Netlist:
    """Pull the SPICE netlist out of a model reply.

    Fenced code blocks win when one parses; otherwise the longest run of
    SPICE-looking lines (or sentence fragments) is used.
    """
    for block in _FENCE.findall(text):
        lines = [ln for ln in block.splitlines() if ln.strip()]
        try:
            netlist = parse_netlist("\n".join(lines))
        except NetlistError:
            good = _longest_block(lines, strict=False)
            if not _has_component(good):
                continue
            netlist = parse_netlist("\n".join(good))
        if netlist.components:
            return netlist

    fragments: list[str] = []
    for line in text.splitlines():
        stripped = _BULLET.sub("", line.strip())
        if _candidate_line(stripped, strict=True):
            fragments.append(stripped)
            continue
        pieces = [p for p in _FRAGMENT_SPLIT.split(stripped) if p.strip()]
        fragments.extend(pieces or [""])
    block = _longest_block(fragments, strict=True)
    if not _has_component(block):
        raise NoNetlistFound("no SPICE netlist found in response")
    return parse_netlist("\n".join(ln.rstrip(".") if not ln.startswith(".") else ln for ln in block))
