"""Closed-loop verify-and-repair: lint, ask the model for a fix, re-lint."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

from ..annotation import Annotation
from ..lint import Diagnostic, LintConfig, has_errors, lint
from ..spice import Netlist, NetlistError, serialize_netlist
from .client import LlmClient, TransportError
from .prompts import NoNetlistFound, build_netlist_prompt, build_repair_prompt, extract_netlist_from_response

DEFAULT_MAX_ITERS = 3


class RepairStatus(str, Enum):
    CLEAN = "Clean"
    FIXED = "FixedAfter"
    GAVE_UP = "GaveUp"


@dataclass
class RepairIteration:
    netlist: str
    diagnostics: list[Diagnostic]
    error: str | None = None

    def to_json(self) -> dict:
        return {
            "netlist": self.netlist,
            "diagnostics": [d.to_json() for d in self.diagnostics],
            "error": self.error,
        }


@dataclass
class RepairTrace:
    iterations: list[RepairIteration] = field(default_factory=list)
    status: RepairStatus = RepairStatus.CLEAN
    llm_calls: int = 0

    @property
    def label(self) -> str:
        if self.status is RepairStatus.FIXED:
            return f"FixedAfter({self.llm_calls})"
        return self.status.value

    def to_json(self) -> dict:
        return {
            "status": self.label,
            "llm_calls": self.llm_calls,
            "iterations": [it.to_json() for it in self.iterations],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"


class RepairAborted(RuntimeError):
    def __init__(self, message: str, trace: RepairTrace):
        super().__init__(message)
        self.trace = trace


def repair_loop(
    client: LlmClient,
    initial: Netlist,
    max_iters: int = DEFAULT_MAX_ITERS,
    lint_config: LintConfig | None = None,
    temperature: float = 0.0,
) -> tuple[Netlist, RepairTrace]:
    """Re-prompt until no Error diagnostics remain or ``max_iters`` calls were spent.

    A reply that contains no usable netlist counts as a spent call; the
    previous netlist stays current.
    """
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    current = initial
    diags = lint(current, lint_config)
    trace = RepairTrace([RepairIteration(serialize_netlist(current), diags)])
    while has_errors(diags) and trace.llm_calls < max_iters:
        messages = build_repair_prompt(current, diags)
        try:
            reply = client.complete(messages, temperature=temperature)
        except TransportError as exc:
            trace.status = RepairStatus.GAVE_UP
            raise RepairAborted(f"transport failure during repair: {exc}", trace) from exc
        trace.llm_calls += 1
        try:
            current = extract_netlist_from_response(reply)
        except (NoNetlistFound, NetlistError) as exc:
            trace.iterations.append(RepairIteration(reply, diags, error=str(exc)))
            continue
        diags = lint(current, lint_config)
        trace.iterations.append(RepairIteration(serialize_netlist(current), diags))

    if not has_errors(diags):
        trace.status = RepairStatus.CLEAN if trace.llm_calls == 0 else RepairStatus.FIXED
    else:
        trace.status = RepairStatus.GAVE_UP
    return current, trace


def generate_from_annotation(
    client: LlmClient,
    annotation: Annotation,
    max_iters: int = DEFAULT_MAX_ITERS,
    lint_config: LintConfig | None = None,
) -> tuple[Netlist, RepairTrace]:
    """Prompt with the annotated schematic, then run the repair loop on the reply."""
    reply = client.complete(build_netlist_prompt(annotation), temperature=0.0)
    netlist = extract_netlist_from_response(reply)
    return repair_loop(client, netlist, max_iters, lint_config)
