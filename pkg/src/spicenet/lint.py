"""Structural checks on parsed netlists.

The checker never modifies its input; fixing findings is left to the repair
loop. Beyond floating nets the rule set is a conservative extension: missing
ground, duplicate names, disconnected islands and fully shorted parts.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import networkx as nx

from .spice import DEFAULT_GROUND_ALIASES, Netlist


class Code(str, Enum):
    FLOATING_NET = "FloatingNet"
    NO_GROUND = "NoGround"
    DUPLICATE_NAME = "DuplicateName"
    DISCONNECTED_SUBCIRCUIT = "DisconnectedSubcircuit"
    ALL_TERMINALS_SHORTED = "AllTerminalsShorted"
    UNBOUND_TERMINAL = "UnboundTerminal"


class Severity(str, Enum):
    ERROR = "Error"
    WARNING = "Warning"


_CODE_ORDER = {c: i for i, c in enumerate(Code)}
_SEVERITY_ORDER = {Severity.ERROR: 0, Severity.WARNING: 1}

DEFAULT_SEVERITY = {
    Code.FLOATING_NET: Severity.ERROR,
    Code.DUPLICATE_NAME: Severity.ERROR,
    Code.NO_GROUND: Severity.WARNING,
    Code.DISCONNECTED_SUBCIRCUIT: Severity.WARNING,
    Code.ALL_TERMINALS_SHORTED: Severity.WARNING,
    Code.UNBOUND_TERMINAL: Severity.WARNING,
}


@dataclass(frozen=True)
class Diagnostic:
    code: Code
    severity: Severity
    subject: str | None
    message: str
    payload: dict[str, Any] = field(default_factory=dict, compare=False, hash=False)

    def to_json(self) -> dict[str, Any]:
        return {
            "code": self.code.value,
            "severity": self.severity.value,
            "subject": self.subject,
            "message": self.message,
            "payload": self.payload,
        }

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> Diagnostic:
        return cls(Code(obj["code"]), Severity(obj["severity"]), obj["subject"], obj["message"], obj.get("payload", {}))

    def sort_key(self) -> tuple:
        return (_CODE_ORDER[self.code], self.subject or "")


@dataclass(frozen=True)
class LintConfig:
    ground_aliases: frozenset[str] = DEFAULT_GROUND_ALIASES
    treat_no_ground_as: Severity = Severity.WARNING
    connectivity_check: bool = True
    exempt_ground_from_floating: bool = True

    def __post_init__(self) -> None:
        if not self.ground_aliases:
            raise ValueError("ground_aliases must be nonempty")
        object.__setattr__(self, "ground_aliases", frozenset(self.ground_aliases))

    def is_ground(self, net: str) -> bool:
        return net.upper() in {a.upper() for a in self.ground_aliases}


def lint(n: Netlist, cfg: LintConfig | None = None) -> list[Diagnostic]:
    """Run every rule and return diagnostics ordered by (code, subject)."""
    cfg = cfg or LintConfig()
    diags: list[Diagnostic] = []
    sev = dict(DEFAULT_SEVERITY)
    sev[Code.NO_GROUND] = Severity(cfg.treat_no_ground_as)

    attachments: dict[str, list[tuple[str, str]]] = {}
    for c in n.components:
        for role, net in c.terminals:
            # a MOSFET's implicit bulk tie to source is not a second attachment
            if role == "bulk" and net == c.net("source"):
                continue
            attachments.setdefault(net, []).append((c.name, role))

    for net, users in attachments.items():
        if len(users) != 1:
            continue
        if cfg.exempt_ground_from_floating and cfg.is_ground(net):
            continue
        comp, role = users[0]
        diags.append(Diagnostic(
            Code.FLOATING_NET, sev[Code.FLOATING_NET], net,
            f"net {net!r} is attached only to {comp}.{role}",
            {"net": net, "component": comp, "role": role},
        ))

    if n.components and not any(cfg.is_ground(net) for net in attachments):
        diags.append(Diagnostic(
            Code.NO_GROUND, sev[Code.NO_GROUND], None,
            f"no net matches the ground aliases {sorted(cfg.ground_aliases)}",
            {"ground_aliases": sorted(cfg.ground_aliases)},
        ))

    names = Counter(c.name.upper() for c in n.components)
    for name, k in names.items():
        if k > 1:
            diags.append(Diagnostic(
                Code.DUPLICATE_NAME, sev[Code.DUPLICATE_NAME], name,
                f"component name {name} is used {k} times",
                {"count": k},
            ))

    shorted: set[int] = set()
    for idx, c in enumerate(n.components):
        if len(set(c.nets)) == 1:
            shorted.add(idx)
            diags.append(Diagnostic(
                Code.ALL_TERMINALS_SHORTED, sev[Code.ALL_TERMINALS_SHORTED], c.name.upper(),
                f"all terminals of {c.name} connect to net {c.nets[0]!r}",
                {"net": c.nets[0]},
            ))

    if cfg.connectivity_check:
        islands = _islands(n, skip=shorted)
        if len(islands) >= 2:
            subject = islands[1][0]
            diags.append(Diagnostic(
                Code.DISCONNECTED_SUBCIRCUIT, sev[Code.DISCONNECTED_SUBCIRCUIT], subject,
                f"netlist splits into {len(islands)} unconnected parts",
                {"islands": islands},
            ))

    diags.sort(key=Diagnostic.sort_key)
    return diags


def _islands(n: Netlist, skip: set[int]) -> list[list[str]]:
    """Connected groups of component names; shorted parts connect nothing and are skipped."""
    g = nx.Graph()
    for idx, c in enumerate(n.components):
        if idx in skip:
            continue
        g.add_node(("c", idx))
        for net in c.nets:
            g.add_edge(("c", idx), ("n", net))
    groups = []
    for cc in nx.connected_components(g):
        names = sorted(n.components[i].name.upper() for kind, i in cc if kind == "c")
        if names:
            groups.append(names)
    # sorted by name so the report does not depend on line order
    return sorted(groups)


def has_errors(diags: list[Diagnostic]) -> bool:
    return any(d.severity is Severity.ERROR for d in diags)


def render_report(diags: list[Diagnostic], format: str = "text") -> str:
    """Render diagnostics as a JSON array or as one text line per finding.

    Text output lists errors before warnings; JSON keeps lint order.
    """
    if format == "json":
        return json.dumps([d.to_json() for d in diags], sort_keys=True)
    if format != "text":
        raise ValueError(f"unknown report format {format!r}")
    ordered = sorted(diags, key=lambda d: (_SEVERITY_ORDER[d.severity], d.sort_key()))
    return "".join(f"{d.severity.value.lower()}: {d.code.value} [{d.subject or '-'}] {d.message}\n" for d in ordered)
