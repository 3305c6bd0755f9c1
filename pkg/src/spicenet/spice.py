"""Flat SPICE netlist model: parsing, serialization, canonical form and statistics."""

from __future__ import annotations

import re
from collections.abc import Iterable
from dataclasses import dataclass, replace
from enum import Enum

DEFAULT_GROUND_ALIASES = frozenset({"0", "GND"})


class NetlistError(ValueError):
    """Base class for netlist parse errors."""

    def __init__(self, message: str, line_no: int | None = None, line: str | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no
        self.line = line


class UnknownPrefix(NetlistError):
    pass


class ArityError(NetlistError):
    pass


class UnsupportedDirective(NetlistError):
    pass


class ComponentKind(str, Enum):
    """Component families, aligned with the 12 detector classes.

    Declaration order is the canonical sort order used by :func:`canonicalize`.
    """

    RESISTOR = "Resistor"
    CAPACITOR = "Capacitor"
    INDUCTOR = "Inductor"
    MOSFET = "Mosfet"
    BJT = "Bjt"
    DIODE = "Diode"
    VOLTAGE_SOURCE = "VoltageSource"
    CURRENT_SOURCE = "CurrentSource"
    AC_SOURCE = "AcSource"
    DC_SOURCE = "DcSource"
    BATTERY = "Battery"
    GROUND = "Ground"

    @property
    def order(self) -> int:
        return _KIND_ORDER[self]

    @property
    def roles(self) -> tuple[str, ...]:
        """Terminal roles in SPICE node order (MOSFET includes bulk)."""
        return TERMINAL_ROLES[self]


_KIND_ORDER = {k: i for i, k in enumerate(ComponentKind)}


class Polarity(str, Enum):
    N = "N"
    P = "P"
    UNKNOWN = "UNKNOWN"


TWO_TERMINAL = ("pos", "neg")
MOSFET_ROLES = ("drain", "gate", "source", "bulk")
BJT_ROLES = ("collector", "base", "emitter")

TERMINAL_ROLES: dict[ComponentKind, tuple[str, ...]] = {
    ComponentKind.RESISTOR: TWO_TERMINAL,
    ComponentKind.CAPACITOR: TWO_TERMINAL,
    ComponentKind.INDUCTOR: TWO_TERMINAL,
    ComponentKind.MOSFET: MOSFET_ROLES,
    ComponentKind.BJT: BJT_ROLES,
    ComponentKind.DIODE: TWO_TERMINAL,
    ComponentKind.VOLTAGE_SOURCE: TWO_TERMINAL,
    ComponentKind.CURRENT_SOURCE: TWO_TERMINAL,
    ComponentKind.AC_SOURCE: TWO_TERMINAL,
    ComponentKind.DC_SOURCE: TWO_TERMINAL,
    ComponentKind.BATTERY: TWO_TERMINAL,
    ComponentKind.GROUND: ("gnd",),
}

# SPICE element letter -> kind. Voltage sources are refined further by _source_kind.
PREFIX_KIND = {
    "R": ComponentKind.RESISTOR,
    "C": ComponentKind.CAPACITOR,
    "L": ComponentKind.INDUCTOR,
    "M": ComponentKind.MOSFET,
    "Q": ComponentKind.BJT,
    "D": ComponentKind.DIODE,
    "V": ComponentKind.VOLTAGE_SOURCE,
    "I": ComponentKind.CURRENT_SOURCE,
}

# Kinds that carry a model name in the first token after the nodes.
_MODEL_KINDS = {ComponentKind.MOSFET, ComponentKind.BJT, ComponentKind.DIODE}
_POLAR_KINDS = {ComponentKind.MOSFET, ComponentKind.BJT}

BATTERY_NAME_PREFIX = "VBAT"


@dataclass(frozen=True)
class Component:
    """One circuit element with its terminals bound to nets.

    ``terminals`` holds ``(role, net)`` pairs in SPICE node order. A MOSFET
    always carries four terminals; three-node source lines get ``bulk`` tied
    to ``source``.
    """

    name: str
    kind: ComponentKind
    terminals: tuple[tuple[str, str], ...]
    value: str | None = None
    model: str | None = None

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("component name must be nonempty")
        roles = [r for r, _ in self.terminals]
        if len(set(roles)) != len(roles):
            raise ValueError(f"{self.name}: duplicate terminal roles {roles}")
        if tuple(roles) != self.kind.roles:
            raise ValueError(f"{self.name}: terminal roles {roles} do not match {self.kind.value}")

    @property
    def nets(self) -> tuple[str, ...]:
        return tuple(net for _, net in self.terminals)

    def net(self, role: str) -> str:
        for r, net in self.terminals:
            if r == role:
                return net
        raise KeyError(role)

    @property
    def polarity(self) -> Polarity | None:
        """N/P polarity for transistors, read from the model name; None for other kinds."""
        if self.kind not in _POLAR_KINDS:
            return None
        return polarity_from_model(self.kind, self.model)


def polarity_from_model(kind: ComponentKind, model: str | None) -> Polarity:
    if not model:
        return Polarity.UNKNOWN
    m = model.upper()
    if kind is ComponentKind.BJT:
        if m.startswith("NPN"):
            return Polarity.N
        if m.startswith("PNP"):
            return Polarity.P
        return Polarity.UNKNOWN
    if "PMOS" in m or m.startswith("P"):
        return Polarity.P
    if "NMOS" in m or m.startswith("N"):
        return Polarity.N
    return Polarity.UNKNOWN


@dataclass(frozen=True)
class Netlist:
    components: tuple[Component, ...] = ()
    directives: tuple[str, ...] = ()
    comments: tuple[str, ...] = ()

    @property
    def title(self) -> str | None:
        for d in self.directives:
            if d.lower().startswith(".title"):
                return d[len(".title"):].strip() or None
        return None

    @property
    def nets(self) -> tuple[str, ...]:
        """Distinct nets in order of first reference."""
        seen: dict[str, None] = {}
        for c in self.components:
            for net in c.nets:
                seen.setdefault(net, None)
        return tuple(seen)

    def __len__(self) -> int:
        return len(self.components)


@dataclass(frozen=True)
class NetlistStats:
    num_components: int = 0
    num_nodes: int = 0
    num_mosfets: int = 0
    num_lines: int = 0

    def as_dict(self) -> dict[str, int]:
        return {
            "components": self.num_components,
            "nodes": self.num_nodes,
            "mosfets": self.num_mosfets,
            "lines": self.num_lines,
        }


_INLINE_COMMENT = re.compile(r"\s[;$].*$")


def _logical_lines(text: str) -> list[tuple[int, str]]:
    """Join '+' continuation lines; returns (first physical line number, line)."""
    out: list[tuple[int, str]] = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("+"):
            if out and not out[-1][1].startswith("*"):
                prev_no, prev = out[-1]
                out[-1] = (prev_no, f"{prev} {line[1:].strip()}".rstrip())
                continue
            raise NetlistError("continuation line with nothing to continue", no, raw)
        out.append((no, line))
    return out


def _source_kind(name: str, rest: list[str]) -> ComponentKind:
    if name.upper().startswith(BATTERY_NAME_PREFIX):
        return ComponentKind.BATTERY
    if rest:
        head = rest[0].upper()
        if head == "AC":
            return ComponentKind.AC_SOURCE
        if head == "DC":
            return ComponentKind.DC_SOURCE
    return ComponentKind.VOLTAGE_SOURCE


def parse_component(line: str, line_no: int | None = None) -> Component:
    """Parse a single (already joined) component line."""
    tokens = _INLINE_COMMENT.sub("", line).split()
    if not tokens:
        raise NetlistError("empty component line", line_no, line)
    name = tokens[0]
    prefix = name[0].upper()
    kind = PREFIX_KIND.get(prefix)
    if kind is None:
        raise UnknownPrefix(f"unsupported element prefix {name[0]!r} in {name!r}", line_no, line)
    args = tokens[1:]

    if kind is ComponentKind.MOSFET:
        if len(args) < 3:
            raise ArityError(f"{name}: MOSFET needs at least 3 nodes, got {len(args)}", line_no, line)
        # 4-node form when a model token follows a 4th node and is not a param
        if len(args) >= 5 and "=" not in args[4] and "=" not in args[3]:
            d, g, s, b = args[:4]
            extra = args[4:]
        else:
            d, g, s = args[:3]
            b = s
            extra = args[3:]
        terminals = (("drain", d), ("gate", g), ("source", s), ("bulk", b))
    else:
        roles = kind.roles
        if len(args) < len(roles):
            raise ArityError(
                f"{name}: {kind.value} needs {len(roles)} nodes, got {len(args)}", line_no, line
            )
        terminals = tuple(zip(roles, args[: len(roles)]))
        extra = args[len(roles):]
        if kind is ComponentKind.VOLTAGE_SOURCE:
            kind = _source_kind(name, extra)

    model = value = None
    if kind in _MODEL_KINDS:
        if extra and "=" not in extra[0]:
            model = extra[0]
            extra = extra[1:]
    value = " ".join(extra) or None
    return Component(name=name, kind=kind, terminals=terminals, value=value, model=model)


def parse_netlist(text: str) -> Netlist:
    """Parse flat SPICE source into a :class:`Netlist`.

    Comments ('*') and dot-directives are preserved verbatim and in order.
    Input with no component lines yields an empty netlist rather than an error.
    """
    components: list[Component] = []
    directives: list[str] = []
    comments: list[str] = []
    for no, line in _logical_lines(text):
        if line.startswith("*"):
            comments.append(line)
            continue
        if line.startswith("."):
            word = line.split()[0].lower()
            if word in (".subckt", ".ends"):
                raise UnsupportedDirective(f"{word} is not supported (flat netlists only)", no, line)
            directives.append(line)
            continue
        components.append(parse_component(line, no))
    return Netlist(tuple(components), tuple(directives), tuple(comments))


def format_component(c: Component, mosfet_nodes: str = "auto") -> str:
    """Render one component line.

    ``mosfet_nodes`` is ``"auto"`` (3 nodes when bulk is tied to source),
    ``"3"`` or ``"4"``.
    """
    nets = list(c.nets)
    if c.kind is ComponentKind.MOSFET:
        bulk_tied = c.net("bulk") == c.net("source")
        # a bare (non key=value) token after the model would re-parse as a 4th node
        ambiguous = bool(c.value) and "=" not in c.value.split()[0]
        if bulk_tied and (mosfet_nodes == "3" or (mosfet_nodes == "auto" and not ambiguous)):
            nets = nets[:3]
    parts = [c.name, *nets]
    if c.model:
        parts.append(c.model)
    if c.value:
        parts.append(c.value)
    return " ".join(parts)


def serialize_netlist(n: Netlist, mosfet_nodes: str = "auto") -> str:
    lines = [*n.comments, *(format_component(c, mosfet_nodes) for c in n.components), *n.directives]
    return "".join(f"{line}\n" for line in lines)


def netlist_stats(n: Netlist) -> NetlistStats:
    text = serialize_netlist(n)
    return NetlistStats(
        num_components=len(n.components),
        num_nodes=len(n.nets),
        num_mosfets=sum(1 for c in n.components if c.kind is ComponentKind.MOSFET),
        num_lines=sum(1 for line in text.splitlines() if line.strip()),
    )


def _alias_set(aliases: Iterable[str]) -> frozenset[str]:
    return frozenset(a.upper() for a in aliases)


def is_ground(net: str, aliases: Iterable[str] = DEFAULT_GROUND_ALIASES) -> bool:
    return net.upper() in _alias_set(aliases)


def canonicalize(n: Netlist, ground_aliases: Iterable[str] = DEFAULT_GROUND_ALIASES) -> Netlist:
    """Upper-case names, rewrite ground aliases to "0" and sort by (kind, name)."""
    aliases = _alias_set(ground_aliases)
    comps = []
    for c in n.components:
        terms = tuple((role, "0" if net.upper() in aliases else net) for role, net in c.terminals)
        comps.append(replace(c, name=c.name.upper(), terminals=terms))
    comps.sort(key=lambda c: (c.kind.order, c.name))
    return replace(n, components=tuple(comps))


def rename(n: Netlist, components: dict[str, str] | None = None, nets: dict[str, str] | None = None) -> Netlist:
    """Apply a renaming of component names and/or nets (missing keys are kept)."""
    components = components or {}
    nets = nets or {}
    out = []
    for c in n.components:
        terms = tuple((role, nets.get(net, net)) for role, net in c.terminals)
        out.append(replace(c, name=components.get(c.name, c.name), terminals=terms))
    return replace(n, components=tuple(out))

