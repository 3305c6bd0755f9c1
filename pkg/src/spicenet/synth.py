"""Random netlists and renamings for property checks and experiments."""

from __future__ import annotations

import random

from .spice import Component, ComponentKind, Netlist, TERMINAL_ROLES, rename

_KINDS = [k for k in ComponentKind if k is not ComponentKind.GROUND]
_PREFIX = {
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
_MODELS = {
    ComponentKind.MOSFET: ("NMOS", "PMOS"),
    ComponentKind.BJT: ("NPN", "PNP"),
    ComponentKind.DIODE: ("DMOD",),
}
_VALUES = {
    ComponentKind.RESISTOR: "1k",
    ComponentKind.CAPACITOR: "1p",
    ComponentKind.INDUCTOR: "1n",
    ComponentKind.VOLTAGE_SOURCE: "1",
    ComponentKind.CURRENT_SOURCE: "1u",
    ComponentKind.AC_SOURCE: "AC 1",
    ComponentKind.DC_SOURCE: "DC 1",
    ComponentKind.BATTERY: "1.5",
}


def random_netlist(rng: random.Random, n_components: int, n_nets: int | None = None) -> Netlist:
    """Random flat netlist over all component kinds; ground is net ``0``."""
    n_nets = n_nets or max(2, n_components)
    nets = ["0", *(f"n{i}" for i in range(1, n_nets))]
    counters: dict[str, int] = {}
    comps = []
    for _ in range(n_components):
        kind = rng.choice(_KINDS)
        prefix = _PREFIX[kind]
        counters[prefix] = counters.get(prefix, 0) + 1
        roles = TERMINAL_ROLES[kind]
        chosen = [rng.choice(nets) for _ in roles]
        if kind is ComponentKind.MOSFET and rng.random() < 0.5:
            chosen[3] = chosen[2]
        model = rng.choice(_MODELS[kind]) if kind in _MODELS else None
        comps.append(Component(
            f"{prefix}{counters[prefix]}", kind, tuple(zip(roles, chosen)),
            value=_VALUES.get(kind), model=model,
        ))
    return Netlist(tuple(comps))


def random_renaming(rng: random.Random, n: Netlist) -> Netlist:
    """Bijectively rename every component and every net, then shuffle line order.

    Component names keep their kind prefix so the text still parses to the same kinds.
    """
    comp_map = {}
    for c in n.components:
        prefix = c.name.rstrip("0123456789")
        comp_map[c.name] = f"{prefix}X{rng.randrange(10**6)}_{len(comp_map)}"
    nets = list(n.nets)
    fresh = [f"net_{rng.randrange(10**6)}_{i}" for i in range(len(nets))]
    rng.shuffle(fresh)
    renamed = rename(n, comp_map, dict(zip(nets, fresh)))
    comps = list(renamed.components)
    rng.shuffle(comps)
    return Netlist(tuple(comps), renamed.directives, renamed.comments)
