"""Label-invariant circuit graphs built from netlists."""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from itertools import combinations

import networkx as nx

from .spice import Component, ComponentKind, Netlist, Polarity

NET_LABEL = "Net"


class GraphMode(str, Enum):
    ADJACENCY = "adjacency"
    BIPARTITE = "bipartite"


def component_label(c: Component) -> str:
    """Kind label used for graph nodes; transistors carry their polarity."""
    pol = c.polarity
    if pol is None or pol is Polarity.UNKNOWN:
        return c.kind.value
    if c.kind is ComponentKind.MOSFET:
        return f"{c.kind.value}({'Nmos' if pol is Polarity.N else 'Pmos'})"
    return f"{c.kind.value}({'Npn' if pol is Polarity.N else 'Pnp'})"


@dataclass(frozen=True)
class CircuitGraph:
    """Simple undirected graph with labelled nodes.

    Node ids are positional (``c0``, ``c1`` ... for components, ``n0`` ... for
    nets) so that component and net names never reach the comparison.
    """

    mode: GraphMode
    nodes: tuple[tuple[str, str], ...] = ()
    edges: frozenset[tuple[str, str]] = frozenset()

    def __post_init__(self) -> None:
        ids = [i for i, _ in self.nodes]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate node ids")
        known = set(ids)
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop on {u}")
            if u not in known or v not in known:
                raise ValueError(f"edge ({u}, {v}) references unknown node")
            if u > v:
                raise ValueError(f"edge ({u}, {v}) not normalized")

    @classmethod
    def make(cls, mode: GraphMode, nodes, edges) -> CircuitGraph:
        """Build from any iterable of unordered edge pairs (deduplicated)."""
        norm = frozenset(tuple(sorted((u, v))) for u, v in edges)
        return cls(GraphMode(mode), tuple(nodes), norm)

    @property
    def labels(self) -> dict[str, str]:
        return dict(self.nodes)

    def __len__(self) -> int:
        return len(self.nodes)

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        for nid, label in self.nodes:
            g.add_node(nid, label=label)
        g.add_edges_from(self.edges)
        return g

    def to_json(self) -> dict:
        return {
            "mode": self.mode.value,
            "nodes": [{"id": i, "label": lab} for i, lab in self.nodes],
            "edges": [list(e) for e in sorted(self.edges)],
        }

    @classmethod
    def from_json(cls, obj: dict | str) -> CircuitGraph:
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls.make(
            obj["mode"],
            [(n["id"], n["label"]) for n in obj["nodes"]],
            [tuple(e) for e in obj["edges"]],
        )

    def to_dot(self) -> str:
        lines = ["graph circuit {"]
        for nid, label in self.nodes:
            shape = "point" if label == NET_LABEL else "box"
            lines.append(f'  "{nid}" [label="{label}", shape={shape}];')
        for u, v in sorted(self.edges):
            lines.append(f'  "{u}" -- "{v}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_graph(n: Netlist, mode: GraphMode | str = GraphMode.ADJACENCY) -> CircuitGraph:
    """Convert a netlist into a :class:`CircuitGraph`.

    In adjacency mode two components are joined when they share at least one
    net. Bipartite mode adds one ``Net`` node per net and an edge for each
    component/net incidence.
    """
    mode = GraphMode(mode)
    comp_ids = [f"c{i}" for i in range(len(n.components))]
    nodes = [(cid, component_label(c)) for cid, c in zip(comp_ids, n.components)]
    edges: set[tuple[str, str]] = set()

    if mode is GraphMode.ADJACENCY:
        by_net: dict[str, list[str]] = {}
        for cid, c in zip(comp_ids, n.components):
            for net in dict.fromkeys(c.nets):
                by_net.setdefault(net, []).append(cid)
        for members in by_net.values():
            for u, v in combinations(members, 2):
                if u != v:
                    edges.add((u, v))
    else:
        net_ids = {net: f"n{j}" for j, net in enumerate(n.nets)}
        nodes.extend((nid, NET_LABEL) for nid in net_ids.values())
        for cid, c in zip(comp_ids, n.components):
            for net in c.nets:
                edges.add((cid, net_ids[net]))
    return CircuitGraph.make(mode, nodes, edges)
