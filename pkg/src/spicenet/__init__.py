"""Schematic-to-SPICE toolkit: netlist parsing, graph similarity, lint,
schematic geometry and LLM-driven generation/repair."""

from .annotation import Annotation, annotate, annotation_to_netlist, bind_terminals, export_annotation, terminal_anchors
from .ged import GedCostConfig, GedResult, brute_force_ged, graph_edit_distance, similarity
from .geometry import BBox, ClusterConfig, NetCluster, Segment, cluster_segments, mask_segments
from .graph import CircuitGraph, GraphMode, build_graph
from .lint import Diagnostic, LintConfig, lint, render_report
from .spice import (
    Component,
    ComponentKind,
    Netlist,
    NetlistStats,
    canonicalize,
    netlist_stats,
    parse_netlist,
    serialize_netlist,
)

__version__ = "0.1.0"
