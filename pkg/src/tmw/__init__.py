"""Equality, order and invariants for talented and graph monoids of finite directed graphs."""

from .expr import MonoidExpr, Tri, Verdict, parse_expr, shift
from .flow import (FlowState, decide_eq, eq_talented, leq_talented, lt_talented, normal_form,
                   order_unit, partial_flow_step)
from .graph import (CoveringWindow, Edge, Graph, GraphFormatError, HypothesisError,
                    covering_window, descendants, format_graph, graph_to_dict, parse_graph,
                    reaches, regular_sources, scc, sinks, sources)
from .graph_monoid import eq_graph_monoid, leq_graph_monoid
from .moves import (GeneratorMap, InSplitPlan, OutSplitPlan, PlanError, SplitPlan,
                    induced_map_in_split, induced_map_out_split, induced_map_source_removal,
                    move_in_split, move_out_split, move_source_removal, parse_plan, verify_map)
from .paradox import ParadoxWitness, build_witness, is_paradoxical, verify_witness
from .structure import (ClassificationReport, CycleTaxonomy, classify, classify_cycles,
                        classify_pis, condition_L, decompose, essential_check,
                        group_check_graph_monoid, is_cofinal, is_hereditary, line_points,
                        period_of_graph, period_of_vertex, primary_colours,
                        strongly_connected_component)

__version__ = "0.1.0"

__all__ = [
    "build_witness",
    "ClassificationReport",
    "classify",
    "classify_cycles",
    "classify_pis",
    "condition_L",
    "covering_window",
    "CoveringWindow",
    "CycleTaxonomy",
    "decide_eq",
    "decompose",
    "descendants",
    "Edge",
    "eq_graph_monoid",
    "eq_talented",
    "essential_check",
    "FlowState",
    "format_graph",
    "GeneratorMap",
    "Graph",
    "graph_to_dict",
    "GraphFormatError",
    "group_check_graph_monoid",
    "HypothesisError",
    "induced_map_in_split",
    "induced_map_out_split",
    "induced_map_source_removal",
    "InSplitPlan",
    "is_cofinal",
    "is_hereditary",
    "is_paradoxical",
    "leq_graph_monoid",
    "leq_talented",
    "line_points",
    "lt_talented",
    "MonoidExpr",
    "move_in_split",
    "move_out_split",
    "move_source_removal",
    "normal_form",
    "order_unit",
    "OutSplitPlan",
    "ParadoxWitness",
    "parse_expr",
    "parse_graph",
    "parse_plan",
    "partial_flow_step",
    "period_of_graph",
    "period_of_vertex",
    "PlanError",
    "primary_colours",
    "reaches",
    "regular_sources",
    "scc",
    "shift",
    "sinks",
    "sources",
    "SplitPlan",
    "strongly_connected_component",
    "Tri",
    "Verdict",
    "verify_map",
    "verify_witness",
]
