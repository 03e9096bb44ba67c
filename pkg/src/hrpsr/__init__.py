"""Predictive shift-reduce parsing for hyperedge replacement grammars."""
from .analysis import AnalysisTables, analyze
from .cfa import build_dcfa, build_ncfa
from .fec import check_fec
from .graph import Graph, Literal, lit
from .grammar import HRGrammar
from .oracle import naive_parse, viable_prefix_check
from .runtime import asr_search, psr_parse
from .textio import load_builtin, parse_grammar_text, parse_graph_text

__all__ = [
    "AnalysisTables", "Graph", "HRGrammar", "Literal", "analyze", "asr_search", "build_dcfa",
    "build_ncfa", "check_fec", "lit", "load_builtin", "naive_parse", "parse_grammar_text",
    "parse_graph_text", "psr_parse", "viable_prefix_check",
]
