"""Qualitative reachability for open interval Markov chains."""

from .analysis import AnalysisReport, IllFormedModel, QualitativeSets, analyze
from .model import Edge, Imc, Interval, ModelError, classify, edges, make_absorbing, prepare, prune_dead_edges, well_formed
from .parser import ModelDocument, ModelSyntaxError, emit_model, emit_report, parse_model

__all__ = [
    "AnalysisReport",
    "Edge",
    "IllFormedModel",
    "Imc",
    "Interval",
    "ModelDocument",
    "ModelError",
    "ModelSyntaxError",
    "QualitativeSets",
    "analyze",
    "classify",
    "edges",
    "emit_model",
    "emit_report",
    "make_absorbing",
    "prepare",
    "prune_dead_edges",
    "parse_model",
    "well_formed",
]
