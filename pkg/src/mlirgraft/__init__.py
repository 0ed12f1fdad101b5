"""Parameterized grammar-based mutation for generic-form MLIR test cases."""

from __future__ import annotations

from .constraints import Violation, check_generic_constraints
from .coverage import CoverageReport, DialectPair
from .driver import (
    EmptyCorpus, FuzzConfig, FuzzReport, NoSite, fuzz_loop, load_corpus, mutate_once,
    select_passes,
)
from .graft import IllegalGraft, graft, instantiate
from .match import MatchConfig, MutationSite, ParameterBinding, bind_parameters, locate
from .reference import ReferenceVerdict, reference_validate
from .syntax import MLIRSyntaxError, SyntaxNode, SyntaxTree, parse, print_tree, walk
from .synth import NoEligibleNode, Parameter, ParameterizedMutation, bisect, synthesize
from .targets import Category, FuzzOutcome, SpawnError, classify_outcome, run_target

__all__ = [
    "Category", "CoverageReport", "DialectPair", "EmptyCorpus", "FuzzConfig", "FuzzOutcome",
    "FuzzReport", "IllegalGraft", "MLIRSyntaxError", "MatchConfig", "MutationSite",
    "NoEligibleNode", "NoSite", "Parameter", "ParameterBinding", "ParameterizedMutation",
    "ReferenceVerdict", "SpawnError", "SyntaxNode", "SyntaxTree", "Violation",
    "bind_parameters", "bisect", "check_generic_constraints", "classify_outcome",
    "fuzz_loop", "graft", "instantiate", "load_corpus", "locate", "mutate_once", "parse",
    "print_tree", "reference_validate", "run_target", "select_passes", "synthesize", "walk",
]
