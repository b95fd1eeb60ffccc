"""Detect impure test cases and split them into pure test fragments."""
__version__ = "0.1.0"

from .applications import ContractReport, RepairReadiness, classify_try_contracts, inject_and_run, repair_readiness
from .estimators import MutationValidator, TestSuitePurifier
from .metrics import ImprovementReport, PurityReport, format_percent, improvement_report, purity_report, render_report
from .splitter import RefactorPlan, build_fragments, compute_cuts, refactor_suite
from .trace import PurityClass, Signature, TraceAnalysis, classify_test, element_coverage
from .validator import KillMatrix, Mutant, compare_matrices, generate_mutants, kill_matrix

__all__ = [
    "ContractReport",
    "ImprovementReport",
    "KillMatrix",
    "MutationValidator",
    "Mutant",
    "PurityClass",
    "PurityReport",
    "RefactorPlan",
    "RepairReadiness",
    "Signature",
    "TestSuitePurifier",
    "TraceAnalysis",
    "build_fragments",
    "classify_test",
    "classify_try_contracts",
    "compare_matrices",
    "compute_cuts",
    "element_coverage",
    "format_percent",
    "generate_mutants",
    "improvement_report",
    "inject_and_run",
    "kill_matrix",
    "purity_report",
    "refactor_suite",
    "render_report",
]
