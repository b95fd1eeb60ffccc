"""Estimator-style wrappers around refactoring and mutation validation."""
from __future__ import annotations

from typing import Optional

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_budget, check_element_kind, check_suite
from .metrics import improvement_report, purity_report
from .splitter import refactor_suite
from .testlang.interpreter import DEFAULT_BUDGET
from .testlang.runner import run_suite
from .validator import ALL_OPERATORS, compare_matrices, generate_mutants, kill_matrix


class TestSuitePurifier(TransformerMixin, BaseEstimator, auto_wrap_output_keys=None):
    """Split impure tests into pure fragments.

    ``fit`` traces the suite and plans the split; ``transform`` returns the
    refactored files. ``elements`` optionally restricts the tracked elements.
    """

    __test__ = False

    def __init__(self, element_kind: str = "if", elements=None, budget: int = DEFAULT_BUDGET):
        self.element_kind = element_kind
        self.elements = elements
        self.budget = budget

    def fit(self, X, y=None):
        files = check_suite(X)
        kind = check_element_kind(self.element_kind)
        check_budget(self.budget)
        self.files_ = files
        self.plan_ = refactor_suite(files, kind, self.budget, self.elements)
        return self

    def transform(self, X=None):
        check_is_fitted(self, "plan_")
        if X is not None:
            paths = [f.path for f in check_suite(X)]
            if paths != [f.path for f in self.files_]:
                raise ValueError("transform expects the suite passed to fit")
        return list(self.plan_.output_files)

    def report(self):
        """Purity improvement between the fitted suite and its refactoring."""
        check_is_fitted(self, "plan_")
        kind = check_element_kind(self.element_kind)
        out = self.plan_.output_files
        before = purity_report(run_suite(self.files_, kind, self.budget), self.files_, kind, self.elements)
        after = purity_report(run_suite(out, kind, self.budget), out, kind, self.elements)
        return improvement_report(before, after)


class MutationValidator(BaseEstimator):
    """Kill-matrix comparison of a refactored suite against the original."""

    def __init__(self, seed: int = 0, max_mutants: Optional[int] = None, budget: int = DEFAULT_BUDGET, n_jobs: int = 1):
        self.seed = seed
        self.max_mutants = max_mutants
        self.budget = budget
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        files = check_suite(X)
        check_budget(self.budget)
        self.mutants_ = generate_mutants(files, ALL_OPERATORS, self.seed, self.max_mutants)
        self.matrix_ = kill_matrix(files, self.mutants_, self.budget, self.n_jobs)
        return self

    def compare(self, X):
        check_is_fitted(self, "matrix_")
        refactored = kill_matrix(check_suite(X), self.mutants_, self.budget, self.n_jobs)
        return compare_matrices(self.matrix_, refactored)

    def score(self, X, y=None) -> float:
        """Fraction of mutants on which the two suites agree."""
        report = self.compare(X)
        return 1.0 if report.total == 0 else 1 - len(report.disagreements) / report.total
