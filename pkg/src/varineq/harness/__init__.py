"""Experiment drivers and structured reports."""

from .drivers import (
    counterexample_family,
    counterexample_report,
    ergodic_dichotomy_report,
    fs_domination_check,
    lemma_increasing_seq_check,
    pointwise_report,
    sharp_domination_report,
    strong_type_report,
    vector_valued_report,
    weak_type_report,
)
from .inputs import STANDARD_CORPUS, corpus_from_spec, sampled_corpus, weight_from_spec
from .report import (
    InequalityReport,
    compare_golden,
    ladder_verdict,
    report_from_dict,
    report_read,
    report_write,
    write_plot_csv,
)

__all__ = [
    "InequalityReport",
    "STANDARD_CORPUS",
    "compare_golden",
    "corpus_from_spec",
    "counterexample_family",
    "counterexample_report",
    "ergodic_dichotomy_report",
    "fs_domination_check",
    "ladder_verdict",
    "lemma_increasing_seq_check",
    "pointwise_report",
    "report_from_dict",
    "report_read",
    "report_write",
    "sampled_corpus",
    "sharp_domination_report",
    "strong_type_report",
    "vector_valued_report",
    "weak_type_report",
    "weight_from_spec",
    "write_plot_csv",
]
