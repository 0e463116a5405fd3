"""Numerical workbench for weighted q-variation inequalities of averages,
singular integrals and ergodic averages."""

from .errors import (
    DecompositionError,
    KernelError,
    ParameterError,
    ReportParseError,
    SizeError,
    VarineqError,
)
from .seqcore import FamilyTrace, ParamGrid, SampledFunction, Sequence, Weight, delta
from .variation import VariationResult, oscillation, total_variation, variation_norm, variation_oracle

__version__ = "0.1.0"

__all__ = [
    "DecompositionError",
    "FamilyTrace",
    "KernelError",
    "ParamGrid",
    "ParameterError",
    "ReportParseError",
    "SampledFunction",
    "Sequence",
    "SizeError",
    "VariationResult",
    "VarineqError",
    "Weight",
    "delta",
    "oscillation",
    "total_variation",
    "variation_norm",
    "variation_oracle",
]
