"""Uniform-block covariance matrices: coordinate algebra, estimation and mean tests."""

from ._core import (
    DomainError,
    InvalidInput,
    ParseError,
    SingularError,
    StructureError,
    UBMatrix,
    canonical_form,
    estimate,
    m_sample_test,
    noncentrality,
    null_quantile,
    one_sample_test,
    sample,
    simulate,
)

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "InvalidInput",
    "ParseError",
    "SingularError",
    "StructureError",
    "UBMatrix",
    "canonical_form",
    "estimate",
    "m_sample_test",
    "noncentrality",
    "null_quantile",
    "one_sample_test",
    "sample",
    "simulate",
]
