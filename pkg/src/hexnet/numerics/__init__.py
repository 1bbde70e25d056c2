"""Numeric engines: adaptive quadrature and truncated-Taylor (jet) arithmetic."""

from .jets import Jet, jet_eval
from .quadrature import (
    Quadrature,
    QuadResult,
    TailIntegral,
    integrate,
    integrate_semiinfinite,
)

__all__ = [
    "Jet",
    "jet_eval",
    "Quadrature",
    "QuadResult",
    "TailIntegral",
    "integrate",
    "integrate_semiinfinite",
]
