"""Shared record type for Monte Carlo estimates."""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["CoverageEstimate", "binomial_std_error"]


def binomial_std_error(p: float, n: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / n)


@dataclass(frozen=True)
class CoverageEstimate:
    """An estimated probability with its standard error and provenance.

    ``method`` is one of "design_conditional", "design_averaged",
    "product_form", "product_form_approx" or "mc_oracle";
    ``bias_flagged`` marks product-form estimates whose inner Monte Carlo
    noise makes the (1-p)^n plug-in visibly biased.
    """

    value: float
    std_error: float
    n_targets: int
    n_designs: int = 1
    method: str = "design_conditional"
    bias_flagged: bool = False

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"estimate must lie in [0, 1], got {self.value}")
        if self.std_error < 0.0:
            raise ValueError(f"std_error must be >= 0, got {self.std_error}")
