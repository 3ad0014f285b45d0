"""Tuning rules mapping (task, n, dim, s, M) to the eigenvector count K
and the graph radius eps.

K follows the closed-form exponents: d/(2s + d) for estimation and
2d/(4s + d) for testing, floored and clamped to [1, n].  The radius is
only constrained to a bracket; the geometric mean of its endpoints is
returned so both regimes are respected symmetrically on the log scale.
Under the manifold model, pass the intrinsic dimension as ``dim``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["TuningRule", "EmptyBracketError", "choose_K", "choose_eps", "eps_bracket"]

_TASKS = ("estimation", "testing")


class EmptyBracketError(ValueError):
    """The radius bracket [lower, upper] is empty for these parameters."""

    def __init__(self, lower: float, upper: float):
        super().__init__(
            f"empty radius bracket: lower bound {lower:.6g} exceeds upper bound "
            f"{upper:.6g}; n is too small for the requested smoothness/dimension"
        )
        self.lower = lower
        self.upper = upper


@dataclass(frozen=True)
class TuningRule:
    """Inputs of the closed-form tuning rules.

    ``dim`` is the ambient dimension d under the flat model and the
    intrinsic dimension m under the manifold model; ``s`` the smoothness
    order; ``M`` the Sobolev radius; c0/C0 the free constants scaling the
    radius bracket.
    """

    task: str
    n: int
    dim: int
    s: int = 1
    M: float = 1.0
    c0: float = 1.0
    C0: float = 1.0

    def __post_init__(self):
        if self.task not in _TASKS:
            raise ValueError(f"task must be one of {_TASKS}, got {self.task!r}")
        if self.n < 1 or self.dim < 1 or self.s < 1:
            raise ValueError("n, dim and s must be positive integers")
        if self.M <= 0 or self.c0 <= 0 or self.C0 <= 0:
            raise ValueError("M, c0 and C0 must be positive")


def choose_K(rule: TuningRule) -> int:
    """K = min{floor((M^2 n)^expo) or 1, n} with the task-specific exponent."""
    d, s = rule.dim, rule.s
    if rule.task == "estimation":
        expo = d / (2 * s + d)
    else:
        expo = 2 * d / (4 * s + d)
    v = (rule.M * rule.M * rule.n) ** expo
    # guard the floor against float round-off on exact powers
    K = math.floor(v + 1e-9 * max(v, 1.0))
    return min(max(K, 1), rule.n)


def eps_bracket(rule: TuningRule, K: int) -> tuple[float, float]:
    """Admissible radius interval [lower, upper] for a given K."""
    d, s, n = rule.dim, rule.s, rule.n
    lower = rule.C0 * (math.log(n) / n) ** (1.0 / d)
    if s > 1:
        lower = max(lower, rule.C0 * (rule.M * rule.M * n) ** (-1.0 / (2 * (s - 1) + d)))
    upper = rule.c0 * min(1.0, K ** (-1.0 / d))
    return lower, upper


def choose_eps(rule: TuningRule, K: int) -> float:
    """Geometric mean of the radius bracket; errors if the bracket is empty."""
    lower, upper = eps_bracket(rule, K)
    if lower > upper:
        raise EmptyBracketError(lower, upper)
    return math.sqrt(lower * upper)
