"""Shared report records for the Monte Carlo check suites."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class MomentReport:
    """One Monte Carlo estimate against a theoretical bound or target.

    ``violated`` is set by the producing suite: one-sided suites flag
    ``estimate - 3*std_error > bound``; equality checks flag
    ``|estimate - bound| > 3*std_error``.  ``aux`` carries secondary
    reported (never asserted) values such as alternative bound shapes.
    """

    estimate: float
    std_error: float
    bound: float
    trials: int
    violated: bool
    label: str = ""
    aux: dict = field(default_factory=dict)
