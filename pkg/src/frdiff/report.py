"""Truncation bookkeeping returned alongside series and quadrature results."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class TruncationReport:
    """How a value was obtained.

    ``terms_used`` counts series terms (or quadrature panels for Fourier
    inversion), ``tail_estimate`` is a relative bound on what was discarded,
    and ``degraded`` flags evaluations outside the guaranteed-accuracy domain.
    """

    terms_used: int = 1
    tail_estimate: float = 0.0
    degraded: bool = False
    panels: int = 0

    def __post_init__(self):
        if self.terms_used < 1:
            raise ValueError("terms_used must be >= 1")
        if not self.tail_estimate >= 0.0:
            raise ValueError("tail_estimate must be >= 0")

    def merge(self, other: "TruncationReport") -> "TruncationReport":
        return TruncationReport(
            terms_used=max(self.terms_used, other.terms_used),
            tail_estimate=max(self.tail_estimate, other.tail_estimate),
            degraded=self.degraded or other.degraded,
            panels=max(self.panels, other.panels),
        )

    def summary(self) -> str:
        flag = " degraded" if self.degraded else ""
        return (f"terms={self.terms_used} tail={self.tail_estimate:.3e} "
                f"panels={self.panels}{flag}")
