"""Summary statistics over mapped publication segments."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Sequence

from .mapping import MappedPublication


def fisher_exact_two_sided(a: int, b: int, c: int, d: int) -> float:
    """Two-sided Fisher exact p-value for the 2x2 table [[a, b], [c, d]].

    Sums the hypergeometric probabilities of every table with the same
    margins that is no more likely than the observed one.
    """
    row1, col1, n = a + b, a + c, a + b + c + d
    total = comb(n, col1)
    lo, hi = max(0, col1 - (n - row1)), min(row1, col1)
    probs = {k: comb(row1, k) * comb(n - row1, col1 - k) for k in range(lo, hi + 1)}
    observed = probs[a]
    # relative slack so tables tied with the observed one are not lost to rounding
    extreme = sum(v for v in probs.values() if v <= observed * (1 + 1e-7))
    return min(1.0, extreme / total)


@dataclass(frozen=True)
class OaShift:
    early_oa: int
    early_n: int
    late_oa: int
    late_n: int
    p_value: float

    @property
    def early_share(self) -> float:
        return self.early_oa / self.early_n if self.early_n else 0.0

    @property
    def late_share(self) -> float:
        return self.late_oa / self.late_n if self.late_n else 0.0

    def increased(self, alpha: float = 0.05) -> bool:
        return self.late_share > self.early_share and self.p_value < alpha


def oa_shift(early: Sequence[MappedPublication], late: Sequence[MappedPublication]) -> OaShift:
    """Compare open-access shares between two segments."""
    e_oa = sum(m.oa for m in early)
    l_oa = sum(m.oa for m in late)
    p = fisher_exact_two_sided(e_oa, len(early) - e_oa, l_oa, len(late) - l_oa)
    return OaShift(e_oa, len(early), l_oa, len(late), p)
