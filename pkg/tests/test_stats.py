import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import fisher_exact

from sonimetrics.stats import fisher_exact_two_sided, oa_shift


@given(st.integers(0, 30), st.integers(0, 30), st.integers(0, 30), st.integers(0, 30))
def test_matches_scipy(a, b, c, d):
    if a + b + c + d == 0 or (a + b) * (c + d) * (a + c) * (b + d) == 0:
        return
    assert fisher_exact_two_sided(a, b, c, d) == pytest.approx(fisher_exact([[a, b], [c, d]]).pvalue, rel=1e-9)


def test_corpus_shift(early_mapped, late_mapped):
    shift = oa_shift(early_mapped, late_mapped)
    assert (shift.early_oa, shift.early_n, shift.late_oa, shift.late_n) == (7, 32, 27, 32)
    # scipy.stats.fisher_exact([[7, 25], [27, 5]]).pvalue
    assert shift.p_value == pytest.approx(8.781230224361716e-07, rel=1e-9)
    assert shift.increased()
