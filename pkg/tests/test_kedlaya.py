import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padic_heights.kedlaya import (
    BadReduction,
    EvenPrimeUnsupported,
    GoodCurve,
    UnsupportedPrime,
    count_points_naive,
    expected_charpoly_holds,
    frobenius_matrix,
    verified_frobenius_matrix,
)


@pytest.mark.parametrize("a,b,a_p", [(1, 1, -3), (1, 0, 2), (0, 1, 0)])
def test_point_counts_at_five(a, b, a_p):
    assert count_points_naive((b, a, 0, 1), 5) == a_p


@pytest.mark.parametrize("a,b", [(1, 1), (1, 0), (0, 1)])
def test_frobenius_trace_and_det(a, b):
    curve = GoodCurve.short(a, b, 5)
    res = verified_frobenius_matrix(curve, 30)
    assert res.a_p == count_points_naive(curve.f, 5)
    assert res.matrix.det().residue_int(25) == 5
    assert expected_charpoly_holds(res, curve)


@settings(max_examples=15)
@given(st.sampled_from([5, 7, 11]), st.integers(0, 10), st.integers(0, 10))
def test_charpoly_matches_point_count(p, a, b):
    f = (b, a, 0, 1)
    if (4 * a**3 + 27 * b**2) % p == 0:
        return
    curve = GoodCurve(f, p)
    res = frobenius_matrix(curve, 20)
    assert abs(res.a_p) <= 2 * p**0.5
    assert expected_charpoly_holds(res, curve)


def test_prime_errors():
    with pytest.raises(EvenPrimeUnsupported):
        GoodCurve.short(1, 1, 2)
    with pytest.raises(UnsupportedPrime):
        GoodCurve.short(1, 1, 3)
    with pytest.raises(BadReduction):
        GoodCurve.short(0, 0, 5)
    with pytest.raises(ValueError):
        GoodCurve((1, 1, 0, 2), 5)
