import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from padic_heights.derham import (
    LaurentForm,
    NotClosed,
    NotLogarithmic,
    format_form,
    h1_dim,
    is_closed,
    parse_form,
    random_closed_log_form,
    random_laurent_poly,
    reduce_form,
    residual,
)


def test_dlog_reduces_to_unit_vector():
    coeffs, prim = reduce_form(LaurentForm.dlog(2, 1))
    assert coeffs == [0, 1] and prim == {}


def test_exact_form_has_zero_class():
    g = {(2, 1): Fraction(3), (1, 0): Fraction(-1, 2)}
    coeffs, prim = reduce_form(LaurentForm.exact(2, g))
    assert coeffs == [0, 0] and prim == g


def test_not_closed():
    form = LaurentForm(2, {((1, 0), 1): 1})  # z1 dz2
    assert not is_closed(form)
    with pytest.raises(NotClosed):
        reduce_form(form)


def test_not_logarithmic():
    with pytest.raises(NotLogarithmic):
        reduce_form(LaurentForm(1, {((-2,), 0): 1}))


def test_exact_form_of_negative_power_is_not_logarithmic():
    with pytest.raises(NotLogarithmic):
        reduce_form(LaurentForm.exact(1, {(-1,): 1}))


def test_at_infinity_keeps_only_invariant_forms():
    assert reduce_form(LaurentForm.dlog(1, 0, 3), at_infinity=True)[0] == [3]
    with pytest.raises(NotLogarithmic):
        reduce_form(LaurentForm(1, {((0,), 0): 1}), at_infinity=True)


@pytest.mark.parametrize("t", [0, 1, 2, 3])
def test_h1_equals_rank(t):
    assert h1_dim(t) == t


@given(st.integers(1, 3), st.integers(0, 10**9))
def test_reduction_is_exact(t, seed):
    rng = random.Random(seed)
    g = random_laurent_poly(t, rng)
    c = [Fraction(rng.randint(-9, 9), rng.randint(1, 7)) for _ in range(t)]
    form = LaurentForm.exact(t, g)
    for n in range(t):
        form = form + LaurentForm.dlog(t, n, c[n])
    coeffs, prim = reduce_form(form)
    assert coeffs == c
    assert residual(form, coeffs, prim).is_zero()


@given(st.integers(1, 3), st.integers(0, 10**9))
def test_reduction_is_linear(t, seed):
    a = random_closed_log_form(t, seed=seed)
    b = random_closed_log_form(t, seed=seed + 1)
    ca, _ = reduce_form(a)
    cb, _ = reduce_form(b)
    cs, _ = reduce_form(a + b.scale(Fraction(2, 3)))
    assert cs == [x + Fraction(2, 3) * y for x, y in zip(ca, cb)]


def test_text_round_trip():
    form = random_closed_log_form(2, seed=4)
    assert parse_form(format_form(form), 2) == form
    parsed = parse_form("1 * z1^-1 d z_1\n-2 * z1 z2^-1 d z_2")
    assert parsed.t == 2


def test_parse_errors():
    with pytest.raises(ValueError):
        parse_form("garbage")
    with pytest.raises(ValueError):
        parse_form("")
