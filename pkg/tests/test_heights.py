import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from padic_heights import LogBranch, PadicElement
from padic_heights.heights import (
    NotInFormalPart,
    SupportsIntersect,
    closed_form_oracle,
    compare_splittings,
    formal_multiplier,
    local_pairing,
    mt_splitting,
    random_biext_point,
    random_unit,
    sigma_tilde,
    tate_neron,
    unit_root_coefficients,
    unit_root_splitting_tate,
)
from padic_heights.tate import BiextPoint, TateCurve, mul_first, mul_second


def el(x, p=5, prec=30):
    return PadicElement.from_rational(x, p, prec)


BRANCHES = {"iwasawa": 0, "one": 1, "third": Fraction(1, 3)}


def branch(p, name):
    return LogBranch(p, el(BRANCHES[name], p, 50))


def test_sigma_tilde_formal_point():
    curve = TateCurve(25, 30, p=5)
    assert sigma_tilde(BiextPoint(el(7), el(6), el(26), curve)) == el(7)
    with pytest.raises(NotInFormalPart):
        sigma_tilde(BiextPoint(el(7), el(2), el(26), curve))


def test_sigma_tilde_through_descent():
    curve = TateCurve(25, 30, p=5)
    x = BiextPoint(el(7), el(6), el(26), curve)
    assert sigma_tilde(x.gamma(3)).agrees_with(el(7), 25)


@pytest.mark.parametrize("lam,want", [(1, Fraction(1, 3)), (0, 0)])
def test_closed_form_examples(lam, want):
    curve = TateCurve(125, 30, p=5)
    x = BiextPoint(el(1), el(5), el(5), curve)
    br = LogBranch(5, el(lam, 5, 50))
    assert mt_splitting(x, br).agrees_with(el(want), 25)
    assert closed_form_oracle(x, br).agrees_with(el(want), 25)


def test_multiplier_divisible_by_p():
    curve = TateCurve(5**5, 30, p=5)
    assert formal_multiplier(el(5), curve) == 5 * 1
    assert formal_multiplier(el(10), curve) % 5 == 0


@pytest.mark.parametrize("p", [3, 5, 7])
@pytest.mark.parametrize("e", [1, 2, 3, 5])
def test_mt_matches_closed_form_with_recomputation(p, e):
    rng = random.Random(p * 10 + e)
    for name in BRANCHES:
        br = branch(p, name)
        lo = TateCurve(random_unit(rng, p, 40) * el(p, p, 40) ** e, 30)
        hi = TateCurve(lo.q, 40)
        for _ in range(10):
            x = random_biext_point(rng, lo)
            y = BiextPoint(x.c, x.u, x.v, hi)
            a = mt_splitting(x, br)
            assert a.agrees_with(closed_form_oracle(x, br), 24)
            assert a.agrees_with(mt_splitting(y, br), 24)


def _axioms(tau, curve, rng, br):
    x = random_biext_point(rng, curve)
    y = BiextPoint(random_unit(rng, curve.p, 30), random_unit(rng, curve.p, 30) * curve.p, x.v, curve)
    z = BiextPoint(random_unit(rng, curve.p, 30), x.u, random_unit(rng, curve.p, 30), curve)
    alpha = random_unit(rng, curve.p, 30) * curve.p
    d = 22
    assert tau(x.scalar(alpha)).agrees_with(br(alpha) + tau(x), d)
    assert tau(mul_first(x, y)).agrees_with(tau(x) + tau(y), d)
    assert tau(mul_second(x, z)).agrees_with(tau(x) + tau(z), d)
    assert tau(x.gamma(1)).agrees_with(tau(x), d)
    assert tau(x.gamma_dual(-1)).agrees_with(tau(x), d)


@given(st.integers(0, 10**6), st.sampled_from([3, 5, 7]), st.sampled_from(list(BRANCHES)))
def test_mazur_tate_splitting_axioms(seed, p, name):
    rng = random.Random(seed)
    curve = TateCurve(random_unit(rng, p, 40) * p ** rng.randint(1, 3), 30)
    br = branch(p, name)
    _axioms(lambda x: mt_splitting(x, br), curve, rng, br)


@given(st.integers(0, 10**6), st.sampled_from([3, 5, 7]), st.sampled_from(list(BRANCHES)))
def test_unit_root_splitting_axioms(seed, p, name):
    rng = random.Random(seed)
    curve = TateCurve(random_unit(rng, p, 40) * p ** rng.randint(1, 3), 30)
    br = branch(p, name)
    k = unit_root_coefficients(curve, br)
    _axioms(lambda x: unit_root_splitting_tate(x, br, k), curve, rng, br)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_compare_splittings_passes_and_schneider_fails(p):
    curve = TateCurve(el(1 + p, p, 40) * p**2, 30)
    br = branch(p, "one")
    assert compare_splittings(curve, br, samples=20, seed=p).passed
    assert not compare_splittings(curve, br, samples=20, seed=p, constraint="schneider").passed


@pytest.mark.parametrize("p", [3, 5, 7])
def test_schneider_difference_factorization(p):
    """τ_S - τ_MT = (e L(u) - ord(u) L(q)) (e L(v) - ord(v) L(q)) / (e^2 λ(q))."""
    q = el(p**2 * (1 + p**2), p, 40)
    curve = TateCurve(q, 30)
    br = LogBranch.iwasawa(p)
    k = unit_root_coefficients(curve, br, "schneider")
    rng = random.Random(p)
    L = LogBranch.iwasawa(p)
    hits = 0
    for _ in range(20):
        x = random_biext_point(rng, curve)
        e, ou, ov = curve.e, x.u.valuation, x.v.valuation
        want = (L(x.u) * e - L(q) * ou) * (L(x.v) * e - L(q) * ov) / (br(q) * e * e)
        diff = unit_root_splitting_tate(x, br, k) - mt_splitting(x, br)
        assert diff.agrees_with(want, 20)
        if ou % e and ov % e and diff.valuation <= 0:
            hits += 1
    assert hits > 0


def test_local_pairing_properties():
    curve = TateCurve(el(2, 5, 40) * 25, 30)
    br = branch(5, "one")
    d = [(1, el(2)), (-1, el(3))]
    z1 = [(1, el(7)), (-1, el(11))]
    z2 = [(1, el(13)), (-1, el(6))]
    tau = lambda x: mt_splitting(x, br)
    a = local_pairing(d, z1, curve, tau)
    b = local_pairing(d, z2, curve, tau)
    ab = local_pairing(d, z1 + z2, curve, tau)
    assert ab.agrees_with(a + b, 22)
    assert local_pairing(d, z1, curve, tau, delta=3).agrees_with(a * 3, 22)
    with pytest.raises(ValueError):
        local_pairing(d, [(1, el(7))], curve, tau)
    with pytest.raises(SupportsIntersect):
        local_pairing(d, [(1, el(2)), (-1, el(11))], curve, tau)


@pytest.mark.parametrize("m", [2, 3])
@pytest.mark.parametrize("name", list(BRANCHES))
def test_neron_function_quasi_quadratic(m, name):
    curve = TateCurve(el(3, 5, 50) * 5, 40)
    br = branch(5, name)
    w = curve.weierstrass()
    for u in (el(2, 5, 40), el(7, 5, 40) * 5 if curve.e > 1 else el(8, 5, 40)):
        P = curve.coords(u)
        lhs = tate_neron(u**m, curve, br)
        rhs = tate_neron(u, curve, br) * m * m - br(w.psi(m, P)) + br(curve.discriminant()) * Fraction(m * m - 1, 12)
        assert lhs.agrees_with(rhs, 30)
        assert tate_neron(u.inverse(), curve, br).agrees_with(tate_neron(u, curve, br), 30)
