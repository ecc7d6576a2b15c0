"""λ-splittings of the Poincare biextension of a Tate curve and local pairings.

Two independent evaluations of the canonical splitting:

* ``mt_splitting`` multiplies a point (m, n)-fold until both projections lie
  in the formal group, where the biextension has a unique trivialization,
  and divides the logarithm of the resulting fibre coordinate by mn.
* ``unit_root_splitting_tate`` solves for the splitting among all maps
  λ(c) + a(v) λ(u) + b(v) ord(u) with a, b continuous homomorphisms, using
  descent invariance and the condition that the induced de Rham splitting
  lands in the unit-root subspace of the Tate Frobenius module.
"""
from __future__ import annotations

import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import gcd

from .frobenius import tate_diagram, unit_root_subspace
from .matrix import PadicMatrix, rank, solve
from .padic import BUFFER, LogBranch, PadicElement, PadicError
from .tate import BiextPoint, TateCurve, int_mul, shift_exponent, theta


class ConstraintInconsistent(PadicError):
    pass


class NotInFormalPart(PadicError):
    pass


class SearchBoundExceeded(PadicError):
    pass


class SupportsIntersect(PadicError, ValueError):
    pass


def _is_formal(u):
    return u.valuation == 0 and (u - 1).valuation >= 1


def sigma_tilde(x):
    """Fibre coordinate of the canonical representative over the formal part."""
    y = x.normalized()
    if not (_is_formal(y.u) and _is_formal(y.v)):
        raise NotInFormalPart("both projections must lie in the formal group")
    return y.c


# -- Mazur-Tate: divisibility into the formal part --------------------------------


def _residue_order(unit, p):
    r = unit.residue_int(1)
    k, acc = 1, r
    while acc != 1:
        acc = acc * r % p
        k += 1
    return k


def formal_multiplier(u, curve, cap=None):
    """Least m with u^m in the formal group modulo q^Z.

    m is the component order e/gcd(ord u, e) times the order of the residue
    of the resulting unit in F_p^x; p | m happens when p divides the
    component order.
    """
    p, e = curve.p, curve.e
    o = u.valuation % e
    m0 = e // gcd(o, e)
    w = u**m0
    k = shift_exponent(w, curve)
    unit = w / curve.q**k if k else w
    m = m0 * _residue_order(unit, p)
    bound = cap or e * (p - 1)
    if m > bound:
        raise SearchBoundExceeded(f"multiplier {m} exceeds {bound}")
    return m


def mt_splitting(x, branch, info=None):
    """Mazur-Tate value τ(x) = λ(σ̃((m, n) x)) / (mn)."""
    m = formal_multiplier(x.u, x.curve)
    n = formal_multiplier(x.v, x.curve)
    y = int_mul(x, m, n).normalized()
    if not (_is_formal(y.u) and _is_formal(y.v)):
        raise NotInFormalPart("multiplied point failed to land in the formal part")
    value = branch(y.c) / (m * n)
    if info is not None:
        p = x.curve.p
        info.update(m=m, n=n, digits_lost=_vp(m * n, p))
    return value


def _vp(n, p):
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def closed_form_oracle(x, branch):
    """λ(c) + [ord u λ(v) + ord v λ(u)]/e - ord u ord v λ(q)/e^2."""
    e = x.curve.e
    ou, ov = x.u.valuation, x.v.valuation
    lq = branch(x.curve.q)
    return branch(x.c) + (branch(x.v) * ou + branch(x.u) * ov) / e - lq * (ou * ov) / (e * e)


# -- unit-root splitting as a constraint system -------------------------------------


@dataclass(frozen=True)
class UnitRootCoefficients:
    """a(v) = alpha_a ord v + beta_a L(v), b(v) = alpha_b ord v + beta_b L(v)."""

    alpha_a: PadicElement
    beta_a: PadicElement
    alpha_b: PadicElement
    beta_b: PadicElement
    constraint: str


def _iwasawa_log(x):
    return LogBranch.iwasawa(x.p)(x)


def unit_root_coefficients(curve, branch, constraint="unit_root"):
    """Solve the linear constraints on (alpha_a, beta_a, alpha_b, beta_b).

    Descent in the first factor: -λ(v) + a(v) λ(q) + b(v) e = 0 for all v.
    Descent in the second factor: a(q) = 1, b(q) = 0.
    ``unit_root``: the de Rham class beta_a [du/u] + e alpha_a [e_Γ] of the
    splitting lies in W_A, computed from the Tate Frobenius module.
    ``schneider``: a(v) = λ(v)/λ(q) instead (a negative control).
    """
    p, e, q = curve.p, curve.e, curve.q
    lq = branch(q)
    Lq = _iwasawa_log(q)
    lp = branch.value_at_p
    prec = min(lq.abs_precision, Lq.abs_precision)
    rows = [
        [e, Lq, 0, 0],
        [0, 0, e, Lq],
        [lq, 0, e, 0],
        [0, lq, 0, e],
    ]
    rhs = [1, 0, lp, 1]
    if constraint == "unit_root":
        kappa = lq if lq.is_integral() else 0
        w = unit_root_subspace(tate_diagram(p, kappa, prec).A, prec)
        if w.ncols != 1:
            raise ConstraintInconsistent("Tate Frobenius module is not ordinary")
        w_inv, w_gamma = w[0, 0], w[1, 0]
        rows.append([-w_inv * e, w_gamma, 0, 0])
        rhs.append(0)
    elif constraint == "schneider":
        rows.append([lq, 0, 0, 0])
        rhs.append(lp)
        rows.append([0, lq, 0, 0])
        rhs.append(1)
    else:
        raise ValueError(f"unknown constraint {constraint!r}")
    a = PadicMatrix(rows, p, prec=prec)
    b = PadicMatrix([[r] for r in rhs], p, prec=prec)
    if rank(a) < 4:
        raise ConstraintInconsistent("constraints do not determine the splitting")
    try:
        sol = solve(a, b)
    except ValueError as exc:
        raise ConstraintInconsistent(str(exc)) from None
    return UnitRootCoefficients(sol[0, 0], sol[1, 0], sol[2, 0], sol[3, 0], constraint)


def unit_root_splitting_tate(x, branch, coeffs=None, constraint="unit_root"):
    """τ(c; u, v) = λ(c) + a(v) λ(u) + b(v) ord(u) with solved a, b."""
    k = coeffs or unit_root_coefficients(x.curve, branch, constraint)
    ov = x.v.valuation
    Lv = _iwasawa_log(x.v)
    a = k.alpha_a * ov + k.beta_a * Lv
    b = k.beta_b * Lv + k.alpha_b * ov
    return branch(x.c) + a * branch(x.u) + b * x.u.valuation


# -- local pairing ---------------------------------------------------------------------


def theta_any(w, curve):
    """Θ(w) for any w != 0 via Θ(q^k w0) = (-1)^k q^(-k(k-1)/2) w0^(-k) Θ(w0)."""
    k = shift_exponent(w, curve)
    if k == 0:
        return theta(w, curve)
    w0 = w / curve.q**k
    sign = -1 if k % 2 else 1
    return theta(w0, curve) * curve.q ** (-(k * (k - 1) // 2)) * w0 ** (-k) * sign


def _same_class(a, b, curve, digits):
    r = a / b
    k = shift_exponent(r, curve)
    if k * curve.e != r.valuation:
        return False
    rest = r / curve.q**k if k else r
    return (rest - 1).valuation >= digits


def section_value(d_points, a, curve):
    """s_D(a) = (Π Θ(a/u_j)^{m_j}; a, d^-1) with d = Π u_j^{m_j}."""
    f = None
    d = None
    for m, uj in d_points:
        t = theta_any(a / uj, curve) ** m
        f = t if f is None else f * t
        dj = uj**m
        d = dj if d is None else d * dj
    return BiextPoint(f, a, d.inverse(), curve)


def local_pairing(d_points, z_points, curve, splitting, delta=1):
    """δ Σ n_i τ(s_D(a_i)) for D = Σ m_j (u_j), z = Σ n_i (a_i)."""
    if sum(m for m, _ in d_points) or sum(n for n, _ in z_points):
        raise ValueError("divisor and zero-cycle must have degree 0")
    digits = curve.prec - BUFFER
    for _, a in z_points:
        for _, uj in d_points:
            if _same_class(a, uj, curve, digits):
                raise SupportsIntersect("supports of D and z meet")
    total = None
    for n, a in z_points:
        t = splitting(section_value(d_points, a, curve)) * n
        total = t if total is None else total + t
    return total * delta


# -- comparison harness ---------------------------------------------------------------


@dataclass
class SplittingReport:
    p: int
    q: str
    branch: str
    delta: str
    seed: int
    precision: int
    required_digits: int
    constraint: str
    samples: list = field(default_factory=list)
    min_diff_valuation: object = None
    passed: bool = False

    def to_json_obj(self):
        return asdict(self)


def random_unit(rng, p, prec):
    while True:
        n = rng.randrange(1, p**prec)
        if n % p:
            return PadicElement(p, 0, n, prec)


def random_biext_point(rng, curve, prec=None):
    """A cover point with random fibre and random valuations of u, v."""
    p, e = curve.p, curve.e
    prec = prec or curve.prec
    pw = PadicElement.exact(p, p, prec + 10)

    def elt(low, high):
        return random_unit(rng, p, prec) * pw ** rng.randrange(low, high)

    return BiextPoint(elt(-2, 3), elt(-e, 2 * e), elt(-e, 2 * e), curve)


def structured_points(curve, prec=None):
    """Formal points, points off the identity component and high-valuation points."""
    p, e, q = curve.p, curve.e, curve.q
    prec = prec or curve.prec

    def el(x):
        return PadicElement.from_rational(x, p, prec)

    pts = [
        BiextPoint(el(7), el(1 + p), el(1 + p * p), curve),
        BiextPoint(el(1), el(1), el(1), curve),
        BiextPoint(el(2), el(p), el(p), curve),
        BiextPoint(el(3), el(2 * p ** (e - 1) if e > 1 else 2), el(3), curve),
        BiextPoint(el(5), q * el(Fraction(p**3 + 1, 2)), el(p ** (2 * e + 1) * 3), curve),
        BiextPoint(el(Fraction(1, p)), el(1 + p**4), el(p * (1 + p)), curve),
    ]
    return pts


def compare_splittings(curve, branch, delta=1, samples=100, seed=0, constraint="unit_root", digits=None):
    """Compare the Mazur-Tate and unit-root splittings on sampled points."""
    rng = random.Random(seed)
    required = digits if digits is not None else curve.prec - BUFFER
    coeffs = None
    error = None
    try:
        coeffs = unit_root_coefficients(curve, branch, constraint)
    except ConstraintInconsistent as exc:
        error = str(exc)
    pts = structured_points(curve) + [random_biext_point(rng, curve) for _ in range(samples)]
    report = SplittingReport(
        p=curve.p,
        q=curve.q.to_token(),
        branch=branch.value_at_p.to_token(),
        delta=str(delta),
        seed=seed,
        precision=curve.prec,
        required_digits=required,
        constraint=constraint,
    )
    worst = None
    for x in pts:
        mt = mt_splitting(x, branch) * delta
        entry = {"c": x.c.to_token(), "u": x.u.to_token(), "v": x.v.to_token(), "tau_mt": mt.to_token()}
        if coeffs is None:
            entry.update(tau_ur=None, diff_valuation=None)
            worst = float("-inf")
        else:
            ur = unit_root_splitting_tate(x, branch, coeffs) * delta
            dv = (mt - ur).valuation
            entry.update(tau_ur=ur.to_token(), diff_valuation=dv)
            worst = dv if worst is None else min(worst, dv)
        report.samples.append(entry)
    report.min_diff_valuation = None if worst == float("-inf") else worst
    report.passed = error is None and worst is not None and worst >= required
    if error is not None:
        report.samples.append({"error": error})
    return report


# -- Neron function on the Tate curve ------------------------------------------------


def tate_neron(w, curve, branch):
    """λ-adic Neron function of the class of w on E_q.

    Normalized so that Λ(w^m) = m^2 Λ(w) - λ(ψ_m) + (m^2 - 1) λ(Δ)/12 on the
    model Y^2 + XY = X^3 + a4 X + a6, and even: Λ(1/w) = Λ(w).
    """
    e = curve.e
    o = w.valuation
    lq = branch(curve.q)
    lw = branch(w)
    even = branch(theta_any(w, curve)) - lw / 2 + lw * Fraction(o, e) - lq * Fraction(o * o, 2 * e * e)
    return -even - lq / 12
