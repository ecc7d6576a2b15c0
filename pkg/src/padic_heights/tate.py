"""The Tate curve E_q = G_m / q^Z over Q_p and the biextension on its cover.

Points of E_q are classes u in Q_p^x / q^Z.  The Poincare biextension is
modelled on the cover G_m x G_m by triples (c; u, v), with q^Z acting in
each factor by

    (c; u, v) -> (c v^-1; q u, v)        (first factor)
    (c; u, v) -> (c u^-1; u, q v)        (second factor)

Both actions commute; a class is represented canonically by the triple with
0 <= ord(u), ord(v) < ord(q).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .padic import BUFFER, DEFAULT_PREC, PadicElement, PadicError, PrecisionExhausted
from .weierstrass import WeierstrassCurve


class IdentityPoint(PadicError):
    pass


class IncompatibleFibers(PadicError):
    pass


def _elt(x, p, prec):
    if isinstance(x, PadicElement):
        return x
    return PadicElement.from_rational(x, p, prec)


class TateCurve:
    """E_q for q in p Z_p, with series truncated at M = ceil(N/ord q) + B terms."""

    def __init__(self, q, prec=DEFAULT_PREC, p=None):
        if not isinstance(q, PadicElement):
            if p is None:
                raise ValueError("give p for a rational q")
            q = PadicElement.from_rational(q, p, prec)
        if q.is_zero() or q.valuation < 1:
            raise ValueError("Tate parameter must satisfy 0 < |q| < 1")
        self.p = q.p
        self.q = q
        self.prec = prec
        self.e = q.valuation
        self.terms = -(-prec // self.e) + BUFFER
        self._coeffs = None

    def __repr__(self):
        return f"TateCurve(p={self.p}, q={self.q.to_token()!r}, prec={self.prec})"

    # -- series ----------------------------------------------------------------

    def _s(self, k):
        """sum_{n>=1} n^k q^n / (1 - q^n)."""
        acc = PadicElement.zero(self.p, self.prec + BUFFER)
        for n in range(1, self.terms + 1):
            qn = self.q**n
            acc = acc + qn * n**k / (1 - qn)
        return acc

    def coefficients(self):
        """(a4, a6) of Y^2 + XY = X^3 + a4 X + a6."""
        if self._coeffs is None:
            s3, s5 = self._s(3), self._s(5)
            a4 = -5 * s3
            a6 = -(5 * s3 + 7 * s5) / 12
            self._coeffs = (a4, a6)
        return self._coeffs

    def weierstrass(self):
        a4, a6 = self.coefficients()
        zero = PadicElement.zero(self.p, self.prec + BUFFER)
        one = PadicElement.exact(1, self.p, self.prec + BUFFER)
        return WeierstrassCurve(one, zero, zero, a4, a6)

    def j_invariant(self):
        return self.weierstrass().j_invariant()

    def discriminant(self):
        """q prod (1 - q^n)^24."""
        acc = self.q
        for n in range(1, self.terms + 1):
            acc = acc * (1 - self.q**n) ** 24
        return acc

    # -- points ----------------------------------------------------------------

    def point(self, u):
        return normalize(_elt(u, self.p, self.prec), self)

    def theta(self, u):
        return theta(_elt(u, self.p, self.prec), self)

    def coords(self, u):
        return weierstrass_coords(normalize(_elt(u, self.p, self.prec), self), self)


@dataclass(frozen=True)
class TatePoint:
    u: PadicElement
    curve: TateCurve

    @property
    def ord(self):
        return self.u.valuation


def shift_exponent(u, curve):
    """k with u = q^k u0, 0 <= ord(u0) < ord(q)."""
    return u.valuation // curve.e


def normalize(u, curve):
    if isinstance(u, TatePoint):
        u = u.u
    u = _elt(u, curve.p, curve.prec)
    if u.is_zero():
        raise ValueError("u must be nonzero")
    k = shift_exponent(u, curve)
    if k:
        u = u / curve.q**k
    return TatePoint(u, curve)


def theta(u, curve):
    """Θ(u) = (1 - u) prod_{n>=1} (1 - q^n u)(1 - q^n / u) for -ord q < ord u < ord q."""
    if isinstance(u, TatePoint):
        u = u.u
    e = curve.e
    if not -e < u.valuation < e:
        raise PrecisionExhausted("theta series needs -ord(q) < ord(u) < ord(q); normalize first")
    # terms with valuation >= target no longer change the product
    target = curve.prec + BUFFER + abs(u.valuation)
    acc = 1 - u
    uinv = u.inverse()
    n = 1
    while True:
        qn = curve.q**n
        a, b = qn * u, qn * uinv
        if min(a.valuation, b.valuation) >= target:
            break
        acc = acc * (1 - a) * (1 - b)
        n += 1
    return acc


def _x_term(w):
    return w / (1 - w) ** 2


def _y_term(w):
    return w * w / (1 - w) ** 3


def weierstrass_coords(point, curve):
    """(X, Y) on Y^2 + XY = X^3 + a4 X + a6 for the class of u."""
    u = point.u if isinstance(point, TatePoint) else normalize(point, curve).u
    q = curve.q
    if u.valuation == 0 and (u - 1).valuation >= u.abs_precision:
        raise IdentityPoint("u is indistinguishable from 1 modulo q^Z")
    s1 = curve._s(1)
    x = _x_term(u) - 2 * s1
    y = _y_term(u) + s1
    uinv = u.inverse()
    target = curve.prec + BUFFER
    n = 1
    while True:
        qn = q**n
        a, b = qn * u, qn * uinv
        if min(a.valuation, b.valuation) >= target:
            break
        # n > 0 uses w = q^n u; n < 0 uses w = q^-n / u through w -> 1/w
        x = x + _x_term(a) + _x_term(b)
        y = y + _y_term(a) - b / (1 - b) ** 3
        n += 1
    return x, y


@dataclass(frozen=True)
class Membership:
    kind: str  # "formal", "identity_component" or "component"
    index: int = 0

    def is_formal(self):
        return self.kind == "formal"


def formal_membership(point):
    u = point.u
    if u.valuation == 0:
        if (u - 1).valuation >= 1:
            return Membership("formal")
        return Membership("identity_component")
    return Membership("component", u.valuation)


# -- biextension on the cover ----------------------------------------------------


@dataclass(frozen=True)
class BiextPoint:
    """A cover representative (c; u, v) of a point of the Poincare biextension."""

    c: PadicElement
    u: PadicElement
    v: PadicElement
    curve: TateCurve

    def __post_init__(self):
        for name in ("c", "u", "v"):
            val = getattr(self, name)
            if not isinstance(val, PadicElement):
                object.__setattr__(self, name, PadicElement.from_rational(val, self.curve.p, self.curve.prec))
            if getattr(self, name).is_zero():
                raise ValueError(f"{name} must be nonzero")

    def __repr__(self):
        return f"BiextPoint(c={self.c.to_token()!r}, u={self.u.to_token()!r}, v={self.v.to_token()!r})"

    def scalar(self, alpha):
        return BiextPoint(self.c * alpha, self.u, self.v, self.curve)

    def gamma(self, k=1):
        """Apply the first-factor action k times: (c v^-k; q^k u, v)."""
        q = self.curve.q
        return BiextPoint(self.c * self.v ** (-k), self.u * q**k, self.v, self.curve)

    def gamma_dual(self, k=1):
        """Apply the second-factor action k times: (c u^-k; u, q^k v)."""
        q = self.curve.q
        return BiextPoint(self.c * self.u ** (-k), self.u, self.v * q**k, self.curve)

    def normalized(self):
        """Canonical representative with 0 <= ord(u), ord(v) < ord(q)."""
        x = self
        k = shift_exponent(x.u, x.curve)
        if k:
            x = x.gamma(-k)
        l = shift_exponent(x.v, x.curve)
        if l:
            x = x.gamma_dual(-l)
        return x

    def same_class_as(self, other, digits=None):
        a, b = self.normalized(), other.normalized()
        d = digits if digits is not None else self.curve.prec - BUFFER
        return a.c.agrees_with(b.c, a.c.valuation + d) and a.u.agrees_with(b.u, d) and a.v.agrees_with(b.v, d)


def _class_shift(a, b, curve):
    """k with b = q^k a (raise when a and b differ modulo q^Z)."""
    r = b / a
    if r.valuation % curve.e:
        raise IncompatibleFibers("points lie over different classes")
    k = r.valuation // curve.e
    rest = r / curve.q**k
    if not rest.agrees_with(PadicElement.exact(1, curve.p, rest.abs_precision), rest.rel):
        raise IncompatibleFibers("points lie over different classes")
    return k


def mul_first(x, y):
    """Partial law over a common second coordinate: (c1 c2; u1 u2, v)."""
    k = _class_shift(x.v, y.v, x.curve)
    if k:
        y = y.gamma_dual(-k)
    return BiextPoint(x.c * y.c, x.u * y.u, x.v, x.curve)


def mul_second(x, y):
    """Partial law over a common first coordinate: (c1 c2; u, v1 v2)."""
    k = _class_shift(x.u, y.u, x.curve)
    if k:
        y = y.gamma(-k)
    return BiextPoint(x.c * y.c, x.u, x.v * y.v, x.curve)


def inverse_first(x):
    return BiextPoint(x.c.inverse(), x.u.inverse(), x.v, x.curve)


def inverse_second(x):
    return BiextPoint(x.c.inverse(), x.u, x.v.inverse(), x.curve)


def int_mul(x, m, n):
    """(m, n) x: m-fold first law, then n-fold second law: (c^{mn}; u^m, v^n)."""
    return BiextPoint(x.c ** (m * n), x.u**m, x.v**n, x.curve)


def biext_ops(x, y=None, op="mul_first", alpha=None, m=None, n=None):
    if op == "mul_first":
        return mul_first(x, y)
    if op == "mul_second":
        return mul_second(x, y)
    if op == "scalar":
        return x.scalar(alpha)
    if op == "gamma_normalize":
        return x.normalized()
    if op == "int_mul":
        return int_mul(x, m, n)
    raise ValueError(f"unknown biextension operation {op!r}")


# -- q-expansions --------------------------------------------------------------


@lru_cache(maxsize=16)
def j_series(terms):
    """Integer coefficients c_k of q j(q) = sum_k c_k q^k for k < terms."""

    def mul(a, b):
        out = [0] * terms
        for i, x in enumerate(a):
            if x:
                for j in range(terms - i):
                    out[i + j] += x * b[j]
        return out

    sigma3 = [0] + [sum(d**3 for d in range(1, n + 1) if n % d == 0) for n in range(1, terms)]
    e4 = [1] + [240 * s for s in sigma3[1:]]
    e4cubed = mul(mul(e4, e4), e4)
    # eta^24 / q = prod (1 - q^n)^24
    prod = [1] + [0] * (terms - 1)
    for n in range(1, terms):
        for _ in range(24):
            for i in range(terms - 1, n - 1, -1):
                prod[i] -= prod[i - n]
    # invert prod
    inv = [0] * terms
    inv[0] = 1
    for k in range(1, terms):
        inv[k] = -sum(prod[i] * inv[k - i] for i in range(1, k + 1))
    return tuple(mul(e4cubed, inv))


def j_from_q(q, terms=None):
    """j(q) = 1/q + 744 + 196884 q + ... evaluated in Q_p."""
    terms = terms or (-(-(q.abs_precision + 2 * BUFFER) // q.valuation) + 2)
    coeffs = j_series(terms)
    acc = PadicElement.zero(q.p, q.abs_precision + BUFFER)
    qk = PadicElement.exact(1, q.p, q.rel + BUFFER)
    for c in coeffs:
        acc = acc + qk * c
        qk = qk * q
    return acc / q
