"""Frobenius on H^1 of a good-reduction elliptic curve y^2 = f(x) (Kedlaya's method).

The lift x -> x^p, y -> y^p (1 + E/y^(2p))^(1/2) with E = f(x^p) - f(x)^p
sends x^i dx/y to a series of forms A(x) y^(-2j) dx/y.  These are reduced
to the basis {dx/y, x dx/y} with the exact forms d(B y^(1-2j)) and d(x^k y).

Coefficients are p-adic numbers carried as integers ``value * p^L`` modulo
``p^(M+L)``; ``L`` leaves room for the bounded denominators the reduction
introduces.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .matrix import PadicMatrix, PadicPoly, charpoly
from .padic import BUFFER, DEFAULT_PREC, PadicElement, PadicError, valuation


class BadReduction(PadicError):
    pass


class EvenPrimeUnsupported(PadicError, ValueError):
    pass


class UnsupportedPrime(PadicError, ValueError):
    pass


def cubic_discriminant(f):
    d, c, b, a = f
    if a != 1:
        raise ValueError("cubic must be monic")
    return b * b * c * c - 4 * c**3 - 4 * b**3 * d - 27 * d * d + 18 * b * c * d


@dataclass(frozen=True)
class GoodCurve:
    """y^2 = f(x) with f a monic integral cubic (coefficients lowest first)."""

    f: tuple
    p: int

    def __post_init__(self):
        f = tuple(int(c) for c in self.f)
        object.__setattr__(self, "f", f)
        if len(f) != 4 or f[3] != 1:
            raise ValueError("f must be a monic cubic given by 4 coefficients")
        if self.p == 2:
            raise EvenPrimeUnsupported("p = 2 is not supported")
        if self.p < 5:
            raise UnsupportedPrime("Frobenius computation needs p >= 5")
        if cubic_discriminant(f) % self.p == 0:
            raise BadReduction(f"discriminant of f is divisible by {self.p}")

    @classmethod
    def short(cls, a, b, p):
        """y^2 = x^3 + a x + b."""
        return cls((b, a, 0, 1), p)


def count_points_naive(f, p):
    """a_p = p + 1 - #E(F_p), counting the point at infinity."""
    squares = [0] * p
    for y in range(p):
        squares[y * y % p] += 1
    total = 1
    for x in range(p):
        v = sum(c * pow(x, i, p) for i, c in enumerate(f)) % p
        total += squares[v]
    return p + 1 - total


# -- integer polynomial helpers (lowest degree first, reduced mod `mod`) ------


def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _add_into(acc, a, mod):
    if len(acc) < len(a):
        acc.extend([0] * (len(a) - len(acc)))
    for i, c in enumerate(a):
        acc[i] = (acc[i] + c) % mod


def _mul(a, b, mod):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return [c % mod for c in out]


def _divmod_monic(a, f, mod):
    """Quotient and remainder of a by the monic polynomial f."""
    a = list(a)
    df = len(f) - 1
    if len(a) <= df:
        return [], a
    q = [0] * (len(a) - df)
    for k in range(len(a) - 1, df - 1, -1):
        c = a[k] % mod
        if c:
            q[k - df] = c
            for i in range(df + 1):
                a[k - df + i] = (a[k - df + i] - c * f[i]) % mod
    return q, [c % mod for c in a[:df]]


def _deriv(a, mod):
    return [(i * c) % mod for i, c in enumerate(a)][1:]


def _bezout_s(f, mod):
    """S with R f + S f' = 1, reduced mod ``mod`` (f squarefree mod p)."""
    # extended gcd over Q, then reduce the cofactor of f' modulo `mod`
    import sympy

    x = sympy.symbols("x")
    fx = sum(sympy.Integer(c) * x**i for i, c in enumerate(f))
    s, t, g = sympy.gcdex(fx, sympy.diff(fx, x), x)
    if sympy.degree(g, x) != 0:
        raise BadReduction("f has a repeated root")
    spoly = sympy.Poly(sympy.expand(t / g), x)
    coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(spoly.all_coeffs())]
    return [c.numerator * pow(c.denominator, -1, mod) % mod for c in coeffs]


def _divide(poly, n, p, mod):
    """Divide every coefficient of poly by the integer n (exact in p-power part)."""
    v = valuation(n, p)
    w = n // p**v
    winv = pow(w, -1, mod)
    pv = p**v
    out = []
    for c in poly:
        c = c * winv % mod
        if c % pv:
            raise ArithmeticError("denominator budget exceeded in the reduction")
        out.append(c // pv)
    return out


def _log_ceil(n, p):
    e = 0
    while p**e < n:
        e += 1
    return e


def _series_terms(n, p):
    """Number of terms of the binomial series needed for n output digits."""
    k = n
    while True:
        jmax = (p * (2 * k + 1) - 1) // 2
        dmax = 2 * p - 1 + 3 * p * k
        loss = _log_ceil(2 * jmax + 2, p) + _log_ceil(2 * dmax + 2, p)
        if k + 1 - loss >= n:
            return k
        k += 1


@lru_cache(maxsize=64)
def _frobenius_columns(f, p, n):
    terms = _series_terms(n, p)
    jmax = (p * (2 * terms + 1) - 1) // 2
    dmax = 2 * p - 1 + 3 * p * terms
    slack = 2 * (_log_ceil(2 * jmax + 2, p) + _log_ceil(2 * dmax + 2, p)) + 4
    m = n + slack
    shift = slack  # L: room for denominators
    mod = p ** (m + shift)
    scale = p**shift
    fl = list(f)
    # E = f(x^p) - f(x)^p
    fxp = [0] * (3 * p + 1)
    for i, c in enumerate(fl):
        fxp[i * p] = c
    fp = [1]
    for _ in range(p):
        fp = _mul(fp, fl, mod)
    e_poly = _trim([(a - b) % mod for a, b in zip(fxp, fp)])
    fprime = _deriv(fl, mod)
    s_poly = _bezout_s(fl, mod)
    cols = []
    for i in (0, 1):
        acc = {}
        ek = [1]
        binom = Fraction(1)
        for k in range(terms + 1):
            j = (p * (2 * k + 1) - 1) // 2
            b = binom.numerator * pow(binom.denominator, -1, mod) % mod
            mono = [0] * (p * (i + 1) - 1) + [b * p * scale % mod]
            acc[j] = _mul(mono, ek, mod)
            ek = _mul(ek, e_poly, mod)
            binom *= Fraction(-1, 2) - k
            binom /= k + 1
        # reduce y^(-2j) terms downward
        for j in range(max(acc), 0, -1):
            a = acc.pop(j, None)
            if not a:
                continue
            v = _divmod_monic(_mul(a, s_poly, mod), fl, mod)[1]
            u = _divmod_monic([(x - y) % mod for x, y in _zip_longest(a, _mul(v, fprime, mod))], fl, mod)[0]
            dv = _divide([2 * c % mod for c in _deriv(v, mod)], 2 * j - 1, p, mod)
            nxt = acc.setdefault(j - 1, [])
            _add_into(nxt, u, mod)
            _add_into(nxt, dv, mod)
        a0 = _trim(acc.get(0, []))
        # d(x^k y) = (k x^(k-1) f + x^k f'/2) dx/y removes x^(k+2)
        while len(a0) > 2:
            d = len(a0) - 1
            k = d - 2
            c = a0[d]
            rel = _add_polys(_mul([0] * (k - 1) + [2 * k], fl, mod) if k else [], [0] * k + fprime, mod)
            sub = _divide([c * r % mod for r in rel], 2 * d - 1, p, mod)
            a0 = _trim([(x - y) % mod for x, y in _zip_longest(a0, sub)])
        a0 = a0 + [0] * (2 - len(a0))
        cols.append(a0)
    return cols, shift, m


def _zip_longest(a, b):
    n = max(len(a), len(b))
    return zip(list(a) + [0] * (n - len(a)), list(b) + [0] * (n - len(b)))


def _add_polys(a, b, mod):
    return [(x + y) % mod for x, y in _zip_longest(a, b)]


@dataclass(frozen=True)
class FrobResult:
    matrix: PadicMatrix
    charpoly: PadicPoly
    a_p: int
    precision: int


def frobenius_matrix(curve, prec=DEFAULT_PREC):
    """Frobenius on the basis {dx/y, x dx/y}, columns are images."""
    p = curve.p
    cols, shift, _ = _frobenius_columns(curve.f, p, prec)
    entries = [[PadicElement.from_int_mod(c, p, prec, shift=-shift) for c in col] for col in cols]
    mat = PadicMatrix.from_columns(entries, p, 2)
    if not mat.is_integral():
        raise ArithmeticError("Frobenius matrix came out non-integral")
    cp = charpoly(mat)
    trace = (-cp.coeffs[1]).residue_int(prec)
    mod = p**prec
    a_p = trace if trace <= mod // 2 else trace - mod
    return FrobResult(mat, cp, a_p, prec)


def verified_frobenius_matrix(curve, prec=DEFAULT_PREC, extra=10):
    """frobenius_matrix, cross-checked against a run with ``extra`` more digits."""
    res = frobenius_matrix(curve, prec)
    hi = frobenius_matrix(curve, prec + extra)
    if not res.matrix.agrees_with(hi.matrix, prec):
        raise ArithmeticError("Frobenius matrix is not stable under added precision")
    return res


def frobenius_module(curve, prec=DEFAULT_PREC):
    """The B-module: Frobenius with Hodge sub-space span(dx/y)."""
    from .frobenius import FrobeniusModule

    res = frobenius_matrix(curve, prec)
    return FrobeniusModule(res.matrix, PadicMatrix([[1], [0]], curve.p, prec=prec), "B")


def expected_charpoly_holds(res, curve, digits=None):
    """charpoly ≡ x^2 - a_p x + p with a_p from naive counting."""
    a_p = count_points_naive(curve.f, curve.p)
    want = PadicPoly([curve.p, -a_p, 1], curve.p, res.precision)
    return res.charpoly.agrees_with(want, digits or res.precision - BUFFER)
