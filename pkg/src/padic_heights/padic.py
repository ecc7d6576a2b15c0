"""Capped absolute-precision arithmetic in Q_p.

Every element carries the number of p-adic digits that are actually known.
Arithmetic propagates that bound the way interval arithmetic would, so a
result never claims digits its inputs could not determine.
"""
from __future__ import annotations

import json
import re
from fractions import Fraction
from numbers import Rational

DEFAULT_PREC = 30
# equality assertions compare modulo p^(N - BUFFER)
BUFFER = 5


class PadicError(ArithmeticError):
    pass


class PrecisionExhausted(PadicError):
    pass


class DivisionByIndistinguishableZero(PadicError, ZeroDivisionError):
    pass


class NotAUnit(PadicError):
    pass


class NonSimpleRoot(PadicError):
    pass


def valuation(n, p):
    """p-adic valuation of a nonzero integer or Fraction."""
    if isinstance(n, Fraction):
        return valuation(n.numerator, p) - valuation(n.denominator, p)
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _split(n, p):
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v, n


class PadicElement:
    """An element of Q_p known modulo p^abs_precision.

    Stored as ``p^valuation * unit`` with ``unit`` a residue modulo
    ``p^rel`` prime to p.  ``rel == 0`` marks an element indistinguishable
    from zero; its ``valuation`` then equals its absolute precision.
    """

    __slots__ = ("p", "valuation", "unit", "rel")

    def __init__(self, p, valuation, unit, rel):
        if rel < 0:
            raise PrecisionExhausted("negative relative precision")
        if rel == 0:
            unit = 0
        else:
            unit %= p**rel
            if unit % p == 0:
                raise ValueError("unit part divisible by p")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "valuation", valuation)
        object.__setattr__(self, "unit", unit)
        object.__setattr__(self, "rel", rel)

    def __setattr__(self, name, value):
        raise AttributeError("PadicElement is immutable")

    # -- construction -------------------------------------------------------

    @classmethod
    def zero(cls, p, abs_precision):
        return cls(p, abs_precision, 0, 0)

    @classmethod
    def from_rational(cls, x, p, prec=DEFAULT_PREC):
        """Element with ``prec`` digits of relative precision."""
        x = Fraction(x)
        if x == 0:
            return cls.zero(p, prec)
        vn, num = _split(x.numerator, p)
        vd, den = _split(x.denominator, p)
        mod = p**prec
        return cls(p, vn - vd, num * pow(den, -1, mod), prec)

    @classmethod
    def from_int_mod(cls, n, p, abs_precision, shift=0):
        """The element ``p^shift * n`` known modulo ``p^abs_precision``."""
        n %= p ** max(abs_precision - shift, 0)
        if n == 0 or abs_precision <= shift:
            return cls.zero(p, abs_precision)
        v, u = _split(n, p)
        v += shift
        return cls(p, v, u, abs_precision - v)

    @classmethod
    def exact(cls, x, p, abs_precision):
        """Exact rational ``x`` truncated to absolute precision."""
        x = Fraction(x)
        if x == 0:
            return cls.zero(p, abs_precision)
        v = valuation(x, p)
        if v >= abs_precision:
            return cls.zero(p, abs_precision)
        return cls.from_rational(x, p, abs_precision - v)

    # -- basic properties ----------------------------------------------------

    @property
    def abs_precision(self):
        return self.valuation + self.rel

    def is_zero(self):
        return self.rel == 0

    def is_unit(self):
        return self.rel > 0 and self.valuation == 0

    def is_integral(self):
        return self.valuation >= 0

    def lift(self):
        """A rational representative (exact, digits beyond precision zero)."""
        return Fraction(self.unit) * Fraction(self.p) ** self.valuation

    def residue_int(self, modulus_exp):
        """Integer representative modulo p^modulus_exp (requires integrality)."""
        if self.is_zero():
            return 0
        if self.valuation < 0:
            raise ValueError("element is not integral")
        return (self.unit * self.p**self.valuation) % self.p**modulus_exp

    def unit_part(self):
        """The unit u in x = p^v * u, as an element of Z_p^x."""
        if self.is_zero():
            raise DivisionByIndistinguishableZero("zero has no unit part")
        return PadicElement(self.p, 0, self.unit, self.rel)

    def with_abs_precision(self, n):
        """Truncate to absolute precision ``min(n, current)``."""
        n = min(n, self.abs_precision)
        if self.is_zero() or n <= self.valuation:
            return PadicElement.zero(self.p, n)
        return PadicElement(self.p, self.valuation, self.unit, n - self.valuation)

    def with_rel_precision(self, r):
        if self.is_zero():
            return self
        return PadicElement(self.p, self.valuation, self.unit, min(r, self.rel))

    # -- coercion ------------------------------------------------------------

    def _coerce_add(self, other):
        if isinstance(other, PadicElement):
            if other.p != self.p:
                raise ValueError("mismatched primes")
            return other
        if isinstance(other, (int, Rational)):
            return PadicElement.exact(other, self.p, self.abs_precision)
        return NotImplemented

    def _coerce_mul(self, other):
        if isinstance(other, PadicElement):
            if other.p != self.p:
                raise ValueError("mismatched primes")
            return other
        if isinstance(other, (int, Rational)):
            other = Fraction(other)
            if other == 0:
                return PadicElement.zero(self.p, self.rel if not self.is_zero() else self.abs_precision)
            return PadicElement.from_rational(other, self.p, max(self.rel, 1))
        return NotImplemented

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        other = self._coerce_add(other)
        if other is NotImplemented:
            return other
        p = self.p
        n = min(self.abs_precision, other.abs_precision)
        terms = [x for x in (self, other) if not x.is_zero()]
        if not terms:
            return PadicElement.zero(p, n)
        v0 = min(x.valuation for x in terms)
        if v0 >= n:
            return PadicElement.zero(p, n)
        total = sum(x.unit * p ** (x.valuation - v0) for x in terms)
        return PadicElement.from_int_mod(total, p, n, shift=v0)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero():
            return self
        return PadicElement(self.p, self.valuation, -self.unit, self.rel)

    def __sub__(self, other):
        other = self._coerce_add(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce_mul(other)
        if other is NotImplemented:
            return other
        p = self.p
        if self.is_zero() or other.is_zero():
            if self.is_zero() and other.is_zero():
                n = self.abs_precision + other.abs_precision
            elif self.is_zero():
                n = self.abs_precision + other.valuation
            else:
                n = other.abs_precision + self.valuation
            return PadicElement.zero(p, n)
        rel = min(self.rel, other.rel)
        return PadicElement(p, self.valuation + other.valuation, self.unit * other.unit, rel)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce_mul(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            raise DivisionByIndistinguishableZero(
                f"divisor has no known nonzero digit (known mod {self.p}^{other.abs_precision})"
            )
        if self.is_zero():
            return PadicElement.zero(self.p, self.abs_precision - other.valuation)
        rel = min(self.rel, other.rel)
        mod = self.p**rel
        unit = self.unit * pow(other.unit, -1, mod)
        return PadicElement(self.p, self.valuation - other.valuation, unit, rel)

    def __rtruediv__(self, other):
        other = self._coerce_mul(other)
        if other is NotImplemented:
            return other
        return other / self

    def inverse(self):
        if self.is_zero():
            raise DivisionByIndistinguishableZero("inverse of zero")
        return PadicElement(self.p, -self.valuation, pow(self.unit, -1, self.p**self.rel), self.rel)

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return PadicElement(self.p, 0, 1, max(self.rel, 1))
        if self.is_zero():
            return PadicElement.zero(self.p, self.abs_precision + (n - 1) * self.abs_precision)
        mod = self.p**self.rel
        return PadicElement(self.p, self.valuation * n, pow(self.unit, n, mod), self.rel)

    # -- comparison ----------------------------------------------------------

    def __eq__(self, other):
        other = self._coerce_add(other)
        if other is NotImplemented:
            return other
        return (self - other).is_zero()

    __hash__ = None

    def agrees_with(self, other, digits):
        """True when self and other are known to agree modulo p^digits."""
        return diff_valuation(self, other) >= digits

    def __repr__(self):
        return f"PadicElement({self.to_token()!r})"

    # -- serialization -------------------------------------------------------

    def to_token(self):
        p = self.p
        if self.is_zero():
            return f"0 mod {p}^{self.abs_precision}"
        return f"{p}^{self.valuation} * {self.unit} mod {p}^{self.rel}"

    def to_json_obj(self):
        digits = []
        u = self.unit
        for _ in range(self.rel):
            u, d = divmod(u, self.p)
            digits.append(d)
        return {
            "p": self.p,
            "valuation": self.valuation,
            "unit_digits": digits,
            "abs_precision": self.abs_precision,
        }

    def to_json(self):
        return json.dumps(self.to_json_obj(), sort_keys=True)

    @classmethod
    def from_json_obj(cls, obj):
        p = obj["p"]
        digits = obj["unit_digits"]
        if not digits:
            return cls.zero(p, obj["abs_precision"])
        unit = sum(d * p**i for i, d in enumerate(digits))
        rel = obj["abs_precision"] - obj["valuation"]
        if rel != len(digits):
            raise ValueError("digit count disagrees with precision")
        return cls(p, obj["valuation"], unit, rel)

    @classmethod
    def from_json(cls, text):
        return cls.from_json_obj(json.loads(text))

    @classmethod
    def from_token(cls, text):
        text = text.strip()
        m = re.fullmatch(r"0 mod (\d+)\^(-?\d+)", text)
        if m:
            return cls.zero(int(m[1]), int(m[2]))
        m = re.fullmatch(r"(\d+)\^(-?\d+) \* (\d+) mod (\d+)\^(\d+)", text)
        if not m or m[1] != m[4]:
            raise ValueError(f"bad p-adic token: {text!r}")
        return cls(int(m[1]), int(m[2]), int(m[3]), int(m[5]))


def diff_valuation(a, b):
    """Valuation of a - b; for an indistinguishable difference, its precision."""
    return (a - b).valuation


def from_rational(x, p, prec=DEFAULT_PREC):
    return PadicElement.from_rational(x, p, prec)


# -- logarithm and Teichmueller ----------------------------------------------


def teichmuller(x):
    """The (p-1)-st root of unity congruent to the unit x mod p."""
    if x.is_zero() or x.valuation != 0:
        raise NotAUnit(f"{x.to_token()} is not a unit")
    p, r = x.p, x.rel
    return PadicElement(p, 0, pow(x.unit, p ** (r - 1), p**r), r)


def _floor_log(k, p):
    e = 0
    while p ** (e + 1) <= k:
        e += 1
    return e


def _log_principal(u, p, n):
    """log(u) mod p^n for an integer u = 1 mod p known mod p^n."""
    if n <= 1:
        return 0
    # p-power reduction: y = u^(p^r) is closer to 1 and log(u) = log(y)/p^r;
    # y is known mod p^(n+r), so nothing is lost
    r = 2 if n > 12 else 0
    work = n + r
    y = pow(u, p**r, p**work)
    z = (y - 1) % p**work
    if z == 0:
        return 0
    vz = valuation(z, p)
    guard = 1
    while p**guard <= (work // vz) + 2:
        guard += 1
    big = p ** (work + guard)
    mod_out = p**work
    total = 0
    zn = 1
    k = 1
    while True:
        zn = zn * z % big
        vk, kk = _split(k, p)
        if k * vz - _floor_log(k, p) >= work:
            break
        term = (zn // p**vk) * pow(kk, -1, mod_out)
        total += term if k % 2 else -term
        k += 1
    total %= mod_out
    # total = log(y) ≡ 0 mod p^(r+1), so exact division by p^r
    return (total // p**r) % p**n


def log_principal(x):
    """Convergent logarithm of a principal unit (x = 1 mod p)."""
    if not x.is_unit() or (x.unit - 1) % x.p:
        raise ValueError("log series needs a principal unit")
    val = _log_principal(x.unit, x.p, x.rel)
    return PadicElement.from_int_mod(val, x.p, x.rel)


class LogBranch:
    """A branch of the p-adic logarithm, fixed by its value at p."""

    __slots__ = ("p", "value_at_p")

    def __init__(self, p, value_at_p):
        if not isinstance(value_at_p, PadicElement):
            value_at_p = PadicElement.exact(value_at_p, p, DEFAULT_PREC + 20)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "value_at_p", value_at_p)

    def __setattr__(self, name, value):
        raise AttributeError("LogBranch is immutable")

    @classmethod
    def iwasawa(cls, p, prec=DEFAULT_PREC + 20):
        return cls(p, PadicElement.zero(p, prec))

    def __call__(self, x):
        return padic_log(x, self)

    def __repr__(self):
        return f"LogBranch(p={self.p}, value_at_p={self.value_at_p.to_token()!r})"


def padic_log(x, branch):
    """λ(x) = v(x)·λ(p) + log of the principal-unit part of x."""
    if isinstance(x, (int, Rational)):
        x = PadicElement.from_rational(x, branch.p, DEFAULT_PREC)
    if x.is_zero():
        raise PrecisionExhausted("logarithm of an element indistinguishable from 0")
    p = x.p
    mod = p**x.rel
    omega = pow(x.unit, p ** (x.rel - 1), mod)
    principal = x.unit * pow(omega, -1, mod) % mod
    out = PadicElement.from_int_mod(_log_principal(principal, p, x.rel), p, x.rel)
    if x.valuation:
        out = out + branch.value_at_p * x.valuation
    return out


class RhoFunctional:
    """ρ = δ∘λ for K = Q_p, where δ is multiplication by a scalar."""

    def __init__(self, branch, delta_scale=1):
        if not isinstance(delta_scale, PadicElement):
            delta_scale = PadicElement.exact(delta_scale, branch.p, DEFAULT_PREC + 20)
        self.branch = branch
        self.delta_scale = delta_scale

    def __call__(self, x):
        return self.delta_scale * self.branch(x)

    def is_ramified(self):
        return not self.delta_scale.is_zero()


def hensel_root(f, seed):
    """Newton-lift a simple root of ``f`` from a residue mod p."""
    p = f.p
    prec = min(c.abs_precision for c in f.coeffs)
    coeffs = [c.residue_int(prec) for c in f.coeffs]
    mod = p**prec

    def ev(cs, x):
        acc = 0
        for c in reversed(cs):
            acc = (acc * x + c) % mod
        return acc

    deriv = [i * c for i, c in enumerate(coeffs)][1:]
    x = seed % p
    if ev(coeffs, x) % p:
        raise ValueError("seed is not a root mod p")
    if ev(deriv, x) % p == 0:
        raise NonSimpleRoot("f'(seed) vanishes mod p")
    for _ in range(prec.bit_length() + 2):
        x = (x - ev(coeffs, x) * pow(ev(deriv, x), -1, mod)) % mod
    return PadicElement.from_int_mod(x, p, prec)


def is_square(x):
    """x is a square in Q_p (p odd)."""
    if x.is_zero():
        return True
    if x.valuation % 2:
        return False
    r = x.unit % x.p
    return pow(r, (x.p - 1) // 2, x.p) == 1


def padic_sqrt(x):
    """A square root of x in Q_p (p odd); raises NotAUnit-style errors for non-squares."""
    if x.is_zero():
        return PadicElement.zero(x.p, x.abs_precision // 2)
    if not is_square(x):
        raise PadicError(f"{x.to_token()} is not a square in Q_{x.p}")
    p, r = x.p, x.rel
    mod = p**r
    root = next(a for a in range(1, p) if (a * a - x.unit) % p == 0)
    for _ in range(r.bit_length() + 2):
        root = (root + x.unit * pow(root, -1, mod)) * pow(2, -1, mod) % mod
    return PadicElement(p, x.valuation // 2, root, r)
