"""Closed log-pole 1-forms on the split torus (G_m)^t.

A form is a finite sum of terms c * z^m dz_n with rational coefficients.  In
the logarithmic frame it reads sum_mu z^mu (sum_n a_{mu,n} dz_n/z_n) with
mu = m + e_n; it is closed exactly when every a_mu is parallel to mu, and
then the mu != 0 part is d(sum c_mu z^mu).  What remains is a constant
combination of the dz_n/z_n, the invariant forms.
"""
from __future__ import annotations

import random
import re
from fractions import Fraction


class NotClosed(ValueError):
    pass


class NotLogarithmic(ValueError):
    pass


def _vec(t, n):
    return tuple(1 if k == n else 0 for k in range(t))


class LaurentForm:
    """sum of c * z^m dz_n, stored as {(m, n): c} with m a t-tuple."""

    __slots__ = ("t", "terms")

    def __init__(self, t, terms=None):
        self.t = t
        clean = {}
        for (m, n), c in (terms or {}).items():
            m = tuple(int(e) for e in m)
            if len(m) != t or not 0 <= n < t:
                raise ValueError("term does not live on the torus of this rank")
            c = Fraction(c)
            if c:
                key = (m, n)
                clean[key] = clean.get(key, Fraction(0)) + c
                if not clean[key]:
                    del clean[key]
        self.terms = clean

    @classmethod
    def dlog(cls, t, n, coef=1):
        """coef * dz_n / z_n."""
        m = [0] * t
        m[n] = -1
        return cls(t, {(tuple(m), n): coef})

    @classmethod
    def exact(cls, t, g):
        """d(g) for a Laurent polynomial g = {mu: c}."""
        terms = {}
        for mu, c in g.items():
            for n in range(t):
                if mu[n]:
                    m = list(mu)
                    m[n] -= 1
                    key = (tuple(m), n)
                    terms[key] = terms.get(key, Fraction(0)) + Fraction(c) * mu[n]
        return cls(t, terms)

    def __add__(self, other):
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, Fraction(0)) + c
        return LaurentForm(self.t, terms)

    def __neg__(self):
        return LaurentForm(self.t, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, a):
        return LaurentForm(self.t, {k: c * Fraction(a) for k, c in self.terms.items()})

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, LaurentForm) and self.t == other.t and self.terms == other.terms

    __hash__ = None

    def log_frame(self):
        """{mu: [a_1..a_t]} with the form equal to sum z^mu a_n dz_n/z_n."""
        out = {}
        for (m, n), c in self.terms.items():
            mu = list(m)
            mu[n] += 1
            vec = out.setdefault(tuple(mu), [Fraction(0)] * self.t)
            vec[n] += c
        return out

    def __repr__(self):
        return f"LaurentForm(t={self.t}, {format_form(self)!r})"


def _parallel(a, mu):
    n = next(i for i, x in enumerate(mu) if x)
    c = a[n] / mu[n]
    return all(a[k] == c * mu[k] for k in range(len(mu))), c


def is_closed(form):
    for mu, a in form.log_frame().items():
        if any(mu) and not _parallel(a, mu)[0]:
            return False
    return True


def check_logarithmic(form, at_infinity=False):
    """Raise NotLogarithmic unless the form has log poles.

    Along z_n = 0 a dz_n term may carry z_n^(-1) at worst.  With
    ``at_infinity`` the form must also have log poles along z_n = infinity
    in (P^1)^t, which bounds every exponent by the degree condition
    m_n <= -1 for dz_n terms and m_k <= 0 otherwise; together with the
    conditions at 0 this leaves only the invariant forms.
    """
    for (m, n), c in form.terms.items():
        if m[n] <= -2:
            raise NotLogarithmic(f"dz_{n + 1} term has z_{n + 1}-exponent {m[n]}")
        if at_infinity:
            for k in range(form.t):
                low = -1 if k == n else 0
                if m[k] > low:
                    raise NotLogarithmic(f"term z^{m} dz_{n + 1} has a non-log pole at z_{k + 1} = infinity")
                if k != n and m[k] < 0:
                    raise NotLogarithmic(f"term z^{m} dz_{n + 1} has a non-log pole along z_{k + 1} = 0")


def reduce_form(form, at_infinity=False):
    """Return (coeffs, primitive) with form = sum coeffs_n dz_n/z_n + d(primitive)."""
    check_logarithmic(form, at_infinity)
    coeffs = [Fraction(0)] * form.t
    primitive = {}
    for mu, a in form.log_frame().items():
        if not any(mu):
            coeffs = list(a)
            continue
        ok, c = _parallel(a, mu)
        if not ok:
            raise NotClosed(f"component z^{mu} is not closed")
        if c:
            primitive[mu] = c
    return coeffs, primitive


def residual(form, coeffs, primitive):
    """form - sum coeffs dz_n/z_n - d(primitive), as an exact Laurent form."""
    rest = form - LaurentForm.exact(form.t, primitive)
    for n, c in enumerate(coeffs):
        rest = rest - LaurentForm.dlog(form.t, n, c)
    return rest


def h1_dim(t):
    """Rank of the invariant part, confirmed by reducing the basis forms."""
    for n in range(t):
        coeffs, prim = reduce_form(LaurentForm.dlog(t, n))
        if coeffs != [Fraction(int(k == n)) for k in range(t)] or prim:
            raise AssertionError("basis form did not reduce to a unit vector")
    return t


def random_laurent_poly(t, rng, terms=4, max_exp=3, allow_negative=False):
    low = -max_exp if allow_negative else 0
    g = {}
    for _ in range(terms):
        mu = tuple(rng.randint(low, max_exp) for _ in range(t))
        if any(mu):
            g[mu] = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
    return g


def random_closed_log_form(t, rng=None, seed=None):
    rng = rng or random.Random(seed)
    form = LaurentForm.exact(t, random_laurent_poly(t, rng))
    for n in range(t):
        form = form + LaurentForm.dlog(t, n, Fraction(rng.randint(-9, 9), rng.randint(1, 5)))
    return form


# -- text format: "coef * z1^a1 z2^a2 d z_n", one term per line ---------------

_TERM = re.compile(r"^\s*(?P<coef>[-+]?\d+(?:/\d+)?)\s*\*\s*(?P<mono>.*?)\s*d\s*z_?(?P<n>\d+)\s*$")
_FACTOR = re.compile(r"^z_?(\d+)(?:\^\(?([-+]?\d+)\)?)?$")


def parse_form(text, t=None):
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        mt = _TERM.match(line)
        if not mt:
            raise ValueError(f"cannot parse term {line!r}")
        exps = {}
        for tok in mt.group("mono").split():
            mf = _FACTOR.match(tok)
            if not mf:
                raise ValueError(f"cannot parse monomial factor {tok!r}")
            k = int(mf.group(1))
            exps[k] = exps.get(k, 0) + int(mf.group(2) or 1)
        rows.append((Fraction(mt.group("coef")), exps, int(mt.group("n"))))
    if not rows and t is None:
        raise ValueError("empty form needs an explicit rank")
    used = [k for _, e, n in rows for k in list(e) + [n]]
    if any(k < 1 for k in used):
        raise ValueError("variables are numbered from 1")
    rank = t if t is not None else max(used)
    if used and max(used) > rank:
        raise ValueError("variable index exceeds the torus rank")
    terms = {}
    for c, e, n in rows:
        m = tuple(e.get(k + 1, 0) for k in range(rank))
        key = (m, n - 1)
        terms[key] = terms.get(key, Fraction(0)) + c
    return LaurentForm(rank, terms)


def format_form(form):
    lines = []
    for (m, n), c in sorted(form.terms.items()):
        mono = " ".join(f"z{k + 1}^{e}" for k, e in enumerate(m) if e)
        lines.append(f"{c} * {mono + ' ' if mono else ''}d z_{n + 1}")
    return "\n".join(lines)


def format_poly(g):
    parts = []
    for mu, c in sorted(g.items()):
        mono = " ".join(f"z{k + 1}^{e}" for k, e in enumerate(mu) if e)
        parts.append(f"{c} * {mono}" if mono else str(c))
    return " + ".join(parts) if parts else "0"
