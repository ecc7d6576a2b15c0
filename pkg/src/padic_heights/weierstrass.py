"""Weierstrass curves over any field of Python numbers (Fraction or PadicElement).

Points are ``(x, y)`` tuples; ``None`` is the point at infinity O.
"""
from __future__ import annotations

from fractions import Fraction


class SupportHit(ArithmeticError):
    pass


def _is_zero(x):
    if hasattr(x, "is_zero"):
        return x.is_zero()
    return x == 0


class WeierstrassCurve:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6."""

    def __init__(self, a1, a2, a3, a4, a6):
        self.a1, self.a2, self.a3, self.a4, self.a6 = a1, a2, a3, a4, a6
        self.b2 = a1 * a1 + 4 * a2
        self.b4 = 2 * a4 + a1 * a3
        self.b6 = a3 * a3 + 4 * a6
        self.b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        self.c4 = self.b2 * self.b2 - 24 * self.b4
        self.c6 = -self.b2 * self.b2 * self.b2 + 36 * self.b2 * self.b4 - 216 * self.b6
        self.disc = (
            -self.b2 * self.b2 * self.b8 - 8 * self.b4**3 - 27 * self.b6 * self.b6 + 9 * self.b2 * self.b4 * self.b6
        )

    @classmethod
    def rational(cls, coeffs):
        return cls(*(Fraction(c) for c in coeffs))

    @property
    def coeffs(self):
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    def j_invariant(self):
        return self.c4**3 / self.disc

    def residual(self, P):
        x, y = P
        return y * y + self.a1 * x * y + self.a3 * y - (x * x * x + self.a2 * x * x + self.a4 * x + self.a6)

    def contains(self, P):
        return P is None or _is_zero(self.residual(P))

    def neg(self, P):
        if P is None:
            return None
        x, y = P
        return (x, -y - self.a1 * x - self.a3)

    def _slope(self, P, Q):
        """(λ, ν) of the line through P and Q, or None when it is vertical."""
        x1, y1 = P
        x2, y2 = Q
        if _is_zero(x1 - x2):
            den = 2 * y1 + self.a1 * x1 + self.a3
            if not _is_zero(y1 - y2) or _is_zero(den):
                return None
            lam = (3 * x1 * x1 + 2 * self.a2 * x1 + self.a4 - self.a1 * y1) / den
        else:
            lam = (y2 - y1) / (x2 - x1)
        nu = y1 - lam * x1
        return lam, nu

    def add(self, P, Q):
        if P is None:
            return Q
        if Q is None:
            return P
        s = self._slope(P, Q)
        if s is None:
            return None
        lam, nu = s
        x3 = lam * lam + self.a1 * lam - self.a2 - P[0] - Q[0]
        y3 = -(lam + self.a1) * x3 - nu - self.a3
        return (x3, y3)

    def sub(self, P, Q):
        return self.add(P, self.neg(Q))

    def mul(self, m, P):
        if m < 0:
            return self.mul(-m, self.neg(P))
        result = None
        base = P
        while m:
            if m & 1:
                result = self.add(result, base)
            base = self.add(base, base)
            m >>= 1
        return result

    def psi(self, m, P):
        """Division polynomial ψ_m evaluated at P = (x, y), for any m >= 1.

        Uses the standard doubling recursions, so torsion points are fine; the
        even-index step divides by ψ_2 and is only reached when ψ_2(P) != 0.
        """
        if m < 1:
            raise ValueError("m must be positive")
        x, y = P
        one = x * 0 + 1
        b2, b4, b6, b8 = self.b2, self.b4, self.b6, self.b8
        psi2 = 2 * y + self.a1 * x + self.a3
        x2 = x * x
        memo = {
            0: x * 0,
            1: one,
            2: psi2,
            3: 3 * x2 * x2 + b2 * x2 * x + 3 * b4 * x2 + 3 * b6 * x + b8,
            4: psi2
            * (
                2 * x2 * x2 * x2
                + b2 * x2 * x2 * x
                + 5 * b4 * x2 * x2
                + 10 * b6 * x2 * x
                + 10 * b8 * x2
                + (b2 * b8 - b4 * b6) * x
                + (b4 * b8 - b6 * b6)
            ),
        }

        def get(n):
            if n in memo:
                return memo[n]
            k = n // 2
            if n % 2:
                val = get(k + 2) * get(k) ** 3 - get(k - 1) * get(k + 1) ** 3
            else:
                val = (get(k + 2) * get(k - 1) ** 2 - get(k - 2) * get(k + 1) ** 2) * get(k) / psi2
            memo[n] = val
            return val

        return get(m)

    def line_value(self, P, Q, Z):
        """l_{P,Q}(Z) / v_{P+Q}(Z): divisor (P) + (Q) - (P+Q) - (O)."""
        if P is None or Q is None:
            return Z[0] * 0 + 1
        s = self._slope(P, Q)
        if s is None:
            val = Z[0] - P[0]
            if _is_zero(val):
                raise SupportHit("evaluation point on a vertical line")
            return val
        lam, nu = s
        R = self.add(P, Q)
        num = Z[1] - lam * Z[0] - nu
        den = Z[0] - R[0]
        if _is_zero(num) or _is_zero(den):
            raise SupportHit("evaluation point in the support of a Miller line")
        return num / den

    def miller(self, m, P, Z):
        """f_{m,P}(Z) with div f = m(P) - (mP) - (m-1)(O), normalized by monic lines."""
        if m < 1:
            raise ValueError("m must be positive")
        f = Z[0] * 0 + 1
        T = P
        for bit in bin(m)[3:]:
            f = f * f * self.line_value(T, T, Z)
            T = self.add(T, T)
            if bit == "1":
                f = f * self.line_value(T, P, Z)
                T = self.add(T, P)
        return f

    def transform(self, r, s, t, u):
        """Curve for the substitution x = u^2 x' + r, y = u^3 y' + s u^2 x' + t."""
        a1, a2, a3, a4, a6 = self.coeffs
        na1 = (a1 + 2 * s) / u
        na2 = (a2 - s * a1 + 3 * r - s * s) / u**2
        na3 = (a3 + r * a1 + 2 * t) / u**3
        na4 = (a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t) / u**4
        na6 = (a6 + r * a4 + r * r * a2 + r**3 - t * a3 - t * t - r * t * a1) / u**6
        return WeierstrassCurve(na1, na2, na3, na4, na6)

    @staticmethod
    def map_point(P, r, s, t, u):
        """Image of P under x' = (x - r)/u^2, y' = (y - s(x - r) - t)/u^3."""
        if P is None:
            return None
        x, y = P
        xp = (x - r) / u**2
        yp = (y - s * (x - r) - t) / u**3
        return (xp, yp)

    def __repr__(self):
        return f"WeierstrassCurve{self.coeffs}"
