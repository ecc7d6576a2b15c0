"""Global p-adic height pairing on an elliptic curve over Q.

The pairing of z = sum n_i (a_i) with D = sum m_j (Q_j) is

    <D, z> = - sum_v sum_{i,j} n_i m_j Λ_v(a_i - Q_j)

where Λ_v is the Neron function attached to ρ_v.  All Λ_v share one
normalization, namely Λ(mP) = m^2 Λ(P) - ρ(ψ_m(P)) + (m^2 - 1) ρ(Δ)/12, which
makes constants cancel between places.

* At ℓ != p, ρ_ℓ(y) = -ord_ℓ(y) λ(ℓ) and on points with nonsingular reduction
  Λ_ℓ(P) = [max(0, -ord_ℓ x)/2 + ord_ℓ(Δ)/12] λ(ℓ).  Other points are moved
  there by multiplication.
* At p, the curve is moved onto the Tate model of its q-parameter, a multiple
  of the point is pushed into the formal group, its u-parameter is read off
  from the formal isomorphism with G_m, and the Tate Neron function is used.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from sympy import factorint

from .heights import tate_neron
from .padic import BUFFER, DEFAULT_PREC, LogBranch, PadicElement, PadicError, is_square, padic_sqrt, valuation
from .tate import TateCurve, j_series
from .weierstrass import WeierstrassCurve


class NotMultiplicative(PadicError, ValueError):
    pass


class NotSplit(PadicError, ValueError):
    pass


class ModelNotMinimal(ValueError):
    pass


class DivisorChoiceUnavailable(PadicError):
    pass


TORSION_BOUND = 12  # largest order of a rational torsion point


def _ord(x, ell):
    x = Fraction(x)
    if x == 0:
        return float("inf")
    return valuation(x.numerator, ell) - valuation(x.denominator, ell)


# -- q-parameter -------------------------------------------------------------------


def q_parameter(j, p, prec=DEFAULT_PREC):
    """q with j(q) = j, by iterating q <- (1/j) * q j(q).

    Each step gains ord(1/j) digits since q j(q) = 1 + 744 q + ... .
    """
    work = prec + BUFFER
    s = (PadicElement.from_rational(j, p, work) if not isinstance(j, PadicElement) else j).inverse()
    e = s.valuation
    if e < 1:
        raise NotMultiplicative("ord_p(j) >= 0: reduction is not multiplicative")
    terms = -(-(work + e) // e) + 2
    coeffs = j_series(terms)
    q = s
    for _ in range(work // e + 3):
        acc = PadicElement.zero(p, work + e)
        qk = PadicElement.exact(1, p, work + e)
        for c in coeffs:
            acc = acc + qk * c
            qk = qk * q
        nxt = (s * acc).with_rel_precision(work)
        if nxt.agrees_with(q, work + e):
            q = nxt
            break
        q = nxt
    return q.with_rel_precision(prec)


# -- formal group ------------------------------------------------------------------


def _series_mul(a, b, n):
    out = []
    for k in range(n):
        acc = a[0] * b[k]
        for i in range(1, k + 1):
            acc = acc + a[i] * b[k - i]
        out.append(acc)
    return out


def _series_inv(a, n):
    inv0 = a[0].inverse()
    out = [inv0]
    for k in range(1, n):
        acc = a[1] * out[k - 1]
        for i in range(2, k + 1):
            acc = acc + a[i] * out[k - i]
        out.append(-acc * inv0)
    return out


class FormalIso:
    """U(t) = 1 + t + ... with u = U(-x/y) the G_m-parameter of a formal point.

    U solves dU/U = ω, ω the invariant differential dx/(2y + a1 x + a3)
    expanded in t; coefficients are computed to degree ``degree``.
    """

    def __init__(self, curve, degree, prec):
        self.degree = degree
        self.prec = prec
        n = degree + 1
        p = curve.a1.p
        zero = PadicElement.zero(p, prec)
        one = PadicElement.exact(1, p, prec)
        a1, a2, a3, a4, a6 = (c + zero for c in curve.coeffs)
        # w = t^3 W(t) with w = t^3 + a1 t w + a2 t^2 w + a3 w^2 + a4 t w^2 + a6 w^3
        top = n + 3
        w = [zero] * top
        w2 = [zero] * top
        w3 = [zero] * top
        for k in range(3, top):
            # w^2 and w^3 at degree k only involve w below degree k - 2
            s2 = zero
            for i in range(3, k - 2):
                s2 = s2 + w[i] * w[k - i]
            w2[k] = s2
            s3 = zero
            for i in range(3, k - 5):
                s3 = s3 + w[i] * w2[k - i]
            w3[k] = s3
            acc = one if k == 3 else zero
            w[k] = acc + a1 * w[k - 1] + a2 * w[k - 2] + a3 * w2[k] + a4 * w2[k - 1] + a6 * w3[k]
        big_w = w[3:3 + n]
        v = _series_inv(big_w, n)
        dv = [v[k] * k for k in range(n)]  # t V'(t)
        num = [dv[k] - v[k] * 2 for k in range(n)]
        den = [v[k] * -2 + (a1 * v[k - 1] if k >= 1 else zero) + (a3 if k == 3 else zero) for k in range(n)]
        omega = _series_mul(num, _series_inv(den, n), n)
        u = [one]
        for k in range(n - 1):
            acc = zero
            for i in range(k + 1):
                acc = acc + u[i] * omega[k - i]
            u.append(acc / (k + 1))
        self.omega = omega
        self.coeffs = u

    def __call__(self, t):
        if t.valuation < 1:
            raise ValueError("t must lie in p Z_p")
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * t + c
        # truncation error is O(t^(degree+1))
        return acc.with_abs_precision(min(acc.abs_precision, t.valuation * (self.degree + 1)))


def formal_iso_series(curve, p, prec):
    """U(t) for a Weierstrass curve over Q_p, to p^prec for t of valuation >= 1."""
    guard = prec // (p - 1) + BUFFER
    return FormalIso(curve, prec + guard, prec + 2 * guard)


# -- the curve ---------------------------------------------------------------------


def _vanishes_mod(x, ell):
    return x == 0 or _ord(x, ell) > 0


def _is_integer(x):
    return Fraction(x).denominator == 1


class RationalCurve:
    """A minimal Weierstrass model over Q with split multiplicative reduction at p."""

    def __init__(self, coeffs, p, prec=DEFAULT_PREC):
        if len(coeffs) != 5:
            raise ValueError("give a1, a2, a3, a4, a6")
        if not all(_is_integer(c) for c in coeffs):
            raise ValueError("model must have integral coefficients")
        if p < 5:
            raise ValueError("global heights need p >= 5")
        self.model = WeierstrassCurve.rational(coeffs)
        self.p = p
        self.prec = prec
        self.work = prec + 2 * BUFFER
        disc = self.model.disc
        if disc == 0:
            raise ValueError("singular curve")
        self.disc = disc
        self.bad_primes = sorted(int(ell) for ell in factorint(abs(int(disc))))
        for ell in self.bad_primes:
            self._check_minimal(ell)
        j = self.model.j_invariant()
        if _ord(j, p) >= 0:
            raise NotMultiplicative(f"ord_{p}(j) >= 0: no Tate parametrization at {p}")
        self.j = j
        if not self.split_by_c6():
            raise NotSplit(f"multiplicative reduction at {p} is not split")
        self.q = q_parameter(j, p, self.work)
        self.tate = TateCurve(self.q, self.work)
        self._tate_transform()
        self._formal = None

    @property
    def coeffs(self):
        return self.model.coeffs

    def _check_minimal(self, ell):
        m = self.model
        if _ord(m.disc, ell) < 12:
            return
        if m.c4 != 0 and _ord(m.c4, ell) < 4:
            return
        if m.c6 != 0 and _ord(m.c6, ell) < 6:
            return
        raise ModelNotMinimal(f"model may not be minimal at {ell}")

    def split_by_c6(self):
        """Split iff -c6 is a square mod p (c6 scaled to a unit first)."""
        p = self.p
        c6 = self.model.c6
        k = _ord(c6, p)
        if k % 6:
            return False
        unit = -c6 / Fraction(p) ** k
        r = unit.numerator * pow(unit.denominator, -1, p) % p
        return pow(r, (p - 1) // 2, p) == 1

    def _qp(self, x, digits=None):
        return PadicElement.from_rational(x, self.p, digits or self.work)

    def _tate_transform(self):
        """(r, s, t, μ) with x = μ^2 X + r, y = μ^3 Y + s μ^2 X + t onto the Tate model."""
        tw = self.tate.weierstrass()
        m = self.model
        c4, c6 = self._qp(m.c4), self._qp(m.c6)
        mu2 = c6 * tw.c4 / (c4 * tw.c6)
        if not is_square(mu2):
            raise NotSplit("curve is a nontrivial quadratic twist of its Tate curve")
        mu = padic_sqrt(mu2)
        a1, a2, a3 = (self._qp(c) for c in m.coeffs[:3])
        s = (mu - a1) / 2
        r = (s * s + s * a1 - a2) / 3
        t = -(a3 + r * a1) / 2
        image = WeierstrassCurve(*(self._qp(c) for c in m.coeffs)).transform(r, s, t, mu)
        digits = self.prec
        for got, want in ((image.a1, tw.a1), (image.a4, tw.a4), (image.a6, tw.a6)):
            if not got.agrees_with(want, digits):
                raise PadicError("q-parameter does not reproduce the curve")
        self.transform = (r, s, t, mu)
        self.tate_model = tw

    @property
    def formal(self):
        if self._formal is None:
            self._formal = formal_iso_series(self.tate_model, self.p, self.work)
        return self._formal

    # -- points --------------------------------------------------------------------

    def point(self, x, y):
        P = (Fraction(x), Fraction(y))
        if not self.model.contains(P):
            raise ValueError(f"{P} is not on the curve")
        return P

    def to_tate(self, P):
        r, s, t, mu = self.transform
        return WeierstrassCurve.map_point((self._qp(P[0]), self._qp(P[1])), r, s, t, mu)

    def torsion_order(self, P):
        """k with kP = O, or None for points of infinite order."""
        Q = P
        for k in range(1, TORSION_BOUND + 1):
            if Q is None:
                return k
            Q = self.model.add(Q, P)
        return None

    def u_parameter(self, P):
        """u in 1 + p Z_p for a point in the formal group at p."""
        X, Y = self.to_tate(P)
        if X.valuation >= 0:
            raise ValueError("point is not in the formal group at p")
        return self.formal(-X / Y)

    def formal_multiplier(self, P):
        """Least m with mP in the formal group at p (None if mP = O first)."""
        bound = max(_ord(self.disc, self.p), 1) * (self.p - 1)
        Q = P
        for m in range(1, bound + 1):
            if Q is None:
                return None
            if _ord(Q[0], self.p) < 0:
                return m, Q
            Q = self.model.add(Q, P)
        raise PadicError("no multiple lands in the formal group")

    # -- Neron functions -----------------------------------------------------------

    def neron_p(self, P, branch):
        """Λ_p(P) in Q_p for the log branch (before the δ scale)."""
        lam = lambda x: branch(self._qp(x))  # noqa: E731
        k = self.torsion_order(P)
        if k is not None:
            m = k + 1
            return lam(self.model.psi(m, P)) / (m * m - 1) - lam(self.disc) / 12
        m, Q = self.formal_multiplier(P)
        u = self.u_parameter(Q)
        top = tate_neron(u, self.tate, branch)
        if m == 1:
            return top
        return (top + lam(self.model.psi(m, P)) - lam(self.disc) * Fraction(m * m - 1, 12)) / (m * m)

    def _nonsingular_at(self, P, ell):
        x, y = P
        if x != 0 and _ord(x, ell) < 0:
            return True
        a1, a2, a3, a4, _ = self.model.coeffs
        fy = 2 * y + a1 * x + a3
        fx = a1 * y - 3 * x * x - 2 * a2 * x - a4
        return not (_vanishes_mod(fy, ell) and _vanishes_mod(fx, ell))

    def neron_coefficient(self, P, ell):
        """c with Λ_ℓ(P) = c λ(ℓ), exact."""
        od = _ord(self.disc, ell)
        k = self.torsion_order(P)
        if k is not None:
            m = k + 1
            return Fraction(-_ord(self.model.psi(m, P), ell), m * m - 1) + Fraction(od, 12)
        bound = max(od, 4)
        Q = P
        for m in range(1, bound + 1):
            if self._nonsingular_at(Q, ell):
                top = Fraction(max(0, -_ord(Q[0], ell)) if Q[0] else 0, 2) + Fraction(od, 12)
                if m == 1:
                    return top
                return (top - _ord(self.model.psi(m, P), ell) + Fraction((m * m - 1) * od, 12)) / (m * m)
            Q = self.model.add(Q, P)
        raise PadicError(f"no multiple of the point has nonsingular reduction at {ell}")


# -- ρ-families --------------------------------------------------------------------


class RhoFamily:
    """ρ_p = δ λ and ρ_ℓ(x) = -δ ord_ℓ(x) λ(ℓ); the product formula forces λ(p) = 0."""

    def __init__(self, p, delta=1, branch=None, prec=DEFAULT_PREC + 20):
        branch = branch or LogBranch.iwasawa(p, prec)
        if not branch.value_at_p.is_zero():
            raise ValueError("Σ_v ρ_v = 0 on Q^x requires the branch with λ(p) = 0")
        self.p = p
        self.branch = branch
        self.prec = prec
        self.delta = delta if isinstance(delta, PadicElement) else PadicElement.exact(delta, p, prec)

    def log_of(self, x):
        return self.branch(PadicElement.from_rational(x, self.p, self.prec))

    def rho_p(self, x):
        return self.delta * self.log_of(x)

    def rho_ell(self, x, ell):
        if ell == self.p:
            raise ValueError("ℓ must differ from p")
        return self.delta * self.log_of(ell) * (-_ord(x, ell))


def product_formula_check(alpha, rho):
    """Σ_v ρ_v(α) over p and the primes of α."""
    alpha = Fraction(alpha)
    if alpha == 0:
        raise ValueError("α must be nonzero")
    total = rho.rho_p(alpha)
    primes = set(factorint(abs(alpha.numerator))) | set(factorint(alpha.denominator))
    for ell in sorted(int(x) for x in primes):
        if ell != rho.p:
            total = total + rho.rho_ell(alpha, ell)
    return total


# -- local and global pairings -----------------------------------------------------


def _differences(curve, d_points, z_points):
    out = []
    for n, a in z_points:
        for m, Q in d_points:
            diff = curve.model.sub(a, Q)
            if diff is None:
                raise DivisorChoiceUnavailable("supports of D and z meet")
            out.append((n * m, diff))
    return out


def _check_degree(d_points, z_points):
    if sum(m for m, _ in d_points) or sum(n for n, _ in z_points):
        raise ValueError("divisor and zero-cycle must have degree 0")


def unramified_splitting(curve, d_points, z_points, ell, rho):
    """Local term at ℓ != p: -δ Σ n_i m_j Λ_ℓ(a_i - Q_j)."""
    if ell == curve.p:
        raise ValueError("ℓ must differ from p")
    _check_degree(d_points, z_points)
    c = sum((-k * curve.neron_coefficient(P, ell) for k, P in _differences(curve, d_points, z_points)), Fraction(0))
    return rho.delta * rho.log_of(ell) * c


def ramified_splitting(curve, d_points, z_points, rho):
    """Local term at p: -δ Σ n_i m_j Λ_p(a_i - Q_j)."""
    _check_degree(d_points, z_points)
    total = None
    for k, P in _differences(curve, d_points, z_points):
        t = curve.neron_p(P, rho.branch) * (-k)
        total = t if total is None else total + t
    return rho.delta * total


def relevant_primes(curve, points):
    primes = set(curve.bad_primes) | {curve.p}
    for P in points:
        for coord in P:
            primes |= {int(x) for x in factorint(Fraction(coord).denominator)}
    return sorted(primes)


@dataclass
class GlobalPairing:
    per_prime: list = field(default_factory=list)
    total: PadicElement = None
    divisor: list = field(default_factory=list)
    zero_cycle: list = field(default_factory=list)

    def to_json_obj(self):
        return {
            "per_prime": [{"prime": ell, "value": v.to_token()} for ell, v in self.per_prime],
            "total": self.total.to_token(),
            "divisor": [[m, _pt(P)] for m, P in self.divisor],
            "zero_cycle": [[n, _pt(P)] for n, P in self.zero_cycle],
        }


def _pt(P):
    return None if P is None else [str(P[0]), str(P[1])]


def global_pairing(curve, d_points, z_points, rho):
    """<D, z> = Σ_v of the local terms; points are (x, y) tuples or None for O."""
    _check_degree(d_points, z_points)
    diffs = _differences(curve, d_points, z_points)
    primes = relevant_primes(curve, [P for _, P in diffs])
    out = GlobalPairing(divisor=list(d_points), zero_cycle=list(z_points))
    total = None
    for ell in primes:
        if ell == curve.p:
            v = ramified_splitting(curve, d_points, z_points, rho)
        else:
            v = unramified_splitting(curve, d_points, z_points, ell, rho)
        out.per_prime.append((ell, v))
        total = v if total is None else total + v
    out.total = total.with_abs_precision(min(total.abs_precision, curve.prec))
    return out


def _auxiliary_candidates(curve, P, Q, seed):
    E = curve.model
    cands = []
    for a in range(-3, 4):
        for b in range(-3, 4):
            if a or b:
                cands.append(E.add(E.mul(a, P), E.mul(b, Q)))
    rng = random.Random(seed)
    rng.shuffle(cands)
    return cands


def global_height(curve, P, Q, rho, R=None, seed=0):
    """h(P, Q) with D = (Q + R) - (R), z = (P) - (O); h(P, P) is twice the height of P."""
    E = curve.model
    cands = [R] if R is not None else _auxiliary_candidates(curve, P, Q, seed)
    for R in cands:
        if R is None:
            continue
        QR = E.add(Q, R)
        if QR is None or E.sub(P, QR) is None or E.sub(P, R) is None:
            continue
        return global_pairing(curve, [(1, QR), (-1, R)], [(1, P), (-1, None)], rho)
    raise DivisorChoiceUnavailable("no auxiliary point separates the supports")


# -- p-adic Weierstrass route on a Tate curve --------------------------------------


class WeierstrassNeronP:
    """Λ_p on the Tate model Y^2 + XY = X^3 + a4 X + a6, from coordinates alone.

    A multiple mP is found in the formal group (ord X < 0) with the
    Weierstrass group law, its u-parameter comes from U(-X/Y) and
    Λ(P) = [Λ(mP) + λ(ψ_m(P)) - (m^2 - 1) λ(Δ)/12] / m^2.
    """

    def __init__(self, tate, branch):
        self.tate = tate
        self.branch = branch
        self.model = tate.weierstrass()
        self.formal = formal_iso_series(self.model, tate.p, tate.prec)
        self.log_disc = branch(self.model.disc)

    def multiplier(self, P):
        bound = self.tate.e * (self.tate.p - 1)
        Q = P
        for m in range(1, bound + 1):
            if Q is None:
                raise PadicError("torsion point on the Tate curve")
            if Q[0].valuation < 0:
                return m, Q
            Q = self.model.add(Q, P)
        raise PadicError("no multiple lands in the formal group")

    def __call__(self, P):
        m, Q = self.multiplier(P)
        u = self.formal(-Q[0] / Q[1])
        top = tate_neron(u, self.tate, self.branch)
        if m == 1:
            return top
        psi = self.branch(self.model.psi(m, P))
        return (top + psi - self.log_disc * Fraction(m * m - 1, 12)) / (m * m)


def weierstrass_local_pairing(tate, d_points, z_points, branch, delta=1):
    """-δ Σ n_i m_j Λ_p(a_i - Q_j) with points and differences in Weierstrass coordinates."""
    _check_degree(d_points, z_points)
    neron = WeierstrassNeronP(tate, branch)
    E = neron.model
    total = None
    for n, a in z_points:
        for m, Q in d_points:
            diff = E.sub(a, Q)
            if diff is None:
                raise DivisorChoiceUnavailable("supports of D and z meet")
            t = neron(diff) * (-n * m)
            total = t if total is None else total + t
    return total * delta


def miller_eval(curve, m, P, Z):
    """f_{m,P}(Z) with div f = m(P) - (mP) - (m-1)(O); curve may be a RationalCurve."""
    model = getattr(curve, "model", curve)
    return model.miller(m, P, Z)
