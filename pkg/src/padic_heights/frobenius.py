"""Frobenius modules, unit-root subspaces and the lifting of Hodge splittings.

A module is a Frobenius matrix acting on de Rham coordinates together with
the subspace of invariant differentials (the Hodge sub-space).  The quotient
by that subspace is H(X); it gets fixed coordinates from the standard basis
vectors completing the Hodge basis.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from .matrix import (
    PadicMatrix,
    complete_basis,
    inverse,
    kernel,
    rank,
    row_reduce,
)
from .padic import BUFFER, PadicError, PrecisionExhausted

LABELS = ("A", "B", "G", "T", "Gamma")


class NotOrdinary(PadicError):
    pass


class DegenerateFiltration(PadicError):
    pass


class DiagramInconsistent(PadicError):
    pass


def _mod_p(m):
    return m.with_abs_precision(1)


def _residual(a, b):
    """Smallest valuation among the entries of a - b (None if all vanish)."""
    d = a - b
    vals = [x.valuation for r in d.rows for x in r]
    return min(vals) if vals else None


def lattice_basis(cols):
    """Canonical basis of the lattice spanned by columns independent mod p.

    Rows whose residues are independent mod p are chosen by elimination and
    the basis is normalized to the identity on them, so no digits are lost.
    """
    if cols.ncols == 0:
        return cols
    _, piv = row_reduce(_mod_p(cols.T))
    block = PadicMatrix([cols.rows[i] for i in piv], cols.p, (len(piv), cols.ncols))
    return cols @ inverse(block)


def same_subspace(a, b, digits):
    """Column spans of a and b agree once both are truncated to ``digits``."""
    a = a.with_abs_precision(digits)
    b = b.with_abs_precision(digits)
    ra, rb = rank(a), rank(b)
    return ra == rb and rank(a.hstack(b)) == ra


class FrobeniusModule:
    """Frobenius matrix on H^1_dR(X) with the Hodge sub-space Inv(X)."""

    def __init__(self, phi, hodge_sub, label="A", q=None):
        if phi.nrows != phi.ncols:
            raise ValueError("Frobenius matrix must be square")
        if hodge_sub.nrows != phi.nrows:
            raise ValueError("Hodge basis lives in a space of the wrong dimension")
        if label not in LABELS:
            raise ValueError(f"label must be one of {LABELS}")
        if rank(hodge_sub) != hodge_sub.ncols:
            raise ValueError("Hodge basis columns are dependent")
        p = phi.p
        n = phi.nrows
        if label == "T":
            target = PadicMatrix.identity(n, p, phi.min_precision()).scale(q if q is not None else p)
            if not phi.agrees_with(target, phi.min_precision()):
                raise ValueError("torus Frobenius must be q times the identity")
        if label == "Gamma":
            if not phi.agrees_with(PadicMatrix.identity(n, p, phi.min_precision()), phi.min_precision()):
                raise ValueError("Frobenius on Hom(Gamma, K) is the identity")
        self.phi = phi
        self.hodge_sub = hodge_sub
        self.label = label
        self.p = p
        self._prec = max(phi.min_precision(), hodge_sub.min_precision()) if n else 30
        # coordinates on H(X): the standard vectors completing the Hodge basis
        self._complement = complete_basis(hodge_sub)
        frame = hodge_sub.hstack(self.complement_vectors())
        self._frame_inv = inverse(frame) if n else frame

    @property
    def dim(self):
        return self.phi.nrows

    @property
    def hodge_dim(self):
        return self.hodge_sub.ncols

    @property
    def h_dim(self):
        return self.dim - self.hodge_dim

    def complement_vectors(self):
        n = self.dim
        return PadicMatrix.from_columns(
            [[1 if k == i else 0 for k in range(n)] for i in self._complement], self.p, n, self._prec
        )

    def quotient_map(self):
        """H^1_dR(X) -> H(X) with kernel Inv(X)."""
        rows = self._frame_inv.rows[self.hodge_dim:]
        return PadicMatrix(rows, self.p, (self.h_dim, self.dim))

    def section(self):
        """A fixed right inverse of the quotient map."""
        return self.complement_vectors()

    def hodge_coordinates(self):
        """A left inverse of the Hodge inclusion (coordinates w.r.t. the frame)."""
        rows = self._frame_inv.rows[: self.hodge_dim]
        return PadicMatrix(rows, self.p, (self.hodge_dim, self.dim))

    def conjugate(self, c):
        """The same module in coordinates x' = c x."""
        ci = inverse(c)
        return FrobeniusModule(c @ self.phi @ ci, c @ self.hodge_sub, self.label)

    def __repr__(self):
        return f"FrobeniusModule({self.label}, dim={self.dim}, hodge_dim={self.hodge_dim})"


@dataclass(frozen=True)
class Splitting:
    """r: H(X) -> H^1_dR(X) and the complementary s: H^1_dR(X) -> Inv(X)."""

    module: FrobeniusModule
    r: PadicMatrix
    s: PadicMatrix

    def defect(self):
        """Valuations of Q r - 1 and s i - 1 (None when exactly zero)."""
        m = self.module
        q = m.quotient_map()
        e1 = _residual(q @ self.r, PadicMatrix.identity(m.h_dim, m.p, m._prec))
        e2 = _residual(self.s @ m.hodge_sub, PadicMatrix.identity(m.hodge_dim, m.p, m._prec))
        return e1, e2

    def image(self):
        return self.r


def unit_root_subspace(module, prec=None):
    """Basis of the slope-0 part W of φ, as a d x h matrix.

    φ^n for n >= d·N kills the positive-slope part of an integral lattice
    modulo p^N, so the image of φ^n is W modulo p^N.  The count of slope-0
    roots is the rank of φ^n mod p and must equal dim H(X).
    """
    phi = module.phi
    d, p = module.dim, module.p
    if d == 0:
        return PadicMatrix.zeros(0, 0, p)
    if not phi.is_integral():
        raise ValueError("Frobenius matrix is not integral in the given basis")
    n_digits = prec or phi.min_precision()
    steps = max(d * n_digits, 1)
    big = (phi**steps).with_abs_precision(n_digits)
    slope0 = rank(_mod_p(big))
    if slope0 != module.h_dim:
        raise NotOrdinary(f"slope-0 multiplicity is {slope0}, expected {module.h_dim}")
    if slope0 == 0:
        return PadicMatrix.zeros(d, 0, p)
    _, cols = row_reduce(_mod_p(big))
    basis = lattice_basis(big.select_columns(cols))
    # stabilization: d further steps must leave the subspace unchanged
    later = (big @ phi**d).with_abs_precision(n_digits)
    check = lattice_basis(later.select_columns(cols))
    if not basis.agrees_with(check, n_digits - BUFFER):
        raise PrecisionExhausted("unit-root lattice did not stabilize")
    return basis


def unit_root_splitting(module, prec=None):
    w = unit_root_subspace(module, prec)
    frame = module.hodge_sub.hstack(w)
    if rank(frame) < module.dim:
        raise DegenerateFiltration("Inv(X) meets the unit-root subspace")
    q = module.quotient_map()
    r = w @ inverse(q @ w) if module.h_dim else w
    s = PadicMatrix(inverse(frame).rows[: module.hodge_dim], module.p, (module.hodge_dim, module.dim))
    return Splitting(module, r, s)


# -- semiabelian diagrams ---------------------------------------------------


@dataclass
class SemiabelianDiagram:
    """The de Rham spaces of A, G, B, T, Γ with their connecting maps.

    Maps act on column vectors in the coordinates of each module: beta and
    gamma use quotient coordinates of H(B), H(G) and H(A); alpha uses the
    coordinates of the Hodge bases.
    """

    A: FrobeniusModule
    G: FrobeniusModule
    B: FrobeniusModule
    T: FrobeniusModule
    Gamma: FrobeniusModule
    alpha: PadicMatrix
    beta: PadicMatrix
    gamma: PadicMatrix
    pi_star: PadicMatrix
    p_star: PadicMatrix
    g_star: PadicMatrix
    hom_gamma_incl: PadicMatrix
    notes: dict = field(default_factory=dict)

    @property
    def p(self):
        return self.G.p

    def check(self, digits=None):
        """Raise DiagramInconsistent unless exactness and commutativity hold."""
        d = digits or self.pi_star.min_precision() - BUFFER
        A, G, B, T = self.A, self.G, self.B, self.T

        def need(cond, what):
            if not cond:
                raise DiagramInconsistent(what)

        def zero(m):
            return m.with_abs_precision(d).is_zero()

        need(self.p_star.shape == (G.dim, B.dim), "p_star has the wrong shape")
        need(self.g_star.shape == (T.dim, G.dim), "g_star has the wrong shape")
        need(self.pi_star.shape == (G.dim, A.dim), "pi_star has the wrong shape")
        need(self.alpha.shape == (G.hodge_dim, A.hodge_dim), "alpha has the wrong shape")
        need(self.beta.shape == (G.h_dim, B.h_dim), "beta has the wrong shape")
        need(self.gamma.shape == (G.h_dim, A.h_dim), "gamma has the wrong shape")
        need(self.hom_gamma_incl.shape == (A.dim, self.Gamma.dim), "hom_gamma_incl has the wrong shape")
        # the B-G-T column: 0 -> H1(B) -> H1(G) -> H1(T) -> 0
        need(rank(self.p_star) == B.dim, "p_star is not injective")
        need(rank(self.g_star) == T.dim, "g_star is not surjective")
        need(zero(self.g_star @ self.p_star), "g_star p_star is not zero")
        need(B.dim + T.dim == G.dim, "the B-G-T column is not exact")
        need(rank(self.g_star @ G.hodge_sub) == T.dim, "Inv(T) -> H1(T) is not onto")
        need(zero(G.quotient_map() @ self.p_star @ B.hodge_sub), "p_star does not preserve Hodge spaces")
        need(zero(G.quotient_map() @ self.p_star - self.beta @ B.quotient_map()), "beta square fails")
        need(self.beta.nrows == self.beta.ncols and rank(self.beta) == self.beta.nrows, "beta is not invertible")
        # the A-G square and Hom(Γ,K)
        need(rank(self.pi_star) == G.dim, "pi_star is not surjective")
        need(rank(self.hom_gamma_incl) == self.Gamma.dim, "Hom(Gamma,K) does not embed")
        need(zero(self.pi_star @ self.hom_gamma_incl), "pi_star does not kill Hom(Gamma,K)")
        need(A.dim == G.dim + self.Gamma.dim, "the Γ-A-G column is not exact")
        need(zero(self.pi_star @ A.hodge_sub - G.hodge_sub @ self.alpha), "alpha square fails")
        need(self.alpha.nrows == self.alpha.ncols and rank(self.alpha) == self.alpha.nrows, "alpha is not invertible")
        need(zero(G.quotient_map() @ self.pi_star - self.gamma @ A.quotient_map()), "gamma square fails")
        need(rank(self.gamma) == G.h_dim, "gamma is not surjective")
        # Frobenius compatibility
        need(zero(self.p_star @ B.phi - G.phi @ self.p_star), "p_star is not a Frobenius morphism")
        need(zero(self.pi_star @ A.phi - G.phi @ self.pi_star), "pi_star is not a Frobenius morphism")
        need(zero(self.g_star @ G.phi - T.phi @ self.g_star), "g_star is not a Frobenius morphism")
        return True


def lift_splitting(diagram, r_b):
    """L(r_B): lift a splitting of the B-row to a splitting for A.

    r_G = p* r_B β^{-1}; s_G is its complement onto Inv(G);
    s_A = α^{-1} s_G π*; L(r_B) is the splitting with image ker s_A.
    """
    D = diagram
    A, G = D.A, D.G
    p = D.p
    if G.h_dim:
        r_g = D.p_star @ r_b.r @ inverse(D.beta)
    else:
        r_g = PadicMatrix.zeros(G.dim, 0, p)
    frame = G.hodge_sub.hstack(r_g)
    if rank(frame) < G.dim:
        raise DiagramInconsistent("lifted splitting is not complementary to Inv(G)")
    s_g = PadicMatrix(inverse(frame).rows[: G.hodge_dim], p, (G.hodge_dim, G.dim))
    s_a = inverse(D.alpha) @ s_g @ D.pi_star if A.hodge_dim else PadicMatrix.zeros(0, A.dim, p)
    k = kernel(s_a) if A.hodge_dim else PadicMatrix.identity(A.dim, p)
    if k.ncols != A.h_dim:
        raise DiagramInconsistent("kernel of the lifted complement has the wrong dimension")
    qk = A.quotient_map() @ k
    lifted = k @ inverse(qk) if A.h_dim else k
    split = Splitting(A, lifted, s_a)
    if diagram_residual(D, lifted, r_g) is not None and diagram_residual(D, lifted, r_g) < (
        lifted.min_precision() - BUFFER
    ):
        raise DiagramInconsistent("the lifting square does not commute for the lifted splitting")
    return split


def diagram_residual(diagram, r_a, r_g):
    """Valuation of π* r_A − r_G γ (None when the difference is exactly zero)."""
    return _residual(diagram.pi_star @ r_a, r_g @ diagram.gamma)


def g_splitting(diagram, r_b):
    """r_G = p* r_B β^{-1}."""
    if diagram.G.h_dim == 0:
        return PadicMatrix.zeros(diagram.G.dim, 0, diagram.p)
    return diagram.p_star @ r_b.r @ inverse(diagram.beta)


@dataclass(frozen=True)
class LiftReport:
    passed: bool
    rank_w_a: int
    rank_lift: int
    diagram_residual: object
    subspace_digits: int
    digits_required: int


def verify_unit_root_lift(diagram, prec=None):
    """Check im L(r_B) = W_A where r_B is the unit-root splitting of B.

    Work happens at the precision of the input matrices; the check demands
    agreement to ``prec - BUFFER`` digits (``prec`` defaults to that input
    precision, so pass a smaller value to leave room for elimination loss).
    """
    n = diagram.A.phi.min_precision()
    r_b = unit_root_splitting(diagram.B, n)
    lifted = lift_splitting(diagram, r_b)
    w_a = unit_root_subspace(diagram.A, n)
    required = (prec or n) - BUFFER
    agree = same_subspace(lifted.r, w_a, required)
    # digits of agreement: normalize both bases on the same rows
    digits = n
    if w_a.ncols:
        _, piv = row_reduce(_mod_p(w_a.T))
        la = lifted.r @ inverse(PadicMatrix([lifted.r.rows[i] for i in piv], w_a.p, (len(piv), w_a.ncols)))
        lw = w_a @ inverse(PadicMatrix([w_a.rows[i] for i in piv], w_a.p, (len(piv), w_a.ncols)))
        res = _residual(la, lw)
        digits = min(res, n) if res is not None else n
    res3 = diagram_residual(diagram, lifted.r, g_splitting(diagram, r_b))
    return LiftReport(
        passed=bool(agree) and digits >= required,
        rank_w_a=w_a.ncols,
        rank_lift=rank(lifted.r),
        diagram_residual=res3,
        subspace_digits=digits,
        digits_required=required,
    )


# -- synthetic diagrams -------------------------------------------------------


def _random_unimodular(n, p, rng, prec):
    """Integral matrix invertible mod p (upper times lower unitriangular, permuted)."""
    while True:
        m = PadicMatrix([[rng.randrange(p**3) for _ in range(n)] for _ in range(n)], p, (n, n), prec)
        if n == 0 or rank(_mod_p(m)) == n:
            return m


def tate_diagram(p, kappa=0, prec=30):
    """The Tate-curve case: B = 0, G = G_m, Γ of rank 1.

    H^1_dR(A) has basis (du/u, e_Γ) and φ_A = [[p, 0], [κ, 1]].
    """
    empty = PadicMatrix.zeros(0, 0, p)
    B = FrobeniusModule(empty, PadicMatrix.zeros(0, 0, p), "B")
    T = FrobeniusModule(PadicMatrix([[p]], p, prec=prec), PadicMatrix([[1]], p, prec=prec), "T")
    G = FrobeniusModule(PadicMatrix([[p]], p, prec=prec), PadicMatrix([[1]], p, prec=prec), "G")
    Gamma = FrobeniusModule(PadicMatrix([[1]], p, prec=prec), PadicMatrix.zeros(1, 0, p), "Gamma")
    A = FrobeniusModule(
        PadicMatrix([[p, 0], [kappa, 1]], p, prec=prec), PadicMatrix([[1], [0]], p, prec=prec), "A"
    )
    return SemiabelianDiagram(
        A=A,
        G=G,
        B=B,
        T=T,
        Gamma=Gamma,
        alpha=PadicMatrix([[1]], p, prec=prec),
        beta=PadicMatrix.zeros(0, 0, p),
        gamma=PadicMatrix.zeros(0, 1, p),
        pi_star=PadicMatrix([[1, 0]], p, prec=prec),
        p_star=PadicMatrix.zeros(1, 0, p),
        g_star=PadicMatrix([[1]], p, prec=prec),
        hom_gamma_incl=PadicMatrix([[0], [1]], p, prec=prec),
    )


def synthetic_diagram(b_module, t, gamma_rank, seed=0, change_basis=True, prec=30):
    """An ordinary semiabelian diagram built around a given B-module.

    G is an extension of B by a split torus of rank t, with φ_G block upper
    triangular; A extends G by Hom(Γ, K) with φ_A = [[φ_G, 0], [Z, 1]].  The
    Hodge spaces of G and A are random lifts.  With ``change_basis`` every
    de Rham space is re-coordinatized by a random unimodular matrix.
    """
    rng = random.Random(seed)
    p = b_module.p
    db, gb = b_module.dim, b_module.hodge_dim
    dg = db + t
    da = dg + gamma_rank

    def rnd(r, c):
        return PadicMatrix([[rng.randrange(p**4) for _ in range(c)] for _ in range(r)], p, (r, c), prec)

    zeros = PadicMatrix.zeros
    eye = PadicMatrix.identity
    # G = B ⊕ T in coordinates
    phi_g = PadicMatrix.block([[b_module.phi, rnd(db, t)], [zeros(t, db, p, prec), eye(t, p, prec).scale(p)]], p)
    inv_g = PadicMatrix.block([[b_module.hodge_sub, rnd(db, t)], [zeros(t, gb, p, prec), eye(t, p, prec)]], p)
    G = FrobeniusModule(phi_g, inv_g, "G")
    p_star = eye(db, p, prec).vstack(zeros(t, db, p, prec))
    g_star = zeros(t, db, p, prec).hstack(eye(t, p, prec))
    T = FrobeniusModule(eye(t, p, prec).scale(p), eye(t, p, prec), "T")
    # A = G ⊕ Hom(Γ, K)
    phi_a = PadicMatrix.block([[phi_g, zeros(dg, gamma_rank, p, prec)], [rnd(gamma_rank, dg), eye(gamma_rank, p, prec)]], p)
    inv_a = inv_g.vstack(rnd(gamma_rank, inv_g.ncols))
    pi_star = eye(dg, p, prec).hstack(zeros(dg, gamma_rank, p, prec))
    incl = zeros(dg, gamma_rank, p, prec).vstack(eye(gamma_rank, p, prec))
    Gamma = FrobeniusModule(eye(gamma_rank, p, prec), zeros(gamma_rank, 0, p), "Gamma")
    B = b_module
    if change_basis:
        cb = _random_unimodular(db, p, rng, prec)
        cg = _random_unimodular(dg, p, rng, prec)
        ca = _random_unimodular(da, p, rng, prec)
        B = b_module.conjugate(cb)
        G = G.conjugate(cg)
        p_star = cg @ p_star @ inverse(cb)
        g_star = g_star @ inverse(cg)
        phi_a = ca @ phi_a @ inverse(ca)
        inv_a = ca @ inv_a
        pi_star = cg @ pi_star @ inverse(ca)
        incl = ca @ incl
    A = FrobeniusModule(phi_a, inv_a, "A")
    alpha = G.hodge_coordinates() @ pi_star @ A.hodge_sub
    beta = G.quotient_map() @ p_star @ B.section()
    gamma = G.quotient_map() @ pi_star @ A.section()
    return SemiabelianDiagram(
        A=A, G=G, B=B, T=T, Gamma=Gamma, alpha=alpha, beta=beta, gamma=gamma,
        pi_star=pi_star, p_star=p_star, g_star=g_star, hom_gamma_incl=incl,
        notes={"seed": seed, "t": t, "gamma_rank": gamma_rank},
    )


def perturbed(splitting, m):
    """r + i_X∘m for a map m: H(X) -> Inv(X) (still a splitting, different image)."""
    mod = splitting.module
    return Splitting(mod, splitting.r + mod.hodge_sub @ m, splitting.s)


# -- JSON ---------------------------------------------------------------------


def matrix_to_json(m):
    return {"shape": [m.nrows, m.ncols], "rows": [[x.to_token() for x in r] for r in m.rows]}


def matrix_from_json(obj, p, prec=30):
    from fractions import Fraction

    from .padic import PadicElement

    nrows, ncols = obj["shape"]

    def entry(x):
        if isinstance(x, str) and " mod " in x:
            return PadicElement.from_token(x)
        return PadicElement.exact(Fraction(x), p, prec)

    return PadicMatrix([[entry(x) for x in r] for r in obj.get("rows", [])], p, (nrows, ncols))


def module_to_json(mod):
    return {"label": mod.label, "dim": mod.dim, "phi": matrix_to_json(mod.phi), "hodge_sub": matrix_to_json(mod.hodge_sub)}


def module_from_json(obj, p, prec=30):
    return FrobeniusModule(matrix_from_json(obj["phi"], p, prec), matrix_from_json(obj["hodge_sub"], p, prec), obj["label"])


MAP_NAMES = ("alpha", "beta", "gamma", "pi_star", "p_star", "g_star", "hom_gamma_incl")
MODULE_NAMES = ("A", "G", "B", "T", "Gamma")


def diagram_to_json(d):
    out = {"p": d.p, "dims": {k: getattr(d, k).dim for k in MODULE_NAMES}}
    out["modules"] = {k: module_to_json(getattr(d, k)) for k in MODULE_NAMES}
    out["maps"] = {k: matrix_to_json(getattr(d, k)) for k in MAP_NAMES}
    return out


def diagram_from_json(obj, prec=30):
    p = obj["p"]
    mods = {k: module_from_json(obj["modules"][k], p, prec) for k in MODULE_NAMES}
    maps = {k: matrix_from_json(obj["maps"][k], p, prec) for k in MAP_NAMES}
    for k in MODULE_NAMES:
        if obj.get("dims", {}).get(k, mods[k].dim) != mods[k].dim:
            raise DiagramInconsistent(f"declared dimension of {k} does not match its matrix")
    return SemiabelianDiagram(**mods, **maps)
