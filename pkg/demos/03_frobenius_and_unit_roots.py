"""Frobenius on H^1_dR of an ordinary curve, its unit-root line, and lifting splittings.

Kedlaya's algorithm gives the matrix of Frobenius on {dx/y, x dx/y}.  Its
slope-0 part is the unit-root subspace W, cut out here by iterating Frobenius.
For a semi-abelian extension 0 -> T -> G -> B -> 0 the unit-root splitting of B
lifts uniquely to the 1-motive side so that the comparison diagram commutes.
"""
import random

from padic_heights import PadicMatrix
from padic_heights.frobenius import (
    NotOrdinary,
    diagram_residual,
    g_splitting,
    lift_splitting,
    perturbed,
    synthetic_diagram,
    unit_root_splitting,
    unit_root_subspace,
    verify_unit_root_lift,
)
from padic_heights.kedlaya import GoodCurve, count_points_naive, frobenius_matrix, frobenius_module

p = 5
# y^2 = x^3 + a x + b at p = 5
for a, b in ((1, 1), (1, 0), (0, 1)):
    curve = GoodCurve.short(a, b, p)
    res = frobenius_matrix(curve, 30)
    print(f"(a, b) = ({a}, {b}): a_5 from counting {count_points_naive(curve.f, p)}, from Frobenius {res.a_p}")
    try:
        w = unit_root_subspace(frobenius_module(curve, 30))
        print("   unit-root line spanned by", [w[i, 0].to_token() for i in range(2)])
    except NotOrdinary as exc:
        print("   not ordinary:", exc)

base = frobenius_module(GoodCurve.short(1, 1, p), 40)
d = synthetic_diagram(base, 2, 1, seed=3, prec=40)
report = verify_unit_root_lift(d, 30)
print("lift on a synthetic diagram: pass", report.passed, "residual digits", report.diagram_residual)

r_b = unit_root_splitting(d.B)
lifted = lift_splitting(d, r_b)
rng = random.Random(0)
bump = PadicMatrix([[rng.randrange(1, 25) for _ in range(d.A.h_dim)] for _ in range(d.A.hodge_dim)],
                   p, (d.A.hodge_dim, d.A.h_dim), 40)
print("perturbed lift leaves a residual of valuation",
      diagram_residual(d, perturbed(lifted, bump).r, g_splitting(d, r_b)))
