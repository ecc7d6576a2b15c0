"""Mazur-Tate against unit-root splittings on a Tate curve, with the Schneider-type control.

The Mazur-Tate value multiplies a biextension point into the formal part and
takes λ of the fibre coordinate.  The unit-root value solves descent plus the
condition that the splitting lands in the unit-root subspace of Frobenius.
Neither pipeline calls the other.
"""
from padic_heights import LogBranch, PadicElement
from padic_heights.heights import compare_splittings, mt_splitting, unit_root_splitting_tate
from padic_heights.tate import BiextPoint, TateCurve

p, N = 5, 30
curve = TateCurve(125, N, p=5)
branch = LogBranch(p, 1)

x = BiextPoint(1, 5, 5, curve)
print("τ_MT(1; 5, 5) =", mt_splitting(x, branch).to_token())
print("τ_UR(1; 5, 5) =", unit_root_splitting_tate(x, branch).to_token())
print("1/3           =", (PadicElement.from_rational(1, p, N) / 3).to_token())

for label, lam in (("Iwasawa", 0), ("λ(5) = 1", 1)):
    rep = compare_splittings(curve, LogBranch(p, lam), samples=100, seed=7)
    print(f"{label:10s} 100 random points: min valuation of difference {rep.min_diff_valuation}, pass {rep.passed}")

# The control: swap the unit-root condition for a(v) = λ(v)/λ(q).
q = PadicElement.from_rational(25 * (1 + 25), p, 40)
control = compare_splittings(TateCurve(q, N), LogBranch.iwasawa(p), samples=30, seed=1, constraint="schneider")
print("Schneider-type control on q = 25*26: min valuation", control.min_diff_valuation, "pass", control.passed)
