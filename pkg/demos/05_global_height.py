"""A global p-adic height on a rational curve with split multiplicative reduction at p.

The pairing <D, z> is a sum of local terms: the ramified one at p comes from the
Tate parametrization and the Néron function built from theta, and the
unramified ones at the other relevant primes are rational multiples of λ(ℓ).
The family ρ_p = δλ, ρ_ℓ = -δ ord_ℓ λ(ℓ) satisfies the product formula, which
forces the Iwasawa branch.
"""
from padic_heights.global_height import RationalCurve, RhoFamily, global_height, product_formula_check

curve = RationalCurve((0, 0, 0, 3, 1), 5, 30)  # y^2 = x^3 + 3x + 1
E = curve.model
P = curve.point(0, 1)
rho = RhoFamily(5)

print("q-parameter at 5:", curve.q.to_token())
print("product formula at α = 10:", product_formula_check(10, rho).to_token())

h = global_height(curve, P, P, rho)
for ell, value in h.per_prime:
    print(f"  local term at {ell}: {value.to_token()}")
print("h(P, P)   =", h.total.to_token())

h2 = global_height(curve, E.mul(2, P), E.mul(2, P), rho).total
print("h(2P, 2P) - 4 h(P, P) has valuation", (h2 - h.total * 4).valuation)
print("another auxiliary point gives the same value:",
      global_height(curve, P, P, rho, seed=3).total.agrees_with(h.total, 25))

torsion = RationalCurve((0, -1, 1, -10, -20), 11, 30)  # 11a1, split at 11
T = torsion.point(5, 5)
print("height of the 5-torsion point (5, 5) on 11a1:", global_height(torsion, T, T, RhoFamily(11)).total.to_token())
