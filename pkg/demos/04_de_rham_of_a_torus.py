"""Reducing closed logarithmic forms on a split torus to invariant classes.

On G_m^t a closed form with log poles is Σ c_n dz_n/z_n plus an exact form.
The reduction returns the c_n and a primitive, and the residual is checked to
vanish as an exact Laurent form.
"""
from padic_heights.derham import LaurentForm, format_form, format_poly, h1_dim, parse_form, reduce_form, residual

text = """
3 * z1^-1 d z_1
-1/2 * z2^-1 d z_2
2 * z1 z2^2 d z_1
2 * z1^2 z2 d z_2
"""
form = parse_form(text)
coeffs, prim = reduce_form(form)
print("form:\n" + format_form(form))
print("class coefficients:", [str(c) for c in coeffs])
print("primitive:", format_poly(prim))
print("residual is zero:", residual(form, coeffs, prim).is_zero())

# Adding any exact form leaves the class alone.
g = {(3, 1): 5, (0, 2): -7}
print("class after adding d(5 z1^3 z2 - 7 z2^2):", [str(c) for c in reduce_form(form + LaurentForm.exact(2, g))[0]])
print("h^1 for t = 0..3:", [h1_dim(t) for t in range(4)])
