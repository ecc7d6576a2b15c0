"""Capped-precision p-adic numbers, branches of the logarithm and Teichmüller lifts."""
from fractions import Fraction

from padic_heights import LogBranch, PadicElement, padic_log, teichmuller

p, N = 5, 30

half = PadicElement.from_rational(Fraction(1, 2), p, N)
print("1/2 in Z_5       :", half.to_token(), " residue mod 625:", half.residue_int(4))

# Every element carries its own precision; a difference of close numbers loses digits.
a = PadicElement.from_rational(1 + 5**10, p, N)
b = PadicElement.from_rational(1, p, N)
print("(1+5^10) - 1     :", (a - b).to_token())

# Two branches of the logarithm: they differ only on ord, through the value at p.
iwasawa = LogBranch.iwasawa(p)
other = LogBranch(p, 1)
x = PadicElement.from_rational(50, p, N)
print("Iwasawa log(50)  :", padic_log(x, iwasawa).to_token())
print("log(50), λ(5)=1  :", padic_log(x, other).to_token())

# x = p^v * ω(x) * <x>: the Teichmüller factor is killed by every branch.
w = teichmuller(PadicElement.from_rational(2, p, N))
print("ω(2) mod 25      :", w.residue_int(2), "  ω(2)^4 = 1:", (w**4).agrees_with(PadicElement.exact(1, p, N), N))
print("log ω(2)         :", padic_log(w, iwasawa).to_token())
