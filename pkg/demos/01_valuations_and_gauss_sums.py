"""
Exact valuations in cyclotomic fields
=====================================

Scalars live in Q(zeta_m) with exact rational coefficients.  Their p-adic
valuation is computed through a fixed embedding into an extension of Q_p.
"""

from fractions import Fraction

from kirillov_lab import CharacterSpec, Scalar, gauss_sum
from kirillov_lab.scalars import default_oracle, tame_characters, valuation

p = 5
oracle = default_oracle(p)
print(oracle.describe())

# zeta_4 goes to the Teichmuller lift of 2, which is 7 mod 25
x = Scalar.zeta(4) - Scalar.rational(2)
print("v(zeta_4 - 2) =", valuation(x, oracle))

# 1 - zeta_5 is a uniformiser of the totally ramified part
print("v(1 - zeta_5) =", valuation(Scalar.rational(1) - Scalar.zeta(5), oracle))
print("v(3/125)      =", valuation(Scalar.rational(Fraction(3, 125)), oracle))

# Gauss sums of the tame characters: the product identity is exact,
# the individual valuations follow Stickelberger
for eps in tame_characters(p):
    g, gi = gauss_sum(eps), gauss_sum(eps.inverse())
    assert g * gi == eps.value(p - 1) * p
    print(f"order {eps.order()}: v(tau) = {valuation(g, oracle)},  v(tau) + v(tau^-1) = "
          f"{valuation(g, oracle) + valuation(gi, oracle)}")

# the quadratic character gives tau^2 = 5
quad = CharacterSpec.from_logs(p, 1, [2])
print("quadratic tau^2 =", gauss_sum(quad) ** 2)
