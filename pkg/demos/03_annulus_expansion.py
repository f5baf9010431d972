"""
Expanding a Kirillov-model function annulus by annulus
=====================================================

A function in Lambda is a finite sum of generators with coefficients
c'_k(beta), c''_k(beta).  Its amplitudes C_l(beta) on the annulus pi^l U
come from one-step recursions; they also satisfy a two-generation identity
which we check exactly.
"""

from fractions import Fraction
import random

from kirillov_lab.kirillov import (GeneratorCoeffs, RepParams, evaluate, evaluate_generators, expand,
                                   expand_closed_form, mirabolic_act, random_coeffs, verify_two_step)
from kirillov_lab.symlat import PolyVec
from kirillov_lab.wspace import WElem

params = RepParams.make(p=5, n=1, m=0, regime="unramified", lam=Fraction(1, 5), mu=2)
rng = random.Random(0)
phi = random_coeffs(params, rng, sites=3)
print("generator sites:", list(phi.entries))

table = expand(phi, params, l_max=2)
for l in table.levels():
    print(f"l={l:+d}: {len(table.C[l])} frequencies")

# the closed sums and the recursion agree exactly
closed = expand_closed_form(phi, params, l_max=2)
print("closed form == recursion:", all(closed.C[l] == table.C[l] for l in table.levels()))
print("two-step identity:", bool(verify_two_step(table, params)))

# pointwise values: from the amplitudes and straight from the generators
print("phi(5^0 * 2) =", evaluate(table, 0, 2))
print("same, direct  =", evaluate_generators(phi, params, 0, 2))

# the mirabolic subgroup moves the base generator to any site
base = GeneratorCoeffs(1, {(0, WElem.zero(5)): (PolyVec([0, 1]), PolyVec.zero(1))})
k, beta = 2, Fraction(3, 25)
moved = mirabolic_act(Fraction(1, 25), -beta / 25, base, params)
print("moved generator:", moved.entries)
