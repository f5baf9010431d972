"""
Lattices of polynomials bounded on p-adic disks
===============================================

N_l(beta) is the set of polynomials of degree <= n bounded by |pi|^(-n l) on
the disk D_l(beta).  When n < q it has a triangular basis, and membership can
be decided either from that basis or from the exact sup norm.
"""

from fractions import Fraction

from kirillov_lab.symlat import (Disk, PolyVec, WeightParams, contains, intersect_over_fiber,
                                 lattice_N, refine_under_C1, supnorm_on_disk)
from kirillov_lab.wspace import WElem

p = 5
beta = WElem.of(Fraction(3, 5), p)
w = WeightParams(m=0, n=1)

L = lattice_N(2, beta, w)
print("basis of N_2(3/5):", L.basis)

# two routes to membership
for P in (PolyVec([Fraction(1, 25), 0]), PolyVec([0, Fraction(1, 5)])):
    print(P, "basis route:", contains(L, P, "basis"), " norm route:", contains(L, P, "norm"))

# the sup norm is exact, found by descent on residue disks
P = PolyVec([0, Fraction(-1, 5), 0, 0, 0, Fraction(1, 5)])  # (u^5 - u)/5
print("min v of (u^5 - u)/5 on Z_5:", supnorm_on_disk(P, Disk(0, WElem.zero(p))))

# for n = q that polynomial is bounded by 1, yet it is not in span{u^i}
# over the integers: the basis description needs n < q
print("sharpness: coefficient of u^5 is", P.coeffs[5])

# intersecting over a fiber of pi lands one level up
M = intersect_over_fiber(0, WElem.zero(p), w, verify=True)
print("intersection over pi beta = 0 has scale", M.scale, "and basis", M.basis)

# a family constant on beta + W_1 is confined to a smaller lattice
R = refine_under_C1(2, beta, w)
print("refinement under C_1:", R.basis)
