"""
Functions vanishing off O_F and their amplitude bounds
======================================================

If phi vanishes outside the integers, its amplitudes at level 0 should lie in
the lattices M_0(beta).  We build such phi with a linear solver, check the
bounds at every level k0 <= l <= 0, and produce the vector C that lies outside
the sum of the M_0(beta).
"""

from kirillov_lab.bsverify import (GridSpec, certificate_prop13, check_bs_conditions, check_theorem12,
                                   pattern_params, search)
from kirillov_lab.kirillov import expand, solve_vanishing, support_template, vanishes_outside_integers

# parameters on the boundary of the Breuil-Schneider segment
params = pattern_params(p=5, n=1, m=0, regime="unramified", vlt=-2)
print("lambda =", params.lam, " mu =", params.mu, " BS conditions:", check_bs_conditions(params))

basis = solve_vanishing(support_template(k0=-2, depth=1, p=5), params)
print("solution space dimension:", len(basis))

# some kernel vectors cancel up to level 0 (c' = -c'' on one site); take one with a level-0 row
phi = next(b for b in basis if expand(b, params, l_max=0).C[0])
print("vanishes off O_F:", vanishes_outside_integers(expand(phi, params, l_max=0)))
res = check_theorem12(phi, params)
print("violations:", res.violations, " smallest margin:", res.min_margin)

# an injected fault (one level-0 amplitude scaled by 5^-6) is caught
bad = check_theorem12(phi, params, fault=6)
print("with a fault:", bad.violations[0])

cert = certificate_prop13(params)
print("witness outside sum of M_0(beta):", cert.witness, cert.outside)

# a small grid search; the report is deterministic given the seed
report = search(GridSpec(p=(5,), n=(0, 1), regimes=("unramified", "degenerate"), k0=(-1,), trials=5))
print("verdict:", report.verdict, report.body["summary"])

# beyond n < q nothing is asserted, findings are only recorded
report = search(GridSpec(p=(2,), n=(2,), k0=(-1,), trials=5))
print("exploratory verdict:", report.verdict, "asserted:", report.body["runs"][0]["asserted"])
