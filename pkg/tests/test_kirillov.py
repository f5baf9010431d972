import random
from fractions import Fraction

import pytest

from kirillov_lab.kirillov import (GeneratorCoeffs, HorizonExceeded, InvalidCoeffs, NonUnit,
                                   RegimeMismatch, RepParams, evaluate, evaluate_generators, expand,
                                   expand_closed_form, mirabolic_act, random_coeffs, solve_vanishing,
                                   support_template, vanishes_outside_integers, verify_tame_rewrite,
                                   verify_two_step)
from kirillov_lab.scalars import CharacterSpec, Scalar, tame_characters, vp
from kirillov_lab.symlat import PolyVec, act_tau
from kirillov_lab.wspace import WElem, WFunction, psi, suspend

P5 = 5


def W(x, p=P5):
    return WElem.of(Fraction(x), p)


def gc(n, entries):
    z = PolyVec.zero(n)
    return GeneratorCoeffs(n, {(k, W(b)): (PolyVec(c1) if c1 is not None else z, PolyVec(c2) if c2 is not None else z)
                               for (k, b), (c1, c2) in entries.items()})


PARAMS = {
    "unramified": [RepParams.make(5, 0, 0, "unramified", Fraction(1, 5), 2),
                   RepParams.make(5, 2, 1, "unramified", Fraction(1, 25), Scalar.zeta(4)),
                   RepParams.make(5, 3, 0, "unramified", 1, Fraction(2, 125))],
    "degenerate": [RepParams.make(5, 1, 0, "degenerate", Fraction(1, 5), Fraction(1, 5)),
                   RepParams.make(5, 3, 1, "degenerate", 3, 3)],
    "tame": [RepParams.make(5, 0, 0, "tame", Fraction(1, 5), 2, eps=e) for e in tame_characters(5)[:2]],
    "wild": [RepParams.make(5, 0, 0, "wild", 1, Fraction(1, 5), eps=CharacterSpec.from_logs(5, 2, [1]))],
}


def _all_params():
    for regime, ps in PARAMS.items():
        for P in ps:
            yield regime, P


# -- parameters -----------------------------------------------------------------

def test_regime_consistency():
    eps = tame_characters(5)[0]
    with pytest.raises(RegimeMismatch):
        RepParams.make(5, 0, 0, "unramified", 2, 2)
    with pytest.raises(RegimeMismatch):
        RepParams.make(5, 0, 0, "degenerate", 2, 3)
    with pytest.raises(RegimeMismatch):
        RepParams.make(5, 1, 0, "tame", 1, 2, eps=eps)
    with pytest.raises(RegimeMismatch):
        RepParams.make(5, 0, 0, "tame", 1, 2)
    with pytest.raises(RegimeMismatch):
        RepParams.make(5, 0, 0, "unramified", 1, 2, eps=eps)
    with pytest.raises(RegimeMismatch):
        RepParams.make(5, 0, 0, "tame", 1, 2, eps=CharacterSpec.from_logs(5, 2, [1]))
    with pytest.raises(RegimeMismatch):
        RepParams.make(5, 0, 0, "mixed", 1, 2)


def test_irreducibility_guard():
    with pytest.raises(RegimeMismatch, match="reducible"):
        RepParams.make(5, 0, 0, "unramified", 1, Fraction(1, 5))
    with pytest.raises(RegimeMismatch, match="reducible"):
        RepParams.make(5, 0, 0, "unramified", 5, 1)
    P = RepParams.make(5, 0, 0, "unramified", 1, Fraction(1, 5), check_irreducible=False)
    assert P.chi2.lam == Scalar.rational(1)


# -- expansions -----------------------------------------------------------------

def test_geometric_row_of_a_single_generator():
    P = RepParams.make(5, 0, 0, "unramified", Fraction(1, 5), 2)
    table = expand(gc(0, {(0, 0): ([1], None)}), P, l_max=4)
    for l in range(0, 5):
        assert table.C[l] == WFunction.delta(W(0), PolyVec([Fraction(1, 5) ** l]))


def test_degenerate_first_row_of_double_primed_part_vanishes():
    rng = random.Random(1)
    for P in PARAMS["degenerate"]:
        for _ in range(10):
            c = random_coeffs(P, rng)
            t = expand(c, P)
            assert not t.C2[t.k0]


@pytest.mark.parametrize("regime", list(PARAMS))
def test_closed_form_matches_recursion(regime):
    rng = random.Random(regime)
    for i in range(100):
        P = PARAMS[regime][i % len(PARAMS[regime])]
        c = random_coeffs(P, rng, levels=(-2, 1), sites=3)
        a, b = expand(c, P, l_max=2), expand_closed_form(c, P, l_max=2)
        assert a.k0 == b.k0
        for l in a.levels():
            assert a.C1[l] == b.C1[l] and a.C2[l] == b.C2[l] and a.C[l] == b.C[l]
            if P.ramified:
                assert a.Ct[l] == b.Ct[l]


@pytest.mark.parametrize("regime", ["unramified", "degenerate"])
def test_two_step_identity_holds(regime):
    rng = random.Random(7)
    for i in range(40):
        P = PARAMS[regime][i % len(PARAMS[regime])]
        assert verify_two_step(expand(random_coeffs(P, rng), P), P)


def test_two_step_pinpoints_a_perturbed_row():
    P = PARAMS["unramified"][0]
    t = expand(gc(0, {(-1, Fraction(1, 5)): ([1], [2])}), P, l_max=3)
    t.C[1] = t.C[1] + WFunction.delta(W(Fraction(3, 25)), PolyVec([1]))
    res = verify_two_step(t, P)
    assert not res and res.level == 1 and res.gamma == W(Fraction(3, 25))


def test_degenerate_two_step_by_direct_sums():
    # C_(l+1) against 2 lam S C_l - lam^2 S^2 C_(l-1) - lam S(c''_l + c'_l) + c'_(l+1),
    # with C recomputed from the explicit (k - l) lam^(l - k) generator sums
    P = PARAMS["degenerate"][0]
    lam = P.lam
    rng = random.Random(3)
    for _ in range(15):
        c = random_coeffs(P, rng, levels=(-2, 0))
        t = expand_closed_form(c, P, l_max=2)
        for l in range(t.k0, t.l_max):
            prev = t.C.get(l - 1, WFunction(5))
            rhs = (suspend(t.C[l]).scale(lam * 2) - suspend(suspend(prev)).scale(lam * lam)
                   - suspend(c.level(l, 1) + c.level(l, 0)).scale(lam) + c.level(l + 1, 0))
            assert t.C[l + 1] == rhs


def test_degenerate_check_catches_nonzero_first_double_primed_row():
    P = PARAMS["degenerate"][0]
    t = expand(gc(1, {(-1, 0): ([5, 0], [0, 1])}), P, l_max=1)
    t.C2[-1] = WFunction.delta(W(0), PolyVec([1, 0]))
    res = verify_two_step(t, P)
    assert not res and res.level == -1


@pytest.mark.parametrize("regime", ["tame", "wild"])
def test_tame_rewrite(regime):
    rng = random.Random(11)
    for i in range(30):
        P = PARAMS[regime][i % len(PARAMS[regime])]
        t = expand(random_coeffs(P, rng), P)
        assert verify_tame_rewrite(t, P)
        assert verify_two_step(t, P)
    t.C1[0] = t.C1[0] + WFunction.delta(W(0), PolyVec([1]))
    assert not verify_tame_rewrite(t, P)


def test_invalid_coefficients_are_rejected():
    P = PARAMS["unramified"][0]
    bad = gc(0, {(1, 0): ([Fraction(1, 25)], None)})
    with pytest.raises(InvalidCoeffs) as err:
        expand(bad, P)
    assert err.value.k == 1 and err.value.part == "'" and err.value.margin == -2
    expand(bad, P, validate=False)


def test_weight_twist_in_validity():
    # c in pi^(-k m) N_k(beta): at k = -1, m = 1 the region is p N_(-1)
    P = RepParams.make(5, 0, 1, "unramified", 1, 2)
    expand(gc(0, {(-1, 0): ([5], None)}), P)
    with pytest.raises(InvalidCoeffs):
        expand(gc(0, {(-1, 0): ([1], None)}), P)


# -- vanishing off the integers ---------------------------------------------------

def test_vanishing_examples():
    P = PARAMS["unramified"][0]
    assert vanishes_outside_integers(expand(gc(0, {(0, 0): ([1], None), (2, Fraction(1, 5)): (None, [3])}), P))
    assert not vanishes_outside_integers(expand(gc(0, {(-1, 0): ([1], None)}), P))


def test_solver_trivial_cases():
    P = PARAMS["unramified"][1]
    assert solve_vanishing([], P) == []
    sites = [(0, W(0)), (1, W(Fraction(1, 5)))]
    basis = solve_vanishing(sites, P)
    assert len(basis) == 2 * 2 * (P.n + 1)
    for v in basis:
        assert len(v.entries) == 1
        (pair,) = v.entries.values()
        assert sum(1 for c in pair for x in c.coeffs if x) >= 1


def test_solver_example_dimension():
    P = RepParams.make(5, 0, 0, "unramified", Fraction(1, 5), 2)
    support = [(-1, b) for _, b in support_template(-1, 2, 5, top=-1)]
    assert len(support) == 25
    basis = solve_vanishing(support, P)
    # 50 unknowns, and the sum c' + c'' must be constant on each of 5 cosets of 5
    assert len(basis) == 50 - 20
    for v in basis:
        t = expand(v, P, l_max=0)
        assert vanishes_outside_integers(t)
        row = t.C[-1]
        for gamma in {b.times_pi() for b, _ in row.items()}:
            vals = [row.get(a) for a in gamma.fiber()]
            assert all(x == vals[0] for x in vals)


@pytest.mark.parametrize("regime", list(PARAMS))
def test_solver_outputs_vanish_and_perturbations_do_not(regime):
    P = PARAMS[regime][0]
    support = support_template(-2, 1, 5, top=0)
    basis = solve_vanishing(support, P)
    assert basis
    for v in basis[:: max(1, len(basis) // 8)]:
        v.validate(P)
        assert vanishes_outside_integers(expand(v, P, l_max=0))
        poke = GeneratorCoeffs(P.n, {(-1, W(Fraction(1, 5))): (PolyVec.monomial(P.n, 0, 5 ** (1 + P.n)),
                                                              PolyVec.zero(P.n))})
        assert not vanishes_outside_integers(expand(v + poke, P, l_max=0))


# -- evaluation -------------------------------------------------------------------

def test_evaluate_examples():
    P = RepParams.make(5, 0, 0, "unramified", 1, 2)
    t = expand(gc(0, {(0, 0): ([1], None)}), P, l_max=2)
    for w in (1, 2, 3, 4, 7, Fraction(1, 3)):
        assert evaluate(t, 0, w) == PolyVec([1])
    t = expand(gc(0, {(0, Fraction(1, 5)): ([1], None)}), P, l_max=0)
    assert evaluate(t, 0, 1) == PolyVec([Scalar.zeta(5, 4)])
    assert evaluate(t, -3, 1) == PolyVec.zero(0)
    with pytest.raises(HorizonExceeded):
        evaluate(t, 1, 1)
    with pytest.raises(ValueError):
        evaluate(t, 0, 5)


def test_C1_amplitudes_vanish_on_units():
    P = RepParams.make(5, 0, 0, "unramified", 1, 2)
    fib = W(Fraction(2, 5)).fiber()
    c = GeneratorCoeffs(0, {(0, b): (PolyVec([3]), PolyVec.zero(0)) for b in fib})
    t = expand(c, P, l_max=0)
    units = [u for u in range(1, 40) if u % 5][:25]
    assert len(units) == 25
    assert all(not evaluate(t, 0, u) for u in units)


@pytest.mark.parametrize("regime", list(PARAMS))
def test_evaluation_routes_agree(regime):
    rng = random.Random(regime + "eval")
    for P in PARAMS[regime]:
        for _ in range(5):
            c = random_coeffs(P, rng)
            t = expand(c, P, l_max=2)
            for l in range(t.k0 - 1, 3):
                for w in (1, 2, 3, 7, 13):
                    assert evaluate(t, l, w, P.n) == evaluate_generators(c, P, l, w)


# -- the mirabolic action -----------------------------------------------------------

def test_mirabolic_identity():
    rng = random.Random(2)
    for _, P in _all_params():
        c = random_coeffs(P, rng)
        assert mirabolic_act(1, 0, c, P) == c


def test_mirabolic_moves_the_base_generator():
    P = RepParams.make(5, 1, 0, "unramified", Fraction(1, 5), 2)
    base = gc(1, {(0, 0): ([0, 1], None)})
    k, beta = 2, Fraction(3, 25)
    a, b = Fraction(5) ** (-k), -Fraction(5) ** (-k) * beta
    moved = mirabolic_act(a, b, base, P)
    expected = act_tau([[a, b], [0, 1]], PolyVec([0, 1]), P.weight)
    assert moved.entries == {(k, W(beta)): (expected, PolyVec.zero(1))}


@pytest.mark.parametrize("regime", list(PARAMS))
def test_mirabolic_action_is_pointwise_sound(regime):
    rng = random.Random(regime + "mir")
    for P in PARAMS[regime]:
        for _ in range(4):
            c = random_coeffs(P, rng)
            a = Fraction(rng.choice([1, 2, 3, 4, 6])) * Fraction(5) ** rng.randint(-1, 1)
            b = Fraction(rng.randint(-30, 30), 25)
            moved = mirabolic_act(a, b, c, P)
            j, eta = vp(a, 5), a / Fraction(5) ** vp(a, 5)
            table = expand(moved, P, l_max=2)
            points = [(l, w) for l in (-1, 0, 1, 2) for w in (1, 2, 3, 4, 7)]
            assert len(points) == 20
            for l, w in points:
                inner = evaluate_generators(c, P, l + j, eta * w)
                rhs = act_tau([[a, b], [0, 1]], inner, P.weight) * psi(W(b * Fraction(5) ** l * w))
                assert evaluate(table, l, w, P.n) == rhs


def test_mirabolic_needs_a_rational_a():
    P = PARAMS["unramified"][0]
    c = gc(0, {(0, 0): ([1], None)})
    with pytest.raises(NonUnit):
        mirabolic_act(0, 0, c, P)
    with pytest.raises(NonUnit):
        mirabolic_act(Scalar.zeta(4), 0, c, P)


def test_coefficient_algebra():
    a = gc(0, {(0, 0): ([1], None)})
    b = gc(0, {(0, 0): ([-1], None), (1, Fraction(1, 5)): (None, [2])})
    s = a + b
    assert list(s.entries) == [(1, W(Fraction(1, 5)))]
    assert s.k0 == 1 and s.k_max == 1
    assert GeneratorCoeffs(0, {}).k0 is None
