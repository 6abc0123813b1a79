import random

import pytest
from hypothesis import given, settings, strategies as st

from grouptrace.exact import ExactMatrix, FieldSpec, determinant
from grouptrace.gaction import (
    CoactionStructureError,
    check_maximal_into_maximal,
    coacted_from_json_obj,
    coaction_validate,
    cyclic_presentation,
    discriminant,
    discriminant_divisor,
    dual_action_apply,
    invariant_subspace,
    is_invariant,
    is_tame,
    torsor_test,
    trace_map,
    trivial_torsor,
)
from grouptrace.hopf import alpha_pe, constant_group, cyclic_table, group_trace, mu_n
from grouptrace.poly import PolyRing


def ring(p, names=("x", "y")):
    return PolyRing(FieldSpec.prime(p), list(names))


def random_poly(R, rng, max_deg=3, terms=4):
    """Random polynomial of total degree at most ``max_deg``."""
    p = R.field.p
    out = R.zero
    for _ in range(rng.randint(1, terms)):
        mono = R.const(rng.randint(1, p - 1))
        for _ in range(rng.randint(0, max_deg)):
            mono = mono * R.var(rng.choice(R.variables))
        out = out + mono
    return out


def random_coacted(rng):
    p = rng.choice([2, 3, 5])
    R = ring(p)
    if rng.random() < 0.5:
        n = rng.choice([2, 3, 4])
        return cyclic_presentation(R, n, random_poly(R, rng), "kummer")
    e = 1 if p > 2 else rng.choice([1, 2])
    scale = random_poly(R, rng, max_deg=2) if rng.random() < 0.3 else None
    return cyclic_presentation(R, p**e, random_poly(R, rng), "additive", scale=scale)


# -- validation -------------------------------------------------------------------


@pytest.mark.parametrize("p", [2, 3, 5])
def test_additive_cover_validates(p):
    S = cyclic_presentation(ring(p), p, "x*y", "additive")
    assert coaction_validate(S).all_pass


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_kummer_cover_validates(n):
    assert coaction_validate(cyclic_presentation(ring(5), n, "x^2*y + 3")).all_pass


@pytest.mark.parametrize("hopf", [mu_n(3, FieldSpec.prime(5)), alpha_pe(1, FieldSpec.prime(3)),
                                  constant_group(cyclic_table(3), FieldSpec.prime(2))])
def test_trivial_torsor_validates(hopf):
    S = trivial_torsor(ring(hopf.field.p), hopf)
    assert coaction_validate(S).all_pass
    rep = trace_map(S)
    assert rep.bilinear == [[S.base.const(c) for c in row] for row in rep.T.to_lists()]
    assert rep.disc == S.base.const(determinant(rep.T).value)


def test_corrupted_coaction_fails_counit():
    S = cyclic_presentation(ring(3), 3, "x", "additive")
    co = [list(r) for r in S.coaction]
    co[1][0] = S.zero()  # t -> 1 (x) xi only
    bad = type(S)(S.base, S.basis, S.mult, S.hopf, co)
    rep = coaction_validate(bad)
    assert not rep.checks["counit"]


def test_structure_errors():
    S = cyclic_presentation(ring(3), 3, "x", "additive")
    with pytest.raises(CoactionStructureError):
        type(S)(S.base, S.basis, S.mult[:2], S.hopf, S.coaction)
    with pytest.raises(CoactionStructureError):
        type(S)(S.base, S.basis, S.mult, mu_n(2, S.field), S.coaction)


# -- traces -------------------------------------------------------------------


@pytest.mark.parametrize("p", [3, 5])
def test_bad_trace_values(p):
    R = ring(p)
    vals = trace_map(cyclic_presentation(R, p, "x*y", "additive")).trace_values
    assert vals == [R.zero] * (p - 1) + [R.one]


@pytest.mark.parametrize("n", [2, 3, 5])
def test_kummer_trace_values(n):
    R = ring(7)
    vals = trace_map(cyclic_presentation(R, n, "x + y^2")).trace_values
    assert vals == [R.one] + [R.zero] * (n - 1)


def test_additive_disc_is_unit_and_det_M_is_one():
    S = cyclic_presentation(ring(3), 3, "x^2 + y", "additive")
    rep = discriminant_divisor(S)
    assert rep.identity_holds and rep.disc.is_unit()
    assert rep.det_M == S.one()


def test_kummer_disc_matches_power_of_modulus():
    R = ring(7)
    for r in ["x", "x*y", "x^2 + y"]:
        rr = R.parse(r)
        disc = discriminant(cyclic_presentation(R, 3, rr))
        assert disc == (rr**2).scale(disc.exact_div(rr**2).constant_term())
        assert not disc.is_zero()


def test_additive_scale_gives_nontame_cover():
    R = ring(3)
    S = cyclic_presentation(R, 3, "y", "additive", scale="x")
    assert coaction_validate(S).all_pass
    vals = trace_map(S).trace_values
    assert vals[-1] == R.parse("x^2")
    assert is_tame(S).verdict == "not_tame"
    ok, _ = check_maximal_into_maximal(S)
    assert ok


def test_tameness_examples():
    assert is_tame(cyclic_presentation(ring(5), 4, "x")).verdict == "tame"
    assert is_tame(cyclic_presentation(ring(3), 3, "x*y", "additive")).verdict == "tame"


def test_matrix_identity_on_random_algebras():
    rng = random.Random(11)
    for _ in range(20):
        S = random_coacted(rng)
        assert coaction_validate(S).all_pass
        rep = trace_map(S)
        assert rep.bilinear == rep.bilinear_via_MTM
        assert all(rep.bilinear[i][j] == rep.bilinear[j][i] for i in range(S.rank) for j in range(S.rank))
        assert discriminant_divisor(S, report=rep).identity_holds
        assert not rep.disc.is_zero()


@settings(max_examples=25)
@given(st.integers(0, 10**6), st.integers(1, 4))
def test_scale_covariance(seed, c):
    rng = random.Random(seed)
    S = random_coacted(rng)
    f = S.field
    c = f(c % (f.p - 1) + 1)
    tr = group_trace(S.hopf)
    base, scaled = trace_map(S, tr), trace_map(S, tr.scaled(c))
    k = S.base.const(c)
    assert scaled.trace_values == [k * v for v in base.trace_values]
    assert scaled.bilinear == [[k * v for v in row] for row in base.bilinear]
    assert scaled.disc == base.disc * k**S.rank
    assert torsor_test(S, trace=tr).verdict == torsor_test(S, trace=tr.scaled(c)).verdict


def test_bilinear_invertible_off_disc_locus():
    rng = random.Random(5)
    checked = 0
    for _ in range(15):
        S = random_coacted(rng)
        rep = trace_map(S)
        f = S.field
        for _ in range(5):
            pt = [rng.randrange(f.p) for _ in range(S.base.nvars)]
            if rep.disc.eval(pt).value == 0:
                continue
            vals = [[c.eval(pt).value for c in row] for row in rep.bilinear]
            assert determinant(ExactMatrix.from_rows(vals, field=f)).value != 0
            checked += 1
    assert checked > 10


# -- torsor diagnostics ---------------------------------------------------------------


@pytest.mark.parametrize("n", [2, 3, 4])
def test_unit_modulus_kummer_is_torsor_everywhere(n):
    assert torsor_test(cyclic_presentation(ring(5), n, "1")).verdict == "torsor_everywhere"


def test_kummer_over_x_is_not_torsor_at_origin():
    S = cyclic_presentation(ring(7), 3, "x")
    assert torsor_test(S, (0, 0)).verdict == "not_torsor_at_point"
    assert torsor_test(S, (1, 1)).verdict == "torsor_at_point"
    assert torsor_test(S).verdict == "not_torsor_everywhere"
    with pytest.raises(ValueError):
        torsor_test(S, (1,))


@pytest.mark.parametrize("r", ["0", "1", "x", "x*y + y^3"])
def test_additive_cover_torsor_everywhere(r):
    assert torsor_test(cyclic_presentation(ring(3), 3, r, "additive")).verdict == "torsor_everywhere"


def test_rank_mismatch_is_not_torsor():
    S = cyclic_presentation(ring(3), 3, "x")
    hopf = mu_n(2, S.field)
    # trivial mu_2 coaction on a rank 3 algebra
    co = [[S.basis_elem(i), S.zero()] for i in range(S.rank)]
    trivial = type(S)(S.base, S.basis, S.mult, hopf, co)
    assert coaction_validate(trivial).all_pass
    assert torsor_test(trivial).verdict == "not_torsor_anywhere"
    assert torsor_test(trivial_torsor(S.base, hopf)).verdict == "torsor_everywhere"


# -- invariants and dual action ----------------------------------------------------------


def test_invariance_examples():
    R = ring(5)
    S = cyclic_presentation(R, 3, "x*y")
    assert is_invariant(S, S.one())
    t = S.basis_elem(1)
    assert not is_invariant(S, t)
    t3 = S.mul(S.mul(t, t), t)
    assert t3 == S.from_base(R.parse("x*y"))
    assert is_invariant(S, t3)


def test_dual_action_examples():
    R = ring(3)
    S = cyclic_presentation(R, 3, "x", "additive")
    t2 = S.basis_elem(2)
    for i in range(S.rank):
        b = S.basis_elem(i)
        assert dual_action_apply(S, S.hopf.counit, b) == b
    assert dual_action_apply(S, group_trace(S.hopf).functional, t2) == S.one()
    K = cyclic_presentation(ring(5), 4, "y")
    zeta = [0, 1, 0, 0]
    t = K.basis_elem(1)
    assert dual_action_apply(K, zeta, t) == t
    assert K.is_zero(dual_action_apply(K, zeta, K.basis_elem(2)))
    with pytest.raises(ValueError):
        dual_action_apply(K, [1, 0], t)


def test_dual_action_with_trace_reproduces_trace_values():
    S = cyclic_presentation(ring(5), 5, "x + y", "additive")
    tr = group_trace(S.hopf).functional
    vals = trace_map(S).trace_values
    for i in range(S.rank):
        assert dual_action_apply(S, tr, S.basis_elem(i)) == S.from_base(vals[i])


def test_invariant_subspace_over_field():
    F = PolyRing(FieldSpec.prime(5), [])
    S = cyclic_presentation(F, 4, 2)
    inv = invariant_subspace(S)
    assert len(inv) == 1 and list(inv[0])[1:] == [0, 0, 0]
    T = trivial_torsor(F, constant_group(cyclic_table(3), FieldSpec.prime(5)))
    assert len(invariant_subspace(T)) == 1
    with pytest.raises(NotImplementedError):
        invariant_subspace(cyclic_presentation(ring(5), 2, "x"))


# -- JSON --------------------------------------------------------------------------


def test_json_shorthand_builder():
    obj = {"field": {"kind": "prime", "p": 7}, "variables": ["x", "y"], "kind": "cyclic_presentation",
           "modulus_exponent": 3, "modulus_rhs": "x^2*y", "coaction": "kummer"}
    S = coacted_from_json_obj(obj)
    assert S.rank == 3 and coaction_validate(S).all_pass
    again = coacted_from_json_obj(S.to_json_obj())
    assert again.mult == S.mult and again.coaction == S.coaction


def test_json_requires_hopf():
    with pytest.raises(CoactionStructureError):
        coacted_from_json_obj({"field": {"kind": "prime", "p": 3}, "basis": ["1"], "mult": [[["1"]]],
                               "coaction": [[["1"]]]})
