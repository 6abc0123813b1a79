import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from grouptrace.exact import FieldSpec, determinant
from grouptrace.hopf import (
    GroupTableError,
    HopfAlgebra,
    HopfStructureError,
    alpha_pe,
    cartier_dual,
    change_basis,
    constant_group,
    cyclic_table,
    diagonalizable,
    group_trace,
    is_left_integral,
    is_linearly_reductive,
    left_integrals,
    mu_n,
    product_table,
    symmetric_group_table,
    tensor_product,
    trace_bilinear_matrix,
    trace_diagram_holds,
    trials_needed,
    validate_hopf,
)
from oracles import hopf_axioms_elementwise

F2, F3, F5, F7 = (FieldSpec.prime(p) for p in (2, 3, 5, 7))
PRIMES = [2, 3, 5, 7]


def mutate(H, attr, idx, delta=1):
    parts = {a: getattr(H, a).copy() for a in ("unit", "product", "coproduct", "counit", "antipode")}
    parts[attr][idx] = H.field.reduce(parts[attr][idx] + delta)
    return HopfAlgebra(H.field, H.basis, parts["unit"], parts["product"], parts["coproduct"],
                       parts["counit"], parts["antipode"])


def constructor_grid():
    """Every constructor over p in {2,3,5,7}, n <= 8, e <= 3."""
    out = []
    for p in PRIMES:
        f = FieldSpec.prime(p)
        for n in range(1, 9):
            out.append((f"mu_{n}/F{p}", lambda n=n, f=f: mu_n(n, f)))
            out.append((f"const_Z{n}/F{p}", lambda n=n, f=f: constant_group(cyclic_table(n), f)))
        for e in range(1, 4):
            out.append((f"alpha_{p}^{e}/F{p}", lambda e=e, f=f: alpha_pe(e, f)))
        out.append((f"diag_2x4/F{p}", lambda f=f: diagonalizable([2, 4], f)))
        out.append((f"const_S3/F{p}", lambda f=f: constant_group(symmetric_group_table(3)[0], f)))
        out.append((f"mu2xalpha/F{p}", lambda f=f: tensor_product(mu_n(2, f), alpha_pe(1, f))))
    return out


GRID = constructor_grid()


# -- examples ---------------------------------------------------------------


def test_mu2_validates():
    assert validate_hopf(mu_n(2, F3)).all_pass


def test_alpha_p_validates_with_sign_antipode():
    H = alpha_pe(1, F3)
    assert H.antipode[1, 1] == F3(-1)
    assert validate_hopf(H).all_pass


def test_corrupted_counit_fails_counit_check():
    H = mu_n(2, F3)
    bad = mutate(H, "counit", (1,), -1)  # e(zeta) = 0
    assert bad.counit[1] == 0
    rep = validate_hopf(bad)
    assert not rep.checks["counit"]
    assert rep.checks["associativity"] and rep.checks["coassociativity"]


@pytest.mark.parametrize(
    "attr,idx,check",
    [
        ("product", (2, 2, 1), "associativity"),
        ("unit", (1,), "unit"),
        ("counit", (1,), "counit"),
        ("antipode", (1, 1), "antipode_left"),
        ("coproduct", (1, 1, 1), "bialgebra_product"),
    ],
)
def test_mutation_flips_named_check(attr, idx, check):
    H = alpha_pe(1, F3)
    assert validate_hopf(H).checks[check]
    assert not validate_hopf(mutate(H, attr, idx)).checks[check]


@pytest.mark.parametrize("attr,idx,check", [
    ("product", (5, 7, 12), "associativity"),
    ("coproduct", (12, 3, 9), "coassociativity"),
    ("antipode", (4, 4), "antipode_left"),
])
def test_randomized_mode_catches_mutations(attr, idx, check):
    H = alpha_pe(3, F3)
    rep_ok = validate_hopf(H, exact_limit=4)
    assert rep_ok.all_pass
    assert rep_ok.methods["associativity"].startswith("randomized")
    rep = validate_hopf(mutate(H, attr, idx), exact_limit=4)
    assert not rep.checks[check]


def test_trials_bound():
    # detection probability (1/2)^4 per trial over F_2 needs many trials for 2^-40
    n = trials_needed(F2, 4)
    assert (1 - 1 / 16) ** n <= 2.0**-40 < (1 - 1 / 16) ** (n - 1)


@pytest.mark.parametrize("make", [lambda: mu_n(2, F3), lambda: alpha_pe(1, F2), lambda: alpha_pe(1, F3),
                                  lambda: constant_group(cyclic_table(3), F2),
                                  lambda: constant_group(symmetric_group_table(3)[0], F5)])
def test_validator_matches_elementwise_oracle(make):
    H = make()
    want = hopf_axioms_elementwise(H.product.tolist(), H.coproduct.tolist(), H.unit.tolist(),
                                   H.counit.tolist(), H.antipode.tolist(), H.field.p)
    assert validate_hopf(H).checks == want
    bad = mutate(H, "coproduct", (0, 0, 0))
    want_bad = hopf_axioms_elementwise(bad.product.tolist(), bad.coproduct.tolist(), bad.unit.tolist(),
                                       bad.counit.tolist(), bad.antipode.tolist(), bad.field.p)
    assert validate_hopf(bad).checks == want_bad


def test_shape_errors_precede_axioms():
    H = mu_n(2, F3)
    with pytest.raises(HopfStructureError):
        HopfAlgebra(F3, H.basis, H.unit, H.product[:, :, :1], H.coproduct, H.counit, H.antipode)
    with pytest.raises(HopfStructureError):
        HopfAlgebra(F3, H.basis, [0, 0], H.product, H.coproduct, H.counit, H.antipode)


def test_dual_of_constant_cyclic_is_group_algebra():
    for p, n in [(3, 4), (5, 5), (2, 3)]:
        f = FieldSpec.prime(p)
        D = cartier_dual(constant_group(cyclic_table(n), f))
        assert validate_hopf(D).all_pass
        assert D.same_structure(mu_n(n, f))


def test_double_dual_is_identity():
    for _, make in GRID[::5]:
        H = make()
        DD = cartier_dual(cartier_dual(H))
        assert DD.same_structure(H) and DD.basis == H.basis


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_alpha_p_self_dual(p):
    f = FieldSpec.prime(p)
    D = cartier_dual(alpha_pe(1, f))
    assert validate_hopf(D).all_pass
    # f = delta_1 is primitive and f^k = k! delta_k
    C1 = D.coproduct[1]
    assert C1[0, 1] == 1 and C1[1, 0] == 1 and np.count_nonzero(C1) == 2
    Q = [[math.factorial(k) % p if j == k else 0 for j in range(p)] for k in range(p)]
    assert change_basis(D, Q).same_structure(alpha_pe(1, f))


def test_integrals_examples():
    # group algebra k[Z/n]: sum of group elements
    for n in (2, 3, 5):
        sp = left_integrals(mu_n(n, F7))
        assert sp.dim == 1 and len(set(sp.basis[0])) == 1
    # O(alpha_{p^e}): xi^{p^e - 1}
    for p, e in [(2, 2), (3, 1), (3, 2), (5, 1)]:
        f = FieldSpec.prime(p)
        (t,) = left_integrals(alpha_pe(e, f)).basis
        assert [i for i, x in enumerate(t) if x] == [p**e - 1]
    # functions on Z/2: indicator of the identity
    (t,) = left_integrals(constant_group(cyclic_table(2), F3)).basis
    assert list(t) == [1, 0]


def test_group_trace_examples():
    f = F7
    tr = group_trace(constant_group(cyclic_table(3), f))
    assert tr.normalized and set(tr.functional) == {f.inv(3)}
    tr = group_trace(mu_n(4, f))
    assert tr.normalized and list(tr.functional) == [1, 0, 0, 0]
    tr = group_trace(alpha_pe(2, F3))
    assert not tr.normalized and list(tr.functional) == [0] * 8 + [1]
    assert tr(alpha_pe(2, F3).unit) == 0


def test_linear_reductivity():
    for p in PRIMES:
        f = FieldSpec.prime(p)
        for n in range(1, 9):
            assert is_linearly_reductive(mu_n(n, f))
            assert is_linearly_reductive(constant_group(cyclic_table(n), f)) == (n % p != 0)
        assert not is_linearly_reductive(alpha_pe(1, f))
        assert is_linearly_reductive(constant_group(symmetric_group_table(3)[0], f)) == (6 % p != 0)


def test_trace_matrix_examples():
    assert trace_bilinear_matrix(mu_n(2, F3)).to_lists() == [[1, 0], [0, 1]]
    assert trace_bilinear_matrix(alpha_pe(1, F2)).to_lists() == [[0, 1], [1, 0]]


def test_constructor_examples_and_errors():
    assert mu_n(1, F3).dim == 1 and validate_hopf(mu_n(1, F3)).all_pass
    H = alpha_pe(1, F3)
    assert H.dim == 3
    expect = np.zeros((3, 3), dtype=np.int64)
    expect[1, 0] = expect[0, 1] = 1
    assert np.array_equal(H.coproduct[1], expect)
    T = tensor_product(mu_n(2, F5), mu_n(3, F5))
    assert T.dim == 6 and validate_hopf(T).all_pass and is_linearly_reductive(T)
    with pytest.raises(ValueError):
        mu_n(0, F3)
    with pytest.raises(GroupTableError):
        constant_group([[0, 1], [0, 1]], F3)
    with pytest.raises(GroupTableError):
        constant_group([[0, 1, 2], [1, 0, 2], [2, 2, 0]], F3)  # no inverses / not associative
    assert validate_hopf(constant_group(product_table(cyclic_table(2), cyclic_table(3)), F5)).all_pass


def test_json_round_trip_is_bit_exact():
    text = ('{"field":{"kind":"prime","p":3},"dim":2,"basis":["1","zeta"],"unit":[1,0],'
            '"product":[[[1,0],[0,1]],[[0,1],[1,0]]],"coproduct":[[[1,0],[0,0]],[[0,0],[0,1]]],'
            '"counit":[1,1],"antipode":[[1,0],[0,1]]}')
    H = HopfAlgebra.loads(text)
    assert H.dumps() == text
    assert H.same_structure(mu_n(2, F3))
    Q = diagonalizable([2], FieldSpec.rationals())
    assert HopfAlgebra.loads(Q.dumps()).dumps() == Q.dumps()


@pytest.mark.parametrize("label,make", GRID, ids=[g[0] for g in GRID])
def test_constructor_grid_properties(label, make):
    H = make()
    rep = validate_hopf(H)
    assert rep.all_pass, rep.failed()
    assert left_integrals(H).dim == 1
    tr = group_trace(H)
    assert left_integrals(cartier_dual(H)).dim == 1
    assert determinant(trace_bilinear_matrix(H, tr)) != 0
    assert trace_diagram_holds(H, tr)


@given(st.sampled_from(PRIMES), st.integers(1, 6), st.data())
def test_integral_identity_on_random_elements(p, n, data):
    f = FieldSpec.prime(p)
    H = data.draw(st.sampled_from([mu_n(n, f), constant_group(cyclic_table(n), f), alpha_pe(1, f)]))
    (t,) = left_integrals(H).basis
    assert is_left_integral(H, t)
    h = np.array([data.draw(st.integers(0, p - 1)) for _ in range(H.dim)], dtype=np.int64)
    ht = H.mul(h, np.array(t, dtype=np.int64))
    assert np.array_equal(ht, f.reduce(H.eps(h) * np.array(t, dtype=np.int64)))
