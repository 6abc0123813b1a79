import itertools

import pytest
from hypothesis import given, strategies as st

from grouptrace.exact import FieldSpec
from grouptrace.gaction import discriminant, torsor_test
from grouptrace.toric import (
    AffineSemigroup,
    CoverError,
    IndexNotFoundError,
    SemigroupError,
    ToricDivisor,
    check_local_graded,
    class_group,
    cyclic_cover,
    divisor_index,
    is_isomorphic,
    kummer_presentation,
    orthant,
    plane_veronese,
    principal_divisor,
    principal_witness,
    product_semigroup,
    section_generators,
    sections,
    to_parent,
    veronese,
)
from oracles import invariant_factors_oracle, semigroup_points_from_generators


def index_divisor(n):
    R = plane_veronese(n)
    return R, ToricDivisor(R, (0, 1))


# -- semigroups ---------------------------------------------------------------


def test_plane_veronese_generators():
    # in coordinates (m1, m2) with 0 <= m2 <= n m1 the generators are (1, k)
    for n in range(1, 7):
        R = plane_veronese(n)
        assert sorted(R.generators) == [(1, k) for k in range(n + 1)]
        R.validate()
        assert R.is_saturated_in(8)


def test_generators_match_enumeration_oracle():
    for R in [plane_veronese(3), orthant(3), AffineSemigroup.from_rays([(1, 0), (-1, 3)]),
              AffineSemigroup.from_rays([(1, 0), (0, 1), (1, -1), (-1, 2)])]:
        box = 6
        assert set(R.points(box)) == semigroup_points_from_generators(R.generators, box)


def test_bad_rays_rejected():
    with pytest.raises(SemigroupError):
        AffineSemigroup.from_rays([(2, 0), (0, 1)])
    with pytest.raises(SemigroupError):
        AffineSemigroup.from_rays([(1, 0)] * 2)
    with pytest.raises(SemigroupError):
        AffineSemigroup.from_rays([(1, 0), (-1, 0)])


def test_json_generators_must_be_hilbert_basis():
    # the rays below cut out a cone whose Hilbert basis is not {(2,0),(1,1),(0,2)}
    obj = {"rank": 2, "rays": [[1, 0], [-1, 2]], "generators": [[2, 0], [1, 1], [0, 2]], "divisor": [1, 0]}
    with pytest.raises(SemigroupError):
        AffineSemigroup.from_json_obj(obj)
    S = AffineSemigroup.from_json_obj({"rank": 2, "rays": [[1, 0], [-1, 2]]})
    assert sorted(S.generators) == [(0, 1), (1, 1), (2, 1)]
    assert AffineSemigroup.from_json_obj(S.to_json_obj()) == S


# -- sections -----------------------------------------------------------


def test_sections_degree_zero_is_semigroup():
    R, D = index_divisor(3)
    assert sections(R, D, 0, 5) == R.points(5)


def test_v2_sections_are_odd_points():
    # phi(m) = (2 m1 - m2, m2) identifies V_2 with the even-sum points of N^2;
    # R(D) then maps onto the odd-sum points via psi(m) = phi(m) + (1, 0)
    R, D = index_divisor(2)
    box = 8
    secs = set(sections(R, D, 1, box))
    image = {(2 * a - b + 1, b) for a, b in secs}
    assert all(x >= 0 and y >= 0 and (x + y) % 2 == 1 for x, y in image)
    for x, y in itertools.product(range(6), repeat=2):
        if (x + y) % 2:
            assert ((x + y - 1) // 2, y) in secs


def test_full_index_sections_are_principal():
    R, D = index_divisor(3)
    n, m0 = divisor_index(R, D)
    box = 6
    assert section_generators(R, D, n, box) == [m0]
    shifted = {tuple(a + b for a, b in zip(m0, m)) for m in R.points(2 * box)}
    inside = {m for m in shifted if all(abs(x) <= box for x in m)}
    assert set(sections(R, D, n, box)) == inside


def test_sections_multiply():
    R, D = index_divisor(3)
    box = 4
    for i, j in [(0, 1), (1, 1), (1, 2)]:
        for f in sections(R, D, i, box):
            for g in sections(R, D, j, box):
                assert D.contains(tuple(a + b for a, b in zip(f, g)), i + j)


# -- divisors and class groups -------------------------------------------------------


def test_divisor_index_examples():
    R, D = index_divisor(2)
    assert divisor_index(R, ToricDivisor(R, (0, 0))) == (1, (0, 0))
    assert divisor_index(R, D)[0] == 2
    P = principal_divisor(R, (3, 1))
    n, m0 = divisor_index(R, P)
    assert n == 1 and R.pairings(m0) == tuple(-c for c in P.coeffs)
    with pytest.raises(IndexNotFoundError):
        divisor_index(R, D, max_n=1)


@pytest.mark.parametrize("n", range(1, 8))
def test_index_divides_multiples(n):
    R, D = index_divisor(n)
    idx, m0 = divisor_index(R, D)
    assert idx == n
    assert R.pairings(m0) == tuple(-idx * c for c in D.coeffs)
    for k in (2 * idx, 3 * idx):
        assert principal_witness(R, D, k) is not None
    for k in range(1, idx):
        assert principal_witness(R, D, k) is None
    assert divisor_index(R, ToricDivisor(R, (1, 0)))[0] == n


def test_divisor_coefficients_must_be_integers():
    R = plane_veronese(2)
    with pytest.raises(SemigroupError):
        ToricDivisor(R, (0.5, 0))
    with pytest.raises(SemigroupError):
        ToricDivisor(R, (1,))


def test_class_groups():
    assert class_group(orthant(2)).torsion_orders == []
    for n in range(2, 8):
        assert class_group(plane_veronese(n)).torsion_orders == [n]
    rep = class_group(AffineSemigroup.from_rays([(1, 0), (0, 1), (1, -1), (-1, 2)]))
    assert 0 in rep.invariant_factors


@given(st.lists(st.lists(st.integers(-6, 6), min_size=3, max_size=3), min_size=2, max_size=3))
def test_invariant_factors_match_determinantal_oracle(rows):
    from grouptrace.exact import invariant_factors

    assert invariant_factors(rows) == invariant_factors_oracle(rows)


# -- covers ------------------------------------------------------------------


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_veronese_cover_is_plane(n):
    R, D = index_divisor(n)
    cov = cyclic_cover(R, D, n)
    assert cov.kind == "veronese"
    C = cov.cover_semigroup
    assert is_isomorphic(C, orthant(2))
    assert class_group(C).torsion_orders == []
    assert C.is_saturated_in(6)
    for g in C.generators:
        m, i = cov.lift(g)
        assert 0 <= i < n and D.contains(m, i)


def test_principal_divisor_cover_degree_one_is_R():
    R = plane_veronese(3)
    cov = cyclic_cover(R, principal_divisor(R, (1, 1)), 1)
    assert is_isomorphic(cov.cover_semigroup, R)


def test_non_index_cover_rejected():
    R, D = index_divisor(2)
    with pytest.raises(CoverError):
        cyclic_cover(R, D, 4)
    with pytest.raises(CoverError):
        cyclic_cover(R, D, 3)


def test_kummer_type_cover_matches_kummer_disc():
    f = FieldSpec.prime(7)
    S = kummer_presentation(2, (1, 0), 3, f)
    x = S.base.var("x")
    disc = discriminant(S)
    assert disc == (x**2).scale(disc.exact_div(x**2).constant_term())
    assert torsor_test(S, (0, 0)).verdict == "not_torsor_at_point"


def test_product_semigroup():
    P = product_semigroup(plane_veronese(2), orthant(1))
    assert P.rank == 3
    assert class_group(P).torsion_orders == [2]


# -- Veronese subrings ---------------------------------------------------------------


def test_veronese_subrings():
    N2 = orthant(2)
    same, _ = veronese(N2, 1)
    assert is_isomorphic(same, N2)
    V2, B = veronese(N2, 2, (1, 1))
    assert sorted(to_parent(B, g) for g in V2.generators) == [(0, 2), (1, 1), (2, 0)]
    assert is_isomorphic(V2, plane_veronese(2))
    V4, _ = veronese(plane_veronese(2), 2, (1, 0))
    assert is_isomorphic(V4, plane_veronese(4))
    # the natural divisor of V_4 has index 4
    assert class_group(V4).torsion_orders == [4]
    assert divisor_index(plane_veronese(4), ToricDivisor(plane_veronese(4), (0, 1)))[0] == 4
    with pytest.raises(SemigroupError):
        veronese(N2, 2, (1, -1))


# -- local graded check ----------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_local_graded_holds_at_index(n):
    R, D = index_divisor(n)
    ok, wit = check_local_graded(R, D, n)
    assert ok and wit is None


def test_local_graded_fails_off_index():
    R = plane_veronese(2)
    D = ToricDivisor(R, (1, 0))
    ok, (f, g) = check_local_graded(R, D, 4, allow_non_index=True)
    assert not ok
    m0 = principal_witness(R, D, 4)
    assert tuple(a + b for a, b in zip(f, g)) == m0
    with pytest.raises(ValueError):
        check_local_graded(R, D, 4)
