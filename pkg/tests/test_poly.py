import pytest
from hypothesis import given, strategies as st

from grouptrace.exact import FieldSpec
from grouptrace.poly import DegreeCapError, PolyRing, RingMismatchError, poly_matrix_det
from oracles import leibniz_det

F2, F3, F5, F7 = (FieldSpec.prime(p) for p in (2, 3, 5, 7))


def test_freshman_dream_f2():
    R = PolyRing(F2, ["x", "y"])
    x, y = R.gens()
    assert (x + y) ** 2 == x**2 + y**2


def test_zero_and_powers():
    R = PolyRing(F3, ["t"])
    (t,) = R.gens()
    assert t * 0 == R.zero
    assert t * t ** 2 == t**3
    assert str(t * t**2) == "t^3"


def test_eval_examples():
    R = PolyRing(F5, ["x"])
    assert R.parse("x^2 + 1").eval([2]) == 0
    assert R.const(3).eval([4]) == 3
    R3 = PolyRing(F7, ["x", "y", "z"])
    assert R3.parse("x*y - z^2").eval([1, 4, 2]) == 0
    with pytest.raises(ValueError):
        R3.parse("x").eval([1, 2])


def test_is_unit():
    R = PolyRing(F7, ["x"])
    assert R.const(5).is_unit()
    assert not R.var("x").is_unit()
    assert not R.zero.is_unit()


def test_parser_rejects_unknown_variable_and_garbage():
    R = PolyRing(F5, ["x", "y"])
    with pytest.raises(ValueError):
        R.parse("x + z")
    with pytest.raises(ValueError):
        R.parse("x +")
    with pytest.raises(ValueError):
        R.parse("x $ y")
    assert R.parse("3*x^2*y + 1") == 3 * R.var("x") ** 2 * R.var("y") + 1
    assert R.parse("(x+y)^2/2") == (R.var("x") + R.var("y")) ** 2 * 3


def test_render_parse_round_trip():
    R = PolyRing(FieldSpec.rationals(), ["x", "y"])
    p = R.parse("-x^3 + 1/2*x*y - 7")
    assert R.parse(str(p)) == p


def test_ring_mismatch():
    a = PolyRing(F5, ["x"]).var("x")
    b = PolyRing(F7, ["x"]).var("x")
    with pytest.raises(RingMismatchError):
        a + b


def test_degree_cap_is_an_error():
    R = PolyRing(F5, ["x"], max_degree=10)
    with pytest.raises(DegreeCapError):
        R.var("x") ** 11


def test_exact_division():
    R = PolyRing(F7, ["x", "y"])
    a, b = R.parse("x^2 + 3*x*y + 1"), R.parse("y - x + 2")
    assert (a * b).exact_div(b) == a
    with pytest.raises(ArithmeticError):
        a.exact_div(R.var("x"))


def test_poly_det_matches_leibniz():
    R = PolyRing(F5, ["x", "y"])
    M = [[R.parse(s) for s in row] for row in [["x", "y", "1"], ["x^2", "1", "y"], ["2", "x*y", "x+y"]]]
    assert poly_matrix_det(M, R) == leibniz_det(M, zero=R.zero, one=R.one)


def polys(ring, max_terms=4, max_exp=3):
    p = ring.field.p
    term = st.tuples(st.tuples(*[st.integers(0, max_exp)] * ring.nvars), st.integers(0, p - 1))
    return st.lists(term, max_size=max_terms).map(lambda ts: ring.poly(dict(ts)))


R5 = PolyRing(F5, ["x", "y"])
R3 = PolyRing(F3, ["x", "y"])


@given(polys(R5), polys(R5), polys(R5))
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a
    assert a - a == R5.zero


@given(polys(R5), polys(R5), st.tuples(st.integers(0, 4), st.integers(0, 4)))
def test_eval_is_homomorphism(a, b, pt):
    assert (a * b).eval(pt) == a.eval(pt) * b.eval(pt)
    assert (a + b).eval(pt) == a.eval(pt) + b.eval(pt)


@given(polys(R3, 3, 2), polys(R3, 3, 2))
def test_frobenius_additive(a, b):
    assert (a + b) ** 3 == a**3 + b**3
