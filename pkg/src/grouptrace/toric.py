"""Normal affine semigroups ``sigma^dual ∩ Z^d``, torus-invariant divisors and cyclic covers.

A semigroup is described by the inner facet normals ``v_rho`` (``rays``) of its
cone; the Hilbert basis is recomputed exactly from them.  A Weil divisor is
an integer vector with one coefficient per ray, and the monomial ``chi^m`` is a
section of ``R(iD)`` iff ``<m, v_rho> >= -i d_rho`` for every ray.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exact import int_det, int_matmul, invariant_factors, primitive, smith_normal_form

Vec = tuple[int, ...]


class SemigroupError(ValueError):
    pass


class IndexNotFoundError(ValueError):
    """No principal multiple found up to the requested bound."""


class CoverError(ValueError):
    pass


def _dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(int(x) * int(y) for x, y in zip(a, b))


def _null_direction(rows: list[Vec], d: int) -> Vec | None:
    """Primitive generator of the kernel of a rank-(d-1) integer matrix, else None."""
    if d == 1:
        return (1,) if not rows else None
    cof = []
    for j in range(d):
        minor = [[r[k] for k in range(d) if k != j] for r in rows]
        cof.append((-1) ** j * int_det(minor))
    if not any(cof):
        return None
    return primitive(cof)


@dataclass(frozen=True)
class AffineSemigroup:
    rank: int
    rays: tuple[Vec, ...]
    generators: tuple[Vec, ...]
    extremal: tuple[Vec, ...] = dc_field(default=(), compare=False)
    name: str = dc_field(default="", compare=False)

    # -- construction ------------------------------------------------------
    @classmethod
    def from_rays(cls, rays: Sequence[Sequence[int]], name: str = "") -> "AffineSemigroup":
        rays = [tuple(int(x) for x in r) for r in rays]
        if not rays:
            raise SemigroupError("need at least one ray")
        d = len(rays[0])
        if any(len(r) != d for r in rays):
            raise SemigroupError("rays have different lengths")
        for r in rays:
            if primitive(r) != r or not any(r):
                raise SemigroupError(f"ray {r} is not primitive")
        if len(set(rays)) != len(rays):
            raise SemigroupError("repeated rays")
        if _int_rank(rays) != d:
            raise SemigroupError("rays do not span; the semigroup is not pointed")
        extremal = _extremal_generators(rays, d)
        if not extremal:
            raise SemigroupError("cone has no extremal generators")
        total = [sum(g[i] for g in extremal) for i in range(d)]
        if any(_dot(total, r) <= 0 for r in rays):
            raise SemigroupError("cone is not full-dimensional")
        gens = _hilbert_basis(rays, extremal, d)
        return cls(d, tuple(rays), tuple(gens), tuple(extremal), name)

    @classmethod
    def from_json_obj(cls, obj: dict) -> "AffineSemigroup":
        try:
            rays = obj["rays"]
        except KeyError:
            raise SemigroupError("semigroup needs 'rays'") from None
        S = cls.from_rays(rays, obj.get("name", ""))
        if "rank" in obj and int(obj["rank"]) != S.rank:
            raise SemigroupError(f"rank {obj['rank']} does not match rays of length {S.rank}")
        if obj.get("generators") is not None:
            given = sorted(tuple(int(x) for x in g) for g in obj["generators"])
            if given != sorted(S.generators):
                raise SemigroupError(
                    f"generators {given} are not the Hilbert basis {sorted(S.generators)} of the cone"
                )
        return S

    def to_json_obj(self) -> dict:
        return {"rank": self.rank, "rays": [list(r) for r in self.rays], "generators": [list(g) for g in self.generators]}

    # -- basic queries -------------------------------------------------------
    def pairing_matrix(self) -> list[list[int]]:
        return [list(r) for r in self.rays]

    def pairings(self, m: Sequence[int]) -> tuple[int, ...]:
        return tuple(_dot(m, r) for r in self.rays)

    def contains(self, m: Sequence[int]) -> bool:
        return all(x >= 0 for x in self.pairings(m))

    def grading(self) -> Vec:
        """Sum of the rays; strictly positive on nonzero elements."""
        return tuple(sum(r[i] for r in self.rays) for i in range(self.rank))

    def reach(self) -> Vec:
        """Coordinate bounds: ``|m_i| < q * reach_i`` for class generators of ``F^e_*``."""
        return _reach(self.extremal, self.rank)

    def points(self, box: int) -> list[Vec]:
        return [m for m in _box(self.rank, box) if self.contains(m)]

    def validate(self) -> None:
        for g in self.generators:
            if not self.contains(g):
                raise SemigroupError(f"generator {g} is outside the cone")

    def is_saturated_in(self, box: int) -> bool:
        """Every cone point in the box is a sum of generators (normality check)."""
        pts = set(self.points(box))
        reached = _sums_of_generators(self.generators, box, self.rank)
        return pts <= reached

    def __repr__(self):
        return f"AffineSemigroup(rank={self.rank}, rays={list(self.rays)}, generators={list(self.generators)})"


def _int_rank(rows: Sequence[Sequence[int]]) -> int:
    if not rows:
        return 0
    _, D, _ = smith_normal_form(rows)
    return sum(1 for i in range(min(len(D), len(D[0]))) if D[i][i])


def _extremal_generators(rays: list[Vec], d: int) -> list[Vec]:
    found = set()
    for subset in itertools.combinations(rays, d - 1):
        if d > 1 and _int_rank(list(subset)) != d - 1:
            continue
        v = _null_direction(list(subset), d)
        if v is None:
            continue
        for cand in (v, tuple(-x for x in v)):
            if all(_dot(cand, r) >= 0 for r in rays):
                found.add(cand)
    return sorted(found)


def _reach(extremal: Sequence[Vec], d: int) -> Vec:
    out = []
    for i in range(d):
        mags = sorted((abs(g[i]) for g in extremal), reverse=True)
        out.append(max(1, sum(mags[:d])))
    return tuple(out)


def _box(d: int, box: int, lo: int | None = None):
    lo = -box if lo is None else lo
    return itertools.product(range(lo, box + 1), repeat=d)


def _hilbert_basis(rays: list[Vec], extremal: list[Vec], d: int) -> list[Vec]:
    # Hilbert basis elements lie in a parallelepiped spanned by d extremal generators.
    bound = _reach(extremal, d)
    grade = [sum(r[i] for r in rays) for i in range(d)]
    ranges = [range(-b, b + 1) for b in bound]
    pts = [m for m in itertools.product(*ranges) if any(m) and all(_dot(m, r) >= 0 for r in rays)]
    pts.sort(key=lambda m: (_dot(m, grade), m))
    basis: list[Vec] = []
    for m in pts:
        # m is reducible iff m - b lies in the cone for some earlier irreducible b
        if not any(all(_dot(m, r) - _dot(b, r) >= 0 for r in rays) for b in basis):
            basis.append(m)
    return sorted(basis)


def _sums_of_generators(gens: Sequence[Vec], box: int, d: int) -> set[Vec]:
    seen = {tuple([0] * d)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for m in frontier:
            for g in gens:
                s = tuple(a + b for a, b in zip(m, g))
                if all(abs(x) <= box for x in s) and s not in seen:
                    seen.add(s)
                    nxt.append(s)
        frontier = nxt
    return seen


# ---------------------------------------------------------------------------
# standard examples
# ---------------------------------------------------------------------------


def orthant(d: int = 2) -> AffineSemigroup:
    """The regular semigroup N^d."""
    return AffineSemigroup.from_rays([tuple(int(i == j) for j in range(d)) for i in range(d)], name=f"N^{d}")


def plane_veronese(n: int) -> AffineSemigroup:
    """The n-th Veronese cone of the plane, generated by (1, k) for 0 <= k <= n."""
    if n < 1:
        raise SemigroupError("Veronese order must be positive")
    return AffineSemigroup.from_rays([(0, 1), (n, -1)], name=f"V_{n}")


def product_semigroup(A: AffineSemigroup, B: AffineSemigroup) -> AffineSemigroup:
    rays = [tuple(r) + (0,) * B.rank for r in A.rays] + [(0,) * A.rank + tuple(r) for r in B.rays]
    return AffineSemigroup.from_rays(rays, name=f"{A.name}x{B.name}")


# ---------------------------------------------------------------------------
# divisors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ToricDivisor:
    semigroup: AffineSemigroup
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != len(self.semigroup.rays):
            raise SemigroupError(f"divisor has {len(self.coeffs)} coefficients for {len(self.semigroup.rays)} rays")
        for c in self.coeffs:
            if isinstance(c, Fraction) and c.denominator != 1 or isinstance(c, float):
                raise SemigroupError("divisor coefficients must be integers")
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))

    def contains(self, m: Sequence[int], i: int = 1) -> bool:
        return all(_dot(m, r) >= -i * c for r, c in zip(self.semigroup.rays, self.coeffs))


def principal_divisor(R: AffineSemigroup, m: Sequence[int]) -> ToricDivisor:
    """``div(chi^m)``."""
    return ToricDivisor(R, R.pairings(m))


def solve_integer(A: Sequence[Sequence[int]], b: Sequence[int]) -> Vec | None:
    """An integer solution of ``A x = b`` (via Smith form), or None."""
    U, D, V = smith_normal_form(A)
    m, n = len(A), len(A[0])
    c = [sum(U[i][k] * b[k] for k in range(m)) for i in range(m)]
    y = [0] * n
    for i in range(m):
        di = D[i][i] if i < n else 0
        if di == 0:
            if c[i] != 0:
                return None
        else:
            if c[i] % di:
                return None
            y[i] = c[i] // di
    return tuple(sum(V[j][k] * y[k] for k in range(n)) for j in range(n))


def principal_witness(R: AffineSemigroup, D: ToricDivisor, n: int) -> Vec | None:
    """``m0`` with ``<m0, v_rho> = -n d_rho`` for all rays, if ``nD`` is principal."""
    return solve_integer(R.pairing_matrix(), [-n * c for c in D.coeffs])


def divisor_index(R: AffineSemigroup, D: ToricDivisor, max_n: int = 1000) -> tuple[int, Vec]:
    if max_n < 1:
        raise ValueError("max_n must be positive")
    for n in range(1, max_n + 1):
        w = principal_witness(R, D, n)
        if w is not None:
            return n, w
    raise IndexNotFoundError(f"divisor index exceeds {max_n}")


@dataclass
class ClassGroupReport:
    invariant_factors: list[int]
    torsion_orders: list[int]

    def to_json_obj(self) -> dict:
        return {"invariant_factors": self.invariant_factors, "torsion_orders": self.torsion_orders}


def class_group(R: AffineSemigroup) -> ClassGroupReport:
    """Cokernel of ``m -> (<m, v_rho>)_rho``; factor 0 is a free summand."""
    factors = invariant_factors(R.pairing_matrix())
    factors += [0] * (len(R.rays) - len(factors))
    nontrivial = [f for f in factors if f != 1]
    nontrivial.sort(key=lambda f: (f == 0, f))
    return ClassGroupReport(nontrivial, [f for f in nontrivial if f > 1])


def sections(R: AffineSemigroup, D: ToricDivisor, i: int, box: int) -> list[Vec]:
    """Lattice points of ``R(iD)`` in ``[-box, box]^d``, lexicographically ordered."""
    if box <= 0:
        raise ValueError("degree bound must be positive")
    return [m for m in _box(R.rank, box) if D.contains(m, i)]


def section_generators(R: AffineSemigroup, D: ToricDivisor, i: int, box: int) -> list[Vec]:
    """Minimal module generators of ``R(iD)`` among the points in the box."""
    pts = sections(R, D, i, box)
    out = []
    for m in pts:
        if not any(D.contains(tuple(a - b for a, b in zip(m, g)), i) for g in R.generators):
            out.append(m)
    return out


def default_section_box(R: AffineSemigroup, D: ToricDivisor, i_max: int) -> int:
    """Box containing every module generator of ``R(iD)`` for ``0 <= i <= i_max``."""
    d = R.rank
    xmax = Fraction(0)
    for i in range(i_max + 1):
        for subset in itertools.combinations(range(len(R.rays)), d):
            A = [list(R.rays[k]) for k in subset]
            det = int_det(A)
            if det == 0:
                continue
            b = [-i * D.coeffs[k] for k in subset]
            # Cramer's rule for the vertex candidate
            sol = []
            for j in range(d):
                Aj = [row[:j] + [b[r]] + row[j + 1:] for r, row in enumerate(A)]
                sol.append(Fraction(int_det(Aj), det))
            if all(sum(s * r for s, r in zip(sol, ray)) >= -i * c for ray, c in zip(R.rays, D.coeffs)):
                xmax = max(xmax, max(abs(s) for s in sol))
    spread = sum(max(abs(x) for x in g) for g in R.extremal)
    return int(math.ceil(xmax)) + spread + 1


# ---------------------------------------------------------------------------
# cyclic covers and Veronese subrings
# ---------------------------------------------------------------------------


@dataclass
class CyclicCoverSpec:
    divisor: ToricDivisor
    n: int
    principal_witness: Vec
    cover_semigroup: AffineSemigroup
    lattice_change: list[list[int]]  # U with U (m0, n) = e_1
    kind: str = "veronese"

    def lift(self, y: Sequence[int]) -> tuple[Vec, int]:
        """Representative ``(m, i)`` with ``0 <= i < n`` of a cover lattice point."""
        d1 = len(self.lattice_change)
        Uinv = _unimodular_inverse(self.lattice_change)
        x = [sum(Uinv[r][c] * v for c, v in enumerate((0,) + tuple(y))) for r in range(d1)]
        w = tuple(self.principal_witness) + (self.n,)
        k = math.floor(Fraction(x[-1], self.n))
        x = [a - k * b for a, b in zip(x, w)]
        return tuple(x[:-1]), x[-1]

    def to_json_obj(self) -> dict:
        return {
            "n": self.n,
            "kind": self.kind,
            "divisor": list(self.divisor.coeffs),
            "principal_witness": list(self.principal_witness),
            "cover": self.cover_semigroup.to_json_obj(),
            "lattice_change": self.lattice_change,
            "generator_lifts": [
                {"generator": list(g), "section": list(self.lift(g)[0]), "degree": self.lift(g)[1]}
                for g in self.cover_semigroup.generators
            ],
        }


def _unimodular_inverse(U: list[list[int]]) -> list[list[int]]:
    from .exact import ExactMatrix, FieldSpec, inverse

    inv = inverse(ExactMatrix(FieldSpec.rationals(), U)).to_lists()
    out = [[int(x) for x in row] for row in inv]
    if any(Fraction(x).denominator != 1 for row in inv for x in row):
        raise CoverError("lattice change is not unimodular")
    return out


def cyclic_cover(R: AffineSemigroup, D: ToricDivisor, n: int) -> CyclicCoverSpec:
    """The semigroup of ``C = ⊕_{i<n} R(iD)`` with wrap-around multiplication ``fg/a``.

    ``C`` is the cone ``{(m, i) : <m, v_rho> + i d_rho >= 0}`` in
    ``Z^{d+1} / Z (m0, n)``; the quotient is re-coordinatized by Smith form.
    """
    if n < 1:
        raise CoverError("cover degree must be positive")
    m0 = principal_witness(R, D, n)
    if m0 is None:
        raise CoverError(f"{n}D is not principal")
    index, _ = divisor_index(R, D, n)
    w = list(m0) + [n]
    if math.gcd(*w) != 1:
        raise CoverError(
            f"(m0, n) = {tuple(w)} is not primitive: n = {n} is not the index {index} of D, "
            "so the cover would not be reduced"
        )
    U, Dm, _ = smith_normal_form([[x] for x in w])
    # U w = e_1 (Smith form of a primitive column is (1, 0, ..., 0))
    assert Dm[0][0] == 1
    Uinv = _unimodular_inverse(U)
    new_rays = []
    for v, c in zip(R.rays, D.coeffs):
        ell = list(v) + [c]
        row = [sum(ell[k] * Uinv[k][j] for k in range(len(ell))) for j in range(len(ell))]
        assert row[0] == 0
        new_rays.append(primitive(row[1:]))
    cover = AffineSemigroup.from_rays(new_rays, name=f"C({R.name},{n})")
    # primitivity forces n to be the index; Kummer-type covers go through kummer_presentation
    return CyclicCoverSpec(D, n, tuple(m0), cover, U, "veronese")


def veronese(R: AffineSemigroup, n: int, grading: Sequence[int] | None = None) -> tuple[AffineSemigroup, list[list[int]]]:
    """Elements of grading divisible by ``n``, re-coordinatized; returns (semigroup, basis matrix B).

    Parent coordinates are ``B y``.
    """
    if n < 1:
        raise ValueError("Veronese order must be positive")
    grading = tuple(grading) if grading is not None else R.grading()
    if len(grading) != R.rank:
        raise SemigroupError("grading has the wrong length")
    for g in R.generators:
        if _dot(g, grading) <= 0:
            raise SemigroupError(f"grading is not positive on generator {g}")
    d = R.rank
    U, D, V = smith_normal_form([list(grading)])
    c = abs(D[0][0])
    k = n // math.gcd(n, c)
    scale = [[(k if (i == j == 0) else int(i == j)) for j in range(d)] for i in range(d)]
    B = int_matmul(V, scale)
    new_rays = [primitive([sum(B[i][j] * v[i] for i in range(d)) for j in range(d)]) for v in R.rays]
    sub = AffineSemigroup.from_rays(new_rays, name=f"{R.name}^({n})")
    return sub, B


def to_parent(B: list[list[int]], y: Sequence[int]) -> Vec:
    return tuple(sum(B[i][j] * y[j] for j in range(len(y))) for i in range(len(B)))


def is_isomorphic(A: AffineSemigroup, B: AffineSemigroup) -> bool:
    """Whether a unimodular map carries the Hilbert basis of A onto that of B."""
    if A.rank != B.rank or len(A.generators) != len(B.generators):
        return False
    d = A.rank
    target = set(B.generators)
    base = None
    for combo in itertools.combinations(B.generators, d):
        if int_det([list(g) for g in combo]) != 0:
            base = combo
            break
    if base is None:
        return False
    for images in itertools.permutations(A.generators, d):
        src = [list(g) for g in images]
        det = int_det(src)
        if det == 0:
            continue
        # find L with L * src_col = base_col, i.e. L = base^T-cols * src^{-1}
        S = np.array(src, dtype=object).T
        Bt = np.array([list(g) for g in base], dtype=object).T
        from .exact import ExactMatrix, FieldSpec, inverse

        Sinv = np.array(inverse(ExactMatrix(FieldSpec.rationals(), S.tolist())).to_lists(), dtype=object)
        L = Bt.dot(Sinv)
        if any(Fraction(x).denominator != 1 for x in L.ravel()):
            continue
        L = [[int(x) for x in row] for row in L]
        if abs(int_det(L)) != 1:
            continue
        if {tuple(sum(L[i][j] * g[j] for j in range(d)) for i in range(d)) for g in A.generators} == target:
            return True
    return False


def check_local_graded(R: AffineSemigroup, D: ToricDivisor, n: int, box: int | None = None,
                       allow_non_index: bool = False) -> tuple[bool, tuple | None]:
    """Products ``fg/a`` of generating sections with ``i + j = n`` lie in the maximal ideal.

    Returns ``(ok, witness)`` where ``witness`` is a violating pair ``(f, g)``.
    """
    index, _ = divisor_index(R, D, max(n, 1))
    if n != index and not allow_non_index:
        raise ValueError(f"n = {n} differs from the divisor index {index}")
    m0 = principal_witness(R, D, n)
    if m0 is None:
        raise ValueError(f"{n}D is not principal")
    if n == 1:
        return True, None
    box = box or default_section_box(R, D, n)
    gens = {i: section_generators(R, D, i, box) for i in range(1, n)}
    for i in range(1, n):
        j = n - i
        for f in gens[i]:
            for g in gens[j]:
                if all(a + b - c == 0 for a, b, c in zip(f, g, m0)):
                    return False, (f, g)
    return True, None


def kummer_presentation(d: int, monomial: Sequence[int], n: int, field, coaction: str = "kummer"):
    """Kummer-type cover ``k[x_1..x_d][t]/(t^n - x^monomial)`` of the regular semigroup ring."""
    from .gaction import cyclic_presentation
    from .poly import PolyRing

    names = ["x", "y", "z"][:d] if d <= 3 else [f"x{i + 1}" for i in range(d)]
    ring = PolyRing(field, names)
    rhs = ring.one
    for v, e in zip(ring.gens(), monomial):
        rhs = rhs * v ** int(e)
    return cyclic_presentation(ring, n, rhs, coaction)
