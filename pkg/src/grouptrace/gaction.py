"""Finite free algebras ``S`` over a polynomial ring ``R`` with a Hopf coaction.

``S`` has an ``R``-basis ``s_0 = 1, s_1, ..., s_{d-1}``.  An element of ``S`` is a
length-``d`` tuple of :class:`Poly`.  The coaction sends ``s_i`` to
``sum_m a_i^m (x) gamma_m`` where ``gamma_m`` runs over the basis of the Hopf
algebra; ``coaction[i][m]`` stores ``a_i^m`` as an element of ``S``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from .exact import ExactMatrix, FieldSpec, expansion_determinant, solve, solve_kernel
from .hopf import (
    GroupTrace,
    HopfAlgebra,
    ValidationReport,
    alpha_pe,
    change_basis,
    group_trace,
    mu_n,
    trace_bilinear_matrix,
)
from .poly import Poly, PolyRing, coefficient_table, poly_matrix_det

SElem = tuple  # tuple[Poly, ...]


class CoactionStructureError(ValueError):
    pass


class TraceCodomainError(AssertionError):
    """A trace value left ``R * 1``; impossible for a genuine coaction."""


class DiscriminantIdentityError(AssertionError):
    pass


@dataclass(frozen=True, eq=False)
class CoactedAlgebra:
    base: PolyRing
    basis: tuple[str, ...]
    mult: tuple  # mult[i][j] is an SElem
    hopf: HopfAlgebra
    coaction: tuple  # coaction[i][m] is an SElem
    name: str = ""

    def __post_init__(self):
        d = len(self.basis)
        o = self.hopf.dim
        if d < 1:
            raise CoactionStructureError("rank must be at least 1")
        if self.hopf.field != self.base.field:
            raise CoactionStructureError("Hopf algebra and base ring use different fields")
        mult = tuple(tuple(self._elem(self.mult[i][j]) for j in range(d)) for i in range(d)) \
            if len(self.mult) == d and all(len(r) == d for r in self.mult) else None
        if mult is None:
            raise CoactionStructureError(f"mult must be {d} x {d}")
        if len(self.coaction) != d or any(len(r) != o for r in self.coaction):
            raise CoactionStructureError(f"coaction must be {d} x {o}")
        coaction = tuple(tuple(self._elem(x) for x in row) for row in self.coaction)
        object.__setattr__(self, "basis", tuple(self.basis))
        object.__setattr__(self, "mult", mult)
        object.__setattr__(self, "coaction", coaction)

    def _elem(self, x) -> SElem:
        d = len(self.basis)
        if len(x) != d:
            raise CoactionStructureError(f"S-element of length {len(x)}, rank is {d}")
        return tuple(self.base.coerce(c) for c in x)

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def field(self) -> FieldSpec:
        return self.base.field

    # -- arithmetic in S -----------------------------------------------------
    def zero(self) -> SElem:
        return (self.base.zero,) * self.rank

    def one(self) -> SElem:
        return self.basis_elem(0)

    def basis_elem(self, i: int) -> SElem:
        z = self.base.zero
        return tuple(self.base.one if k == i else z for k in range(self.rank))

    def from_base(self, r: Poly) -> SElem:
        return (r,) + (self.base.zero,) * (self.rank - 1)

    def add(self, x: SElem, y: SElem) -> SElem:
        return tuple(a + b for a, b in zip(x, y))

    def neg(self, x: SElem) -> SElem:
        return tuple(-a for a in x)

    def sub(self, x: SElem, y: SElem) -> SElem:
        return tuple(a - b for a, b in zip(x, y))

    def scale(self, r: Poly, x: SElem) -> SElem:
        if r.is_zero():
            return self.zero()
        return tuple(r * a for a in x)

    def mul(self, x: SElem, y: SElem) -> SElem:
        acc = [self.base.zero] * self.rank
        for i, xi in enumerate(x):
            if xi.is_zero():
                continue
            for j, yj in enumerate(y):
                if yj.is_zero():
                    continue
                c = xi * yj
                for k, m in enumerate(self.mult[i][j]):
                    if not m.is_zero():
                        acc[k] = acc[k] + c * m
        return tuple(acc)

    def is_zero(self, x: SElem) -> bool:
        return all(a.is_zero() for a in x)

    def coact(self, x: SElem) -> list[SElem]:
        """Coaction of ``x``: entry ``m`` is the coefficient of ``gamma_m``."""
        out = [self.zero() for _ in range(self.hopf.dim)]
        for i, r in enumerate(x):
            if r.is_zero():
                continue
            for m in range(self.hopf.dim):
                a = self.coaction[i][m]
                if not self.is_zero(a):
                    out[m] = self.add(out[m], self.scale(r, a))
        return out

    def _hopf_scalar(self, c) -> Poly:
        return self.base.const(self.field(c))

    # -- serialization -------------------------------------------------------
    def to_json_obj(self) -> dict:
        def el(x):
            return [str(c) for c in x]

        return {
            "base": self.base.to_json(),
            "basis": list(self.basis),
            "mult": [[el(self.mult[i][j]) for j in range(self.rank)] for i in range(self.rank)],
            "hopf": self.hopf.to_json_obj(),
            "coaction": [[el(a) for a in row] for row in self.coaction],
        }


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def coaction_validate(S: CoactedAlgebra) -> ValidationReport:
    H = S.hopf
    d, o = S.rank, H.dim
    rep = ValidationReport()
    basis = [S.basis_elem(i) for i in range(d)]
    one = S.one()

    rep.record("identity_element", all(S.mul(one, b) == b and S.mul(b, one) == b for b in basis))
    rep.record(
        "algebra_associativity",
        all(
            S.mul(S.mul(basis[i], basis[j]), basis[k]) == S.mul(basis[i], S.mul(basis[j], basis[k]))
            for i in range(d)
            for j in range(d)
            for k in range(d)
        ),
    )
    rep.record("commutativity", all(S.mult[i][j] == S.mult[j][i] for i in range(d) for j in range(d)))

    unit = [S._hopf_scalar(c) for c in H.unit]
    rep.record("coaction_identity", all(S.coaction[0][m] == S.scale(unit[m], one) for m in range(o)))

    eps = [S._hopf_scalar(c) for c in H.counit]
    ok = True
    for i in range(d):
        acc = S.zero()
        for m in range(o):
            acc = S.add(acc, S.scale(eps[m], S.coaction[i][m]))
        ok &= acc == basis[i]
    rep.record("counit", ok)

    # (coaction (x) id) coaction == (id (x) coproduct) coaction, compared on gamma_a (x) gamma_b
    C = H.coproduct
    ok = True
    for i in range(d):
        lhs = [S.coact(S.coaction[i][a]) for a in range(o)]  # lhs[a][b]
        for a in range(o):
            for b in range(o):
                rhs = S.zero()
                for m in range(o):
                    c = C[m, a, b]
                    if c:
                        rhs = S.add(rhs, S.scale(S._hopf_scalar(c), S.coaction[i][m]))
                if lhs[a][b] != rhs:
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            break
    rep.record("coassociativity", ok)

    P = H.product
    ok = True
    for i in range(d):
        for j in range(i, d):
            lhs = S.coact(S.mul(basis[i], basis[j]))
            rhs = [S.zero() for _ in range(o)]
            for m in range(o):
                am = S.coaction[i][m]
                if S.is_zero(am):
                    continue
                for n in range(o):
                    an = S.coaction[j][n]
                    if S.is_zero(an):
                        continue
                    prod = S.mul(am, an)
                    for k in np.nonzero(P[m, n])[0]:
                        rhs[k] = S.add(rhs[k], S.scale(S._hopf_scalar(P[m, n, k]), prod))
            if lhs != rhs:
                ok = False
                break
        if not ok:
            break
    rep.record("multiplicativity", ok)
    return rep


def require_valid(S: CoactedAlgebra) -> None:
    rep = coaction_validate(S)
    if not rep.all_pass:
        raise CoactionStructureError(f"coaction axioms fail: {rep.failed()}")


# ---------------------------------------------------------------------------
# traces and discriminants
# ---------------------------------------------------------------------------


@dataclass
class TraceReport:
    trace_values: list[Poly]
    bilinear: list[list[Poly]]
    disc: Poly
    trace: GroupTrace
    T: ExactMatrix
    bilinear_via_MTM: list[list[Poly]] = dc_field(default_factory=list)

    @property
    def trace_scale_note(self) -> dict:
        return self.trace.to_json_obj()

    def to_json_obj(self) -> dict:
        return {
            "trace_values": [str(v) for v in self.trace_values],
            "bilinear": [[str(c) for c in row] for row in self.bilinear],
            "disc": str(self.disc),
            "disc_is_unit": self.disc.is_unit(),
            "bilinear_matches_MTM": self.bilinear == self.bilinear_via_MTM,
            "trace_representative": self.trace_scale_note,
        }


def trace_values(S: CoactedAlgebra, trace: GroupTrace | None = None) -> list[Poly]:
    trace = trace or group_trace(S.hopf)
    t = [S._hopf_scalar(c) for c in trace.functional]
    out = []
    for i in range(S.rank):
        acc = S.zero()
        for m, tm in enumerate(t):
            if not tm.is_zero():
                acc = S.add(acc, S.scale(tm, S.coaction[i][m]))
        if any(not c.is_zero() for c in acc[1:]):
            raise TraceCodomainError(f"Tr({S.basis[i]}) = {[str(c) for c in acc]} is not in R*1")
        out.append(acc[0])
    return out


def _bilinear_MTM(S: CoactedAlgebra, T: ExactMatrix) -> list[list[SElem]]:
    o, d = S.hopf.dim, S.rank
    # N[m][j] = sum_n T[m, n] a_j^n
    N = [[S.zero() for _ in range(d)] for _ in range(o)]
    for m in range(o):
        for n in range(o):
            c = T.data[m, n]
            if not c:
                continue
            cp = S._hopf_scalar(c)
            for j in range(d):
                N[m][j] = S.add(N[m][j], S.scale(cp, S.coaction[j][n]))
    out = [[None] * d for _ in range(d)]
    for i in range(d):
        for j in range(i, d):
            acc = S.zero()
            for m in range(o):
                a = S.coaction[i][m]
                if not S.is_zero(a) and not S.is_zero(N[m][j]):
                    acc = S.add(acc, S.mul(a, N[m][j]))
            out[i][j] = out[j][i] = acc
    return out


def trace_map(S: CoactedAlgebra, trace: GroupTrace | None = None) -> TraceReport:
    """Trace values, the trace form computed two ways, and its discriminant."""
    trace = trace or group_trace(S.hopf)
    T = trace_bilinear_matrix(S.hopf, trace)
    values = trace_values(S, trace)
    d = S.rank
    zero = S.base.zero
    direct = [[zero] * d for _ in range(d)]
    for i in range(d):
        for j in range(i, d):
            acc = zero
            for k, c in enumerate(S.mult[i][j]):
                if not c.is_zero() and not values[k].is_zero():
                    acc = acc + c * values[k]
            direct[i][j] = direct[j][i] = acc
    mtm = _bilinear_MTM(S, T)
    via = []
    for i in range(d):
        row = []
        for j in range(d):
            x = mtm[i][j]
            if any(not c.is_zero() for c in x[1:]):
                raise TraceCodomainError(f"(M^T T M)[{i},{j}] is not in R*1")
            row.append(x[0])
        via.append(row)
    if via != direct:
        bad = next((i, j) for i in range(d) for j in range(d) if via[i][j] != direct[i][j])
        raise TraceCodomainError(f"trace form disagrees with M^T T M at {bad}")
    disc = poly_matrix_det(direct, S.base)
    return TraceReport(values, direct, disc, trace, T, via)


def coaction_matrix_det(S: CoactedAlgebra) -> SElem:
    """det(a_i^m) computed in ``S`` by division-free expansion (S may have zero divisors)."""
    if S.rank != S.hopf.dim:
        raise ValueError("coaction matrix is square only when rank equals the Hopf dimension")
    rows = [[S.coaction[i][m] for i in range(S.rank)] for m in range(S.hopf.dim)]
    return expansion_determinant(
        rows, zero=S.zero(), one=S.one(), add=S.add, mul=S.mul, neg=S.neg, is_zero=S.is_zero
    )


@dataclass
class DiscriminantReport:
    disc: Poly
    det_T: object
    det_M: SElem | None
    identity_holds: bool | None

    def to_json_obj(self, field: FieldSpec) -> dict:
        return {
            "disc": str(self.disc),
            "disc_is_unit": self.disc.is_unit(),
            "det_T": field.fmt(self.det_T),
            "det_M": None if self.det_M is None else [str(c) for c in self.det_M],
            "factorization_checked": self.identity_holds,
        }


def discriminant_divisor(S: CoactedAlgebra, trace: GroupTrace | None = None,
                         report: TraceReport | None = None) -> DiscriminantReport:
    report = report or trace_map(S, trace)
    from .exact import determinant

    det_T = determinant(report.T).value
    if S.rank != S.hopf.dim:
        return DiscriminantReport(report.disc, det_T, None, None)
    dm = coaction_matrix_det(S)
    rhs = S.scale(S._hopf_scalar(det_T), S.mul(dm, dm))
    if S.from_base(report.disc) != rhs:
        raise DiscriminantIdentityError("disc != det T * (det M)^2")
    return DiscriminantReport(report.disc, det_T, dm, True)


def discriminant(S: CoactedAlgebra, trace: GroupTrace | None = None) -> Poly:
    return discriminant_divisor(S, trace).disc


TORSOR_VERDICTS = (
    "torsor_everywhere",
    "not_torsor_everywhere",
    "torsor_at_point",
    "not_torsor_at_point",
    "not_torsor_anywhere",
)


@dataclass
class TorsorVerdict:
    verdict: str
    rank: int
    order: int
    disc: Poly | None
    point: tuple | None = None
    disc_at_point: object = None

    def to_json_obj(self) -> dict:
        f = None if self.disc is None else self.disc.ring.field
        return {
            "verdict": self.verdict,
            "rank": self.rank,
            "order": self.order,
            "disc": None if self.disc is None else str(self.disc),
            "point": None if self.point is None else [f.fmt(x) for x in self.point],
            "disc_at_point": None if self.disc_at_point is None else f.fmt(self.disc_at_point),
        }


def torsor_test(S: CoactedAlgebra, point: Sequence | None = None, trace: GroupTrace | None = None) -> TorsorVerdict:
    d, o = S.rank, S.hopf.dim
    if point is not None and len(point) != S.base.nvars:
        raise ValueError(f"point has {len(point)} coordinates, base ring has {S.base.nvars}")
    if d != o:
        return TorsorVerdict("not_torsor_anywhere", d, o, None)
    disc = trace_map(S, trace).disc
    if point is None:
        v = "torsor_everywhere" if disc.is_unit() else "not_torsor_everywhere"
        return TorsorVerdict(v, d, o, disc)
    val = disc.eval(point).value
    pt = tuple(S.field(x) for x in point)
    return TorsorVerdict("torsor_at_point" if val != 0 else "not_torsor_at_point", d, o, disc, pt, val)


@dataclass
class TameVerdict:
    verdict: str
    witness: tuple | None = None

    def to_json_obj(self, field: FieldSpec) -> dict:
        return {
            "verdict": self.verdict,
            "witness": None if self.witness is None else [field.fmt(c) for c in self.witness],
        }


def is_tame(S: CoactedAlgebra, trace: GroupTrace | None = None) -> TameVerdict:
    """Constant-coefficient surjectivity test for the trace."""
    values = trace_values(S, trace)
    f = S.field
    monos, table = coefficient_table(values)
    const = (0,) * S.base.nvars
    if const not in monos:
        return TameVerdict("not_tame")
    rhs = [f.one if m == const else f.zero for m in monos]
    sol = solve(ExactMatrix.from_rows(table, field=f), rhs)
    if sol is not None:
        return TameVerdict("tame", sol)
    return TameVerdict("unknown")


def check_maximal_into_maximal(S: CoactedAlgebra, trace: GroupTrace | None = None) -> tuple[bool, list[int]]:
    """Whether every non-identity basis element traces into the irrelevant ideal."""
    values = trace_values(S, trace)
    bad = [i for i in range(1, S.rank) if not values[i].in_irrelevant_ideal()]
    return not bad, bad


def is_invariant(S: CoactedAlgebra, elem: Sequence) -> bool:
    x = S._elem(elem)
    image = S.coact(x)
    return all(image[m] == S.scale(S._hopf_scalar(S.hopf.unit[m]), x) for m in range(S.hopf.dim))


def dual_action_apply(S: CoactedAlgebra, eta: Sequence, elem: Sequence) -> SElem:
    """``(id (x) eta)`` applied to the coaction of ``elem``."""
    if len(eta) != S.hopf.dim:
        raise ValueError(f"functional of length {len(eta)}, Hopf dimension is {S.hopf.dim}")
    x = S._elem(elem)
    image = S.coact(x)
    acc = S.zero()
    for m, c in enumerate(eta):
        c = S.field(c)
        if c:
            acc = S.add(acc, S.scale(S._hopf_scalar(c), image[m]))
    return acc


def invariant_subspace(S: CoactedAlgebra) -> list[tuple]:
    """Field-coordinate basis of the coinvariants; only for a base with no variables."""
    if S.base.nvars:
        raise NotImplementedError("coinvariants over a polynomial base need syzygies")
    f = S.field
    d, o = S.rank, S.hopf.dim
    rows = []
    for m in range(o):
        for k in range(d):
            row = []
            for i in range(d):
                c = S.coaction[i][m][k].constant_term()
                if i == k:
                    c = f.sub(c, f(S.hopf.unit[m]))
                row.append(c)
            rows.append(row)
    return solve_kernel(ExactMatrix.from_rows(rows, field=f))


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------


def cyclic_presentation(ring: PolyRing, n: int, rhs, coaction: str = "kummer", scale=None) -> CoactedAlgebra:
    """``R[t]/(t^n - rhs)`` with the Kummer (mu_n) or additive (alpha_{p^e}) coaction.

    Additive: ``t -> t (x) 1 + scale (x) xi`` with ``n = p^e``; ``scale`` defaults to 1.
    """
    n = int(n)
    if n < 1:
        raise ValueError("modulus exponent must be positive")
    f = ring.field
    rhs = ring.coerce(rhs)
    z = ring.zero

    def tpow(k: int, coeff: Poly) -> SElem:
        v = [z] * n
        v[k] = coeff
        return tuple(v)

    mult = [[tpow(i + j, ring.one) if i + j < n else tpow(i + j - n, rhs) for j in range(n)] for i in range(n)]
    basis = ["1", "t"] + [f"t^{k}" for k in range(2, n)]
    basis = basis[:n]
    if coaction == "kummer":
        if scale is not None:
            raise ValueError("scale applies to the additive coaction only")
        hopf = mu_n(n, f)
        co = [[tpow(i, ring.one) if m == i else tuple([z] * n) for m in range(n)] for i in range(n)]
        name = f"kummer(n={n}, rhs={rhs})"
    elif coaction == "additive":
        if not f.is_prime_field:
            raise ValueError("the additive coaction needs a prime field")
        p = f.p
        e = round(math.log(n, p)) if n > 1 else 0
        if e < 1 or p**e != n:
            raise ValueError(f"additive coaction needs n = p^e, got n={n}, p={p}")
        hopf = alpha_pe(e, f)
        sc = ring.one if scale is None else ring.coerce(scale)
        co = []
        for i in range(n):
            row = []
            for m in range(n):
                if m <= i:
                    c = math.comb(i, m) % p
                    row.append(tpow(i - m, (sc**m).scale(c)) if c else tuple([z] * n))
                else:
                    row.append(tuple([z] * n))
            co.append(row)
        name = f"additive(n={n}, rhs={rhs}, scale={sc})"
    else:
        raise ValueError(f"unknown coaction kind {coaction!r}")
    return CoactedAlgebra(ring, tuple(basis), tuple(map(tuple, mult)), hopf, tuple(map(tuple, co)), name=name)


def trivial_torsor(ring: PolyRing, hopf: HopfAlgebra) -> CoactedAlgebra:
    """``R (x) O(G)`` with the coproduct as coaction, unit moved to the first basis slot."""
    f = hopf.field
    o = hopf.dim
    u = list(hopf.unit)
    if not (u[0] == f.one and all(x == 0 for x in u[1:])):
        pivot = next(i for i, x in enumerate(u) if x != 0)
        rows = [u] + [[f.one if j == i else f.zero for j in range(o)] for i in range(o) if i != pivot]
        labels = ["1"] + [hopf.basis[i] for i in range(o) if i != pivot]
        hopf = change_basis(hopf, rows, labels)
    P, C = hopf.product, hopf.coproduct

    def el(vec) -> SElem:
        return tuple(ring.const(f(c)) for c in vec)

    mult = [[el(P[i, j]) for j in range(o)] for i in range(o)]
    co = [[el(C[i, :, k]) for k in range(o)] for i in range(o)]
    return CoactedAlgebra(ring, tuple(hopf.basis), tuple(map(tuple, mult)), hopf, tuple(map(tuple, co)),
                          name=f"trivial torsor of {hopf.name}")


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def _ring_from_obj(obj: dict) -> PolyRing:
    if "base" in obj:
        return PolyRing.from_json(obj["base"])
    return PolyRing(FieldSpec.from_json(obj["field"]), obj.get("variables", []))


def coacted_from_json_obj(obj: dict, hopf_loader=None) -> CoactedAlgebra:
    ring = _ring_from_obj(obj)
    if obj.get("kind") == "cyclic_presentation":
        return cyclic_presentation(
            ring,
            int(obj["modulus_exponent"]),
            obj["modulus_rhs"],
            obj.get("coaction", "kummer"),
            obj.get("coaction_scale"),
        )
    if "hopf" in obj:
        hopf = HopfAlgebra.from_json_obj(obj["hopf"])
    elif "hopf_file" in obj and hopf_loader is not None:
        hopf = hopf_loader(obj["hopf_file"])
    elif "hopf_file" in obj:
        with open(obj["hopf_file"]) as fh:
            hopf = HopfAlgebra.from_json_obj(json.load(fh))
    else:
        raise CoactionStructureError("coacted algebra needs an inline 'hopf' or a 'hopf_file'")
    if obj.get("kind") == "trivial_torsor":
        return trivial_torsor(ring, hopf)

    def el(x):
        return tuple(ring.parse(str(c)) for c in x)

    try:
        mult = tuple(tuple(el(x) for x in row) for row in obj["mult"])
        co = tuple(tuple(el(x) for x in row) for row in obj["coaction"])
        return CoactedAlgebra(ring, tuple(obj["basis"]), mult, hopf, co, name=obj.get("name", ""))
    except KeyError as exc:
        raise CoactionStructureError(f"missing key {exc}") from None
