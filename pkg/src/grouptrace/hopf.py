"""Finite-dimensional Hopf algebras given by structure-constant tensors.

Index conventions (``o`` is the dimension, ``b_0..b_{o-1}`` the basis):

* ``product[i, j, k]``   coefficient of ``b_k`` in ``b_i * b_j``
* ``coproduct[i, j, k]`` coefficient of ``b_j (x) b_k`` in the coproduct of ``b_i``
* ``unit[i]``            coordinates of 1
* ``counit[i]``          value of the counit on ``b_i``
* ``antipode[i, j]``     coefficient of ``b_j`` in the antipode of ``b_i`` (row i is the image of b_i)

The Cartier dual uses the dual basis, so coordinate vectors of the dual are
functionals on the original algebra.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from .exact import ExactMatrix, FieldSpec, determinant, inverse, solve_kernel

# Above this dimension the checks quintic in ``o`` switch to randomized testing.
EXACT_DIM_LIMIT = 16
# Above this dimension the quartic antipode checks are randomized as well.
EXACT_ANTIPODE_LIMIT = 64
FALSE_PASS_BITS = 40


class HopfStructureError(ValueError):
    """Tensor shapes or scalars are inconsistent (raised before any axiom check)."""


class IntegralDimensionError(ValueError):
    pass


class SingularTraceError(ValueError):
    pass


class GroupTableError(ValueError):
    pass


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def contract(field: FieldSpec, a: np.ndarray, b: np.ndarray, axes) -> np.ndarray:
    """``np.tensordot`` followed by reduction into the field.

    Small prime fields go through float64 BLAS; the sum of ``k`` products of
    residues is below ``k (p-1)^2 < 2^53`` there, so the result is exact.
    Float64 inputs are taken to hold residues already (see ``_float_residues``).
    """
    small = (np.int64, np.float64)
    if a.dtype in small and b.dtype in small:
        ax = axes[0] if isinstance(axes[0], (list, tuple)) else [axes[0]]
        k = int(np.prod([a.shape[i] for i in ax])) if ax else 1
        if k * (field.p - 1) ** 2 < 2**53:
            out = np.tensordot(a.astype(np.float64, copy=False), b.astype(np.float64, copy=False), axes=axes)
            return np.rint(out).astype(np.int64) % field.p
        a, b = a.astype(np.int64, copy=False), b.astype(np.int64, copy=False)
    return field.reduce(np.tensordot(a, b, axes=axes))


def _float_residues(x: np.ndarray) -> np.ndarray:
    """One-off float64 copy of an int64 residue tensor, reused across many contractions."""
    return x.astype(np.float64) if x.dtype == np.int64 else x


@dataclass(frozen=True, eq=False)
class HopfAlgebra:
    field: FieldSpec
    basis: tuple[str, ...]
    unit: np.ndarray
    product: np.ndarray
    coproduct: np.ndarray
    counit: np.ndarray
    antipode: np.ndarray
    name: str = ""

    def __post_init__(self):
        f = self.field
        o = len(self.basis)
        if o < 1:
            raise HopfStructureError("a Hopf algebra needs dimension at least 1")
        if len(set(self.basis)) != o:
            raise HopfStructureError("basis labels must be distinct")
        expected = {
            "unit": (o,),
            "product": (o, o, o),
            "coproduct": (o, o, o),
            "counit": (o,),
            "antipode": (o, o),
        }
        for attr, shape in expected.items():
            raw = getattr(self, attr)
            try:
                arr = f.array(raw) if not (isinstance(raw, np.ndarray) and raw.dtype == f.dtype) else f.reduce(raw.copy())
            except (TypeError, ValueError) as exc:
                raise HopfStructureError(f"{attr}: {exc}") from None
            if arr.shape != shape:
                raise HopfStructureError(f"{attr} has shape {arr.shape}, expected {shape}")
            object.__setattr__(self, attr, _freeze(arr))
        object.__setattr__(self, "basis", tuple(self.basis))
        if not np.any(self.unit != 0):
            raise HopfStructureError("unit vector is zero")

    @property
    def dim(self) -> int:
        return len(self.basis)

    order = dim

    # -- elementwise operations on coordinate vectors ----------------------
    def vec(self, coords) -> np.ndarray:
        v = self.field.array(list(coords))
        if v.shape != (self.dim,):
            raise HopfStructureError(f"vector of length {v.shape}, expected {self.dim}")
        return v

    def basis_vector(self, i: int) -> np.ndarray:
        v = self.field.zeros(self.dim)
        v[i] = self.field.one
        return v

    def mul(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        f = self.field
        return contract(f, y, contract(f, x, self.product, ([0], [0])), ([0], [0]))

    def comul(self, x: np.ndarray) -> np.ndarray:
        """Coproduct of ``x`` as an o x o coefficient grid."""
        return contract(self.field, x, self.coproduct, ([0], [0]))

    def apply_antipode(self, x: np.ndarray) -> np.ndarray:
        return contract(self.field, x, self.antipode, ([0], [0]))

    def eps(self, x: np.ndarray):
        return self.field(self.field.reduce(np.dot(x, self.counit)))

    def left_mult_matrix(self, x: np.ndarray) -> np.ndarray:
        """Matrix ``L[j, k]`` of ``b_j -> x b_j``."""
        return contract(self.field, x, self.product, ([0], [0]))

    # -- serialization -----------------------------------------------------
    def to_json_obj(self) -> dict:
        fm = self.field.fmt

        def lst(a):
            if a.ndim == 1:
                return [fm(x) for x in a]
            return [lst(r) for r in a]

        return {
            "field": self.field.to_json(),
            "dim": self.dim,
            "basis": list(self.basis),
            "unit": lst(self.unit),
            "product": lst(self.product),
            "coproduct": lst(self.coproduct),
            "counit": lst(self.counit),
            "antipode": lst(self.antipode),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json_obj(), separators=(",", ":"))

    @classmethod
    def from_json_obj(cls, obj: dict) -> "HopfAlgebra":
        try:
            f = FieldSpec.from_json(obj["field"])
            basis = obj.get("basis") or [f"b{i}" for i in range(int(obj["dim"]))]
            if "dim" in obj and int(obj["dim"]) != len(basis):
                raise HopfStructureError(f"dim {obj['dim']} but {len(basis)} basis labels")
            return cls(
                f,
                tuple(basis),
                obj["unit"],
                obj["product"],
                obj["coproduct"],
                obj["counit"],
                obj["antipode"],
                name=obj.get("name", ""),
            )
        except KeyError as exc:
            raise HopfStructureError(f"missing key {exc}") from None

    @classmethod
    def loads(cls, text: str) -> "HopfAlgebra":
        return cls.from_json_obj(json.loads(text))

    def same_structure(self, other: "HopfAlgebra") -> bool:
        return (
            self.field == other.field
            and self.dim == other.dim
            and all(
                np.array_equal(getattr(self, a), getattr(other, a))
                for a in ("unit", "product", "coproduct", "counit", "antipode")
            )
        )

    def __repr__(self):
        label = self.name or "HopfAlgebra"
        return f"<{label} dim={self.dim} over {self.field}>"


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass
class ValidationReport:
    checks: dict[str, bool] = dc_field(default_factory=dict)
    methods: dict[str, str] = dc_field(default_factory=dict)

    def record(self, name: str, ok: bool, method: str = "exact"):
        self.checks[name] = bool(ok)
        self.methods[name] = method

    @property
    def all_pass(self) -> bool:
        return all(self.checks.values())

    def failed(self) -> list[str]:
        return [k for k, v in self.checks.items() if not v]

    def to_json_obj(self) -> dict:
        return {
            "all_pass": self.all_pass,
            "checks": [{"name": k, "pass": v, "method": self.methods.get(k, "exact")} for k, v in self.checks.items()],
        }


def trials_needed(field: FieldSpec, degree: int, bits: int = FALSE_PASS_BITS) -> int:
    """Trials so that a nonzero multilinear defect of ``degree`` escapes with prob <= 2^-bits.

    A nonzero polynomial of degree <= 1 in each variable and total degree k is
    nonzero at a uniform point of F_q^n with probability >= (1 - 1/q)^k.
    """
    q = field.sample_size()
    if field.is_prime_field:
        detect = (1 - 1 / q) ** degree
    else:
        detect = max(1 - degree / q, 1e-9)
    if detect >= 1:
        return 1
    return max(1, math.ceil(bits * math.log(2) / -math.log1p(-detect)))


def _randomized(H: HopfAlgebra, rng, degree: int, trial) -> tuple[bool, str]:
    n = trials_needed(H.field, degree)
    for _ in range(n):
        if not trial():
            return False, f"randomized({n} trials)"
    return True, f"randomized({n} trials)"


def validate_hopf(H: HopfAlgebra, seed: int = 0, exact_limit: int = EXACT_DIM_LIMIT) -> ValidationReport:
    """Check every Hopf algebra axiom and return a named report.

    Checks whose exact cost grows faster than o^4 are replaced by seeded
    randomized identity testing above ``exact_limit``; the report records
    which method each check used.
    """
    f = H.field
    o = H.dim
    P, C, u, e, A = H.product, H.coproduct, H.unit, H.counit, H.antipode
    I = f.identity(o)
    rng = np.random.default_rng(seed)
    rand = lambda *shape: f.random_array(rng, shape)  # noqa: E731
    rep = ValidationReport()
    exact = o <= exact_limit
    if not exact:
        P, C = _float_residues(P), _float_residues(C)

    def mul(x, y):
        return contract(f, y, contract(f, x, P, ([0], [0])), ([0], [0]))

    def comul(x):
        return contract(f, x, C, ([0], [0]))

    # associativity: (b_i b_j) b_l == b_i (b_j b_l)
    if exact:
        left = contract(f, P, P, ([2], [0]))  # [i, j, l, m]
        right = contract(f, P, P, ([2], [1]))  # [j, l, i, m]
        rep.record("associativity", np.array_equal(left, right.transpose(2, 0, 1, 3)))
    else:
        def trial():
            x, y, z = rand(o), rand(o), rand(o)
            return np.array_equal(mul(mul(x, y), z), mul(x, mul(y, z)))

        rep.record("associativity", *_randomized(H, rng, 3, trial))

    uP = contract(f, u, P, ([0], [0]))  # [j, k]: 1 * b_j
    Pu = contract(f, P, u, ([1], [0]))  # [i, k]: b_i * 1
    rep.record("unit", np.array_equal(uP, I) and np.array_equal(Pu, I))

    # coassociativity, checked as associativity of the convolution product
    if exact:
        left = contract(f, C, C, ([1], [0]))  # [i, k, a, b]: (D (x) id) D
        right = contract(f, C, C, ([2], [0]))  # [i, j, a, b]: (id (x) D) D
        rep.record("coassociativity", np.array_equal(left.transpose(0, 2, 3, 1), right))
    else:
        def conv(g, h):
            return contract(f, contract(f, C, h, ([2], [0])), g, ([1], [0]))

        def trial():
            g, h, k = rand(o), rand(o), rand(o)
            return np.array_equal(conv(conv(g, h), k), conv(g, conv(h, k)))

        rep.record("coassociativity", *_randomized(H, rng, 3, trial))

    eC = contract(f, e, C, ([0], [1]))  # [i, k]
    Ce = contract(f, C, e, ([2], [0]))  # [i, j]
    rep.record("counit", np.array_equal(eC, I) and np.array_equal(Ce, I))

    # coproduct is multiplicative
    if exact:
        lhs = contract(f, P, C, ([2], [0]))  # [i, j, a, b]
        ok = True
        for i in range(o):
            X = contract(f, C[i], P, ([0], [0]))  # [d, c', a]
            for j in range(o):
                Y = contract(f, X, C[j], ([1], [0]))  # [d, a, d']
                Z = contract(f, Y, P, ([0, 2], [0, 1]))  # [a, b]
                if not np.array_equal(Z, lhs[i, j]):
                    ok = False
                    break
            if not ok:
                break
        rep.record("bialgebra_product", ok)
    else:
        def trial():
            x, y, g, h = rand(o), rand(o), rand(o), rand(o)
            X, Y = comul(x), comul(y)
            F = contract(f, P, g, ([2], [0]))
            G = contract(f, P, h, ([2], [0]))
            M = contract(f, contract(f, X.T, F, ([1], [0])), Y, ([1], [0]))
            rhs = f.reduce(np.sum(f.reduce(M * G)))
            lhs_val = f.reduce(np.dot(contract(f, comul(mul(x, y)), h, ([1], [0])), g))
            return lhs_val == rhs

        rep.record("bialgebra_product", *_randomized(H, rng, 4, trial))

    rep.record("bialgebra_unit", np.array_equal(H.comul(u), f.reduce(np.outer(u, u))))
    eP = contract(f, P, e, ([2], [0]))
    rep.record("counit_multiplicative", np.array_equal(eP, f.reduce(np.outer(e, e))))
    rep.record("counit_unit", H.eps(u) == f.one)

    # antipode: m (S (x) id) D = u e = m (id (x) S) D
    target = f.reduce(np.outer(e, u))  # [i, m]
    if o <= max(exact_limit, EXACT_ANTIPODE_LIMIT):
        W = contract(f, C, A, ([1], [0]))  # [i, k, a]
        left = contract(f, W, P, ([2, 1], [0, 1]))
        W2 = contract(f, C, A, ([2], [0]))  # [i, j, a]
        right = contract(f, W2, P, ([1, 2], [0, 1]))
        rep.record("antipode_left", np.array_equal(left, target))
        rep.record("antipode_right", np.array_equal(right, target))
    else:
        def side(which):
            def trial():
                x = rand(o)
                X = comul(x)
                if which == "left":
                    Y = contract(f, A.T, X, ([1], [0]))  # [a, k]
                else:
                    Y = contract(f, X, A, ([1], [0]))  # [j, a]
                got = contract(f, Y, P, ([0, 1], [0, 1]))
                return np.array_equal(got, f.reduce(u * H.eps(x)))

            return trial

        rep.record("antipode_left", *_randomized(H, rng, 1, side("left")))
        rep.record("antipode_right", *_randomized(H, rng, 1, side("right")))
    return rep


def require_valid(H: HopfAlgebra) -> None:
    rep = validate_hopf(H)
    if not rep.all_pass:
        raise HopfStructureError(f"Hopf axioms fail: {rep.failed()}")


# ---------------------------------------------------------------------------
# Duality, integrals, traces
# ---------------------------------------------------------------------------


def _dual_label(s: str) -> str:
    return s[:-1] if s.endswith("*") else s + "*"


def cartier_dual(H: HopfAlgebra) -> HopfAlgebra:
    """Linear dual in the dual basis; algebra and coalgebra structures trade places."""
    name = H.name[:-1] if H.name.endswith("*") else (H.name + "*" if H.name else "")
    return HopfAlgebra(
        H.field,
        tuple(_dual_label(b) for b in H.basis),
        H.counit.copy(),
        np.ascontiguousarray(H.coproduct.transpose(1, 2, 0)),
        np.ascontiguousarray(H.product.transpose(2, 0, 1)),
        H.unit.copy(),
        np.ascontiguousarray(H.antipode.T),
        name=name,
    )


@dataclass(frozen=True)
class IntegralSpace:
    hopf: HopfAlgebra
    basis: tuple[tuple, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)


def integral_system(H: HopfAlgebra) -> ExactMatrix:
    """Matrix whose kernel is the space of left integrals.

    Row ``(i, k)`` encodes the ``b_k`` coordinate of ``b_i t - e(b_i) t``.
    """
    f = H.field
    o = H.dim
    M = H.product.transpose(0, 2, 1).copy()  # [i, k, j]
    M = f.reduce(M - f.reduce(H.counit[:, None, None] * f.identity(o)[None, :, :]))
    return ExactMatrix(f, M.reshape(o * o, o))


def left_integrals(H: HopfAlgebra) -> IntegralSpace:
    return IntegralSpace(H, tuple(solve_kernel(integral_system(H))))


def is_left_integral(H: HopfAlgebra, t) -> bool:
    t = H.vec(t)
    L = H.product.transpose(0, 2, 1)  # [i, k, j]
    got = H.field.reduce(np.tensordot(L, t, axes=([2], [0])))
    return np.array_equal(got, H.field.reduce(np.outer(H.counit, t)))


@dataclass(frozen=True)
class GroupTrace:
    hopf: HopfAlgebra
    functional: tuple
    normalized: bool

    def __call__(self, x) -> object:
        f = self.hopf.field
        v = self.hopf.vec(x)
        return f(f.reduce(np.dot(v, self.hopf.field.array(list(self.functional)))))

    def scaled(self, c) -> "GroupTrace":
        f = self.hopf.field
        c = f(c)
        if c == 0:
            raise ValueError("trace scale must be nonzero")
        new = tuple(f.mul(c, x) for x in self.functional)
        at_one = f(f.reduce(np.dot(self.hopf.unit, f.array(list(new)))))
        return GroupTrace(self.hopf, new, at_one == f.one)

    def to_json_obj(self) -> dict:
        fm = self.hopf.field.fmt
        return {
            "functional": [fm(x) for x in self.functional],
            "normalized": self.normalized,
            "value_at_1": fm(self(self.hopf.unit)),
            "basis": list(self.hopf.basis),
        }


def group_trace(H: HopfAlgebra) -> GroupTrace:
    """Generator of the left integrals of the dual, read as a functional on ``H``."""
    f = H.field
    space = left_integrals(cartier_dual(H))
    if space.dim != 1:
        raise IntegralDimensionError(f"integral space of the dual has dimension {space.dim}, expected 1")
    t = list(space.basis[0])
    at_one = f(f.reduce(np.dot(H.unit, f.array(t))))
    if at_one != 0:
        scale = f.inv(at_one)
        normalized = True
    else:
        first = next(x for x in t if x != 0)
        scale = f.inv(first)
        normalized = False
    return GroupTrace(H, tuple(f.mul(scale, x) for x in t), normalized)


def is_linearly_reductive(H: HopfAlgebra) -> bool:
    return group_trace(H).normalized


def trace_bilinear_matrix(H: HopfAlgebra, trace: GroupTrace | None = None) -> ExactMatrix:
    """``T[m, n] = Tr(b_m b_n)``; raises if singular."""
    trace = trace or group_trace(H)
    f = H.field
    T = contract(f, H.product, f.array(list(trace.functional)), ([2], [0]))
    mat = ExactMatrix(f, T)
    if determinant(mat).value == 0:
        raise SingularTraceError(f"trace form of {H!r} is singular")
    return mat


def trace_diagram_holds(H: HopfAlgebra, trace: GroupTrace | None = None) -> bool:
    """(id (x) Tr)(coproduct of b_i) == Tr(b_i) * 1 for every basis element."""
    trace = trace or group_trace(H)
    f = H.field
    t = f.array(list(trace.functional))
    lhs = contract(f, H.coproduct, t, ([2], [0]))  # [i, j]
    return np.array_equal(lhs, f.reduce(np.outer(t, H.unit)))


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------


def check_group_table(table: Sequence[Sequence[int]]) -> int:
    """Verify a multiplication table is a group; return the identity index."""
    n = len(table)
    if n == 0:
        raise GroupTableError("empty group table")
    for row in table:
        if len(row) != n or any(not isinstance(x, (int, np.integer)) or not 0 <= x < n for x in row):
            raise GroupTableError("table must be square with entries in range(n)")
    ident = [g for g in range(n) if all(table[g][h] == h and table[h][g] == h for h in range(n))]
    if not ident:
        raise GroupTableError("no identity element")
    one = ident[0]
    for a in range(n):
        for b in range(n):
            ab = table[a][b]
            for c in range(n):
                if table[ab][c] != table[a][table[b][c]]:
                    raise GroupTableError(f"not associative at ({a},{b},{c})")
    for a in range(n):
        if not any(table[a][b] == one for b in range(n)):
            raise GroupTableError(f"element {a} has no inverse")
    return one


def cyclic_table(n: int) -> list[list[int]]:
    return [[(a + b) % n for b in range(n)] for a in range(n)]


def product_table(t1, t2) -> list[list[int]]:
    n1, n2 = len(t1), len(t2)
    return [
        [t1[a // n2][b // n2] * n2 + t2[a % n2][b % n2] for b in range(n1 * n2)]
        for a in range(n1 * n2)
    ]


def symmetric_group_table(k: int) -> tuple[list[list[int]], list[str]]:
    """Table of S_k on permutations in lexicographic order; (p*q)(x) = p(q(x))."""
    from itertools import permutations

    perms = list(permutations(range(k)))
    index = {p: i for i, p in enumerate(perms)}
    table = [[index[tuple(p[q[x]] for x in range(k))] for q in perms] for p in perms]
    labels = ["".join(str(x + 1) for x in p) for p in perms]
    return table, labels


def constant_group(table: Sequence[Sequence[int]], field: FieldSpec, labels: Sequence[str] | None = None) -> HopfAlgebra:
    """Functions on a finite group, in the basis of point indicators."""
    one = check_group_table(table)
    n = len(table)
    labels = [f"d{g}" for g in range(n)] if labels is None else [f"d_{x}" for x in labels]
    inv = [next(b for b in range(n) if table[a][b] == one) for a in range(n)]
    k1 = field.one
    P = field.zeros((n, n, n))
    C = field.zeros((n, n, n))
    A = field.zeros((n, n))
    for g in range(n):
        P[g, g, g] = k1
        A[g, inv[g]] = k1
        for a in range(n):
            C[g, a, table[inv[a]][g]] = k1  # a * b = g
    unit = field.array([1] * n)
    counit = field.zeros(n)
    counit[one] = k1
    return HopfAlgebra(field, tuple(labels), unit, P, C, counit, A, name=f"O(constant group of order {n})")


def diagonalizable(orders: Sequence[int], field: FieldSpec, symbol: str = "zeta") -> HopfAlgebra:
    """Group algebra of Z/n_1 x ... x Z/n_r (functions on the diagonalizable group)."""
    orders = [int(n) for n in orders]
    if any(n < 1 for n in orders):
        raise ValueError(f"cyclic orders must be positive, got {orders}")
    from itertools import product as iproduct

    elems = list(iproduct(*[range(n) for n in orders])) if orders else [()]
    index = {g: i for i, g in enumerate(elems)}
    o = len(elems)

    def label(g):
        if not orders:
            return "1"
        parts = []
        for pos, a in enumerate(g):
            name = symbol if len(orders) == 1 else f"{symbol}{pos + 1}"
            if a == 1:
                parts.append(name)
            elif a > 1:
                parts.append(f"{name}^{a}")
        return "*".join(parts) or "1"

    P = field.zeros((o, o, o))
    C = field.zeros((o, o, o))
    A = field.zeros((o, o))
    k1 = field.one
    for g in elems:
        i = index[g]
        C[i, i, i] = k1
        A[i, index[tuple((-a) % n for a, n in zip(g, orders))]] = k1
        for h in elems:
            P[i, index[h], index[tuple((a + b) % n for a, b, n in zip(g, h, orders))]] = k1
    unit = field.zeros(o)
    unit[index[tuple(0 for _ in orders)]] = k1
    counit = field.array([1] * o)
    name = "O(mu_%s)" % "x".join(map(str, orders)) if orders else "O(trivial)"
    return HopfAlgebra(field, tuple(label(g) for g in elems), unit, P, C, counit, A, name=name)


def mu_n(n: int, field: FieldSpec) -> HopfAlgebra:
    if n < 1:
        raise ValueError("mu_n needs n >= 1")
    return diagonalizable([n], field)


def alpha_pe(e: int, field: FieldSpec) -> HopfAlgebra:
    """``k[xi]/(xi^(p^e))`` with xi primitive."""
    if not field.is_prime_field:
        raise ValueError("alpha_{p^e} needs a prime field")
    if e < 1:
        raise ValueError("alpha_{p^e} needs e >= 1")
    p = field.p
    q = p**e
    P = field.zeros((q, q, q))
    C = field.zeros((q, q, q))
    A = field.zeros((q, q))
    for i in range(q):
        A[i, i] = field(-1 if i % 2 else 1)
        for j in range(q - i):
            P[i, j, i + j] = 1
        for a in range(i + 1):
            C[i, a, i - a] = math.comb(i, a) % p
    unit = field.zeros(q)
    unit[0] = 1
    counit = field.zeros(q)
    counit[0] = 1
    labels = ["1", "xi"] + [f"xi^{k}" for k in range(2, q)]
    return HopfAlgebra(field, tuple(labels[:q]), unit, P, C, counit, A, name=f"O(alpha_{q})")


def _kron3(f: FieldSpec, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    a, b = X.shape[0], Y.shape[0]
    out = f.reduce(np.einsum("ijk,lmn->iljmkn", X, Y))
    return out.reshape(a * b, a * b, a * b)


def tensor_product(H1: HopfAlgebra, H2: HopfAlgebra) -> HopfAlgebra:
    if H1.field != H2.field:
        raise HopfStructureError("tensor product across fields")
    f = H1.field
    def join(a, b):
        if b == "1":
            return a
        return b if a == "1" else f"{a}*{b}"

    labels = tuple(join(a, b) for a in H1.basis for b in H2.basis)
    if len(set(labels)) != len(labels):
        labels = tuple(f"{a}(x){b}" for a in H1.basis for b in H2.basis)
    return HopfAlgebra(
        f,
        labels,
        f.reduce(np.kron(H1.unit, H2.unit)),
        _kron3(f, H1.product, H2.product),
        _kron3(f, H1.coproduct, H2.coproduct),
        f.reduce(np.kron(H1.counit, H2.counit)),
        f.reduce(np.kron(H1.antipode, H2.antipode)),
        name=f"{H1.name} (x) {H2.name}",
    )


def change_basis(H: HopfAlgebra, Q, labels: Sequence[str] | None = None) -> HopfAlgebra:
    """Re-express ``H`` in the basis ``b'_i = sum_j Q[i, j] b_j``."""
    f = H.field
    Qm = Q if isinstance(Q, ExactMatrix) else ExactMatrix(f, Q)
    Qa = Qm.data
    Qi = inverse(Qm).data
    P = _transform(f, H.product, Qa, Qa, Qi)
    C = _transform(f, H.coproduct, Qa, np.ascontiguousarray(Qi.T), Qi)
    unit = contract(f, H.unit, Qi, ([0], [0]))
    counit = contract(f, Qa, H.counit, ([1], [0]))
    A = contract(f, contract(f, Qa, H.antipode, ([1], [0])), Qi, ([1], [0]))
    labels = tuple(labels) if labels is not None else tuple(f"b'{i}" for i in range(H.dim))
    return HopfAlgebra(f, labels, unit, P, C, counit, A, name=H.name)


def _transform(f: FieldSpec, X: np.ndarray, Q0, Q1, Q2) -> np.ndarray:
    """``out[a, b, c] = sum Q0[a, i] Q1[b, j] X[i, j, k] Q2[k, c]``."""
    t = contract(f, Q0, X, ([1], [0]))  # [a, j, k]
    t = contract(f, t, Q1, ([1], [1]))  # [a, k, b]
    t = contract(f, t, Q2, ([1], [0]))  # [a, b, c]
    return t


def builtin(name: str, field: FieldSpec, *, n: int | None = None, e: int | None = None,
            orders: Sequence[int] | None = None) -> HopfAlgebra:
    """Named constructors used by the CLI and the tests."""
    if name in ("mu_n", "mu"):
        return mu_n(int(n), field)
    if name in ("alpha_pe", "alpha"):
        return alpha_pe(int(e or 1), field)
    if name in ("constant_cyclic", "constant"):
        return constant_group(cyclic_table(int(n)), field)
    if name == "constant_s3":
        table, labels = symmetric_group_table(3)
        return constant_group(table, field, labels)
    if name == "diagonalizable":
        return diagonalizable(list(orders or [n]), field)
    if name == "group_algebra_cyclic":
        return cartier_dual(constant_group(cyclic_table(int(n)), field))
    raise ValueError(f"unknown Hopf algebra builtin {name!r}")
