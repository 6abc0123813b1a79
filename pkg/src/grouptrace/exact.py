"""Exact scalars, dense matrices over F_p or Q, and integer Smith normal form.

Scalars are carried as raw canonical values (``int`` in ``[0, p)`` for a
prime field, ``fractions.Fraction`` for the rationals); the owning container
remembers the field.  :class:`Scalar` wraps a single value together with its
field for user-facing arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np


class FieldMismatchError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n % q == 0:
            return n == q
    # deterministic Miller-Rabin for n < 3.3e24
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Either the prime field F_p (``kind="prime"``) or Q (``kind="rationals"``)."""

    kind: str
    p: int | None = None

    def __post_init__(self):
        if self.kind == "prime":
            if self.p is None or not is_prime(int(self.p)):
                raise ValueError(f"prime field needs a prime p, got {self.p!r}")
            object.__setattr__(self, "p", int(self.p))
        elif self.kind == "rationals":
            if self.p is not None:
                raise ValueError("the rational field carries no p")
        else:
            raise ValueError(f"unknown field kind {self.kind!r}")

    @classmethod
    def prime(cls, p: int) -> "FieldSpec":
        return cls("prime", p)

    @classmethod
    def rationals(cls) -> "FieldSpec":
        return cls("rationals")

    @property
    def is_prime_field(self) -> bool:
        return self.kind == "prime"

    @property
    def characteristic(self) -> int:
        return self.p if self.kind == "prime" else 0

    def __str__(self):
        return f"F_{self.p}" if self.is_prime_field else "Q"

    # -- raw scalar arithmetic -------------------------------------------
    def __call__(self, x) -> int | Fraction:
        """Coerce ``x`` (int, Fraction, numeric string, Scalar) to canonical form."""
        if isinstance(x, Scalar):
            if x.field != self:
                raise FieldMismatchError(f"{x.field} scalar used in {self}")
            return x.value
        if isinstance(x, str):
            x = Fraction(x.strip())
        if isinstance(x, np.integer):
            x = int(x)
        if self.kind == "prime":
            if isinstance(x, Fraction):
                if x.denominator % self.p == 0:
                    raise ZeroDivisionError(f"{x} has no image in {self}")
                return x.numerator * pow(x.denominator, -1, self.p) % self.p
            if isinstance(x, (bool, float)) or not isinstance(x, int):
                raise TypeError(f"cannot coerce {x!r} into {self}")
            return x % self.p
        if isinstance(x, float):
            raise TypeError("floats are not exact scalars")
        return Fraction(x)

    @property
    def zero(self):
        return 0 if self.is_prime_field else Fraction(0)

    @property
    def one(self):
        return 1 if self.is_prime_field else Fraction(1)

    def add(self, a, b):
        return (a + b) % self.p if self.is_prime_field else a + b

    def sub(self, a, b):
        return (a - b) % self.p if self.is_prime_field else a - b

    def mul(self, a, b):
        return a * b % self.p if self.is_prime_field else a * b

    def neg(self, a):
        return -a % self.p if self.is_prime_field else -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError(f"inverse of 0 in {self}")
        return pow(int(a), -1, self.p) if self.is_prime_field else 1 / a

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def fmt(self, a) -> str | int:
        """JSON-friendly rendering: ints stay ints, fractions become 'num/den'."""
        if self.is_prime_field:
            return int(a)
        a = Fraction(a)
        return int(a) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"

    # -- numpy carriers ----------------------------------------------------
    @property
    def dtype(self):
        if self.is_prime_field and self.p < 2**24:
            return np.int64
        return object

    def array(self, values) -> np.ndarray:
        """Canonical numpy array of ``values`` (nested lists allowed)."""
        raw = np.asarray(values, dtype=object)
        flat = [self(v) for v in raw.ravel()]
        out = np.empty(raw.shape, dtype=self.dtype)
        if out.size:
            out.ravel()[:] = flat
        return out

    def reduce(self, arr: np.ndarray) -> np.ndarray:
        if self.is_prime_field:
            return arr % self.p
        return arr

    def zeros(self, shape) -> np.ndarray:
        if self.dtype is object:
            out = np.empty(shape, dtype=object)
            out.fill(self.zero)
            return out
        return np.zeros(shape, dtype=self.dtype)

    def identity(self, n: int) -> np.ndarray:
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = self.one
        return out

    def random_array(self, rng: np.random.Generator, shape) -> np.ndarray:
        if self.is_prime_field:
            vals = rng.integers(0, self.p, size=shape)
            return vals.astype(self.dtype) if self.dtype is not object else vals.astype(object)
        vals = rng.integers(-1000, 1001, size=shape)
        return np.vectorize(Fraction, otypes=[object])(vals) if vals.size else self.zeros(shape)

    def sample_size(self) -> int:
        """Size of the set random test vectors are drawn from."""
        return self.p if self.is_prime_field else 2001

    def to_json(self) -> dict:
        return {"kind": "prime", "p": self.p} if self.is_prime_field else {"kind": "rationals"}

    @classmethod
    def from_json(cls, obj) -> "FieldSpec":
        kind = obj.get("kind")
        if kind in ("prime", "prime-field"):
            return cls.prime(obj["p"])
        if kind in ("rationals", "Q"):
            return cls.rationals()
        raise ValueError(f"unknown field kind {kind!r}")


@dataclass(frozen=True)
class Scalar:
    field: FieldSpec
    value: int | Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", self.field(self.value))

    def _other(self, other):
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise FieldMismatchError(f"{self.field} vs {other.field}")
            return other.value
        return self.field(other)

    def __add__(self, other):
        return Scalar(self.field, self.field.add(self.value, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return Scalar(self.field, self.field.sub(self.value, self._other(other)))

    def __rsub__(self, other):
        return Scalar(self.field, self.field.sub(self._other(other), self.value))

    def __mul__(self, other):
        return Scalar(self.field, self.field.mul(self.value, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Scalar(self.field, self.field.div(self.value, self._other(other)))

    def __rtruediv__(self, other):
        return Scalar(self.field, self.field.div(self._other(other), self.value))

    def __neg__(self):
        return Scalar(self.field, self.field.neg(self.value))

    def inverse(self):
        return Scalar(self.field, self.field.inv(self.value))

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.field == other.field and self.value == other.value
        try:
            return self.value == self.field(other)
        except (TypeError, ValueError, ZeroDivisionError):
            return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"Scalar({self.value} in {self.field})"


# ---------------------------------------------------------------------------
# Matrices over a field
# ---------------------------------------------------------------------------


class ExactMatrix:
    """Dense matrix over a :class:`FieldSpec`, backed by a read-only numpy array."""

    __slots__ = ("field", "data")

    def __init__(self, field: FieldSpec, data):
        if isinstance(data, np.ndarray) and data.dtype == field.dtype and data.ndim == 2:
            arr = field.reduce(data.copy())
        else:
            arr = field.array(data)
            if arr.ndim == 1 and arr.size == 0:
                arr = arr.reshape(0, 0)
        if arr.ndim != 2:
            raise ValueError("matrix data must be two-dimensional")
        arr.setflags(write=False)
        self.field = field
        self.data = arr

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], field: FieldSpec | None = None) -> "ExactMatrix":
        """Build from nested rows; ``Scalar`` entries must all share one field."""
        fields = {x.field for row in rows for x in row if isinstance(x, Scalar)}
        if field is not None:
            fields.add(field)
        if len(fields) > 1:
            raise FieldMismatchError(f"entries from several fields: {sorted(map(str, fields))}")
        if not fields:
            raise ValueError("field unknown: pass field= or Scalar entries")
        (field,) = fields
        widths = {len(r) for r in rows}
        if len(widths) > 1:
            raise ValueError("ragged matrix rows")
        ncols = widths.pop() if widths else 0
        data = field.zeros((len(rows), ncols))
        for i, row in enumerate(rows):
            for j, x in enumerate(row):
                data[i, j] = field(x)
        return cls(field, data)

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "ExactMatrix":
        return cls(field, field.identity(n))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape

    def __getitem__(self, ij) -> Scalar:
        return Scalar(self.field, self.data[ij])

    def to_lists(self) -> list[list]:
        return [[self.field(x) for x in row] for row in self.data]

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (
            self.field == other.field
            and self.shape == other.shape
            and bool(np.all(self.data == other.data))
        )

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.field != other.field:
            raise FieldMismatchError("matrix product across fields")
        return ExactMatrix(self.field, self.field.reduce(self.data.dot(other.data)))

    @property
    def T(self) -> "ExactMatrix":
        return ExactMatrix(self.field, self.data.T.copy())

    def apply(self, vec) -> tuple:
        v = self.field.array(list(vec))
        return tuple(self.field(x) for x in self.field.reduce(self.data.dot(v)))

    def __repr__(self):
        return f"ExactMatrix({self.field}, {self.to_lists()})"


def _as_array(A) -> tuple[FieldSpec, np.ndarray]:
    if not isinstance(A, ExactMatrix):
        raise TypeError("expected an ExactMatrix")
    return A.field, A.data.copy()


def rref(A: ExactMatrix) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns (Gauss-Jordan over the field)."""
    field, M = _as_array(A)
    nrows, ncols = M.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(M[r:, c] != 0)[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            M[[r, k]] = M[[k, r]]
        inv = field.inv(M[r, c])
        M[r] = field.reduce(M[r] * inv)
        col = M[:, c].copy()
        col[r] = field.zero
        rows = np.nonzero(col != 0)[0]
        if rows.size:
            M[rows] = field.reduce(M[rows] - np.outer(col[rows], M[r]))
        pivots.append(c)
        r += 1
    return M, pivots


def rank(A: ExactMatrix) -> int:
    return len(rref(A)[1])


def solve_kernel(A: ExactMatrix) -> list[tuple]:
    """Basis of the null space ``{v : A v = 0}`` as tuples of canonical scalars.

    The basis is the standard one read off the reduced row echelon form: one
    vector per free column, with a 1 in that column.
    """
    field = A.field
    R, pivots = rref(A)
    ncols = A.cols
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [field.zero] * ncols
        v[f] = field.one
        for r, pc in enumerate(pivots):
            v[pc] = field.neg(field(R[r, f]))
        basis.append(tuple(v))
    return basis


def solve(A: ExactMatrix, b: Sequence) -> tuple | None:
    """One solution ``x`` of ``A x = b`` or ``None`` if the system is inconsistent."""
    field = A.field
    if len(b) != A.rows:
        raise ValueError("right-hand side length differs from row count")
    aug = field.zeros((A.rows, A.cols + 1))
    aug[:, : A.cols] = A.data
    for i, x in enumerate(b):
        aug[i, A.cols] = field(x)
    R, pivots = rref(ExactMatrix(field, aug))
    if A.cols in pivots:
        return None
    x = [field.zero] * A.cols
    for r, pc in enumerate(pivots):
        x[pc] = field(R[r, A.cols])
    return tuple(x)


def determinant(A: ExactMatrix) -> Scalar:
    """Determinant by Gaussian elimination over the field."""
    if A.rows != A.cols:
        raise ValueError(f"determinant of a non-square {A.rows}x{A.cols} matrix")
    field, M = _as_array(A)
    n = A.rows
    det = field.one
    for c in range(n):
        nz = np.nonzero(M[c:, c] != 0)[0]
        if nz.size == 0:
            return Scalar(field, field.zero)
        k = c + int(nz[0])
        if k != c:
            M[[c, k]] = M[[k, c]]
            det = field.neg(det)
        piv = field(M[c, c])
        det = field.mul(det, piv)
        inv = field.inv(piv)
        below = M[c + 1 :, c].copy()
        rows = np.nonzero(below != 0)[0] + c + 1
        if rows.size:
            factors = field.reduce(M[rows, c] * inv)
            M[rows] = field.reduce(M[rows] - np.outer(factors, M[c]))
    return Scalar(field, det)


def inverse(A: ExactMatrix) -> ExactMatrix:
    if A.rows != A.cols:
        raise ValueError("inverse of a non-square matrix")
    field = A.field
    n = A.rows
    aug = field.zeros((n, 2 * n))
    aug[:, :n] = A.data
    aug[:, n:] = field.identity(n)
    R, pivots = rref(ExactMatrix(field, aug))
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return ExactMatrix(field, R[:, n:].copy())


# ---------------------------------------------------------------------------
# Determinants over commutative rings
# ---------------------------------------------------------------------------


def bareiss_determinant(rows, *, zero, one, exact_div: Callable, is_zero: Callable = None):
    """Fraction-free (Bareiss) determinant over an integral domain.

    ``exact_div(a, b)`` must return ``a / b`` when ``b`` divides ``a``.
    Entries only need ``+``, ``-`` and ``*``.
    """
    is_zero = is_zero or (lambda x: x == zero)
    M = [list(r) for r in rows]
    n = len(M)
    if any(len(r) != n for r in M):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return one
    sign = 1
    prev = one
    for k in range(n - 1):
        if is_zero(M[k][k]):
            for i in range(k + 1, n):
                if not is_zero(M[i][k]):
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return zero
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = exact_div(M[i][j] * M[k][k] - M[i][k] * M[k][j], prev)
        prev = M[k][k]
    det = M[n - 1][n - 1]
    return det if sign > 0 else zero - det


def expansion_determinant(rows, *, zero, one, add: Callable, mul: Callable, neg: Callable, is_zero: Callable):
    """Division-free determinant by Laplace expansion memoized on column subsets.

    Cost is O(2^n n) ring multiplications, suitable for n up to about 12 and for
    rings with zero divisors where Bareiss does not apply.
    """
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("determinant of a non-square matrix")

    @lru_cache(maxsize=None)
    def minor(row: int, cols: frozenset):
        if row == n:
            return one
        acc = zero
        ordered = sorted(cols)
        for pos, c in enumerate(ordered):
            entry = rows[row][c]
            if is_zero(entry):
                continue
            term = mul(entry, minor(row + 1, cols - {c}))
            acc = add(acc, neg(term) if pos % 2 else term)
        return acc

    return minor(0, frozenset(range(n)))


# ---------------------------------------------------------------------------
# Integer matrices
# ---------------------------------------------------------------------------


def int_identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def int_matmul(A, B) -> list[list[int]]:
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    return [[sum(A[i][k] * B[k][j] for k in range(inner)) for j in range(cols)] for i in range(len(A))]


def int_det(A) -> int:
    return bareiss_determinant(A, zero=0, one=1, exact_div=lambda a, b: a // b)


def smith_normal_form(A: Sequence[Sequence[int]]):
    """Return ``(U, D, V)`` with ``U A V = D`` diagonal, ``d_1 | d_2 | ...``.

    ``U`` and ``V`` are unimodular; all arithmetic is in Python integers.
    """
    D = [[int(x) for x in row] for row in A]
    m = len(D)
    n = len(D[0]) if m else 0
    U = int_identity(m)
    V = int_identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):  # row_dst += k * row_src
        D[dst] = [a + k * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + k * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, k):
        for row in D:
            row[dst] += k * row[src]
        for row in V:
            row[dst] += k * row[src]

    for t in range(min(m, n)):
        while True:
            entries = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, n) if D[i][j]]
            if not entries:
                break
            _, i, j = min(entries)
            if i != t:
                swap_rows(t, i)
            if j != t:
                swap_cols(t, j)
            dirty = False
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // D[t][t]))
                    dirty |= D[i][t] != 0
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // D[t][t]))
                    dirty |= D[t][j] != 0
            if dirty:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % D[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if t < m and t < n and D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        if all(D[i][j] == 0 for i in range(t, m) for j in range(t, n)):
            break
    return U, D, V


def invariant_factors(A: Sequence[Sequence[int]]) -> list[int]:
    _, D, _ = smith_normal_form(A)
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]


def primitive(v: Iterable[int]) -> tuple[int, ...]:
    v = [int(x) for x in v]
    g = 0
    for x in v:
        g = math.gcd(g, x)
    return tuple(v) if g in (0, 1) else tuple(x // g for x in v)
