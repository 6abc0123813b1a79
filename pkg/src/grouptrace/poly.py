"""Multivariate polynomials over F_p or Q with dense exponent tuples.

A :class:`Poly` maps exponent tuples to nonzero canonical coefficients.
Polynomials are treated as immutable values; every operation returns a new one.
The ring carries a total-degree cap and exceeding it raises
:class:`DegreeCapError` instead of truncating.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .exact import FieldSpec, Scalar

DEFAULT_MAX_DEGREE = 256


class DegreeCapError(ArithmeticError):
    pass


class RingMismatchError(ValueError):
    pass


class PolyRing:
    """The ring ``field[variables]`` with a total-degree cap."""

    def __init__(self, field: FieldSpec, variables: Sequence[str], max_degree: int = DEFAULT_MAX_DEGREE):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise ValueError(f"repeated variable names in {variables}")
        for v in variables:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", v):
                raise ValueError(f"bad variable name {v!r}")
        self.field = field
        self.variables = variables
        self.max_degree = int(max_degree)

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def __eq__(self, other):
        return isinstance(other, PolyRing) and (self.field, self.variables) == (other.field, other.variables)

    def __hash__(self):
        return hash((self.field, self.variables))

    def __repr__(self):
        return f"PolyRing({self.field}, {list(self.variables)})"

    def poly(self, terms: Mapping[tuple, object]) -> "Poly":
        return Poly(self, terms)

    @property
    def zero(self) -> "Poly":
        return Poly(self, {})

    @property
    def one(self) -> "Poly":
        return self.const(1)

    def const(self, c) -> "Poly":
        return Poly(self, {(0,) * self.nvars: c})

    def var(self, name: str) -> "Poly":
        try:
            i = self.variables.index(name)
        except ValueError:
            raise ValueError(f"unknown variable {name!r}; ring has {list(self.variables)}") from None
        exp = [0] * self.nvars
        exp[i] = 1
        return Poly(self, {tuple(exp): 1})

    def gens(self) -> tuple["Poly", ...]:
        return tuple(self.var(v) for v in self.variables)

    def coerce(self, x) -> "Poly":
        if isinstance(x, Poly):
            if x.ring != self:
                raise RingMismatchError(f"{x.ring} element used in {self}")
            return x
        if isinstance(x, str):
            return self.parse(x)
        return self.const(x)

    def parse(self, text: str) -> "Poly":
        return _Parser(self, text).parse()

    def to_json(self) -> dict:
        return {"field": self.field.to_json(), "variables": list(self.variables)}

    @classmethod
    def from_json(cls, obj, max_degree: int = DEFAULT_MAX_DEGREE) -> "PolyRing":
        return cls(FieldSpec.from_json(obj["field"]), obj.get("variables", []), max_degree)


class Poly:
    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: PolyRing, terms: Mapping[tuple, object]):
        field = ring.field
        clean = {}
        for exp, c in terms.items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != ring.nvars:
                raise ValueError(f"exponent {exp} has wrong length for {ring}")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent {exp}")
            c = field(c)
            if c != 0:
                clean[exp] = c
        for exp in clean:
            if sum(exp) > ring.max_degree:
                raise DegreeCapError(f"degree {sum(exp)} exceeds cap {ring.max_degree}")
        self.ring = ring
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, ring: PolyRing, terms: dict) -> "Poly":
        # terms are already canonical and nonzero
        for exp in terms:
            if sum(exp) > ring.max_degree:
                raise DegreeCapError(f"degree {sum(exp)} exceeds cap {ring.max_degree}")
        p = cls.__new__(cls)
        p.ring = ring
        p.terms = terms
        p._hash = None
        return p

    def _check(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise RingMismatchError(f"{self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, Fraction, Scalar)):
            return self.ring.const(other)
        return NotImplemented

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        f = self.ring.field
        out = dict(self.terms)
        for exp, c in other.terms.items():
            s = f.add(out.get(exp, f.zero), c)
            if s:
                out[exp] = s
            else:
                out.pop(exp, None)
        return Poly._raw(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        f = self.ring.field
        return Poly._raw(self.ring, {e: f.neg(c) for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        f = self.ring.field
        out: dict = {}
        cap = self.ring.max_degree
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exp = tuple(a + b for a, b in zip(e1, e2))
                out[exp] = out.get(exp, 0) + c1 * c2
        if f.is_prime_field:
            out = {e: c % f.p for e, c in out.items() if c % f.p}
        else:
            out = {e: c for e, c in out.items() if c}
        if out and max(sum(e) for e in out) > cap:
            raise DegreeCapError(f"product degree exceeds cap {cap}")
        return Poly._raw(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        if self.terms and k * self.degree() > self.ring.max_degree:
            raise DegreeCapError(f"power degree {k * self.degree()} exceeds cap {self.ring.max_degree}")
        result = self.ring.one
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def scale(self, c) -> "Poly":
        f = self.ring.field
        c = f(c)
        if c == 0:
            return self.ring.zero
        return Poly._raw(self.ring, {e: f.mul(v, c) for e, v in self.terms.items()})

    def exact_div(self, other: "Poly") -> "Poly":
        """Quotient ``self / other``; raises ``ArithmeticError`` if not divisible."""
        other = self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        f = self.ring.field
        lead_e = max(other.terms)
        lead_inv = f.inv(other.terms[lead_e])
        rem = self
        quot: dict = {}
        while not rem.is_zero():
            e = max(rem.terms)
            shift = tuple(a - b for a, b in zip(e, lead_e))
            if any(s < 0 for s in shift):
                raise ArithmeticError("polynomial division is not exact")
            c = f.mul(rem.terms[e], lead_inv)
            quot[shift] = c
            rem = rem - Poly._raw(self.ring, {tuple(a + b for a, b in zip(s_e, shift)): f.mul(v, c)
                                              for s_e, v in other.terms.items()})
        return Poly(self.ring, quot)

    # -- predicates and evaluation ----------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def is_unit(self) -> bool:
        """True iff this is a nonzero constant (the units of a polynomial ring)."""
        return bool(self.terms) and self.is_constant()

    def constant_term(self):
        return self.terms.get((0,) * self.ring.nvars, self.ring.field.zero)

    def in_irrelevant_ideal(self) -> bool:
        return self.constant_term() == 0

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def eval(self, point: Sequence) -> Scalar:
        f = self.ring.field
        if len(point) != self.ring.nvars:
            raise ValueError(f"point has {len(point)} coordinates, ring has {self.ring.nvars} variables")
        vals = [f(x) for x in point]
        acc = f.zero
        for exp, c in self.terms.items():
            term = c
            for v, e in zip(vals, exp):
                if e:
                    term = f.mul(term, v ** e % f.p if f.is_prime_field else v ** e)
            acc = f.add(acc, term)
        return Scalar(f, acc)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction, Scalar)):
            try:
                return self.terms == self.ring.const(other).terms
            except (TypeError, ValueError, ZeroDivisionError):
                return False
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # -- rendering ---------------------------------------------------------
    def sorted_terms(self) -> list[tuple[tuple, object]]:
        return sorted(self.terms.items(), key=lambda kv: (-sum(kv[0]), tuple(-e for e in kv[0])))

    def __str__(self):
        if not self.terms:
            return "0"
        f = self.ring.field
        pieces = []
        for exp, c in self.sorted_terms():
            mono = "*".join(
                v if e == 1 else f"{v}^{e}" for v, e in zip(self.ring.variables, exp) if e
            )
            c = Fraction(c)
            neg = c < 0
            mag = -c if neg else c
            cstr = str(mag)
            if not mono:
                body = cstr
            elif mag == 1:
                body = mono
            else:
                body = f"{cstr}*{mono}"
            pieces.append((neg, body))
        out = ("-" if pieces[0][0] else "") + pieces[0][1]
        for neg, body in pieces[1:]:
            out += (" - " if neg else " + ") + body
        return out

    def __repr__(self):
        return f"Poly({self}, {self.ring})"


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


class _Parser:
    """Recursive-descent parser for ``3*x^2*y - (x + 1)^2`` style input."""

    def __init__(self, ring: PolyRing, text: str):
        self.ring = ring
        self.text = text
        self.tokens = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ValueError(f"cannot parse polynomial {self.text!r} at offset {pos}")
            num, ident, op = m.groups()
            if num is not None:
                self.tokens.append(("num", int(num)))
            elif ident is not None:
                self.tokens.append(("var", ident))
            else:
                self.tokens.append(("op", "^" if op == "**" else op))
            pos = m.end()
        self.i = 0

    def _peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def _take(self):
        tok = self._peek()
        self.i += 1
        return tok

    def _expect(self, op):
        kind, val = self._take()
        if kind != "op" or val != op:
            raise ValueError(f"expected {op!r} in {self.text!r}")

    def parse(self) -> Poly:
        if not self.tokens:
            raise ValueError("empty polynomial")
        p = self._expr()
        if self.i != len(self.tokens):
            raise ValueError(f"trailing input in {self.text!r}")
        return p

    def _expr(self) -> Poly:
        kind, val = self._peek()
        if kind == "op" and val in "+-":
            self._take()
            p = self._term()
            if val == "-":
                p = -p
        else:
            p = self._term()
        while True:
            kind, val = self._peek()
            if kind == "op" and val in "+-":
                self._take()
                q = self._term()
                p = p + q if val == "+" else p - q
            else:
                return p

    def _term(self) -> Poly:
        p = self._factor()
        while True:
            kind, val = self._peek()
            if kind == "op" and val == "*":
                self._take()
                p = p * self._factor()
            elif kind == "op" and val == "/":
                self._take()
                q = self._factor()
                if not q.is_unit():
                    raise ValueError("division only by nonzero constants")
                p = p.scale(self.ring.field.inv(q.constant_term()))
            else:
                return p

    def _factor(self) -> Poly:
        kind, val = self._peek()
        if kind == "op" and val == "-":
            self._take()
            return -self._factor()
        base = self._atom()
        kind, val = self._peek()
        if kind == "op" and val == "^":
            self._take()
            k, e = self._take()
            if k != "num":
                raise ValueError(f"exponent must be a literal integer in {self.text!r}")
            return base ** e
        return base

    def _atom(self) -> Poly:
        kind, val = self._take()
        if kind == "num":
            return self.ring.const(val)
        if kind == "var":
            return self.ring.var(val)
        if kind == "op" and val == "(":
            p = self._expr()
            self._expect(")")
            return p
        raise ValueError(f"unexpected token {val!r} in {self.text!r}")


def poly_matrix_det(rows: Sequence[Sequence[Poly]], ring: PolyRing) -> Poly:
    """Fraction-free determinant of a square matrix of polynomials."""
    from .exact import bareiss_determinant

    return bareiss_determinant(
        rows, zero=ring.zero, one=ring.one, exact_div=lambda a, b: a.exact_div(b), is_zero=lambda a: a.is_zero()
    )


def coefficient_table(polys: Iterable[Poly]) -> tuple[list[tuple], list[list]]:
    """Monomials appearing in ``polys`` and the coefficient matrix (rows = monomials)."""
    polys = list(polys)
    monos = sorted({e for p in polys for e in p.terms})
    table = [[p.terms.get(e, 0) for p in polys] for e in monos]
    return monos, table
