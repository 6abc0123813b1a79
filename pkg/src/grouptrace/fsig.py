"""Splitting numbers ``a_e`` and F-signature estimates for normal affine semigroup rings.

``F^e_* R`` splits as a direct sum over residue classes ``u`` of ``Z^d / q Z^d``
(``q = p^e``) of the modules ``M_u = {m in cone : m = u mod q}`` over the
scaled semigroup ``q S``.  ``a_e`` counts the classes with ``M_u`` free, that
is ``M_u = w + q S`` for a single ``w``.

A point ``m`` of ``M_u`` is a module generator iff ``m - q g`` leaves the cone
for every Hilbert generator ``g``; every generator obeys ``|m_i| < q reach_i``,
which fixes the smallest sound enumeration box.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exact import is_prime
from .toric import AffineSemigroup, ToricDivisor, class_group, cyclic_cover, divisor_index


class TruncationError(RuntimeError):
    pass


def required_box(R: AffineSemigroup, q: int) -> int:
    return q * max(R.reach()) - 1


def _grid(d: int, box: int) -> np.ndarray:
    axis = np.arange(-box, box + 1, dtype=np.int64)
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _default_threads() -> int:
    return os.cpu_count() or 1


@dataclass
class ClassDecomposition:
    """Cone points of the box split by residue class, with generator flags."""

    q: int
    box: int
    points: np.ndarray  # (N, d) cone points in the box
    classes: np.ndarray  # (N,) flattened residue index
    minimal: np.ndarray  # (N,) bool: module generator of its class
    counts: np.ndarray  # (q^d,) number of points per class
    min_counts: np.ndarray  # (q^d,) number of generators per class

    def class_index(self, u: Sequence[int]) -> int:
        idx = 0
        for x in u:
            idx = idx * self.q + (int(x) % self.q)
        return idx

    def class_points(self, u: Sequence[int]) -> list[tuple[int, ...]]:
        sel = self.classes == self.class_index(u)
        return [tuple(int(x) for x in m) for m in self.points[sel]]

    def class_generators(self, u: Sequence[int]) -> list[tuple[int, ...]]:
        sel = (self.classes == self.class_index(u)) & self.minimal
        return [tuple(int(x) for x in m) for m in self.points[sel]]


def frobenius_summands(R: AffineSemigroup, p: int, e: int, box: int | None = None,
                       threads: int | None = None) -> ClassDecomposition:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if e < 1:
        raise ValueError("e must be at least 1")
    q = p**e
    need = required_box(R, q)
    box = need if box is None else int(box)
    if box < need:
        raise TruncationError(
            f"box {box} is smaller than {need} = q * reach - 1 needed for q = {q}; results would be unsound"
        )
    d = R.rank
    rays = np.array(R.rays, dtype=np.int64).T  # (d, r)
    gens = np.array(R.generators, dtype=np.int64)
    gen_pair = gens.dot(rays) * q  # (h, r)
    grid = _grid(d, box)
    pair = grid.dot(rays)
    inside = np.all(pair >= 0, axis=1)
    pts = grid[inside]
    pair = pair[inside]
    weights = q ** np.arange(d - 1, -1, -1, dtype=np.int64)
    classes = (np.mod(pts, q) * weights).sum(axis=1)
    nclass = q**d

    def work(sl: slice):
        sub = pair[sl]
        # m - q g stays in the cone iff every pairing stays >= 0
        shifted = sub[:, None, :] - gen_pair[None, :, :]
        reducible = np.any(np.all(shifted >= 0, axis=2), axis=1)
        return sl, ~reducible

    nthreads = max(1, int(threads or _default_threads()))
    n = len(pts)
    chunk = max(1, -(-n // (nthreads * 4)))
    slices = [slice(i, min(n, i + chunk)) for i in range(0, n, chunk)]
    minimal = np.zeros(n, dtype=bool)
    if nthreads == 1 or len(slices) == 1:
        results = map(work, slices)
    else:
        with ThreadPoolExecutor(max_workers=nthreads) as ex:
            results = list(ex.map(work, slices))
    for sl, flags in results:
        minimal[sl] = flags
    counts = np.bincount(classes, minlength=nclass)
    min_counts = np.bincount(classes[minimal], minlength=nclass)
    if np.any(counts == 0):
        raise TruncationError("some residue class has no points in the box")
    return ClassDecomposition(q, box, pts, classes, minimal, counts, min_counts)


def _free_flags(dec: ClassDecomposition, R: AffineSemigroup) -> np.ndarray:
    """Unique generator plus the translate test ``m - w`` in the cone for every class point."""
    nclass = dec.counts.shape[0]
    free = dec.min_counts == 1
    rays = np.array(R.rays, dtype=np.int64).T
    w = np.zeros((nclass, R.rank), dtype=np.int64)
    sel = dec.minimal & free[dec.classes]
    w[dec.classes[sel]] = dec.points[sel]
    diff = (dec.points - w[dec.classes]).dot(rays)
    bad = free[dec.classes] & np.any(diff < 0, axis=1)
    if np.any(bad):
        free = free.copy()
        free[np.unique(dec.classes[bad])] = False
    return free


@dataclass
class FreeVerdict:
    free: bool
    witness: object  # the generator w, or the list of generators


def is_free_summand(dec: ClassDecomposition, R: AffineSemigroup, u: Sequence[int]) -> FreeVerdict:
    gens = dec.class_generators(u)
    if len(gens) != 1:
        return FreeVerdict(False, sorted(gens))
    w = gens[0]
    for m in dec.class_points(u):
        if not R.contains(tuple(a - b for a, b in zip(m, w))):
            return FreeVerdict(False, [w])
    return FreeVerdict(True, w)


@dataclass
class SplittingReport:
    p: int
    e: int
    d: int
    a_e: int
    total: int
    box: int
    per_class_witness: dict | None = None

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.a_e, self.total)

    def to_json_obj(self) -> dict:
        out = {
            "p": self.p,
            "e": self.e,
            "d": self.d,
            "a_e": self.a_e,
            "total": self.total,
            "ratio": _frac(self.ratio),
            "box": self.box,
        }
        if self.per_class_witness is not None:
            out["per_class_witness"] = self.per_class_witness
        return out


def _frac(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def splitting_number(R: AffineSemigroup, p: int, e: int, box: int | None = None,
                     threads: int | None = None, witnesses: bool = False) -> SplittingReport:
    dec = frobenius_summands(R, p, e, box, threads)
    free = _free_flags(dec, R)
    per = None
    if witnesses:
        per = {}
        q = dec.q
        for idx in range(dec.counts.shape[0]):
            u = []
            k = idx
            for _ in range(R.rank):
                u.append(k % q)
                k //= q
            u = tuple(reversed(u))
            v = is_free_summand(dec, R, u)
            key = ",".join(map(str, u))
            per[key] = {"free": v.free, "generators": [list(v.witness)] if v.free else [list(g) for g in v.witness]}
    q = p**e
    return SplittingReport(p, e, R.rank, int(np.count_nonzero(free)), q**R.rank, dec.box, per)


@dataclass
class FsigEstimate:
    reports: list[SplittingReport]
    estimate: Fraction
    uncertainty: Fraction
    monotone_decreasing: bool

    @property
    def interval(self) -> tuple[Fraction, Fraction]:
        return self.estimate - self.uncertainty, self.estimate + self.uncertainty

    def to_json_obj(self) -> dict:
        return {
            "reports": [r.to_json_obj() for r in self.reports],
            "estimate": _frac(self.estimate),
            "estimate_float": float(self.estimate),
            "uncertainty": _frac(self.uncertainty),
            "monotone_decreasing": self.monotone_decreasing,
        }


def fsig_estimate(R: AffineSemigroup, p: int, e_max: int, box: int | None = None,
                  threads: int | None = None, e_min: int = 1) -> FsigEstimate:
    """Ratios ``a_e / p^{ed}`` for ``e <= e_max``; the last one is the estimate.

    The uncertainty is the gap to the previous ratio (zero when only one ``e`` ran).
    """
    if e_max < e_min:
        raise ValueError("e_max must be at least e_min")
    if box is not None and box < required_box(R, p**e_max):
        raise TruncationError(f"box {box} is smaller than {required_box(R, p ** e_max)} needed at e = {e_max}")
    reports = [splitting_number(R, p, e, box, threads) for e in range(e_min, e_max + 1)]
    ratios = [r.ratio for r in reports]
    unc = abs(ratios[-1] - ratios[-2]) if len(ratios) > 1 else Fraction(0)
    mono = all(a >= b for a, b in zip(ratios, ratios[1:]))
    return FsigEstimate(reports, ratios[-1], unc, mono)


@dataclass
class RuleVerdict:
    lhs: Fraction
    rhs: Fraction
    n: int
    residue_degree: int
    tolerance: Fraction
    verdict: bool
    cover: FsigEstimate
    base: FsigEstimate

    def to_json_obj(self) -> dict:
        return {
            "lhs": _frac(self.lhs),
            "rhs": _frac(self.rhs),
            "lhs_float": float(self.lhs),
            "rhs_float": float(self.rhs),
            "n": self.n,
            "residue_degree": self.residue_degree,
            "tolerance": _frac(self.tolerance),
            "verdict": self.verdict,
            "cover_estimate": self.cover.to_json_obj(),
            "base_estimate": self.base.to_json_obj(),
        }


def verify_transformation_rule(R: AffineSemigroup, D: ToricDivisor, n: int | None, p: int, e_max: int,
                               tolerance=Fraction(3, 100), threads: int | None = None,
                               e_max_cover: int | None = None) -> RuleVerdict:
    """Compare ``s(C)`` with ``n s(R)`` for the cyclic cover along ``D``."""
    index, _ = divisor_index(R, D)
    if n is None:
        n = index
    if n != index:
        raise ValueError(f"n = {n} is not the divisor index {index}")
    C = cyclic_cover(R, D, n).cover_semigroup
    est_c = fsig_estimate(C, p, e_max_cover or e_max, threads=threads)
    est_r = fsig_estimate(R, p, e_max, threads=threads)
    lhs = est_c.estimate
    rhs = n * est_r.estimate
    tol = Fraction(tolerance).limit_denominator(10**9) if isinstance(tolerance, float) else Fraction(tolerance)
    return RuleVerdict(lhs, rhs, n, 1, tol, abs(lhs - rhs) <= tol, est_c, est_r)


@dataclass
class TorsionReport:
    torsion_orders: list[int]
    estimate: FsigEstimate
    upper_bound: Fraction | None  # 1 / (estimate - uncertainty); None means unbounded
    bound_holds: bool
    tight: bool

    def to_json_obj(self) -> dict:
        return {
            "torsion_orders": self.torsion_orders,
            "fsig_estimate": self.estimate.to_json_obj(),
            "inverse_estimate": float(1 / self.estimate.estimate) if self.estimate.estimate else None,
            "upper_bound": None if self.upper_bound is None else _frac(self.upper_bound),
            "bound_holds": self.bound_holds,
            "tight": self.tight,
        }


def torsion_bound_check(R: AffineSemigroup, p: int, e_max: int, threads: int | None = None) -> TorsionReport:
    """Each torsion order of the class group against ``1 / s(R)`` widened by the uncertainty."""
    torsion = class_group(R).torsion_orders
    est = fsig_estimate(R, p, e_max, threads=threads)
    low = est.estimate - est.uncertainty
    upper = None if low <= 0 else 1 / low
    holds = all(upper is None or t <= upper for t in torsion)
    if torsion and upper is not None and est.estimate > 0:
        centre = 1 / est.estimate
        tight = all(abs(t - centre) <= upper - centre for t in torsion)
    else:
        tight = bool(torsion) and upper is None
    return TorsionReport(torsion, est, upper, holds, tight)
