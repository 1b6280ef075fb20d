"""Measures, distribution functions, sets and open neighbourhoods.

Two kinds of ground space are supported: the real line (``LINE``) and a
:class:`FiniteMetricSpace` given by a distance matrix.  A measure is either a
:class:`DiscreteMeasure` (finitely many atoms, on either space) or a
:class:`PiecewiseCdf` (line only; jumps plus linear pieces).

Neighbourhoods are open: ``A^eps = {x : d(x, y) < eps for some y in A}``.
"""
from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .rational import INF, RationalLike, as_rational, fmt


class MeasureError(ValueError):
    """Invalid measure, set or space."""


class SpaceMismatchError(MeasureError):
    pass


# ---------------------------------------------------------------------------
# spaces


class RealLine:
    name = "line"

    def distance(self, x, y) -> Fraction:
        return abs(x - y)

    def __repr__(self) -> str:
        return "LINE"

    def __eq__(self, other) -> bool:
        return isinstance(other, RealLine)

    def __hash__(self) -> int:
        return hash("LINE")


LINE = RealLine()


@dataclass(frozen=True)
class FiniteMetricSpace:
    """``n`` points labelled ``0..n-1`` with an exact distance matrix."""

    dist: tuple

    name = "finite"

    def __post_init__(self):
        rows = tuple(tuple(as_rational(v, "dist") for v in row) for row in self.dist)
        object.__setattr__(self, "dist", rows)
        n = len(rows)
        if n == 0:
            raise MeasureError("finite metric space needs at least one point")
        for i, row in enumerate(rows):
            if len(row) != n:
                raise MeasureError(f"dist row {i} has length {len(row)}, expected {n}")
        for i in range(n):
            if rows[i][i] != 0:
                raise MeasureError(f"dist[{i}][{i}] must be 0")
            for j in range(n):
                if rows[i][j] != rows[j][i]:
                    raise MeasureError(f"dist not symmetric at ({i}, {j})")
                if i != j and rows[i][j] <= 0:
                    raise MeasureError(f"dist[{i}][{j}] must be positive")
        for i, j, k in itertools.product(range(n), repeat=3):
            if rows[i][k] > rows[i][j] + rows[j][k]:
                raise MeasureError(f"triangle inequality fails for ({i}, {j}, {k})")

    @property
    def n(self) -> int:
        return len(self.dist)

    def distance(self, x, y) -> Fraction:
        return self.dist[x][y]

    def __repr__(self) -> str:
        return f"FiniteMetricSpace(n={self.n})"


Space = Union[RealLine, FiniteMetricSpace]


# ---------------------------------------------------------------------------
# discrete measures


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finitely many atoms with positive rational weights summing to one.

    Prefer :func:`make_discrete_measure`, which sorts and converts inputs.
    """

    space: Space
    atoms: tuple
    weights: tuple

    def __post_init__(self):
        if not self.atoms:
            raise MeasureError("measure needs at least one atom")
        if len(self.atoms) != len(self.weights):
            raise MeasureError("atoms and weights differ in length")
        for k, w in enumerate(self.weights):
            if not isinstance(w, Fraction):
                raise MeasureError(f"weights[{k}] is not a Fraction")
            if w <= 0:
                raise MeasureError(f"weights[{k}] = {fmt(w)} is not positive")
        if sum(self.weights) != 1:
            raise MeasureError(f"weights sum to {fmt(sum(self.weights))}, not 1")
        if any(b <= a for a, b in zip(self.atoms, self.atoms[1:])):
            raise MeasureError("atoms must be strictly increasing (distinct)")
        if isinstance(self.space, FiniteMetricSpace):
            for a in self.atoms:
                if not isinstance(a, int) or not 0 <= a < self.space.n:
                    raise MeasureError(f"atom {a!r} out of range for {self.space!r}")

    def __len__(self) -> int:
        return len(self.atoms)

    def items(self):
        return zip(self.atoms, self.weights)

    def mass_at(self, point) -> Fraction:
        i = bisect.bisect_left(self.atoms, point)
        if i < len(self.atoms) and self.atoms[i] == point:
            return self.weights[i]
        return Fraction(0)

    def __repr__(self) -> str:
        body = ", ".join(f"{fmt(a) if self.space == LINE else a}: {fmt(w)}" for a, w in self.items())
        return f"DiscreteMeasure({self.space!r}, {{{body}}})"


def make_discrete_measure(space: Space, atoms: Sequence, weights: Sequence[RationalLike]) -> DiscreteMeasure:
    """Validate and sort a finitely supported measure.

    >>> make_discrete_measure(LINE, ["1/4", 0], ["1/3", "2/3"]).atoms
    (Fraction(0, 1), Fraction(1, 4))
    """
    if len(atoms) != len(weights):
        raise MeasureError(f"{len(atoms)} atoms but {len(weights)} weights")
    if len(atoms) == 0:
        raise MeasureError("atoms list is empty")
    if isinstance(space, FiniteMetricSpace):
        pts = []
        for k, a in enumerate(atoms):
            if isinstance(a, bool) or not isinstance(a, int):
                raise MeasureError(f"atoms[{k}] must be a point index, got {a!r}")
            if not 0 <= a < space.n:
                raise MeasureError(f"atoms[{k}] = {a} out of range for {space.n}-point space")
            pts.append(a)
    else:
        pts = [as_rational(a, f"atoms[{k}]") for k, a in enumerate(atoms)]
    ws = [as_rational(w, f"weights[{k}]") for k, w in enumerate(weights)]
    for k, w in enumerate(ws):
        if w <= 0:
            raise MeasureError(f"weights[{k}] = {fmt(w)} is not positive")
    if len(set(pts)) != len(pts):
        raise MeasureError("duplicate atom")
    if sum(ws) != 1:
        raise MeasureError(f"weights sum to {fmt(sum(ws))}, not 1")
    order = sorted(range(len(pts)), key=pts.__getitem__)
    return DiscreteMeasure(space, tuple(pts[i] for i in order), tuple(ws[i] for i in order))


def point_mass(x, space: Space = LINE) -> DiscreteMeasure:
    return make_discrete_measure(space, [x], [1])


# ---------------------------------------------------------------------------
# distribution functions


@dataclass(frozen=True)
class PiecewiseCdf:
    """Right-continuous distribution function with finitely many breakpoints.

    ``values[i]`` is ``F(breakpoints[i])``; on ``[b_i, b_{i+1})`` the function
    is ``values[i] + slopes[i] * (x - b_i)``.  ``F`` is 0 before the first
    breakpoint and ``values[-1]`` must be 1.
    """

    breakpoints: tuple
    values: tuple
    slopes: tuple
    lefts: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        bp = tuple(as_rational(b, f"breakpoints[{i}]") for i, b in enumerate(self.breakpoints))
        vals = tuple(as_rational(v, f"values[{i}]") for i, v in enumerate(self.values))
        slopes = tuple(as_rational(s, f"slopes[{i}]") for i, s in enumerate(self.slopes))
        if not bp:
            raise MeasureError("CDF needs at least one breakpoint")
        if len(vals) != len(bp):
            raise MeasureError("values and breakpoints differ in length")
        if len(slopes) == len(bp) and slopes and slopes[-1] == 0:
            slopes = slopes[:-1]
        if len(slopes) != len(bp) - 1:
            raise MeasureError(f"expected {len(bp) - 1} slopes, got {len(slopes)}")
        for i in range(len(bp) - 1):
            if bp[i + 1] <= bp[i]:
                raise MeasureError(f"breakpoints not increasing at index {i + 1} ({fmt(bp[i + 1])})")
        for i, s in enumerate(slopes):
            if s < 0:
                raise MeasureError(f"decreasing segment after breakpoint {fmt(bp[i])} (slope {fmt(s)})")
        lefts = [Fraction(0)]
        for i in range(1, len(bp)):
            lefts.append(vals[i - 1] + slopes[i - 1] * (bp[i] - bp[i - 1]))
        for i, (lo, v) in enumerate(zip(lefts, vals)):
            if not 0 <= v <= 1:
                raise MeasureError(f"value at breakpoint {fmt(bp[i])} = {fmt(v)} outside [0, 1]")
            if v < lo:
                raise MeasureError(
                    f"non-monotone at breakpoint {fmt(bp[i])}: left limit {fmt(lo)} > value {fmt(v)}"
                )
        if vals[-1] != 1:
            raise MeasureError(f"value at last breakpoint {fmt(bp[-1])} is {fmt(vals[-1])}, must be 1")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "slopes", slopes)
        object.__setattr__(self, "lefts", tuple(lefts))

    space = LINE

    def _segment(self, x) -> int:
        """Index ``i`` with ``b_i <= x < b_{i+1}``; -1 below the first breakpoint."""
        return bisect.bisect_right(self.breakpoints, x) - 1

    def __call__(self, x) -> Fraction:
        if x == INF:
            return Fraction(1)
        if x == -INF:
            return Fraction(0)
        i = self._segment(x)
        if i < 0:
            return Fraction(0)
        if i == len(self.breakpoints) - 1:
            return Fraction(1)
        return self.values[i] + self.slopes[i] * (x - self.breakpoints[i])

    def left(self, x) -> Fraction:
        """Left limit ``F(x-)``."""
        if x == INF:
            return Fraction(1)
        if x == -INF:
            return Fraction(0)
        i = bisect.bisect_left(self.breakpoints, x)
        if i < len(self.breakpoints) and self.breakpoints[i] == x:
            return self.lefts[i]
        return self(x)

    def jump(self, x) -> Fraction:
        return self(x) - self.left(x)

    def jumps(self) -> list:
        return [(b, v - lo) for b, v, lo in zip(self.breakpoints, self.values, self.lefts) if v > lo]

    @property
    def is_discrete(self) -> bool:
        return all(s == 0 for s in self.slopes)

    @property
    def support_bounds(self) -> tuple:
        """Smallest closed interval carrying all the mass."""
        n = len(self.breakpoints)
        lo = next(
            b for i, b in enumerate(self.breakpoints)
            if self.values[i] > 0 or (i < n - 1 and self.slopes[i] > 0)
        )
        hi = next(b for b, v in zip(self.breakpoints, self.values) if v == 1)
        return lo, hi

    def normalized(self) -> "PiecewiseCdf":
        """Drop breakpoints that carry neither a jump nor a change of slope."""
        n = len(self.breakpoints)
        zero = Fraction(0)
        keep = []
        for i in range(n):
            before = self.slopes[i - 1] if i > 0 else zero
            after = self.slopes[i] if i < n - 1 else zero
            if self.values[i] != self.lefts[i] or before != after:
                keep.append(i)
        bp = tuple(self.breakpoints[i] for i in keep)
        vals = tuple(self.values[i] for i in keep)
        slopes = tuple(self.slopes[i] for i in keep[:-1])
        return PiecewiseCdf(bp, vals, slopes)

    def shifted(self, c) -> "PiecewiseCdf":
        c = as_rational(c)
        return PiecewiseCdf(tuple(b + c for b in self.breakpoints), self.values, self.slopes)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PiecewiseCdf):
            return NotImplemented
        a, b = self.normalized(), other.normalized()
        return (a.breakpoints, a.values, a.slopes) == (b.breakpoints, b.values, b.slopes)

    def __hash__(self) -> int:
        a = self.normalized()
        return hash((a.breakpoints, a.values, a.slopes))

    def __repr__(self) -> str:
        bp = ", ".join(fmt(b) for b in self.breakpoints)
        vals = ", ".join(fmt(v) for v in self.values)
        sl = ", ".join(fmt(s) for s in self.slopes)
        return f"PiecewiseCdf(breakpoints=[{bp}], values=[{vals}], slopes=[{sl}])"


def uniform_cdf(a: RationalLike = 0, b: RationalLike = 1) -> PiecewiseCdf:
    a, b = as_rational(a), as_rational(b)
    if b <= a:
        raise MeasureError("uniform needs a < b")
    return PiecewiseCdf((a, b), (Fraction(0), Fraction(1)), (1 / (b - a),))


def cdf_of(measure: DiscreteMeasure) -> PiecewiseCdf:
    """Step distribution function of a measure on the line."""
    if measure.space != LINE:
        raise SpaceMismatchError("distribution functions exist only for measures on the line")
    cum = list(itertools.accumulate(measure.weights))
    return PiecewiseCdf(measure.atoms, tuple(cum), tuple(Fraction(0) for _ in cum[:-1]))


def atoms_of(F: PiecewiseCdf) -> DiscreteMeasure:
    """Inverse of :func:`cdf_of`: read atoms off the jumps of a step CDF."""
    if not F.is_discrete:
        raise MeasureError("CDF has linear pieces; it is not finitely supported")
    jumps = F.jumps()
    return DiscreteMeasure(LINE, tuple(b for b, _ in jumps), tuple(j for _, j in jumps))


def eval_cdf(F: PiecewiseCdf, x) -> Fraction:
    return F(as_rational(x) if not isinstance(x, (Fraction, float)) else x)


def eval_cdf_left(F: PiecewiseCdf, x) -> Fraction:
    return F.left(as_rational(x) if not isinstance(x, (Fraction, float)) else x)


Measure = Union[DiscreteMeasure, PiecewiseCdf]


def space_of(m: Measure) -> Space:
    return m.space


# ---------------------------------------------------------------------------
# sets


@dataclass(frozen=True, order=True)
class Interval:
    """Interval with finite or infinite endpoints and open/closed tags."""

    lo: object
    hi: object
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        if self.lo == -INF:
            object.__setattr__(self, "lo_closed", False)
        if self.hi == INF:
            object.__setattr__(self, "hi_closed", False)

    @property
    def empty(self) -> bool:
        if self.lo > self.hi:
            return True
        return self.lo == self.hi and not (self.lo_closed and self.hi_closed)

    def __contains__(self, x) -> bool:
        if x < self.lo or (x == self.lo and not self.lo_closed):
            return False
        if x > self.hi or (x == self.hi and not self.hi_closed):
            return False
        return True

    def __str__(self) -> str:
        if self.lo == self.hi and self.lo_closed and self.hi_closed:
            return "{" + fmt(self.lo) + "}"
        return f"{'[' if self.lo_closed else '('}{fmt(self.lo)}, {fmt(self.hi)}{']' if self.hi_closed else ')'}"


def closed(a, b) -> Interval:
    return Interval(a, b, True, True)


def open_interval(a, b) -> Interval:
    return Interval(a, b, False, False)


@dataclass(frozen=True)
class IntervalUnion:
    """Sorted, pairwise disjoint, non-adjacent intervals on the line.

    Two open intervals that only share an endpoint stay separate, since the
    shared point is not covered.
    """

    intervals: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "intervals", _normalize(self.intervals))

    space = LINE

    @classmethod
    def of(cls, *intervals: Interval) -> "IntervalUnion":
        return cls(tuple(intervals))

    @classmethod
    def full(cls) -> "IntervalUnion":
        return cls((Interval(-INF, INF, False, False),))

    def __contains__(self, x) -> bool:
        return any(x in iv for iv in self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def closure(self) -> "IntervalUnion":
        return IntervalUnion(tuple(Interval(iv.lo, iv.hi, True, True) for iv in self.intervals))

    def interior(self) -> "IntervalUnion":
        return IntervalUnion(tuple(Interval(iv.lo, iv.hi, False, False) for iv in self.intervals))

    def complement(self) -> "IntervalUnion":
        out = []
        cur, cur_closed = -INF, False
        for iv in self.intervals:
            out.append(Interval(cur, iv.lo, cur_closed, not iv.lo_closed))
            cur, cur_closed = iv.hi, not iv.hi_closed
        out.append(Interval(cur, INF, cur_closed, False))
        return IntervalUnion(tuple(out))

    def boundary(self) -> tuple:
        pts = []
        for iv in self.intervals:
            for p in (iv.lo, iv.hi):
                if p not in (INF, -INF) and (not pts or pts[-1] != p):
                    pts.append(p)
        return tuple(pts)

    def __str__(self) -> str:
        if not self.intervals:
            return "{}"
        return " U ".join(str(iv) for iv in self.intervals)


def _normalize(intervals: Iterable[Interval]) -> tuple:
    ivs = sorted(
        (iv for iv in intervals if not iv.empty),
        key=lambda iv: (iv.lo, not iv.lo_closed),
    )
    out: list = []
    for iv in ivs:
        if out:
            last = out[-1]
            touches = iv.lo < last.hi or (iv.lo == last.hi and (iv.lo_closed or last.hi_closed))
            if touches:
                if iv.hi > last.hi:
                    out[-1] = Interval(last.lo, iv.hi, last.lo_closed, iv.hi_closed)
                elif iv.hi == last.hi and iv.hi_closed and not last.hi_closed:
                    out[-1] = Interval(last.lo, last.hi, last.lo_closed, True)
                continue
        out.append(iv)
    return tuple(out)


@dataclass(frozen=True)
class PointSet:
    """A finite set of points: real coordinates on the line, indices on a finite space."""

    space: Space
    points: tuple

    def __post_init__(self):
        pts = sorted(set(self.points))
        if isinstance(self.space, FiniteMetricSpace):
            for p in pts:
                if not isinstance(p, int) or not 0 <= p < self.space.n:
                    raise MeasureError(f"point {p!r} out of range for {self.space!r}")
        else:
            pts = [as_rational(p) if not isinstance(p, Fraction) else p for p in pts]
        object.__setattr__(self, "points", tuple(pts))

    def __contains__(self, x) -> bool:
        return x in self.points

    def __iter__(self):
        return iter(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def as_intervals(self) -> IntervalUnion:
        if self.space != LINE:
            raise SpaceMismatchError("only line point sets convert to intervals")
        return IntervalUnion(tuple(closed(p, p) for p in self.points))

    def __str__(self) -> str:
        if self.space == LINE:
            return "{" + ", ".join(fmt(p) for p in self.points) + "}"
        return "{" + ", ".join(str(p) for p in self.points) + "}"


SetLike = Union[PointSet, IntervalUnion]


def eps_neighborhood(A: SetLike, eps: RationalLike):
    """Open ``eps``-neighbourhood of ``A``.

    On the line the result is an :class:`IntervalUnion`; on a finite space it
    is the :class:`PointSet` of points at distance strictly below ``eps``.
    """
    eps = as_rational(eps, "eps")
    if eps <= 0:
        raise MeasureError("eps must be positive")
    if isinstance(A, PointSet) and isinstance(A.space, FiniteMetricSpace):
        sp = A.space
        return PointSet(sp, tuple(x for x in range(sp.n) if any(sp.dist[x][y] < eps for y in A.points)))
    if isinstance(A, PointSet):
        A = A.as_intervals()
    return IntervalUnion(tuple(Interval(iv.lo - eps, iv.hi + eps, False, False) for iv in A.intervals))


def _interval_mass_cdf(F: PiecewiseCdf, iv: Interval) -> Fraction:
    upper = F(iv.hi) if iv.hi_closed else F.left(iv.hi)
    lower = F.left(iv.lo) if iv.lo_closed else F(iv.lo)
    return upper - lower


def measure_of(mu: Measure, S: SetLike) -> Fraction:
    """Exact mass of ``S`` under ``mu``, honouring open/closed endpoints."""
    if isinstance(S, PointSet):
        if S.space != mu.space:
            raise SpaceMismatchError(f"set lives on {S.space!r}, measure on {mu.space!r}")
        if isinstance(mu, PiecewiseCdf):
            return sum((mu.jump(p) for p in S.points), Fraction(0))
        return sum((mu.mass_at(p) for p in S.points), Fraction(0))
    if isinstance(S, IntervalUnion):
        if mu.space != LINE:
            raise SpaceMismatchError("interval sets need a measure on the line")
        if isinstance(mu, PiecewiseCdf):
            return sum((_interval_mass_cdf(mu, iv) for iv in S.intervals), Fraction(0))
        return sum((w for a, w in mu.items() if a in S), Fraction(0))
    raise TypeError(f"unsupported set type {type(S).__name__}")


def support_points(mu: Measure) -> tuple:
    """Atoms of a discrete measure, breakpoints of a CDF."""
    if isinstance(mu, PiecewiseCdf):
        return mu.breakpoints
    return mu.atoms
