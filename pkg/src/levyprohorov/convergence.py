"""Finite-prefix diagnostics for weak convergence, quantization and tightness.

Nothing here proves convergence.  Every verdict is evidence gathered on the
first ``N`` terms of a sequence, and every report carries ``N``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .levy import levy_distance
from .measures import (
    INF,
    LINE,
    DiscreteMeasure,
    FiniteMetricSpace,
    Interval,
    IntervalUnion,
    Measure,
    MeasureError,
    PiecewiseCdf,
    PointSet,
    SpaceMismatchError,
    closed,
    measure_of,
    open_interval,
    support_points,
)
from .rational import RationalLike, as_rational, fmt

ZERO = Fraction(0)
ONE = Fraction(1)


def _check_sequence(seq: Sequence[Measure]) -> list:
    seq = list(seq)
    if not seq:
        raise MeasureError("sequence is empty")
    space = seq[0].space
    for k, m in enumerate(seq, start=1):
        if m.space != space:
            raise SpaceMismatchError(f"term {k} lives on {m.space!r}, term 1 on {space!r}")
    return seq


def tail_window(n: int) -> tuple:
    """1-based ``(first, last)`` indices of the last quarter of a prefix of length ``n``."""
    return n - max(1, n // 4) + 1, n


# ---------------------------------------------------------------------------
# test functions


@dataclass(frozen=True)
class PiecewiseLinearFunction:
    """Continuous function on the line through ``knots``, constant outside them."""

    knots: tuple
    values: tuple

    def __post_init__(self):
        if len(self.knots) != len(self.values) or not self.knots:
            raise MeasureError("knots and values must be nonempty and of equal length")
        if any(b <= a for a, b in zip(self.knots, self.knots[1:])):
            raise MeasureError("knots must be strictly increasing")
        if any(not 0 <= v <= 1 for v in self.values):
            raise MeasureError("test functions take values in [0, 1]")

    def __call__(self, x) -> Fraction:
        k, v = self.knots, self.values
        if x <= k[0]:
            return v[0]
        if x >= k[-1]:
            return v[-1]
        for i in range(len(k) - 1):
            if k[i] <= x <= k[i + 1]:
                return v[i] + (v[i + 1] - v[i]) * (x - k[i]) / (k[i + 1] - k[i])
        raise AssertionError("unreachable")

    def __str__(self) -> str:
        pts = ", ".join(f"({fmt(a)}, {fmt(b)})" for a, b in zip(self.knots, self.values))
        return f"pl[{pts}]"


@dataclass(frozen=True)
class PointFunction:
    """Function on a finite metric space, one value per point."""

    space: FiniteMetricSpace
    values: tuple
    label: str = ""

    def __call__(self, x) -> Fraction:
        return self.values[x]

    def __str__(self) -> str:
        return self.label or "f[" + ", ".join(fmt(v) for v in self.values) + "]"


def integrate(f, mu: Measure) -> Fraction:
    """Exact integral of a piecewise-linear (or finite-space) function."""
    if isinstance(mu, DiscreteMeasure):
        return sum((w * f(a) for a, w in mu.items()), ZERO)
    total = sum((j * f(b) for b, j in mu.jumps()), ZERO)
    bp = mu.breakpoints
    knots = getattr(f, "knots", ())
    for i, s in enumerate(mu.slopes):
        if s == 0:
            continue
        lo, hi = bp[i], bp[i + 1]
        cuts = [lo] + [k for k in knots if lo < k < hi] + [hi]
        for a, b in zip(cuts, cuts[1:]):
            total += s * (b - a) * (f(a) + f(b)) / 2
    return total


# ---------------------------------------------------------------------------
# default families


def _line_grid(limit: Measure) -> tuple:
    """Key points, knot points and the resolution used by the default line families."""
    K = sorted(set(support_points(limit)))
    gaps = [b - a for a, b in zip(K, K[1:])]
    r = min(gaps) / 4 if gaps else Fraction(1, 4)
    Q = {K[0] - 4 * r, K[-1] + 4 * r}
    for a in K:
        Q |= {a - r, a + r}
    for a, b in zip(K, K[1:]):
        Q.add((a + b) / 2)
    return K, sorted(Q), r


def default_families(limit: Measure, tail: Sequence[Measure] = ()) -> dict:
    """Closed sets, open sets, candidate continuity sets and test functions.

    On the line the sets have endpoints at the limit's support points, at a
    resolution ``r`` around them, at midpoints between them and at two outer
    pads.  Test functions are trapezoids with knots at those non-support
    points whose ramps avoid the limit's support, so they are constant near
    every point the limit charges.  On a finite space every subset of the
    relevant points is both open and closed.
    """
    if isinstance(limit.space, FiniteMetricSpace):
        return _finite_families(limit, tail)
    K, Q, _ = _line_grid(limit)
    G = sorted(set(K) | set(Q))
    closed_sets = [PointSet(LINE, (g,)) for g in G]
    closed_sets += [IntervalUnion.of(closed(a, b)) for a, b in itertools.combinations(G, 2)]
    closed_sets += [IntervalUnion.of(Interval(-INF, g, False, True)) for g in G]
    closed_sets += [IntervalUnion.of(Interval(g, INF, True, False)) for g in G]
    open_sets = [IntervalUnion.of(open_interval(a, b)) for a, b in itertools.combinations(G, 2)]
    open_sets += [IntervalUnion.of(Interval(-INF, g, False, False)) for g in G]
    open_sets += [IntervalUnion.of(Interval(g, INF, False, False)) for g in G]
    functions = []
    Kset = set(K)
    for i in range(1, len(Q) - 1):
        for j in range(i, len(Q) - 1):
            left, right = (Q[i - 1], Q[i]), (Q[j], Q[j + 1])
            if any(left[0] <= a <= left[1] or right[0] <= a <= right[1] for a in Kset):
                continue
            if i == j:
                f = PiecewiseLinearFunction((Q[i - 1], Q[i], Q[i + 1]), (ZERO, ONE, ZERO))
            else:
                f = PiecewiseLinearFunction((Q[i - 1], Q[i], Q[j], Q[j + 1]), (ZERO, ONE, ONE, ZERO))
            functions.append(f)
    return {
        "closed": closed_sets,
        "open": open_sets,
        "continuity": closed_sets + open_sets,
        "functions": functions,
    }


def _finite_families(limit: DiscreteMeasure, tail: Sequence[Measure]) -> dict:
    space = limit.space
    pts = sorted(set(limit.atoms).union(*(m.atoms for m in tail)))
    if len(pts) <= 12:
        sets = [
            PointSet(space, c)
            for k in range(1, len(pts) + 1)
            for c in itertools.combinations(pts, k)
        ]
    else:
        sets = [PointSet(space, (p,)) for p in pts]
        sets += [PointSet(space, tuple(q for q in pts if q != p)) for p in pts]
    radii = sorted({space.dist[a][b] for a in pts for b in pts if a != b})
    functions = []
    for c in pts:
        for w in radii:
            vals = tuple(max(ZERO, 1 - space.dist[x][c] / w) for x in range(space.n))
            functions.append(PointFunction(space, vals, f"tent(center={c}, width={fmt(w)})"))
    return {"closed": sets, "open": sets, "continuity": sets, "functions": functions}


def _boundary_mass(mu: Measure, A) -> Fraction:
    if isinstance(A, PointSet):
        if isinstance(A.space, FiniteMetricSpace):
            return ZERO
        return measure_of(mu, A)
    return measure_of(mu, PointSet(LINE, A.boundary()))


# ---------------------------------------------------------------------------
# Portmanteau


@dataclass
class ConditionReport:
    condition: str
    family_size: int
    margin: Optional[Fraction]
    worst: Optional[str]
    passed: bool
    window: tuple
    excluded: list = field(default_factory=list)
    oscillating: list = field(default_factory=list)


@dataclass
class PortmanteauReport:
    prefix_length: int
    window: tuple
    tol: Fraction
    conditions: dict
    traces: dict  # (condition, label) -> list of values for n = 1..N
    limit_values: dict  # (condition, label) -> value under the limit

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.conditions.values())


def _oscillates(values: list) -> bool:
    diffs = [b - a for a, b in zip(values, values[1:]) if b != a]
    return any((x > 0) != (y > 0) for x, y in zip(diffs, diffs[1:]))


def portmanteau_report(
    seq: Sequence[Measure],
    limit: Measure,
    families: Optional[dict] = None,
    tol: RationalLike = 0,
) -> PortmanteauReport:
    """Tail margins for the four equivalent weak-convergence conditions.

    ``margin`` is the worst value over the family and over the last quarter
    of the prefix of: ``mu_n(C) - mu_0(C)`` for closed ``C``;
    ``mu_0(D) - mu_n(D)`` for open ``D``; ``|mu_n(A) - mu_0(A)|`` for sets
    whose boundary the limit does not charge; ``|int f dmu_n - int f dmu_0|``
    for test functions.  A condition passes when its margin is ``<= tol``.
    """
    seq = _check_sequence(seq)
    if limit.space != seq[0].space:
        raise SpaceMismatchError("limit and sequence live on different spaces")
    tol = as_rational(tol, "tol")
    N = len(seq)
    first, last = tail_window(N)
    tail = seq[first - 1:]
    if families is None:
        families = default_families(limit, tail)
    else:
        for key, fam in families.items():
            if not fam:
                raise MeasureError(f"test family {key!r} is empty")
        for fam in families.values():
            for A in fam:
                sp = getattr(A, "space", LINE)
                if sp != limit.space:
                    raise SpaceMismatchError(f"family member {A} lives on {sp!r}")

    traces: dict = {}
    limit_values: dict = {}
    conditions = {}
    specs = [
        ("closed", "closed", lambda n, z: n - z),
        ("open", "open", lambda n, z: z - n),
        ("continuity", "continuity", lambda n, z: abs(n - z)),
        ("functions", "functions", lambda n, z: abs(n - z)),
    ]
    for cond, key, gap in specs:
        fam = families.get(key, [])
        excluded = []
        margin, worst = None, None
        oscill = []
        used = 0
        for member in fam:
            label = str(member)
            if cond == "continuity" and _boundary_mass(limit, member) != 0:
                excluded.append(label)
                continue
            used += 1
            if cond == "functions":
                z = integrate(member, limit)
                vals = [integrate(member, m) for m in seq]
            else:
                z = measure_of(limit, member)
                vals = [measure_of(m, member) for m in seq]
            traces[cond, label] = vals
            limit_values[cond, label] = z
            m = max(gap(v, z) for v in vals[first - 1:])
            if margin is None or m > margin:
                margin, worst = m, label
            if _oscillates(vals[first - 1:]):
                oscill.append(label)
        passed = margin is None or margin <= tol
        conditions[cond] = ConditionReport(cond, used, margin, worst, passed, (first, last), excluded, oscill)
    return PortmanteauReport(N, (first, last), tol, conditions, traces, limit_values)


# ---------------------------------------------------------------------------
# Lévy profile


@dataclass
class LevyProfile:
    levy: list
    grid: list
    differences: list  # differences[n-1][k] = F_n(grid[k]) - F(grid[k])


def levy_convergence_profile(
    seq: Sequence[PiecewiseCdf], F: PiecewiseCdf, grid: Sequence[RationalLike] = ()
) -> LevyProfile:
    """Exact ``l(F_n, F)`` per index, plus ``F_n - F`` at continuity points of ``F``."""
    seq = _check_sequence(seq)
    pts = [as_rational(x, "grid") for x in grid]
    for x in pts:
        if F.jump(x) != 0:
            raise MeasureError(f"grid point {fmt(x)} is a jump of the limit, not a continuity point")
    levy = [levy_distance(Fn, F).value for Fn in seq]
    diffs = [[Fn(x) - F(x) for x in pts] for Fn in seq]
    return LevyProfile(levy, pts, diffs)


# ---------------------------------------------------------------------------
# quantization


def quantize(mu: Measure, delta: RationalLike) -> DiscreteMeasure:
    """Finitely supported approximation with every atom moved less than ``delta``.

    Cells are ``[a + k delta, a + (k + 1) delta)`` anchored at the support
    minimum ``a``.  Each cell's mass goes to the midpoint of the part of the
    support it covers (the atoms inside it, or the cell clipped to the
    support), so an atom alone in its cell stays where it is.
    """
    delta = as_rational(delta, "delta")
    if delta <= 0:
        raise MeasureError("delta must be positive")
    if mu.space != LINE:
        raise SpaceMismatchError("quantization is implemented on the line")
    if isinstance(mu, DiscreteMeasure):
        lo, hi = mu.atoms[0], mu.atoms[-1]
    else:
        lo, hi = mu.support_bounds
    cells = int((hi - lo) // delta) + 1
    atoms, weights = [], []
    for k in range(cells):
        left, right = lo + k * delta, lo + (k + 1) * delta
        cell = IntervalUnion.of(Interval(left, right, True, False))
        mass = measure_of(mu, cell)
        if mass == 0:
            continue
        if isinstance(mu, DiscreteMeasure):
            inside = [a for a in mu.atoms if left <= a < right]
            rep = (inside[0] + inside[-1]) / 2
        else:
            rep = (left + min(right, hi)) / 2
        atoms.append(rep)
        weights.append(mass)
    return DiscreteMeasure(LINE, tuple(atoms), tuple(weights))


# ---------------------------------------------------------------------------
# tightness


@dataclass
class TightnessWitness:
    interval: tuple  # closed [a, b]
    binding: int  # 0-based index of the member with the least mass in the interval
    masses: list
    eps: Fraction

    def holds(self) -> bool:
        if self.eps >= 1:
            return True
        return all(m > 1 - self.eps for m in self.masses)


def _closed_mass(mu: Measure, a, b) -> Fraction:
    return measure_of(mu, IntervalUnion.of(closed(a, b)))


def tightness_witness(family: Sequence[Measure], eps: RationalLike) -> TightnessWitness:
    """Shortest closed interval, with endpoints at support points, carrying mass
    ``> 1 - eps`` under every member.

    For ``eps >= 1`` the requirement is vacuous and a one-point interval at
    the leftmost support point is returned.
    """
    fam = _check_sequence(family)
    if fam[0].space != LINE:
        raise SpaceMismatchError("tightness witnesses are intervals on the line")
    eps = as_rational(eps, "eps")
    if eps <= 0:
        raise MeasureError("eps must be positive")
    C = sorted(set().union(*(support_points(m) for m in fam)))

    def masses(a, b):
        return [_closed_mass(m, a, b) for m in fam]

    if eps >= 1:
        a = C[0]
        ms = masses(a, a)
        return TightnessWitness((a, a), ms.index(min(ms)), ms, eps)
    best = None
    for i, a in enumerate(C):
        for b in C[i:]:
            ms = masses(a, b)
            if all(m > 1 - eps for m in ms):
                if best is None or b - a < best[1] - best[0]:
                    best = (a, b, ms)
                break
    a, b, ms = best
    return TightnessWitness((a, b), ms.index(min(ms)), ms, eps)


# ---------------------------------------------------------------------------
# Helly selection


@dataclass
class HellyResult:
    status: str  # "ok" or "insufficient prefix"
    indices: list  # 1-based
    limit: Optional[PiecewiseCdf]
    levy_to_limit: list
    failing_grid_points: list
    tol: Fraction


def _limit_from_grid(grid: list, left_values: list) -> PiecewiseCdf:
    """``F(x) = inf{L(g) : g > x}`` on the grid, 0 before it and 1 after it."""
    values = [left_values[k + 1] for k in range(len(grid) - 1)] + [ONE]
    values = [max(v, values[k - 1]) if k else v for k, v in enumerate(values)]
    F = PiecewiseCdf(tuple(grid), tuple(values), tuple(ZERO for _ in grid[:-1]))
    return F.normalized()


def helly_subsequence(
    seq: Sequence[PiecewiseCdf], grid: Sequence[RationalLike], tol: RationalLike
) -> HellyResult:
    """Diagonal extraction of a subsequence whose values settle on ``grid``.

    At each grid point (in order) the current index set is refined to the
    values within ``tol`` of an anchor value.  Anchors are tried in index
    order and the first one whose cluster has at least two members and
    reaches the last index of the current set wins.  Grid points with no such
    cluster are reported and leave the set unchanged.

    The limit candidate is built from left limits of the last selected term
    at the grid points, pushed through ``inf over g > x``, so a jump between
    two grid points lands on the lower one.
    """
    seq = _check_sequence(seq)
    if len(seq) < 2:
        raise MeasureError("Helly selection needs a prefix of length >= 2")
    pts = sorted({as_rational(g, "grid") for g in grid})
    if not pts:
        raise MeasureError("grid is empty")
    tol = as_rational(tol, "tol")
    idx = list(range(1, len(seq) + 1))
    failing = []
    for g in pts:
        vals = {n: seq[n - 1](g) for n in idx}
        last = idx[-1]
        chosen = None
        for i in idx:
            cluster = [n for n in idx if abs(vals[n] - vals[i]) <= tol]
            if len(cluster) >= 2 and cluster[-1] == last:
                chosen = cluster
                break
        if chosen is None:
            failing.append(g)
        else:
            idx = chosen
    final = seq[idx[-1] - 1]
    limit = _limit_from_grid(pts, [final.left(g) for g in pts])
    levy = [levy_distance(seq[n - 1], limit).value for n in idx]
    status = "ok" if not failing else "insufficient prefix"
    return HellyResult(status, idx, limit, levy, failing, tol)
