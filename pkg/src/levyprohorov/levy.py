"""Lévy and Kolmogorov (uniform) distances between distribution functions.

Both are computed exactly.  For the Lévy distance the feasible band widths
form a closed upper set, so the infimum is a minimum; it is located by
searching a finite candidate set (breakpoint differences and the solutions of
band-edge crossings on linear pieces) with the exact band check.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .measures import PiecewiseCdf
from .rational import RationalLike, as_rational

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class BandCheck:
    feasible: bool
    witness_x: Optional[Fraction] = None
    # which inequality failed: "lower" is F(x - h) - h <= G(x), "upper" is G(x) <= F(x + h) + h
    side: Optional[str] = None


@dataclass(frozen=True)
class Distance:
    value: Fraction
    attained: bool
    witness_x: Optional[Fraction] = None
    side: Optional[str] = None
    probe: Optional[Fraction] = None

    def __post_init__(self):
        if not 0 <= self.value <= 1:
            raise AssertionError(f"distance {self.value} outside [0, 1]")


def _critical_points(P: PiecewiseCdf, Q: PiecewiseCdf, h: Fraction) -> list:
    return sorted(set(P.breakpoints) | {q - h for q in Q.breakpoints})


def _point_in_gap(prev, c, g_left, slope):
    """Point in ``(prev, c)`` where an affine ``g`` with ``g(c-) = g_left > 0`` is still positive."""
    lo = prev if prev is not None else c - 1
    mid = (lo + c) / 2
    if slope <= 0:
        return mid
    return max(mid, c - g_left / (2 * slope))


def dominance_violation(P: PiecewiseCdf, Q: PiecewiseCdf, h: Fraction) -> Optional[Fraction]:
    """Some ``x`` with ``P(x) > Q(x + h) + h``, or ``None`` if there is none.

    ``g(x) = P(x) - Q(x + h) - h`` is affine between consecutive critical
    points, so checking values and left limits there is exhaustive.
    """
    prev = None
    for c in _critical_points(P, Q, h):
        g_left = P.left(c) - Q.left(c + h) - h
        if g_left > 0:
            # slope of g on (prev, c)
            probe = c - 1 if prev is None else prev + (c - prev) / 2
            g_probe = P(probe) - Q(probe + h) - h
            slope = (g_left - g_probe) / (c - probe)
            return _point_in_gap(prev, c, g_left, slope)
        if P(c) - Q(c + h) - h > 0:
            return c
        prev = c
    return None


def levy_feasible(F: PiecewiseCdf, G: PiecewiseCdf, h: RationalLike) -> BandCheck:
    """Exact test of ``F(x - h) - h <= G(x) <= F(x + h) + h`` for all real ``x``."""
    h = as_rational(h, "h")
    if h < 0:
        raise ValueError("h must be nonnegative")
    y = dominance_violation(F, G, h)
    if y is not None:
        return BandCheck(False, y + h, "lower")
    x = dominance_violation(G, F, h)
    if x is not None:
        return BandCheck(False, x, "upper")
    return BandCheck(True)


def _segments(P: PiecewiseCdf):
    """(start, value at start, slope) for every piece, including the two constant tails."""
    yield None, ZERO, ZERO
    n = len(P.breakpoints)
    for i, b in enumerate(P.breakpoints):
        yield b, P.values[i], (P.slopes[i] if i < n - 1 else ZERO)


def _candidates(P: PiecewiseCdf, Q: PiecewiseCdf) -> set:
    """Band widths at which ``sup_x P(x) - Q(x + h) - h`` can cross zero."""
    out = {ONE}
    for p in P.breakpoints:
        for q in Q.breakpoints:
            out.add(q - p)
    # x pinned at a breakpoint p of P, x + h inside a piece of Q
    for p in P.breakpoints:
        for pval in (P(p), P.left(p)):
            for start, v, s in _segments(Q):
                base = ZERO if start is None else start
                out.add((pval - v - s * (p - base)) / (1 + s))
    # x + h pinned at a breakpoint q of Q, x inside a piece of P
    for q in Q.breakpoints:
        for qval in (Q(q), Q.left(q)):
            for start, v, r in _segments(P):
                base = ZERO if start is None else start
                out.add((v + r * (q - base) - qval) / (1 + r))
    return {c for c in out if 0 < c <= 1}


def _search(cands: list, feasible) -> Fraction:
    lo, hi = 0, len(cands) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(cands[mid]):
            hi = mid
        else:
            lo = mid + 1
    return cands[lo]


def _below(cands: list, value: Fraction) -> Fraction:
    i = bisect.bisect_left(cands, value)
    prev = cands[i - 1] if i > 0 else ZERO
    return (prev + value) / 2


def levy_onesided(F: PiecewiseCdf, G: PiecewiseCdf) -> Distance:
    """``inf{h > 0 : F(x) <= G(x + h) + h for all x}``.

    This is only half of the Lévy band; it is not symmetric in ``F`` and
    ``G``.  The Lévy distance is the larger of the two orderings.
    """
    if dominance_violation(F, G, ZERO) is None:
        return Distance(ZERO, True)
    cands = sorted(_candidates(F, G))
    value = _search(cands, lambda h: dominance_violation(F, G, h) is None)
    probe = _below(cands, value)
    x = dominance_violation(F, G, probe)
    if x is None:
        raise AssertionError("candidate search returned a non-minimal width")
    return Distance(value, True, x, "onesided", probe)


def levy_distance(F: PiecewiseCdf, G: PiecewiseCdf) -> Distance:
    """Exact Lévy distance with a band witness just below the value.

    >>> from levyprohorov.measures import uniform_cdf, cdf_of, make_discrete_measure, LINE
    >>> G = cdf_of(make_discrete_measure(LINE, [0, "1/4"], ["2/3", "1/3"]))
    >>> levy_distance(uniform_cdf(), G).value
    Fraction(3, 8)
    """
    if levy_feasible(F, G, ZERO).feasible:
        return Distance(ZERO, True)
    cands = sorted(_candidates(F, G) | _candidates(G, F))
    value = _search(cands, lambda h: levy_feasible(F, G, h).feasible)
    if not levy_feasible(F, G, value).feasible:
        raise AssertionError("Lévy band fails at the computed value")
    probe = _below(cands, value)
    check = levy_feasible(F, G, probe)
    if check.feasible:
        raise AssertionError("Lévy band holds below the computed value")
    return Distance(value, True, check.witness_x, check.side, probe)


def kolmogorov_distance(F: PiecewiseCdf, G: PiecewiseCdf) -> Distance:
    """``sup_x |F(x) - G(x)|``, exactly, with the attaining point when there is one."""
    pts = sorted(set(F.breakpoints) | set(G.breakpoints))
    best, where, attained = ZERO, None, True
    prev = None
    for c in pts:
        right = abs(F(c) - G(c))
        left = abs(F.left(c) - G.left(c))
        if left > best:
            # attained inside (prev, c) only when F - G is constant there
            probe = c - 1 if prev is None else (prev + c) / 2
            flat = abs(F(probe) - G(probe)) == left
            best, where, attained = left, (probe if flat else c), flat
        if right > best or (right == best and not attained):
            best, where, attained = right, c, True
        prev = c
    return Distance(best, attained, where, "uniform")
