"""Independent reference computations used only by the tests.

None of these share code paths with the library's algorithms: they work from
the definitions, by exhaustive enumeration over small instances.
"""
from fractions import Fraction
from itertools import combinations

from levyprohorov.measures import DiscreteMeasure, PiecewiseCdf

ZERO, ONE = Fraction(0), Fraction(1)


# ---------------------------------------------------------------------------
# Lévy


def _vertices(F: PiecewiseCdf):
    """Corners of the completed graph, as (t, x) with t = x + y."""
    out = []
    for b, left, val in zip(F.breakpoints, F.lefts, F.values):
        out.append((b + left, b))
        out.append((b + val, b))
    return out


def _x_at(F: PiecewiseCdf, t):
    """x-coordinate where the line x + y = t meets the completed graph of F."""
    vs = _vertices(F)
    if t <= vs[0][0]:
        return t
    if t >= vs[-1][0]:
        return t - 1
    for (t0, x0), (t1, x1) in zip(vs, vs[1:]):
        if t0 <= t <= t1:
            if t1 == t0:
                return x0
            return x0 + (x1 - x0) * (t - t0) / (t1 - t0)
    raise AssertionError("unreachable")


def levy_graphical(F: PiecewiseCdf, G: PiecewiseCdf) -> Fraction:
    """Largest horizontal gap between the completed graphs along lines of slope -1."""
    ts = {t for t, _ in _vertices(F)} | {t for t, _ in _vertices(G)}
    return max(abs(_x_at(F, t) - _x_at(G, t)) for t in ts)


def band_holds_on_grid(F, G, h, xs) -> bool:
    return all(F(x - h) - h <= G(x) <= F(x + h) + h for x in xs)


def levy_grid(F, G, denom: int, xs) -> Fraction:
    """Smallest h in {k/denom} whose band holds on the sample points ``xs``."""
    for k in range(denom + 1):
        h = Fraction(k, denom)
        if band_holds_on_grid(F, G, h, xs):
            return h
    return ONE


# ---------------------------------------------------------------------------
# Prohorov


def _subsets(points):
    for r in range(1, len(points) + 1):
        yield from combinations(points, r)


def _mass(mu: DiscreteMeasure, pts) -> Fraction:
    return sum((w for a, w in zip(mu.atoms, mu.weights) if a in pts), ZERO)


def _near(mu: DiscreteMeasure, A, eps) -> Fraction:
    d = mu.space.distance
    return sum((w for a, w in zip(mu.atoms, mu.weights) if any(d(a, x) < eps for x in A)), ZERO)


def prohorov_feasible_naive(mu, nu, eps) -> bool:
    """Both inequalities over every subset of the combined support."""
    pts = sorted(set(mu.atoms) | set(nu.atoms))
    for A in _subsets(pts):
        if _mass(mu, A) > _near(nu, A, eps) + eps:
            return False
        if _mass(nu, A) > _near(mu, A, eps) + eps:
            return False
    return True


def _subset_sums(mu):
    sums = {ZERO}
    for w in mu.weights:
        sums |= {s + w for s in sums}
    return sums


def prohorov_naive(mu: DiscreteMeasure, nu: DiscreteMeasure) -> Fraction:
    """Feasibility is constant between consecutive candidates (pairwise
    distances and differences of subset masses), so probe each gap."""
    d = mu.space.distance
    cands = {ZERO, ONE} | {d(a, b) for a in mu.atoms for b in nu.atoms}
    sm, sn = _subset_sums(mu), _subset_sums(nu)
    cands |= {a - b for a in sm for b in sn} | {b - a for a in sm for b in sn}
    cands = sorted(c for c in cands if 0 <= c <= 1)
    for c, nxt in zip(cands, cands[1:] + [cands[-1] + 1]):
        if prohorov_feasible_naive(mu, nu, (c + nxt) / 2):
            return c
    raise AssertionError("infeasible at every eps")


def _open_union_mass(F: PiecewiseCdf, intervals) -> Fraction:
    """F-mass of a union of open intervals, merged by hand."""
    merged = []
    for lo, hi in sorted(intervals):
        if merged and lo < merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return sum((F.left(hi) - F(lo) for lo, hi in merged), ZERO)


def mixed_feasible(F: PiecewiseCdf, nu: DiscreteMeasure, eps, grid) -> bool:
    """nu(S) <= F(S^eps) + eps over atom subsets, plus F([a, b]) <= nu((a-eps, b+eps)) + eps
    over closed intervals with endpoints on ``grid`` (a necessary condition)."""
    for S in _subsets(nu.atoms):
        if _mass(nu, S) > _open_union_mass(F, [(s - eps, s + eps) for s in S]) + eps:
            return False
    for i, a in enumerate(grid):
        for b in grid[i:]:
            inside = sum((w for x, w in zip(nu.atoms, nu.weights) if a - eps < x < b + eps), ZERO)
            if F(b) - F.left(a) > inside + eps:
                return False
    return True
