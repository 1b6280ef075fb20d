"""Exact Prohorov distance by enumerating closed sets.

For a finitely supported ``mu`` the mass ``mu(A)`` of a closed set only depends
on which atoms ``A`` contains, and shrinking ``A`` to those atoms can only
shrink ``A^eps``.  So the family ``{A : A a subset of supp(mu)}`` is exhaustive
for the inequalities ``mu(A) <= nu(A^eps) + eps``.  When ``nu`` is a
:class:`~levyprohorov.measures.PiecewiseCdf` the other family of inequalities
is not enumerable, but it is implied by the first one for every ``eps`` (the
complement argument ``A = M \\ B^eps``), so the discrete side alone decides the
distance.  The complement sets are still checked in :func:`prohorov_feasible`.

For every subset the inequality holds on an upper set of ``eps``; its
infimum (the subset's threshold) is found exactly, bracket by bracket, and the
distance is the largest threshold.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .measures import (
    LINE,
    DiscreteMeasure,
    IntervalUnion,
    Measure,
    MeasureError,
    PiecewiseCdf,
    PointSet,
    SpaceMismatchError,
    closed,
    eps_neighborhood,
    measure_of,
)
from .rational import RationalLike, as_rational, fmt

ZERO = Fraction(0)
ONE = Fraction(1)

DEFAULT_CAP = 20


class EnumerationCapError(RuntimeError):
    """Support too large for subset enumeration; use the flow method instead."""


@dataclass
class DistanceReport:
    value: Fraction
    attained: bool
    witness_set: Optional[PointSet]
    side: Optional[str]  # "mu": mu(A) > nu(A^eps) + eps below value; "nu": the mirror
    method: str
    probe_below: Optional[Fraction] = None
    probe_above: Optional[Fraction] = None
    coupling: object = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.value <= 1:
            raise AssertionError(f"Prohorov value {self.value} outside [0, 1]")

    @property
    def certificate_note(self) -> str:
        if self.witness_set is None:
            return "measures coincide"
        a = str(self.witness_set)
        if self.side == "mu":
            return f"mu(A) > nu(A^eps) + eps for A = {a} and every eps < {fmt(self.value)}"
        return f"nu(A) > mu(A^eps) + eps for A = {a} and every eps < {fmt(self.value)}"


@dataclass(frozen=True)
class FeasibilityCheck:
    feasible: bool
    witness_set: object = None
    side: Optional[str] = None


def _check_space(mu: Measure, nu: Measure) -> None:
    if mu.space != nu.space:
        raise SpaceMismatchError(f"measures live on different spaces: {mu.space!r} vs {nu.space!r}")
    if isinstance(mu, PiecewiseCdf) and isinstance(nu, PiecewiseCdf):
        raise MeasureError("at least one measure must be finitely supported")


def _check_cap(mu: Measure, nu: Measure, cap: int) -> None:
    size = sum(len(m) for m in (mu, nu) if isinstance(m, DiscreteMeasure))
    if size > cap:
        raise EnumerationCapError(
            f"combined support {size} exceeds enumeration cap {cap}; use method='flow'"
        )


# ---------------------------------------------------------------------------
# per-subset thresholds


def _threshold_discrete(target: Fraction, radii: list, weights: tuple) -> tuple:
    """Infimum of eps > 0 with ``target <= Q(S^eps) + eps`` for discrete ``Q``.

    ``radii[b]`` is the distance from atom ``b`` of ``Q`` to ``S``.  Returns
    ``(threshold, attained)``.
    """
    pairs = sorted(zip(radii, weights))
    mass = ZERO
    k = 0
    while k < len(pairs) and pairs[k][0] == 0:
        mass += pairs[k][1]
        k += 1
    lo = ZERO
    while True:
        need = target - mass
        if need <= lo:
            return lo, False
        if k == len(pairs):
            return need, True
        hi = pairs[k][0]
        if need <= hi:
            return need, True
        while k < len(pairs) and pairs[k][0] == hi:
            mass += pairs[k][1]
            k += 1
        lo = hi


def _eps_breaks_cdf(S: tuple, F: PiecewiseCdf) -> list:
    out = {abs(b - s) for b in F.breakpoints for s in S}
    out |= {(b - a) / 2 for a, b in zip(S, S[1:])}
    return sorted(e for e in out if e > 0)


def _threshold_cdf(target: Fraction, S: tuple, F: PiecewiseCdf) -> tuple:
    """Same as :func:`_threshold_discrete` with a piecewise-linear opponent.

    ``F(S^eps)`` is affine in eps between consecutive breaks (a neighbourhood
    endpoint meeting a breakpoint of ``F``, or two neighbourhoods merging) and
    left-continuous at each break.
    """
    pts = PointSet(LINE, S)

    def f(eps):
        return measure_of(F, eps_neighborhood(pts, eps)) + eps - target

    breaks = _eps_breaks_cdf(S, F)
    edges = [ZERO] + breaks + [(breaks[-1] if breaks else ZERO) + 2]
    for lo, hi in zip(edges, edges[1:]):
        f_hi = f(hi)
        mid = (lo + hi) / 2
        slope = (f_hi - f(mid)) / (hi - mid)
        f_lo = f_hi - slope * (hi - lo)
        if f_lo >= 0:
            return lo, False
        if f_hi >= 0:
            return lo - f_lo / slope, True
    raise AssertionError("threshold search ran past eps = 2")


def _subset_radii(P: DiscreteMeasure, Q: DiscreteMeasure) -> list:
    """``radii[mask][b]`` = distance from atom ``b`` of ``Q`` to the subset ``mask`` of ``supp P``."""
    d = P.space.distance
    m = len(P)
    base = [[d(a, b) for b in Q.atoms] for a in P.atoms]
    radii: list = [None] * (1 << m)
    for mask in range(1, 1 << m):
        low = (mask & -mask).bit_length() - 1
        rest = mask & (mask - 1)
        if rest == 0:
            radii[mask] = base[low]
        else:
            radii[mask] = [min(x, y) for x, y in zip(radii[rest], base[low])]
    return radii


def _subset_masses(P: DiscreteMeasure) -> list:
    m = len(P)
    out = [ZERO] * (1 << m)
    for mask in range(1, 1 << m):
        low = (mask & -mask).bit_length() - 1
        out[mask] = out[mask & (mask - 1)] + P.weights[low]
    return out


def _mask_points(P: DiscreteMeasure, mask: int) -> tuple:
    return tuple(a for i, a in enumerate(P.atoms) if mask >> i & 1)


def side_thresholds(P: DiscreteMeasure, Q: Measure) -> list:
    """``[(mask, threshold, attained)]`` for every nonempty subset of ``supp P``."""
    masses = _subset_masses(P)
    out = []
    if isinstance(Q, PiecewiseCdf):
        for mask in range(1, 1 << len(P)):
            t, att = _threshold_cdf(masses[mask], _mask_points(P, mask), Q)
            out.append((mask, t, att))
        return out
    radii = _subset_radii(P, Q)
    for mask in range(1, 1 << len(P)):
        t, att = _threshold_discrete(masses[mask], radii[mask], Q.weights)
        out.append((mask, t, att))
    return out


def _combine(sides: list) -> tuple:
    """Largest threshold over all sides; attained only if every binding subset attains it."""
    value, attained, witness = ZERO, False, None
    for name, P, rows in sides:
        for mask, t, att in rows:
            if t > value:
                value, attained, witness = t, att, (name, P, mask)
            elif t == value and value > 0:
                attained = attained and att
    return value, attained, witness


# ---------------------------------------------------------------------------
# feasibility by direct evaluation


def _violations(P: DiscreteMeasure, Q: Measure, eps: Fraction):
    masses = _subset_masses(P)
    d = P.space.distance
    for mask in range(1, 1 << len(P)):
        pts = _mask_points(P, mask)
        if isinstance(Q, DiscreteMeasure):
            # same as measure_of(Q, eps_neighborhood(A, eps)), without building the set
            near = sum((w for b, w in Q.items() if any(d(a, b) < eps for a in pts)), ZERO)
        else:
            near = measure_of(Q, eps_neighborhood(PointSet(P.space, pts), eps))
        if masses[mask] > near + eps:
            return PointSet(P.space, pts)
    return None


def _complement_family(F: PiecewiseCdf, nu: DiscreteMeasure, eps: Fraction) -> list:
    """Closed sets for the non-atomic side: complements of neighbourhoods of atom subsets,
    and closed intervals between breakpoints of ``F``."""
    fam = []
    for mask in range(1 << len(nu)):
        S = PointSet(LINE, _mask_points(nu, mask))
        nbhd = eps_neighborhood(S, eps) if mask else IntervalUnion()
        fam.append(nbhd.complement())
    bp = F.breakpoints
    for i in range(len(bp)):
        for j in range(i, len(bp)):
            fam.append(IntervalUnion.of(closed(bp[i], bp[j])))
    return fam


def prohorov_feasible(
    mu: Measure, nu: Measure, eps: RationalLike, cap: int = DEFAULT_CAP
) -> FeasibilityCheck:
    """Check ``mu(A) <= nu(A^eps) + eps`` and ``nu(A) <= mu(A^eps) + eps`` over closed sets.

    Discrete sides are checked over every subset of their support.  A
    non-atomic side is checked over the complement family; the discrete side's
    inequalities already imply it.
    """
    eps = as_rational(eps, "eps")
    if eps <= 0:
        raise MeasureError("eps must be positive")
    _check_space(mu, nu)
    _check_cap(mu, nu, cap)
    for name, P, Q in (("mu", mu, nu), ("nu", nu, mu)):
        if isinstance(P, DiscreteMeasure):
            A = _violations(P, Q, eps)
            if A is not None:
                return FeasibilityCheck(False, A, name)
        else:
            for A in _complement_family(P, Q, eps):
                if measure_of(P, A) > measure_of(Q, eps_neighborhood(A, eps)) + eps:
                    return FeasibilityCheck(False, A, name)
    return FeasibilityCheck(True)


# ---------------------------------------------------------------------------
# distances


def _probes(value: Fraction, attained: bool, candidates: set) -> tuple:
    below = max((c for c in candidates if c < value), default=ZERO)
    above = min((c for c in candidates if c > value), default=value + 1)
    return (below + value) / 2, (value if attained else (value + above) / 2)


def _pairwise(mu: Measure, nu: Measure) -> set:
    pts_a = mu.atoms if isinstance(mu, DiscreteMeasure) else mu.breakpoints
    pts_b = nu.atoms if isinstance(nu, DiscreteMeasure) else nu.breakpoints
    d = mu.space.distance
    return {d(a, b) for a in pts_a for b in pts_b}


def _report(mu, nu, sides, method, verify, feasible) -> DistanceReport:
    value, attained, witness = _combine(sides)
    if witness is None:
        return DistanceReport(ZERO, False, None, None, method)
    name, P, mask = witness
    A = PointSet(P.space, _mask_points(P, mask))
    cands = {t for _, _, rows in sides for _, t, _ in rows} | _pairwise(mu, nu)
    below, above = _probes(value, attained, cands)
    if verify:
        if feasible(below):
            raise AssertionError(f"feasible at {fmt(below)} below the computed value {fmt(value)}")
        if not feasible(above):
            raise AssertionError(f"infeasible at {fmt(above)} above the computed value {fmt(value)}")
    return DistanceReport(value, attained, A, name, method, below, above)


def prohorov_bruteforce(
    mu: Measure, nu: Measure, cap: int = DEFAULT_CAP, verify: bool = True
) -> DistanceReport:
    """Prohorov distance from both families of inequalities, by subset enumeration.

    >>> from levyprohorov.measures import make_discrete_measure, point_mass
    >>> nu = make_discrete_measure(LINE, [-1, 1], ["1/2", "1/2"])
    >>> prohorov_bruteforce(point_mass(0), nu).value
    Fraction(1, 1)
    """
    _check_space(mu, nu)
    _check_cap(mu, nu, cap)
    sides = []
    if isinstance(mu, DiscreteMeasure):
        sides.append(("mu", mu, side_thresholds(mu, nu)))
    if isinstance(nu, DiscreteMeasure):
        sides.append(("nu", nu, side_thresholds(nu, mu)))
    return _report(mu, nu, sides, "enumerate", verify, lambda e: prohorov_feasible(mu, nu, e, cap).feasible)


def prohorov_onesided(
    mu: Measure, nu: Measure, cap: int = DEFAULT_CAP, verify: bool = True
) -> DistanceReport:
    """``inf{eps > 0 : mu(A) <= nu(A^eps) + eps for all closed A}``.

    ``mu`` must be finitely supported, since its closed sets are the ones
    enumerated.
    """
    _check_space(mu, nu)
    _check_cap(mu, nu, cap)
    if not isinstance(mu, DiscreteMeasure):
        raise MeasureError("one-sided enumeration needs a finitely supported first measure")
    sides = [("mu", mu, side_thresholds(mu, nu))]
    return _report(mu, nu, sides, "onesided", verify, lambda e: _violations(mu, nu, e) is None)
