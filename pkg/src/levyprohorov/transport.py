"""Prohorov distance through couplings and exact max-flow.

Convention used throughout: ``eps`` is feasible when some coupling of ``mu``
and ``nu`` puts mass at least ``1 - eps`` on pairs with ``d(x, y) < eps``
(strict, like the open neighbourhoods).  By the supply/demand form of the
max-flow min-cut theorem this is the same as ``mu(A) <= nu(A^eps) + eps`` for
every set of atoms ``A``, which is how the enumeration module states it.

Between consecutive pairwise distances the set of close pairs does not change,
so the flow value is constant there and the critical ``eps`` is found bracket
by bracket.
"""
from __future__ import annotations

import csv
import io
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .measures import DiscreteMeasure, MeasureError, PointSet, SpaceMismatchError
from .prohorov import DistanceReport
from .rational import RationalLike, as_rational, fmt

ZERO = Fraction(0)
ONE = Fraction(1)


class NetworkError(ValueError):
    pass


@dataclass
class FlowNetwork:
    n: int
    source: int
    sink: int
    arcs: list = field(default_factory=list)  # (tail, head, capacity)

    def add_arc(self, u: int, v: int, cap) -> int:
        self.arcs.append((u, v, Fraction(cap)))
        return len(self.arcs) - 1

    def validate(self) -> None:
        if not (0 <= self.source < self.n and 0 <= self.sink < self.n):
            raise NetworkError("source or sink out of range")
        if self.source == self.sink:
            raise NetworkError("source and sink coincide")
        for k, (u, v, c) in enumerate(self.arcs):
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise NetworkError(f"arc {k} ({u} -> {v}) references a missing node")
            if c < 0:
                raise NetworkError(f"arc {k} has negative capacity {fmt(c)}")


@dataclass
class FlowResult:
    value: Fraction
    flows: list
    source_side: frozenset  # min cut: nodes reachable from the source in the residual graph

    def cut_capacity(self, net: FlowNetwork) -> Fraction:
        S = self.source_side
        return sum((c for u, v, c in net.arcs if u in S and v not in S), ZERO)


def max_flow(net: FlowNetwork, warm_start: Optional[Sequence] = None) -> FlowResult:
    """Edmonds-Karp in exact arithmetic.

    Arcs are scanned in insertion order, so the returned flow is
    deterministic.  ``warm_start`` may carry a feasible flow for the first
    ``len(warm_start)`` arcs (e.g. from a network with fewer arcs).
    """
    net.validate()
    m = len(net.arcs)
    flows = [ZERO] * m
    if warm_start is not None:
        flows[: len(warm_start)] = list(warm_start)
    adj: list = [[] for _ in range(net.n)]
    for k, (u, v, _) in enumerate(net.arcs):
        adj[u].append((k, 1))
        adj[v].append((k, -1))
    caps = [c for _, _, c in net.arcs]
    s, t = net.source, net.sink

    def residual(k, d):
        return caps[k] - flows[k] if d == 1 else flows[k]

    def head(k, d):
        return net.arcs[k][1] if d == 1 else net.arcs[k][0]

    while True:
        parent = {s: None}
        queue = deque([s])
        while queue and t not in parent:
            u = queue.popleft()
            for k, d in adj[u]:
                w = head(k, d)
                if w not in parent and residual(k, d) > 0:
                    parent[w] = (k, d)
                    queue.append(w)
        if t not in parent:
            break
        path = []
        w = t
        while parent[w] is not None:
            k, d = parent[w]
            path.append((k, d))
            w = net.arcs[k][0] if d == 1 else net.arcs[k][1]
        push = min(residual(k, d) for k, d in path)
        for k, d in path:
            flows[k] += push if d == 1 else -push
    value = sum((flows[k] for k, (u, _, _) in enumerate(net.arcs) if u == s), ZERO)
    value -= sum((flows[k] for k, (_, v, _) in enumerate(net.arcs) if v == s), ZERO)
    return FlowResult(value, flows, frozenset(parent))


# ---------------------------------------------------------------------------
# couplings


@dataclass(frozen=True)
class Coupling:
    mu: DiscreteMeasure
    nu: DiscreteMeasure
    joint: tuple  # joint[i][j] = mass on (mu.atoms[i], nu.atoms[j])

    def check_marginals(self) -> None:
        for i, w in enumerate(self.mu.weights):
            if sum(self.joint[i]) != w:
                raise AssertionError(f"row {i} sums to {fmt(sum(self.joint[i]))}, not {fmt(w)}")
        for j, w in enumerate(self.nu.weights):
            col = sum(row[j] for row in self.joint)
            if col != w:
                raise AssertionError(f"column {j} sums to {fmt(col)}, not {fmt(w)}")
        if any(x < 0 for row in self.joint for x in row):
            raise AssertionError("negative coupling mass")

    def close_mass(self, eps) -> Fraction:
        d = self.mu.space.distance
        return sum(
            (
                self.joint[i][j]
                for i, a in enumerate(self.mu.atoms)
                for j, b in enumerate(self.nu.atoms)
                if d(a, b) < eps
            ),
            ZERO,
        )


def _northwest_corner(rows: list, cols: list) -> list:
    rows, cols = list(rows), list(cols)
    out = [[ZERO] * len(cols) for _ in rows]
    i = j = 0
    while i < len(rows) and j < len(cols):
        x = min(rows[i], cols[j])
        out[i][j] += x
        rows[i] -= x
        cols[j] -= x
        if rows[i] == 0:
            i += 1
        else:
            j += 1
    return out


@dataclass
class StrassenResult:
    feasible: bool
    eps: Fraction
    slack: Fraction
    flow: Fraction
    coupling: Optional[Coupling] = None
    witness_set: Optional[PointSet] = None


def _check_pair(mu, nu) -> None:
    if not (isinstance(mu, DiscreteMeasure) and isinstance(nu, DiscreteMeasure)):
        raise MeasureError("the flow method needs two finitely supported measures")
    if mu.space != nu.space:
        raise SpaceMismatchError(f"measures live on different spaces: {mu.space!r} vs {nu.space!r}")


def strassen_feasible(
    mu: DiscreteMeasure, nu: DiscreteMeasure, eps: RationalLike, slack: Optional[RationalLike] = None
) -> StrassenResult:
    """Is there a coupling with mass >= 1 - slack on pairs at distance < eps?

    The network is source -> mu atoms -> nu atoms -> sink, with unit arcs
    between close pairs and one overflow node of throughput ``slack`` that
    may connect any pair.  Feasible iff the max flow is 1.  On failure the
    mu atoms on the source side of the min cut form a set ``A`` with
    ``mu(A) > nu(A^eps) + slack``.
    """
    _check_pair(mu, nu)
    eps = as_rational(eps, "eps")
    if eps <= 0:
        raise MeasureError("eps must be positive")
    slack = eps if slack is None else as_rational(slack, "slack")
    if slack < 0:
        raise MeasureError("slack must be nonnegative")
    m, n = len(mu), len(nu)
    s, o_in, o_out, t = 0, m + n + 1, m + n + 2, m + n + 3
    net = FlowNetwork(m + n + 4, s, t)
    for i, w in enumerate(mu.weights):
        net.add_arc(s, 1 + i, w)
    d = mu.space.distance
    direct = {}
    for i, a in enumerate(mu.atoms):
        for j, b in enumerate(nu.atoms):
            if d(a, b) < eps:
                direct[i, j] = net.add_arc(1 + i, 1 + m + j, ONE)
    into_o = [net.add_arc(1 + i, o_in, ONE) for i in range(m)]
    net.add_arc(o_in, o_out, slack)
    out_o = [net.add_arc(o_out, 1 + m + j, ONE) for j in range(n)]
    for j, w in enumerate(nu.weights):
        net.add_arc(1 + m + j, t, w)
    res = max_flow(net)
    if res.value == 1:
        joint = [[ZERO] * n for _ in range(m)]
        for (i, j), k in direct.items():
            joint[i][j] += res.flows[k]
        spill = _northwest_corner([res.flows[k] for k in into_o], [res.flows[k] for k in out_o])
        for i in range(m):
            for j in range(n):
                joint[i][j] += spill[i][j]
        coupling = Coupling(mu, nu, tuple(tuple(r) for r in joint))
        return StrassenResult(True, eps, slack, res.value, coupling=coupling)
    A = PointSet(mu.space, tuple(a for i, a in enumerate(mu.atoms) if 1 + i in res.source_side))
    return StrassenResult(False, eps, slack, res.value, witness_set=A)


# ---------------------------------------------------------------------------
# critical eps


def _sorted_distances(mu: DiscreteMeasure, nu: DiscreteMeasure) -> list:
    d = mu.space.distance
    return sorted({d(a, b) for a in mu.atoms for b in nu.atoms})


def _close_network(mu: DiscreteMeasure, nu: DiscreteMeasure):
    """Source/sink network without close-pair arcs; arcs get appended per bracket."""
    m, n = len(mu), len(nu)
    net = FlowNetwork(m + n + 2, 0, m + n + 1)
    for i, w in enumerate(mu.weights):
        net.add_arc(0, 1 + i, w)
    for j, w in enumerate(nu.weights):
        net.add_arc(1 + m + j, m + n + 1, w)
    d = mu.space.distance
    pending = sorted(
        ((d(a, b), i, j) for i, a in enumerate(mu.atoms) for j, b in enumerate(nu.atoms)),
        key=lambda x: x[0],
    )
    return net, pending


def flow_profile(mu: DiscreteMeasure, nu: DiscreteMeasure) -> list:
    """``[(r, flow)]``: max flow using the pairs at distance <= r, for each distance r.

    The flow for ``eps`` in ``(r_k, r_{k+1}]`` is the entry for ``r_k``; for
    ``eps`` at or below the smallest distance it is 0 (or the entry for 0 when
    the supports share a point).
    """
    _check_pair(mu, nu)
    m = len(mu)
    net, pending = _close_network(mu, nu)
    flows: list = []
    out = []
    k = 0
    for r in _sorted_distances(mu, nu):
        while k < len(pending) and pending[k][0] == r:
            _, i, j = pending[k]
            net.add_arc(1 + i, 1 + m + j, ONE)
            k += 1
        res = max_flow(net, flows)
        flows = res.flows
        out.append((r, res.value))
    return out


def _critical_eps(profile: list) -> tuple:
    lo, flow = ZERO, ZERO
    rest = list(profile)
    if rest and rest[0][0] == 0:
        flow = rest.pop(0)[1]
    while True:
        need = 1 - flow
        if need <= lo:
            return lo, False
        if not rest or need <= rest[0][0]:
            return need, True
        lo, flow = rest.pop(0)


def frontier(mu: DiscreteMeasure, nu: DiscreteMeasure) -> list:
    """Rows ``(eps, flow, feasible)`` at every pairwise distance, the critical
    eps, 1, and the midpoints between consecutive ones.

    ``flow`` is the max flow over pairs strictly closer than ``eps``.
    """
    profile = flow_profile(mu, nu)
    value, _ = _critical_eps(profile)

    def flow_at(eps):
        f = ZERO
        for r, v in profile:
            if r < eps:
                f = v
        return f

    pts = sorted({r for r, _ in profile if r > 0} | {value} | {ONE})
    pts = sorted(set(pts) | {(a + b) / 2 for a, b in zip([ZERO] + pts, pts)})
    return [(e, flow_at(e), flow_at(e) >= 1 - e) for e in pts if e > 0]


def frontier_csv(rows: list, fh=None) -> str:
    buf = fh if fh is not None else io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["epsilon", "flow", "feasible"])
    for e, f, ok in rows:
        w.writerow([fmt(e), fmt(f), "true" if ok else "false"])
    return buf.getvalue() if fh is None else ""


def prohorov_via_flow(mu: DiscreteMeasure, nu: DiscreteMeasure, certify: bool = True) -> DistanceReport:
    """Prohorov distance as the critical eps of the coupling feasibility frontier.

    With ``certify`` the result carries a coupling at (or just above) the
    value and a min-cut witness set just below it.
    """
    _check_pair(mu, nu)
    profile = flow_profile(mu, nu)
    value, attained = _critical_eps(profile)
    if value == 0:
        return DistanceReport(ZERO, False, None, None, "flow", extra={"profile": profile})
    dists = [r for r, _ in profile]
    below = (max((r for r in dists if r < value), default=ZERO) + value) / 2
    above = value if attained else (value + min((r for r in dists if r > value), default=value + 1)) / 2
    report = DistanceReport(value, attained, None, None, "flow", below, above, extra={"profile": profile})
    if certify:
        lower = strassen_feasible(mu, nu, below)
        upper = strassen_feasible(mu, nu, above)
        if lower.feasible or not upper.feasible:
            raise AssertionError(f"flow frontier disagrees with direct checks near {fmt(value)}")
        upper.coupling.check_marginals()
        report.coupling = upper.coupling
        report.witness_set = lower.witness_set
        report.side = "mu"
    return report
