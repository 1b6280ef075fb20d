"""Random instances and relation audits between the Lévy and Prohorov distances.

The audited claim is that ``levy(F, G) == prohorov(mu, nu)`` for every pair of
measures on the line.  It is checked on random pairs and on a curated pair
where it fails; gaps are reported as observations, with both certificates.
"""
from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .levy import Distance, levy_distance
from .measures import (
    LINE,
    DiscreteMeasure,
    Measure,
    PiecewiseCdf,
    cdf_of,
    eps_neighborhood,
    make_discrete_measure,
    measure_of,
    point_mass,
    uniform_cdf,
)
from .prohorov import DistanceReport, prohorov_bruteforce
from .rational import RationalLike, as_rational, fmt, rational_json

ZERO = Fraction(0)

AUDITED_CLAIM = "levy(F, G) = prohorov(mu, nu) for every pair of measures on the real line"


class InstanceError(ValueError):
    """Bounds that cannot produce the requested instance."""


@dataclass(frozen=True)
class InstanceSpec:
    seed: int = 0
    min_atoms: int = 1
    max_atoms: int = 4
    lo: RationalLike = -2
    hi: RationalLike = 2
    denom: int = 8  # atoms are multiples of 1/denom, weights have denominator dividing denom

    def validate(self) -> None:
        if not 1 <= self.min_atoms <= self.max_atoms:
            raise InstanceError(f"atom range [{self.min_atoms}, {self.max_atoms}] is empty or below 1")
        if self.denom < 1:
            raise InstanceError("denom must be at least 1")
        if self.denom < self.max_atoms:
            raise InstanceError(
                f"denom {self.denom} cannot split unit mass into {self.max_atoms} positive weights"
            )
        lo, hi = as_rational(self.lo, "lo"), as_rational(self.hi, "hi")
        if lo > hi:
            raise InstanceError("lo exceeds hi")
        if len(_grid(lo, hi, self.denom)) < self.max_atoms:
            raise InstanceError(
                f"[{fmt(lo)}, {fmt(hi)}] holds fewer than {self.max_atoms} multiples of 1/{self.denom}"
            )


def _grid(lo: Fraction, hi: Fraction, denom: int) -> list:
    first = -((-lo * denom) // 1)  # ceil
    last = (hi * denom) // 1
    return [Fraction(k, denom) for k in range(int(first), int(last) + 1)]


def _random_measure(rng: random.Random, spec: InstanceSpec) -> DiscreteMeasure:
    grid = _grid(as_rational(spec.lo), as_rational(spec.hi), spec.denom)
    m = rng.randint(spec.min_atoms, spec.max_atoms)
    atoms = sorted(rng.sample(grid, m))
    # random composition of denom into m positive parts
    cuts = sorted(rng.sample(range(1, spec.denom), m - 1))
    parts = [b - a for a, b in zip([0] + cuts, cuts + [spec.denom])]
    return make_discrete_measure(LINE, atoms, [Fraction(p, spec.denom) for p in parts])


def random_measures(spec: InstanceSpec, count: int, rng: Optional[random.Random] = None) -> list:
    spec.validate()
    rng = rng if rng is not None else random.Random(spec.seed)
    return [_random_measure(rng, spec) for _ in range(count)]


def random_instance(spec: InstanceSpec) -> tuple:
    """Two discrete measures on the line, determined by ``spec`` alone."""
    mu, nu = random_measures(spec, 2)
    return mu, nu


def _as_cdf(m: Measure) -> PiecewiseCdf:
    return m if isinstance(m, PiecewiseCdf) else cdf_of(m)


def levy_between(mu: Measure, nu: Measure) -> Distance:
    return levy_distance(_as_cdf(mu), _as_cdf(nu))


# ---------------------------------------------------------------------------
# metric axioms


@dataclass
class AxiomReport:
    trials: int
    checks: int
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"trials": self.trials, "checks": self.checks, "violations": self.violations}


def _measure_str(m: Measure) -> str:
    if isinstance(m, PiecewiseCdf):
        return repr(m)
    return " + ".join(f"{fmt(w)}*delta({fmt(a)})" for a, w in m.items())


def metric_axiom_fuzz(spec: InstanceSpec, trials: int) -> AxiomReport:
    """Symmetry, identity of indiscernibles and the triangle inequality, exactly,
    for both distances on ``trials`` random triples."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    spec.validate()
    rng = random.Random(spec.seed)
    metrics = {
        "levy": lambda a, b: levy_between(a, b).value,
        "prohorov": lambda a, b: prohorov_bruteforce(a, b).value,
    }
    violations, checks = [], 0

    def fail(trial, metric, axiom, detail, *ms):
        violations.append({
            "trial": trial,
            "metric": metric,
            "axiom": axiom,
            "detail": detail,
            "measures": [_measure_str(m) for m in ms],
        })

    for t in range(trials):
        x, y, z = (_random_measure(rng, spec) for _ in range(3))
        for name, d in metrics.items():
            dxy, dyx, dyz, dxz = d(x, y), d(y, x), d(y, z), d(x, z)
            dxx = d(x, x)
            checks += 4
            if dxy != dyx:
                fail(t, name, "symmetry", f"d(x,y)={fmt(dxy)} d(y,x)={fmt(dyx)}", x, y)
            if dxx != 0:
                fail(t, name, "identity", f"d(x,x)={fmt(dxx)}", x)
            if (dxy == 0) != (x == y):
                fail(t, name, "identity", f"d(x,y)={fmt(dxy)} with x {'=' if x == y else '!='} y", x, y)
            if dxz > dxy + dyz:
                fail(t, name, "triangle", f"{fmt(dxz)} > {fmt(dxy)} + {fmt(dyz)}", x, y, z)
    return AxiomReport(trials, checks, violations)


# ---------------------------------------------------------------------------
# gap search


@dataclass
class GapRecord:
    label: str
    seed: Optional[int]
    trial: Optional[int]
    mu: Measure
    nu: Measure
    levy: Distance
    prohorov: DistanceReport

    def __post_init__(self):
        if self.gap < 0:
            raise AssertionError(
                f"{self.label}: levy {fmt(self.levy.value)} exceeds prohorov {fmt(self.prohorov.value)}"
            )

    @property
    def gap(self) -> Fraction:
        return self.prohorov.value - self.levy.value

    def to_json(self) -> dict:
        p = self.prohorov
        return {
            "label": self.label,
            "seed": self.seed,
            "trial": self.trial,
            "mu": _measure_str(self.mu),
            "nu": _measure_str(self.nu),
            "levy": rational_json(self.levy.value),
            "prohorov": rational_json(p.value),
            "gap": fmt(self.gap),
            "gap_approx": rational_json(self.gap)["approx"],
            "levy_certificate": {
                "band_violated_at_width": None if self.levy.probe is None else fmt(self.levy.probe),
                "witness_x": None if self.levy.witness_x is None else fmt(self.levy.witness_x),
                "side": self.levy.side,
            },
            "prohorov_certificate": {
                "witness_set": None if p.witness_set is None else str(p.witness_set),
                "side": p.side,
                "violated_at_eps": None if p.probe_below is None else fmt(p.probe_below),
                "attained": p.attained,
            },
        }


def witness_rechecks(record: GapRecord) -> bool:
    """The Prohorov witness set really violates the inequality just below the value."""
    p = record.prohorov
    if p.witness_set is None:
        return p.value == 0
    big, small = (record.mu, record.nu) if p.side == "mu" else (record.nu, record.mu)
    eps = p.probe_below
    return measure_of(big, p.witness_set) > measure_of(small, eps_neighborhood(p.witness_set, eps)) + eps


def curated_pair() -> tuple:
    """A point mass against two symmetric atoms: levy 1/2, prohorov 1."""
    return point_mass(0), make_discrete_measure(LINE, [-1, 1], ["1/2", "1/2"])


def worked_pair() -> tuple:
    """Uniform on [0, 1] against 2/3 at 0 and 1/3 at 1/4: both distances 3/8."""
    return uniform_cdf(), make_discrete_measure(LINE, [0, "1/4"], ["2/3", "1/3"])


def _record(label, seed, trial, mu, nu) -> GapRecord:
    return GapRecord(label, seed, trial, mu, nu, levy_between(mu, nu), prohorov_bruteforce(mu, nu))


def levy_prohorov_gap_search(spec: InstanceSpec, trials: int) -> list:
    """Records for ``trials`` random pairs plus the curated and worked pairs,
    sorted by gap, largest first (ties keep generation order)."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    spec.validate()
    rng = random.Random(spec.seed)
    records = []
    for t in range(trials):
        mu, nu = _random_measure(rng, spec), _random_measure(rng, spec)
        records.append(_record("random", spec.seed, t, mu, nu))
    records.append(_record("curated", None, None, *curated_pair()))
    records.append(_record("worked", None, None, *worked_pair()))
    records.sort(key=lambda r: -r.gap)
    return records


def gap_report_json(spec: InstanceSpec, trials: int, records: list) -> dict:
    gaps = [r for r in records if r.gap > 0]
    return {
        "audited_claim": AUDITED_CLAIM,
        "spec": {
            "seed": spec.seed,
            "min_atoms": spec.min_atoms,
            "max_atoms": spec.max_atoms,
            "lo": fmt(as_rational(spec.lo)),
            "hi": fmt(as_rational(spec.hi)),
            "denom": spec.denom,
        },
        "trials": trials,
        "huber_inequality_holds": all(r.gap >= 0 for r in records),
        "summary": (
            f"gap observed on {len(gaps)} of {len(records)} instances; "
            f"largest gap {fmt(records[0].gap)}"
            if gaps
            else f"no gap observed on {len(records)} instances"
        ),
        "max_gap": records[0].to_json(),
        "records": [r.to_json() for r in records],
    }


def gap_report_csv(records: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["seed", "trial", "levy", "prohorov", "gap"])
    for r in records:
        w.writerow([
            "" if r.seed is None else r.seed,
            r.label if r.trial is None else r.trial,
            fmt(r.levy.value),
            fmt(r.prohorov.value),
            fmt(r.gap),
        ])
    return buf.getvalue()
