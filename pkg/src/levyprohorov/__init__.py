"""Exact Lévy, Kolmogorov and Prohorov distances with certificates."""
from .audit import (
    GapRecord,
    InstanceSpec,
    levy_prohorov_gap_search,
    metric_axiom_fuzz,
    random_instance,
)
from .convergence import (
    helly_subsequence,
    levy_convergence_profile,
    portmanteau_report,
    quantize,
    tightness_witness,
)
from .io import ParseError, parse_measure_file, parse_sequence_file, write_measure_file
from .levy import kolmogorov_distance, levy_distance, levy_feasible, levy_onesided
from .measures import (
    LINE,
    DiscreteMeasure,
    FiniteMetricSpace,
    IntervalUnion,
    MeasureError,
    PiecewiseCdf,
    PointSet,
    SpaceMismatchError,
    cdf_of,
    eps_neighborhood,
    make_discrete_measure,
    measure_of,
    point_mass,
    uniform_cdf,
)
from .prohorov import (
    DistanceReport,
    EnumerationCapError,
    prohorov_bruteforce,
    prohorov_feasible,
    prohorov_onesided,
)
from .rational import as_rational, fmt
from .transport import Coupling, max_flow, prohorov_via_flow, strassen_feasible

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
