"""Numerical estimates of the four Lyapunov numbers of a map on a compact
metric space, with a zoo of test systems and an exact full-shift oracle."""

from .estimators import (
    EstimatorConfig,
    LyapunovReport,
    check_inequalities,
    eq_region_probe,
    estimate_all,
    estimate_L1,
    estimate_L2,
    estimate_L3,
    estimate_L4,
    return_time_gaps,
)
from .metric_core import (
    MetricSystem,
    d_f_finite,
    diam_estimate,
    iterate,
    orbit_segment,
    radius_f_finite,
    scale_metric,
    tail_sep,
)
from .report import RunManifest, TheoremCheckResult, theorem_checks
from .shift_oracle import exact_L_estimates, oracle_vs_estimator
from .zoo import SystemSpec, registry, resolve

__version__ = "0.1.0"

__all__ = [
    "EstimatorConfig", "LyapunovReport", "MetricSystem", "RunManifest", "SystemSpec",
    "TheoremCheckResult", "check_inequalities", "d_f_finite", "diam_estimate", "eq_region_probe",
    "estimate_L1", "estimate_L2", "estimate_L3", "estimate_L4", "estimate_all",
    "exact_L_estimates", "iterate", "orbit_segment", "oracle_vs_estimator", "radius_f_finite",
    "registry", "resolve", "return_time_gaps", "scale_metric", "tail_sep", "theorem_checks",
]
