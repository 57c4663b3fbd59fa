"""Grid certification of growth, stability, dichotomy and trichotomy inequalities."""

from .bounds import BoundSpec, as_bound
from .certificate import SCHEMA, Certificate, rows_to_csv
from .checks import (
    DEFAULT_TOL,
    check_backward_bound,
    check_dichotomy,
    check_forward_bound,
    check_rate_ordering,
    check_trichotomy,
)
from .estimate import (
    DIVERGENCE_THRESHOLD,
    Envelope,
    ExponentFit,
    ProbeReport,
    Witness,
    envelope_estimate,
    estimate_exponent,
    uniformity_probe,
)
from .integral import (
    dichotomy_integral_constants,
    integral_dichotomy,
    integral_trichotomy,
    trichotomy_integral_constants,
)

__all__ = [
    "BoundSpec", "as_bound", "SCHEMA", "Certificate", "rows_to_csv", "DEFAULT_TOL",
    "check_backward_bound", "check_dichotomy", "check_forward_bound", "check_rate_ordering",
    "check_trichotomy", "DIVERGENCE_THRESHOLD", "Envelope", "ExponentFit", "ProbeReport", "Witness",
    "envelope_estimate", "estimate_exponent", "uniformity_probe", "dichotomy_integral_constants",
    "integral_dichotomy", "integral_trichotomy", "trichotomy_integral_constants",
]
