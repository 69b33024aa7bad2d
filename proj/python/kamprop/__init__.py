"""KAM superconvergent propagators for pulse-driven two-level systems.

Thin wrapper over the C++ core. Two-level operators are returned as 2x2
complex numpy arrays, Pauli vectors as 3-element lists.
"""

from ._kamprop import (
    CSV_HEADER,
    ConfigError,
    IntegrationError,
    KamHierarchy,
    PulseShape,
    autonomous_average,
    delta_n,
    experiment_pulse,
    final_state_errors,
    kam_state,
    next_level,
    reference_state,
    remainder_truncated,
    run_sweep,
    v1_at,
    xi_gamma,
)

__all__ = [
    "CSV_HEADER",
    "ConfigError",
    "IntegrationError",
    "KamHierarchy",
    "PulseShape",
    "autonomous_average",
    "delta_n",
    "experiment_pulse",
    "final_state_errors",
    "kam_state",
    "next_level",
    "reference_state",
    "remainder_truncated",
    "run_sweep",
    "v1_at",
    "xi_gamma",
]
