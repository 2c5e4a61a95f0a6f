"""Dressed-atom laser in a photonic band-gap cavity.

Parameters are dicts shaped like the "params" table of a run config, e.g.
``{"kappa": 1e-3, "g": 10.0, "drive": {"cos4phi": 0.5}, "gap": {"u_minus": False}}``.
"""

from ._core import (
    DegenerateNullSpaceError,
    DomainError,
    Error,
    HorizonError,
    IterationLimitError,
    ResourceError,
    SingularSystemError,
    StepSizeError,
    TruncationError,
    __version__,
    analytic_distribution,
    dressed_rates,
    kummer_1f1_a1,
    ln_gamma,
    run_check,
    spectrum,
    steady_state,
    sweep,
)

__all__ = [
    "DegenerateNullSpaceError",
    "DomainError",
    "Error",
    "HorizonError",
    "IterationLimitError",
    "ResourceError",
    "SingularSystemError",
    "StepSizeError",
    "TruncationError",
    "__version__",
    "analytic_distribution",
    "dressed_rates",
    "kummer_1f1_a1",
    "ln_gamma",
    "run_check",
    "spectrum",
    "steady_state",
    "sweep",
]
