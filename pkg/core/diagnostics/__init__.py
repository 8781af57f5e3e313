# Core diagnostics package
from core.diagnostics.observables import MomentaSample, momenta, energy_balance_residual
from core.diagnostics.precision_quotient import (
    QuotientSeries,
    ScheduledRun,
    quotient_I,
    quotient_II,
    first_quotient,
    second_quotient,
    run_resolutions,
    sample_states,
)

__all__ = [
    "MomentaSample",
    "momenta",
    "energy_balance_residual",
    "QuotientSeries",
    "ScheduledRun",
    "quotient_I",
    "quotient_II",
    "first_quotient",
    "second_quotient",
    "run_resolutions",
    "sample_states",
]
