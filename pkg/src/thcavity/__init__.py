"""Cavity-coupled thorium-229 nuclear ensembles: coupling strength, truncated
Lindblad and mean-field dynamics, Dicke superradiance, storage sweeps, and the
coupling-regime map."""

__version__ = "0.1.0"

from .coupling import (
    THORIUM_229,
    CollectiveRates,
    DerivedCoupling,
    NuclearTransition,
    collective_rates,
    coupling_strength,
    derived_coupling,
    dipole_moment_from_lifetime,
    vacuum_field,
)
from .params import ModelParams, TimeSeries

__all__ = [
    "__version__",
    "THORIUM_229",
    "CollectiveRates",
    "DerivedCoupling",
    "NuclearTransition",
    "collective_rates",
    "coupling_strength",
    "derived_coupling",
    "dipole_moment_from_lifetime",
    "vacuum_field",
    "ModelParams",
    "TimeSeries",
]
