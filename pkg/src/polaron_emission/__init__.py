"""Polaron master-equation model of a driven quantum-dot emitter.

Units throughout: hbar = 1, times in ps, frequencies in 1/ps, temperatures in K.
"""
from .dynamics import (
    CorrelationSeries,
    DriveConfig,
    Liouvillian,
    build_liouvillian,
    evolve_density,
    regression_correlator,
    steady_state,
)
from .emission import (
    Spectrum,
    coherent_fraction,
    first_order_coherence,
    g1_total,
    incoherent_spectrum,
    power_budget,
    sideband_power_fraction,
)
from .errors import (
    ConfigurationError,
    DomainError,
    PolaronEmissionError,
    QuadratureError,
    ResolutionError,
    SteadyStateError,
    UndefinedQuantityError,
)
from .hom import (
    DetectorModel,
    HomResult,
    detector_convolved_g2,
    dip_depth_sweep,
    g2_hom,
    hom_pipeline,
)
from .phonon import (
    PhononCorrelations,
    PhononEnvironment,
    PolaronQuantities,
    displacement_factor,
    phonon_correlations,
    polaron_rates,
    spectral_density,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "CorrelationSeries",
    "DetectorModel",
    "DomainError",
    "DriveConfig",
    "HomResult",
    "Liouvillian",
    "PhononCorrelations",
    "PhononEnvironment",
    "PolaronEmissionError",
    "PolaronQuantities",
    "QuadratureError",
    "ResolutionError",
    "Spectrum",
    "SteadyStateError",
    "UndefinedQuantityError",
    "build_liouvillian",
    "coherent_fraction",
    "detector_convolved_g2",
    "dip_depth_sweep",
    "displacement_factor",
    "evolve_density",
    "first_order_coherence",
    "g1_total",
    "g2_hom",
    "hom_pipeline",
    "incoherent_spectrum",
    "phonon_correlations",
    "polaron_rates",
    "power_budget",
    "regression_correlator",
    "sideband_power_fraction",
    "spectral_density",
    "steady_state",
]
