"""Networked SIR epidemics coupled to opinion dynamics."""
from .graph import (
    GraphError,
    NotStronglyConnectedError,
    OpinionNetwork,
    RecoveryRates,
    TransmissionMatrix,
    build_opinion_network,
    build_recovery,
    build_transmission,
)
from .integrator import IntegrationError, Trajectory, integrate, step
from .model import IntegrationSettings, Scenario, SystemState, derivative
from .scenario_gen import PRESETS, ScenarioRecipe, generate, preset
from .spectral import (
    effective_reproduction_number,
    growth_spectrum,
    reproduction_bounds,
    spectral_abscissa_metzler,
    spectral_radius,
)

__version__ = "0.1.0"
