"""Subcarrier-wave QKD: sideband model, key rates, optimizer and Monte-Carlo sessions."""

from .model import (DomainError, SidebandAmplitudes, alice_return_state, beta_deep_modulation,
                    bessel_j, mean_photons_closed_form, mean_photons_dispersive, modulator_matrix,
                    rayleigh_photons)
from .optimize import OptimalPoint, OptimizeSpec, optimal_curve, optimize_point
from .params import (DeviceLosses, DispersionSettings, LossBudget, ModulatorSettings,
                     SystemParams)
from .rates import (RatePoint, Regime, binary_entropy, click_probability, holevo_bs_attack,
                    key_rate, key_rate_decoy, state_overlap)
from .sim import SimConfig, SimSummary, compare_to_analytic, simulate_session

__version__ = "0.1.0"

__all__ = [
    "DeviceLosses", "DispersionSettings", "DomainError", "LossBudget", "ModulatorSettings",
    "OptimalPoint", "OptimizeSpec", "RatePoint", "Regime", "SidebandAmplitudes", "SimConfig",
    "SimSummary", "SystemParams", "alice_return_state", "beta_deep_modulation", "bessel_j",
    "binary_entropy", "click_probability", "compare_to_analytic", "holevo_bs_attack",
    "key_rate", "key_rate_decoy", "mean_photons_closed_form", "mean_photons_dispersive",
    "modulator_matrix", "optimal_curve", "optimize_point", "rayleigh_photons",
    "simulate_session", "state_overlap",
]
