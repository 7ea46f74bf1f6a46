"""SI-facing relativistic kinematics: zitter period, Lorentz-contracted impact
parameter, collision time, energy-time resolution and the regime verdict.

Energies are in eV, lengths in cm, times in seconds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

from .errors import MasslessParticleError, PhysicsError


@dataclass(frozen=True)
class PhysicalConstants:
    electron_rest_energy_ev: float = 510998.95
    planck_js: float = 6.62607015e-34
    c_cm_per_s: float = 2.99792458e10
    joule_per_ev: float = 1.602176634e-19
    # reference value quoted alongside the spectroscopy argument, in eV
    rydberg_reference_ev: float = 13.5056981


CONSTANTS = PhysicalConstants()
M_E_C2 = CONSTANTS.electron_rest_energy_ev

POINT_LIKE_BELOW = 1e-3
EXTENDED_ABOVE = 1e3


class Regime(Enum):
    POINT_LIKE = "PointLike"
    EXTENDED = "Extended"
    MARGINAL = "Marginal"


@dataclass(frozen=True)
class RegimeVerdict:
    ratio: float
    verdict: Regime


@dataclass(frozen=True)
class CollisionScenario:
    energy_ev: float
    b_perp_cm: float

    def __post_init__(self):
        if not (math.isfinite(self.energy_ev) and self.energy_ev >= M_E_C2):
            raise PhysicsError(f"beam energy {self.energy_ev} eV is below the rest energy {M_E_C2} eV")
        if not (math.isfinite(self.b_perp_cm) and self.b_perp_cm > 0):
            raise PhysicsError(f"impact parameter must be positive, got {self.b_perp_cm} cm")


class UncertaintyTime(NamedTuple):
    delta_t: float
    ratio: float


def zitter_period(mass_energy_ev: float = M_E_C2) -> float:
    """T = h / (m c^2), twice the Zitterbewegung period, in seconds."""
    if not mass_energy_ev > 0:
        raise MasslessParticleError(
            f"no zitter period for rest energy {mass_energy_ev} eV; the particle must be massive")
    return CONSTANTS.planck_js / (mass_energy_ev * CONSTANTS.joule_per_ev)


def compton_wavelength(mass_energy_ev: float = M_E_C2) -> float:
    """lambda_C = c T in cm."""
    return CONSTANTS.c_cm_per_s * zitter_period(mass_energy_ev)


def gamma_inverse(energy_ev: float) -> float:
    """sqrt(1 - beta^2) = m_e c^2 / E."""
    if not (math.isfinite(energy_ev) and energy_ev >= M_E_C2):
        raise PhysicsError(f"energy {energy_ev} eV is below the electron rest energy")
    return M_E_C2 / energy_ev


def contracted_impact(b_perp_cm: float, energy_ev: float) -> float:
    if not b_perp_cm > 0:
        raise PhysicsError(f"impact parameter must be positive, got {b_perp_cm} cm")
    return b_perp_cm * gamma_inverse(energy_ev)


def collision_time(scenario: CollisionScenario) -> float:
    # v = c, as for ultra-relativistic beams
    return contracted_impact(scenario.b_perp_cm, scenario.energy_ev) / CONSTANTS.c_cm_per_s


def uncertainty_time(delta_w_ev: float) -> UncertaintyTime:
    """Time resolution implied by (delta_w / m_e c^2)(delta_t / T_Z) = 1."""
    if not (math.isfinite(delta_w_ev) and delta_w_ev > 0):
        raise PhysicsError(f"energy resolution must be positive, got {delta_w_ev} eV")
    ratio = M_E_C2 / delta_w_ev
    return UncertaintyTime(ratio * zitter_period(), ratio)


def classify_regime(probe_time_s: float) -> RegimeVerdict:
    if not (math.isfinite(probe_time_s) and probe_time_s > 0):
        raise PhysicsError(f"probe time must be positive, got {probe_time_s} s")
    ratio = probe_time_s / zitter_period()
    if ratio < POINT_LIKE_BELOW:
        verdict = Regime.POINT_LIKE
    elif ratio > EXTENDED_ABOVE:
        verdict = Regime.EXTENDED
    else:
        verdict = Regime.MARGINAL
    return RegimeVerdict(ratio, verdict)
