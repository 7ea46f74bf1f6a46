"""Zitterbewegung of free Dirac wavepackets in electron units (m_e = c = h = 1)."""

__version__ = "0.1.0"

from .dirac_core import (EnergyBranch, SpinLabel, dirac_matrices, energy, hamiltonian,
                         plane_wave_spinor, quadratic_form)
from .errors import MasslessParticleError, NotNormalizedError, PhysicsError, ZitterError
from .wavepacket import (MomentumMode, PacketSpec, PacketState, build_grid, gaussian_packet,
                         is_pure_positive, normalize)
from .zitterbewegung import (dwell_density, expected_velocity, mode_trajectory,
                             observability_filter, simulate, velocity_components, zb_mode,
                             zb_position)

__all__ = [
    "EnergyBranch", "SpinLabel", "dirac_matrices", "energy", "hamiltonian", "plane_wave_spinor",
    "quadratic_form", "MasslessParticleError", "NotNormalizedError", "PhysicsError", "ZitterError",
    "MomentumMode", "PacketSpec", "PacketState", "build_grid", "gaussian_packet", "is_pure_positive",
    "normalize", "dwell_density", "expected_velocity", "mode_trajectory", "observability_filter",
    "simulate", "velocity_components", "zb_mode", "zb_position",
]
