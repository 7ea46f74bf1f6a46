"""
Momentum-space Dirac wavepackets on a tensor quadrature grid.

Each grid node carries a positive-energy amplitude ``a`` and a negative-energy
amplitude ``b`` at the same momentum p, i.e. the packet is

    psi(r, t) = sum_p w(p) [a(p) e^{2 pi i (W t - p.r)} + b(p) e^{2 pi i (-W t - p.r)}]

and every observable is reduced to sums over nodes weighted by w(p).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.typing import ArrayLike

from .dirac_core import EnergyBranch, SpinLabel, plane_wave_spinors
from .errors import PhysicsError

#: Threshold on max b^dagger b below which a packet counts as purely positive-energy.
PURE_POSITIVE_THRESHOLD = 1e-24


@dataclass(frozen=True)
class PacketSpec:
    """Gaussian packet parameters; momenta and spreads are in m_e c."""

    p0: tuple[float, float, float] = (0.0, 0.0, 0.0)
    sigma: float = 0.01
    epsilon: float = 0.0
    delta: float = 0.0
    spin: SpinLabel = SpinLabel.UP
    nodes: int = 21
    cutoff: float = 5.0

    def as_dict(self) -> dict:
        return {"p0": list(self.p0), "sigma": self.sigma, "epsilon": self.epsilon,
                "delta": self.delta, "spin": self.spin.value, "nodes": self.nodes,
                "cutoff": self.cutoff}


@dataclass(frozen=True)
class MomentumMode:
    p: np.ndarray
    weight: float
    W: float
    a: np.ndarray
    b: np.ndarray


def _readonly(x: ArrayLike, dtype) -> np.ndarray:
    arr = np.array(x, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PacketState:
    """
    Immutable packet: node momenta (N, 3), weights (N,), energies (N,) and
    amplitude stacks ``a``, ``b`` of shape (N, 4).

    ``norm_report`` is the total norm measured before the last normalisation.
    """

    momenta: np.ndarray
    weights: np.ndarray
    energies: np.ndarray
    a: np.ndarray
    b: np.ndarray
    norm_report: float = 1.0
    spec: PacketSpec | None = None

    def __post_init__(self):
        object.__setattr__(self, "momenta", _readonly(self.momenta, np.float64).reshape(-1, 3))
        n = self.momenta.shape[0]
        for name, dtype, shape in (("weights", np.float64, (n,)), ("energies", np.float64, (n,)),
                                   ("a", np.complex128, (n, 4)), ("b", np.complex128, (n, 4))):
            arr = _readonly(getattr(self, name), dtype)
            if arr.shape != shape:
                raise ValueError(f"{name} has shape {arr.shape}, expected {shape}")
            object.__setattr__(self, name, arr)
        if np.any(self.weights < 0):
            raise ValueError("quadrature weights must be non-negative")

    @classmethod
    def from_modes(cls, modes, norm_report: float = 1.0, spec: PacketSpec | None = None) -> "PacketState":
        modes = list(modes)
        return cls(
            momenta=np.array([m.p for m in modes], dtype=np.float64).reshape(-1, 3),
            weights=[m.weight for m in modes],
            energies=[m.W for m in modes],
            a=np.array([m.a for m in modes], dtype=np.complex128).reshape(-1, 4),
            b=np.array([m.b for m in modes], dtype=np.complex128).reshape(-1, 4),
            norm_report=norm_report,
            spec=spec,
        )

    def __len__(self) -> int:
        return self.momenta.shape[0]

    @cached_property
    def modes(self) -> tuple[MomentumMode, ...]:
        return tuple(
            MomentumMode(self.momenta[i], float(self.weights[i]), float(self.energies[i]),
                         self.a[i], self.b[i])
            for i in range(len(self))
        )

    @property
    def norm(self) -> float:
        dens = np.sum(np.abs(self.a) ** 2, axis=1) + np.sum(np.abs(self.b) ** 2, axis=1)
        return float(np.sum(self.weights * dens))

    def scaled(self, factor: complex) -> "PacketState":
        return PacketState(self.momenta, self.weights, self.energies, self.a * factor,
                           self.b * factor, self.norm_report, self.spec)


def _validate_grid(spec: PacketSpec) -> None:
    if not (spec.sigma > 0 and math.isfinite(spec.sigma)):
        raise PhysicsError(f"sigma must be positive and finite, got {spec.sigma}")
    if int(spec.nodes) != spec.nodes or spec.nodes < 1:
        raise PhysicsError(f"nodes must be a positive integer, got {spec.nodes}")
    if not (spec.cutoff > 0 and math.isfinite(spec.cutoff)):
        raise PhysicsError(f"cutoff must be positive and finite, got {spec.cutoff}")


def axis_rule(nodes: int, half_width: float) -> tuple[np.ndarray, np.ndarray]:
    """One-dimensional trapezoidal nodes and weights on [-half_width, half_width]."""
    if nodes == 1:
        return np.zeros(1), np.ones(1)
    x = np.linspace(-half_width, half_width, nodes)
    h = 2.0 * half_width / (nodes - 1)
    w = np.full(nodes, h)
    w[0] = w[-1] = 0.5 * h
    return x, w


def build_grid(spec: PacketSpec) -> tuple[np.ndarray, np.ndarray]:
    """
    Tensor trapezoidal grid around ``spec.p0``.

    Returns momenta of shape (nodes**3, 3) in C order over (x, y, z) and the
    matching product weights. A single-node grid is the point p0 with weight 1.
    """
    _validate_grid(spec)
    x, w = axis_rule(int(spec.nodes), spec.cutoff * spec.sigma)
    gx, gy, gz = np.meshgrid(x, x, x, indexing="ij")
    momenta = np.stack([gx, gy, gz], axis=-1).reshape(-1, 3) + np.asarray(spec.p0, dtype=np.float64)
    weights = (w[:, None, None] * w[None, :, None] * w[None, None, :]).reshape(-1)
    return momenta, weights


def gaussian_packet(spec: PacketSpec) -> PacketState:
    """
    Gaussian packet with envelope g = exp(-|p - p0|^2 / 4 sigma^2).

    a = sqrt(1 - eps^2) g u(p, spin) and b = eps e^{i delta} g v(p, flipped spin),
    then normalised. The negative-energy partner carries the opposite spin label
    so that at rest the alpha_1 cross term a^dagger alpha_1 b is non-zero.
    """
    if not (0.0 <= spec.epsilon <= 1.0):
        raise PhysicsError(f"epsilon must lie in [0, 1], got {spec.epsilon}")
    if not math.isfinite(spec.delta):
        raise PhysicsError("delta must be finite")
    momenta, weights = build_grid(spec)
    W = np.sqrt(1.0 + np.sum(momenta * momenta, axis=1))
    d = momenta - np.asarray(spec.p0, dtype=np.float64)
    g = np.exp(-np.sum(d * d, axis=1) / (4.0 * spec.sigma ** 2))

    u = plane_wave_spinors(momenta, EnergyBranch.POSITIVE, spec.spin)
    v = plane_wave_spinors(momenta, EnergyBranch.NEGATIVE, spec.spin.flipped)
    a = math.sqrt(1.0 - spec.epsilon ** 2) * g[:, None] * u
    b = (spec.epsilon * np.exp(1j * spec.delta)) * g[:, None] * v
    return normalize(PacketState(momenta, weights, W, a, b, spec=spec))


def normalize(state: PacketState) -> PacketState:
    norm = state.norm
    if not (norm > 0 and math.isfinite(norm)):
        raise PhysicsError(f"cannot normalise a packet with norm {norm}")
    s = 1.0 / math.sqrt(norm)
    return PacketState(state.momenta, state.weights, state.energies, state.a * s,
                       state.b * s, norm_report=norm, spec=state.spec)


def is_pure_positive(state: PacketState) -> bool:
    if len(state) == 0:
        return True
    return float(np.max(np.sum(np.abs(state.b) ** 2, axis=1))) < PURE_POSITIVE_THRESHOLD
