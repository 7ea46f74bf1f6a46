"""
Free Dirac algebra in the standard (Dirac) representation.

UNITS: electron units, m_e = c = h = 1 (h is Planck's constant, not reduced).
Energies are in m_e c^2 and momenta in m_e c, so H(p) = alpha . p + beta.

Spinors are plain ``numpy`` arrays of shape (4,) (or (N, 4) for stacks) with
dtype complex128; 4x4 matrices are (4, 4) complex128 arrays.
"""
from __future__ import annotations

from enum import Enum

import numpy as np
from numpy.typing import ArrayLike, NDArray

FourSpinor = NDArray[np.complex128]
ComplexMatrix4 = NDArray[np.complex128]


class EnergyBranch(Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


class SpinLabel(Enum):
    UP = "up"
    DOWN = "down"

    @property
    def flipped(self) -> "SpinLabel":
        return SpinLabel.DOWN if self is SpinLabel.UP else SpinLabel.UP


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


SIGMA = _frozen(np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=np.complex128))

_Z2 = np.zeros((2, 2), dtype=np.complex128)
_I2 = np.eye(2, dtype=np.complex128)

ALPHA = _frozen(np.array([np.block([[_Z2, s], [s, _Z2]]) for s in SIGMA]))
BETA = _frozen(np.block([[_I2, _Z2], [_Z2, -_I2]]))

_CHI = {SpinLabel.UP: np.array([1, 0], dtype=np.complex128),
        SpinLabel.DOWN: np.array([0, 1], dtype=np.complex128)}


def dirac_matrices() -> tuple[ComplexMatrix4, ComplexMatrix4, ComplexMatrix4, ComplexMatrix4]:
    """Return fresh copies of (alpha_1, alpha_2, alpha_3, beta)."""
    return ALPHA[0].copy(), ALPHA[1].copy(), ALPHA[2].copy(), BETA.copy()


def _as_momenta(p: ArrayLike) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    if p.shape[-1] != 3:
        raise ValueError(f"momentum must have a trailing axis of length 3, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError("momentum must be finite")
    return p


def energy(p: ArrayLike) -> float | np.ndarray:
    """Relativistic energy W = sqrt(1 + |p|^2); vectorised over leading axes."""
    p = _as_momenta(p)
    W = np.sqrt(1.0 + np.sum(p * p, axis=-1))
    return float(W) if W.ndim == 0 else W


def hamiltonian(p: ArrayLike) -> ComplexMatrix4:
    """Free Dirac Hamiltonian alpha . p + beta at a single momentum."""
    p = _as_momenta(p)
    return np.tensordot(p, ALPHA, axes=(0, 0)) + BETA


def _sigma_dot(p: np.ndarray, chi: np.ndarray) -> np.ndarray:
    # (N, 3) momenta, (2,) two-spinor -> (N, 2)
    return np.einsum("ni,ijk,k->nj", p, SIGMA, chi)


def plane_wave_spinors(p: ArrayLike, branch: EnergyBranch, spin: SpinLabel) -> np.ndarray:
    """
    Closed-form unit eigenspinors of H(p) for a stack of momenta.

    Positive branch: N (chi, sigma.p chi / (W+1)); negative branch:
    N (-sigma.p chi / (W+1), chi), with N = sqrt((W+1)/(2W)). The spin label
    selects chi in the upper (positive) or lower (negative) two-spinor, so at
    p = 0 the four spinors are the canonical basis vectors. The chi entry is
    always the largest-magnitude component and is real positive, which is the
    phase convention.
    """
    p = np.atleast_2d(_as_momenta(p))
    W = np.sqrt(1.0 + np.sum(p * p, axis=-1))
    norm = np.sqrt((W + 1.0) / (2.0 * W))
    chi = _CHI[spin]
    small = _sigma_dot(p, chi) / (W + 1.0)[:, None]
    big = np.broadcast_to(chi, small.shape)
    if branch is EnergyBranch.POSITIVE:
        out = np.concatenate([big, small], axis=1)
    else:
        out = np.concatenate([-small, big], axis=1)
    return out * norm[:, None]


def plane_wave_spinor(p: ArrayLike, branch: EnergyBranch, spin: SpinLabel) -> FourSpinor:
    return plane_wave_spinors(np.reshape(_as_momenta(p), (1, 3)), branch, spin)[0]


def energy_projector(p: ArrayLike, branch: EnergyBranch) -> ComplexMatrix4:
    """Projector (W +/- H)/(2W) onto the requested energy eigenspace."""
    W = energy(p)
    sign = 1.0 if branch is EnergyBranch.POSITIVE else -1.0
    return (W * np.eye(4) + sign * hamiltonian(p)) / (2.0 * W)


def quadratic_form(phi: ArrayLike, M: ArrayLike, psi: ArrayLike) -> complex:
    """Return phi^dagger M psi."""
    return complex(np.vdot(np.asarray(phi), np.asarray(M) @ np.asarray(psi)))
