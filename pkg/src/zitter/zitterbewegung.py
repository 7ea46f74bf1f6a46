"""
Expected velocity and Zitterbewegung observables of a momentum-space packet.

For every node the expectation of alpha_i splits into a drift part
a^dagger alpha_i a + b^dagger alpha_i b and an interference part

    2 Re(C_i e^{-i omega t}),   C_i = a^dagger alpha_i b,   omega = 4 pi W,

with t in units of T_Z = h / m_e c^2. Writing A_i = 2|C_i| and phi_i = -arg C_i
gives the oscillation A_i cos(omega t + phi_i) and, integrated from t = 0, the
displacement (A_i / omega) [sin(omega t + phi_i) - sin(phi_i)] in units of the
Compton wavelength.

The velocity kernel is +alpha. Writing the velocity as -c alpha_1 only flips the
global sign of velocity and displacement traces.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from .dirac_core import ALPHA
from .errors import NotNormalizedError, PhysicsError
from .wavepacket import MomentumMode, PacketState

VELOCITY_SIGN_CONVENTION = "+alpha (velocity operator c*alpha; the -c*alpha_1 form flips only the global sign)"
NORM_TOLERANCE = 1e-10
# Rows of the (time x mode) phase matrix evaluated per block; bounds peak memory.
_TIME_BLOCK = 64

AXES = ("x", "y", "z")


@dataclass(frozen=True)
class ZbMode:
    p: np.ndarray
    weight: float
    omega: float
    amplitude: np.ndarray
    phase: np.ndarray


@dataclass(frozen=True)
class VelocitySample:
    t: float
    v_total: np.ndarray
    v_E: np.ndarray
    v_Z: np.ndarray


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled velocity split and ZB displacement; arrays are (T, 3)."""

    t: np.ndarray
    v_E: np.ndarray
    v_Z: np.ndarray
    x_Z: np.ndarray
    dt: float

    @property
    def v_total(self) -> np.ndarray:
        return self.v_E + self.v_Z

    def __len__(self) -> int:
        return self.t.shape[0]

    @property
    def samples(self) -> list[VelocitySample]:
        return [VelocitySample(float(self.t[k]), self.v_E[k] + self.v_Z[k], self.v_E[k], self.v_Z[k])
                for k in range(len(self))]

    @classmethod
    def empty(cls, dt: float = 1.0) -> "TimeSeries":
        z = np.zeros((0, 3))
        return cls(np.zeros(0), z, z, z, dt)


@dataclass(frozen=True)
class DwellHistogram:
    """
    Dwell-time histogram of x(t) = A sin(omega t + phi) on [-A, A].

    ``density`` is the sampled histogram and ``closed_form`` the arcsine law
    averaged over each bin (unit mass by construction); both are probability
    per unit length. ``closed_form_center`` is the pointwise law at bin centres.
    """

    axis: str
    amplitude: float
    bin_edges: np.ndarray
    density: np.ndarray
    closed_form: np.ndarray
    n_samples: int

    @property
    def bin_centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    @property
    def bin_widths(self) -> np.ndarray:
        return np.diff(self.bin_edges)

    @property
    def mass(self) -> float:
        return float(np.sum(self.density * self.bin_widths))

    @property
    def closed_form_center(self) -> np.ndarray:
        return arcsine_density(self.bin_centers, self.amplitude)

    def l1_distance(self) -> float:
        return float(np.sum(np.abs(self.density - self.closed_form) * self.bin_widths))


@dataclass(frozen=True)
class TimeAveragedReport:
    """
    Outcome of the observability check.

    When ``averaged`` is true the time resolution exceeds the ZB period and the
    report carries stationary observables plus per-mode dwell densities;
    otherwise ``series`` holds the raw oscillating traces.
    """

    averaged: bool
    resolution_ratio: float
    period: float
    v_E: np.ndarray
    mean_zb_displacement: np.ndarray | None = None
    zb_center: np.ndarray | None = None
    densities: tuple[tuple[int, str, DwellHistogram], ...] = ()
    series: TimeSeries | None = None


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    points: np.ndarray


# ---------------------------------------------------------------------------
# per-node coefficients

def _require_normalized(state: PacketState) -> None:
    norm = state.norm
    if not abs(norm - 1.0) <= NORM_TOLERANCE:
        raise NotNormalizedError(f"packet norm is {norm!r}, expected 1")


def _bilinear(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    # x_n^dagger alpha_i y_n for every node n and axis i -> (N, 3)
    return np.einsum("nj,ijk,nk->ni", x.conj(), ALPHA, y)


def drift_terms(state: PacketState) -> np.ndarray:
    """Per-node a^dagger alpha a + b^dagger alpha b, shape (N, 3)."""
    return (_bilinear(state.a, state.a) + _bilinear(state.b, state.b)).real


def cross_terms(state: PacketState) -> np.ndarray:
    """Per-node C = a^dagger alpha b, shape (N, 3)."""
    return _bilinear(state.a, state.b)


def angular_frequencies(state: PacketState) -> np.ndarray:
    return 4.0 * np.pi * state.energies


def _polar(C: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    amp = 2.0 * np.abs(C)
    phase = -np.angle(C)
    phase = np.where(phase <= -np.pi, phase + 2.0 * np.pi, phase) + 0.0  # drop -0.0
    return amp, phase


# ---------------------------------------------------------------------------
# time-domain observables

def _stationary_velocity(state: PacketState) -> np.ndarray:
    return np.sum(state.weights[:, None] * drift_terms(state), axis=0)


def _oscillating_velocity(state: PacketState, t: np.ndarray) -> np.ndarray:
    """Sum over nodes of w 2 Re(C e^{-i omega t}) for a 1-d array of times -> (T, 3)."""
    wC = 2.0 * state.weights[:, None] * cross_terms(state)
    omega = angular_frequencies(state)
    out = np.empty((t.shape[0], 3))
    for s in range(0, t.shape[0], _TIME_BLOCK):
        ph = np.exp(-1j * np.outer(t[s:s + _TIME_BLOCK], omega))
        out[s:s + _TIME_BLOCK] = np.sum((ph[:, :, None] * wC[None, :, :]).real, axis=1)
    return out


def _displacement(state: PacketState, t: np.ndarray) -> np.ndarray:
    amp, phase = _polar(cross_terms(state))
    omega = angular_frequencies(state)
    scale = state.weights[:, None] * amp / omega[:, None]
    offset = np.sin(phase)
    out = np.empty((t.shape[0], 3))
    for s in range(0, t.shape[0], _TIME_BLOCK):
        arg = np.outer(t[s:s + _TIME_BLOCK], omega)[:, :, None] + phase[None, :, :]
        out[s:s + _TIME_BLOCK] = np.sum(scale[None] * (np.sin(arg) - offset[None]), axis=1)
    return out


def _times(t: ArrayLike) -> tuple[np.ndarray, bool]:
    arr = np.asarray(t, dtype=np.float64)
    return np.atleast_1d(arr).ravel(), arr.ndim == 0


def expected_velocity(state: PacketState, t: ArrayLike) -> np.ndarray:
    """<alpha>(t) in units of c; shape (3,) for scalar t, (T, 3) for an array."""
    _require_normalized(state)
    ts, scalar = _times(t)
    v = _stationary_velocity(state)[None, :] + _oscillating_velocity(state, ts)
    return v[0] if scalar else v


def velocity_components(state: PacketState, t: float) -> VelocitySample:
    _require_normalized(state)
    v_E = _stationary_velocity(state)
    v_Z = _oscillating_velocity(state, np.array([float(t)]))[0]
    return VelocitySample(float(t), v_E + v_Z, v_E, v_Z)


def zb_mode(mode: MomentumMode) -> ZbMode:
    C = np.einsum("j,ijk,k->i", np.conj(mode.a), ALPHA, mode.b)
    amp, phase = _polar(C)
    return ZbMode(np.asarray(mode.p), float(mode.weight), 4.0 * np.pi * float(mode.W), amp, phase)


def zb_modes(state: PacketState) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised ``zb_mode`` over a packet: (amplitudes, phases, omegas)."""
    amp, phase = _polar(cross_terms(state))
    return amp, phase, angular_frequencies(state)


def zb_position(state: PacketState, t: ArrayLike) -> np.ndarray:
    """ZB displacement in Compton wavelengths, zero at t = 0."""
    _require_normalized(state)
    ts, scalar = _times(t)
    x = _displacement(state, ts)
    return x[0] if scalar else x


def zb_center(state: PacketState) -> np.ndarray:
    """Time-averaged ZB displacement, i.e. the centre the oscillation runs around."""
    amp, phase, omega = zb_modes(state)
    return -np.sum(state.weights[:, None] * amp / omega[:, None] * np.sin(phase), axis=0)


def mode_period(mode: MomentumMode) -> float:
    return 1.0 / (2.0 * float(mode.W))


def mode_trajectory(mode: MomentumMode, n_samples: int) -> np.ndarray:
    """
    One period of this node's contribution to the ZB displacement, (n_samples, 3).

    The node weight is included, so summing trajectories over a packet at equal
    times reproduces ``zb_position`` whenever all nodes share one energy.
    """
    if n_samples < 2:
        raise PhysicsError(f"n_samples must be at least 2, got {n_samples}")
    zm = zb_mode(mode)
    t = trajectory_times(mode, n_samples)
    arg = zm.omega * t[:, None] + zm.phase[None, :]
    # exact closure: the last sample is one full period after the first
    arg[-1] = 2.0 * np.pi + zm.phase
    return zm.weight * zm.amplitude / zm.omega * (np.sin(arg) - np.sin(zm.phase))


def trajectory_times(mode: MomentumMode, n_samples: int) -> np.ndarray:
    return np.linspace(0.0, mode_period(mode), n_samples)


# ---------------------------------------------------------------------------
# dwell-time densities

def arcsine_density(x: ArrayLike, amplitude: float) -> np.ndarray:
    """Dwell density 1 / (pi sqrt(A^2 - x^2)) of a sinusoid of amplitude A; zero outside (-A, A)."""
    x = np.asarray(x, dtype=np.float64)
    inside = np.abs(x) < amplitude
    out = np.zeros_like(x)
    out[inside] = 1.0 / (np.pi * np.sqrt(amplitude ** 2 - x[inside] ** 2))
    return out


def arcsine_bin_masses(edges: np.ndarray, amplitude: float) -> np.ndarray:
    """Exact probability in each bin from the arcsine CDF."""
    u = np.clip(edges / amplitude, -1.0, 1.0)
    return np.diff(np.arcsin(u)) / np.pi


def dwell_density(amplitude: float, n_bins: int = 64, n_samples: int = 1_000_000, *,
                  axis: str = "x", phase: float = 0.0, n_periods: int = 1009) -> DwellHistogram:
    """
    Histogram x(t) = A sin(omega t + phase) sampled uniformly in time over
    ``n_periods`` periods.

    Samples sit at t_k = (k + 1/2) n_periods / n_samples periods; the phases are
    computed in integer arithmetic so they stay exact for large sample counts.
    With n_periods coprime to n_samples every sample lands on a distinct phase.
    """
    if not (amplitude > 0 and math.isfinite(amplitude)):
        raise PhysicsError(f"amplitude must be positive, got {amplitude}")
    if n_bins < 2:
        raise PhysicsError(f"n_bins must be at least 2, got {n_bins}")
    if n_samples < 1:
        raise PhysicsError(f"n_samples must be positive, got {n_samples}")
    k = np.arange(n_samples, dtype=np.int64)
    frac = ((2 * k + 1) * n_periods % (2 * n_samples)) / (2.0 * n_samples)
    x = amplitude * np.sin(2.0 * np.pi * frac + phase)

    edges = np.linspace(-amplitude, amplitude, n_bins + 1)
    counts, _ = np.histogram(x, bins=edges)
    widths = np.diff(edges)
    density = counts / (counts.sum() * widths)
    closed = arcsine_bin_masses(edges, amplitude) / widths
    return DwellHistogram(axis, float(amplitude), edges, density, closed, int(n_samples))


# ---------------------------------------------------------------------------
# drivers

def zb_period(state: PacketState) -> float:
    """Longest ZB period present in the packet, 1 / (2 W_min) in T_Z."""
    return 1.0 / (2.0 * float(np.min(state.energies)))


def simulate(state: PacketState, t_max: float, dt: float) -> TimeSeries:
    """Sample t = 0, dt, ..., (n-1) dt with n = round(t_max / dt)."""
    if not (dt > 0 and math.isfinite(dt)):
        raise PhysicsError(f"dt must be positive, got {dt}")
    if not (t_max >= dt and math.isfinite(t_max)):
        raise PhysicsError(f"t_max must be at least dt, got t_max={t_max}, dt={dt}")
    _require_normalized(state)
    n = int(round(t_max / dt))
    t = np.arange(n) * dt
    v_E = np.broadcast_to(_stationary_velocity(state), (n, 3)).copy()
    return TimeSeries(t, v_E, _oscillating_velocity(state, t), _displacement(state, t), float(dt))


def observability_filter(state: PacketState, delta_w: float, *, t_max: float = 1.0,
                         dt: float = 1e-3, n_bins: int = 32, n_samples: int = 20_000,
                         max_modes: int | None = None) -> TimeAveragedReport:
    """
    Replace oscillating traces by time-averaged observables when the energy
    resolution ``delta_w`` (in m_e c^2) implies a time resolution 1/delta_w
    (in T_Z) longer than the ZB period.

    Dwell densities are built for the ``max_modes`` nodes with the largest ZB
    displacement amplitude (all nodes when None), one per axis with A_i > 0.
    """
    if not (delta_w > 0 and math.isfinite(delta_w)):
        raise PhysicsError(f"delta_w must be positive, got {delta_w}")
    _require_normalized(state)
    ratio = 1.0 / delta_w
    period = zb_period(state)
    v_E = _stationary_velocity(state)
    if not ratio > period:
        return TimeAveragedReport(False, ratio, period, v_E, series=simulate(state, t_max, dt))

    amp, phase, omega = zb_modes(state)
    disp = state.weights[:, None] * amp / omega[:, None]
    center = -np.sum(disp * np.sin(phase), axis=0)
    # the oscillatory part averages to zero over whole periods of every node
    mean_osc = np.zeros(3)

    order = np.argsort(-np.max(disp, axis=1), kind="stable")
    if max_modes is not None:
        order = order[:max_modes]
    densities = []
    for i in order:
        for j, name in enumerate(AXES):
            if disp[i, j] > 0:
                densities.append((int(i), name, dwell_density(float(disp[i, j]), n_bins, n_samples,
                                                              axis=name, phase=float(phase[i, j]))))
    return TimeAveragedReport(True, ratio, period, v_E, mean_osc, center, tuple(densities))


# ---------------------------------------------------------------------------
# signal analysis

def zero_crossings(t: ArrayLike, y: ArrayLike) -> np.ndarray:
    """Linearly interpolated times where ``y`` changes sign."""
    t = np.asarray(t, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    s = np.signbit(y)
    idx = np.nonzero(s[:-1] != s[1:])[0]
    y0, y1 = y[idx], y[idx + 1]
    return t[idx] - y0 * (t[idx + 1] - t[idx]) / (y1 - y0)


def zero_crossing_period(t: ArrayLike, y: ArrayLike) -> float:
    """Period estimated from the mean spacing of successive zero crossings."""
    z = zero_crossings(t, y)
    if z.size < 3:
        raise PhysicsError("need at least three zero crossings to estimate a period")
    return 2.0 * (z[-1] - z[0]) / (z.size - 1)
