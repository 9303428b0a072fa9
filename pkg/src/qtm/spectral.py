"""Spectrum and Gibbs state of two qubits with a sigma_z x sigma_x (Raman-type) coupling.

H = (wbar/2) sz(x)1 + (w/2) 1(x)sz + g sz(x)sx, with hbar = k_B = 1.

All functions broadcast: ``omega``, ``temperature`` and the fields of
:class:`MachineParams` may be scalars or numpy arrays. Energies and
populations carry a trailing axis of length 4 ordered (E1, E2, E3, E4).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

# beta is saturated here; T below 1e-6 behaves as T = 1e-6
BETA_MAX = 1.0e6

SCALED = "scaled"
FIXED = "fixed"

_SZ = np.diag([1.0, -1.0])
_SX = np.array([[0.0, 1.0], [1.0, 0.0]])
_I2 = np.eye(2)


@dataclass(frozen=True)
class MachineParams:
    """Static machine description.

    ``left_mode`` is ``"scaled"`` (left frequency = r * omega) or ``"fixed"``
    (left frequency = ``omega_bar`` regardless of omega).
    """

    g: float = 1.0
    r: float = 1.0
    left_mode: str = SCALED
    omega_bar: Optional[float] = None

    def __post_init__(self):
        if self.left_mode not in (SCALED, FIXED):
            raise ValueError(f"left_mode must be 'scaled' or 'fixed', got {self.left_mode!r}")
        _check_finite("g", self.g)
        _check_finite("r", self.r)
        if np.any(np.asarray(self.g) < 0):
            raise ValueError("g must be >= 0")
        if np.any(np.asarray(self.r) <= 0):
            raise ValueError("r must be > 0")
        if self.left_mode == FIXED:
            if self.omega_bar is None:
                raise ValueError("fixed left_mode requires omega_bar")
            _check_finite("omega_bar", self.omega_bar)
            if np.any(np.asarray(self.omega_bar) < 0):
                raise ValueError("omega_bar must be >= 0")

    def left_frequency(self, omega):
        if self.left_mode == FIXED:
            return self.omega_bar + 0.0 * np.asarray(omega)
        return self.r * omega


@dataclass(frozen=True)
class Spectrum:
    omega: np.ndarray
    omega_bar: np.ndarray
    big_omega: np.ndarray
    theta: np.ndarray
    energies: np.ndarray  # (..., 4)


@dataclass(frozen=True)
class ThermalState:
    beta: np.ndarray
    populations: np.ndarray  # (..., 4), aligned with Spectrum.energies
    log_z: np.ndarray
    log_populations: np.ndarray


@dataclass(frozen=True)
class BlockMatrices:
    """Unnormalized Gibbs blocks; rho = diag(plus_block, minus_block) / Z."""

    plus_block: np.ndarray  # (..., 2, 2) on {|00>, |01>}
    minus_block: np.ndarray  # (..., 2, 2) on {|10>, |11>}


def _check_finite(name, value):
    if not np.all(np.isfinite(np.asarray(value, dtype=float))):
        raise ValueError(f"{name} must be finite")


def _check_omega(omega):
    omega = np.asarray(omega, dtype=float)
    _check_finite("omega", omega)
    if np.any(omega < 0):
        raise ValueError("omega must be >= 0")
    return omega


def inverse_temperature(temperature):
    """beta = 1/T, saturated at BETA_MAX; T = inf gives beta = 0."""
    t = np.asarray(temperature, dtype=float)
    if np.any(np.isnan(t)) or np.any(t <= 0):
        raise ValueError("temperature must be > 0")
    with np.errstate(divide="ignore"):
        return np.minimum(1.0 / t, BETA_MAX)


def build_spectrum(params: MachineParams, omega) -> Spectrum:
    """Closed-form eigenvalues of the two 2x2 blocks."""
    omega = _check_omega(omega)
    wbar = np.asarray(params.left_frequency(omega), dtype=float)
    g = np.asarray(params.g, dtype=float)
    big = np.sqrt(4.0 * g * g + omega * omega)
    energies = np.stack(
        np.broadcast_arrays(
            (wbar + big) / 2, (wbar - big) / 2, (-wbar + big) / 2, (-wbar - big) / 2
        ),
        axis=-1,
    )
    theta = np.arctan2(2.0 * g, omega)
    return Spectrum(omega=omega, omega_bar=wbar, big_omega=big, theta=theta, energies=energies)


def hamiltonian_matrix(params: MachineParams, omega) -> np.ndarray:
    """Explicit 4x4 Hamiltonian in the basis |00>, |01>, |10>, |11>."""
    omega = _check_omega(omega)
    wbar = np.asarray(params.left_frequency(omega), dtype=float)[..., None, None]
    g = np.asarray(params.g, dtype=float)[..., None, None]
    w = omega[..., None, None]
    return (
        0.5 * wbar * np.kron(_SZ, _I2)
        + 0.5 * w * np.kron(_I2, _SZ)
        + g * np.kron(_SZ, _SX)
    )


def oracle_diagonalize(params: MachineParams, omega) -> Spectrum:
    """Numerical diagonalization of the explicit matrix, block by block.

    Kept independent of :func:`build_spectrum`: eigenvalues come from
    ``numpy.linalg.eigh`` of the two diagonal blocks of the 4x4 matrix and the
    mixing angle from the top eigenvector of the upper block.
    """
    h = hamiltonian_matrix(params, omega)
    plus_vals, plus_vecs = np.linalg.eigh(h[..., :2, :2])
    minus_vals = np.linalg.eigvalsh(h[..., 2:, 2:])
    # eigh sorts ascending: upper block -> (E2, E1), lower block -> (E4, E3)
    energies = np.stack(
        [plus_vals[..., 1], plus_vals[..., 0], minus_vals[..., 1], minus_vals[..., 0]], axis=-1
    )
    top = plus_vecs[..., :, 1]
    theta = 2.0 * np.arctan2(np.abs(top[..., 1]), np.abs(top[..., 0]))
    omega = np.asarray(omega, dtype=float)
    wbar = np.asarray(params.left_frequency(omega), dtype=float)
    return Spectrum(
        omega=omega,
        omega_bar=wbar,
        big_omega=plus_vals[..., 1] - plus_vals[..., 0],
        theta=theta,
        energies=energies,
    )


def thermal_state(spectrum: Spectrum, temperature) -> ThermalState:
    beta = inverse_temperature(temperature)
    e = spectrum.energies
    b = np.asarray(beta)[..., None]
    # log-sum-exp shifted by the ground energy
    e_min = e.min(axis=-1, keepdims=True)
    shifted = -b * (e - e_min)
    log_z = np.log(np.exp(shifted).sum(axis=-1)) - (b * e_min)[..., 0]
    log_p = -b * e - log_z[..., None]
    return ThermalState(beta=beta, populations=np.exp(log_p), log_z=log_z, log_populations=log_p)


def internal_energy(state: ThermalState, spectrum: Spectrum):
    return (state.populations * spectrum.energies).sum(axis=-1)


def entropy(state: ThermalState, spectrum: Spectrum = None):
    """Von Neumann entropy -sum p ln p of the Gibbs state (nats)."""
    return -(state.populations * state.log_populations).sum(axis=-1)


def entropy_from_free_energy(state: ThermalState, spectrum: Spectrum):
    """S = beta*U + ln Z; consistency partner of :func:`entropy`."""
    return state.beta * internal_energy(state, spectrum) + state.log_z


def gibbs(params: MachineParams, omega, temperature):
    spectrum = build_spectrum(params, omega)
    return spectrum, thermal_state(spectrum, temperature)


def entropy_at(params: MachineParams, omega, temperature):
    spectrum, state = gibbs(params, omega, temperature)
    return entropy(state, spectrum)


def energy_at(params: MachineParams, omega, temperature):
    spectrum, state = gibbs(params, omega, temperature)
    return internal_energy(state, spectrum)


def coherence_blocks(params: MachineParams, omega, temperature) -> BlockMatrices:
    """Entries of exp(-beta H) in the two invariant subspaces.

    Not rescaled, so very large ``beta * omega_bar`` overflows; use
    :func:`thermal_state` for populations in that regime.
    """
    omega = _check_omega(omega)
    beta = inverse_temperature(temperature)
    spec = build_spectrum(params, omega)
    big = spec.big_omega
    ch = np.cosh(beta * big / 2)
    # sinh(x)/Omega -> beta/2 as Omega -> 0
    with np.errstate(invalid="ignore", divide="ignore"):
        sh_over = np.where(big > 0, np.sinh(beta * big / 2) / np.where(big > 0, big, 1.0), beta / 2)
    w = spec.omega
    g = np.asarray(params.g, dtype=float)
    down = np.exp(-beta * spec.omega_bar / 2)
    up = np.exp(beta * spec.omega_bar / 2)

    def block(prefactor, off_sign):
        d11 = prefactor * (ch - w * sh_over)
        d22 = prefactor * (ch + w * sh_over)
        off = off_sign * prefactor * 2.0 * g * sh_over
        d11, d22, off = np.broadcast_arrays(d11, d22, off)
        return np.stack([np.stack([d11, off], -1), np.stack([off, d22], -1)], -2)

    # H_- carries -g off the diagonal, so exp(-beta H_-) has a positive coherence
    return BlockMatrices(plus_block=block(down, -1.0), minus_block=block(up, +1.0))
