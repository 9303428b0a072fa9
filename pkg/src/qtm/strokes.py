"""Heat and work of quasistatic strokes.

Sign convention: ``heat`` is absorbed by the working medium and ``work`` is
done on it, so ``heat + work`` is the change of internal energy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import MachineParams, build_spectrum, entropy_at, energy_at, gibbs

ISENTROPE_TOL = 1e-10
MAX_BISECTIONS = 200


@dataclass(frozen=True)
class StrokeLedger:
    heat: float
    work: float
    entropy_change: float


class NoRootInBracket(ValueError):
    """The entropy mismatch does not change sign over the bracket."""

    def __init__(self, bracket, residuals):
        self.bracket = tuple(bracket)
        self.residuals = tuple(residuals)
        super().__init__(
            "no isentrope in [%g, %g]: endpoint residuals %.6g, %.6g"
            % (self.bracket + self.residuals)
        )


def isothermal_heat(params: MachineParams, temperature, omega_start, omega_end) -> StrokeLedger:
    s0 = entropy_at(params, omega_start, temperature)
    s1 = entropy_at(params, omega_end, temperature)
    u0 = energy_at(params, omega_start, temperature)
    u1 = energy_at(params, omega_end, temperature)
    heat = temperature * (s1 - s0)
    return StrokeLedger(heat=heat, work=(u1 - u0) - heat, entropy_change=s1 - s0)


def isothermal_heat_path(params: MachineParams, temperature, omega_start, omega_end, steps: int):
    """Riemann sum of sum_i E_i dp_i along a uniform frequency grid.

    Energies are taken at interval midpoints. Used as an oracle for
    :func:`isothermal_heat`.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    grid = np.linspace(omega_start, omega_end, steps + 1)
    _, state = gibbs(params, grid, temperature)
    dp = np.diff(state.populations, axis=0)
    mid = build_spectrum(params, 0.5 * (grid[1:] + grid[:-1])).energies
    return float(np.sum(mid * dp))


def isochoric_heat(params: MachineParams, omega, t_start, t_end) -> StrokeLedger:
    spectrum, start = gibbs(params, omega, t_start)
    _, end = gibbs(params, omega, t_end)
    heat = (spectrum.energies * (end.populations - start.populations)).sum(axis=-1)
    ds = -(end.populations * end.log_populations).sum(-1) + (
        start.populations * start.log_populations
    ).sum(-1)
    return StrokeLedger(heat=heat, work=0.0 * heat, entropy_change=ds)


def adiabatic_work(params: MachineParams, populations, omega_start, omega_end) -> StrokeLedger:
    p = np.asarray(populations, dtype=float)
    if np.any(np.abs(p.sum(axis=-1) - 1.0) > 1e-9):
        raise ValueError("populations must sum to 1")
    e0 = build_spectrum(params, omega_start).energies
    e1 = build_spectrum(params, omega_end).energies
    work = (p * (e1 - e0)).sum(axis=-1)
    return StrokeLedger(heat=0.0 * work, work=work, entropy_change=0.0 * work)


def bisect_isentrope(params: MachineParams, target, t_to, lo, hi):
    """Vectorized bisection for S(omega, t_to) = target on [lo, hi].

    Returns ``(omega, ok)``. ``ok`` is False where the residual has the same
    strict sign at both ends; ``omega`` is NaN there.
    """
    target, lo, hi = (np.array(a, dtype=float) for a in np.broadcast_arrays(target, lo, hi))
    f_lo = entropy_at(params, lo, t_to) - target
    f_hi = entropy_at(params, hi, t_to) - target
    ok = np.sign(f_lo) * np.sign(f_hi) <= 0
    # orient so that f(lo) <= 0 <= f(hi)
    flip = f_lo > 0
    lo, hi = np.where(flip, hi, lo), np.where(flip, lo, hi)
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        f_mid = entropy_at(params, mid, t_to) - target
        below = f_mid <= 0
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all(np.abs(hi - lo) <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(mid))):
            break
    root = 0.5 * (lo + hi)
    return np.where(ok, root, np.nan), ok


def solve_isentrope(params: MachineParams, t_from, omega_from, t_to, bracket) -> float:
    """Frequency at which the Gibbs state at ``t_to`` has the entropy of (t_from, omega_from)."""
    lo, hi = bracket
    if not (0 <= lo < hi):
        raise ValueError("bracket must satisfy 0 <= lo < hi")
    target = float(entropy_at(params, omega_from, t_from))
    root, ok = bisect_isentrope(params, target, t_to, lo, hi)
    if not ok:
        residuals = (
            float(entropy_at(params, lo, t_to)) - target,
            float(entropy_at(params, hi, t_to)) - target,
        )
        raise NoRootInBracket((lo, hi), residuals)
    root = float(root)
    residual = abs(float(entropy_at(params, root, t_to)) - target)
    if residual > ISENTROPE_TOL:
        raise ArithmeticError(f"isentrope residual {residual:.3g} above {ISENTROPE_TOL}")
    return root


def population_mismatch(params: MachineParams, t_from, omega_from, t_to, omega_to):
    """Largest population difference between the two Gibbs states of an isentrope."""
    _, a = gibbs(params, omega_from, t_from)
    _, b = gibbs(params, omega_to, t_to)
    return np.max(np.abs(a.populations - b.populations), axis=-1)
