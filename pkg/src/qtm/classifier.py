"""Operational modes, efficiency / COP, and the Clausius check."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

DEFAULT_TOLERANCE = 1e-9


class OperationalMode(str, Enum):
    ENGINE = "engine"
    REFRIGERATOR = "refrigerator"
    HEATER = "heater"
    ACCELERATOR = "accelerator"
    IDLE = "idle"
    FORBIDDEN = "forbidden"


# integer codes used in grids; UNRESOLVED marks cells without a cycle record
MODES = list(OperationalMode)
MODE_CODES = {m: i for i, m in enumerate(MODES)}
UNRESOLVED = -1


class DivisionByNearZero(ArithmeticError):
    pass


@dataclass(frozen=True)
class Performance:
    mode: OperationalMode
    primary_metric: float
    kappa: float
    kappa_carnot: Optional[float] = None


def _sign(x, tol):
    return np.where(x > tol, 1, np.where(x < -tol, -1, 0))


def classify_arrays(q_hot, q_cold, work, tolerance=DEFAULT_TOLERANCE):
    """Integer mode codes (see ``MODES``) for arrays of heats and work.

    A cycle with no net work is idle when heat, if any, only flows from the
    hot to the cold bath; all other sign triples outside the four
    operating modes are forbidden.
    """
    c, w, h = _sign(q_cold, tolerance), _sign(work, tolerance), _sign(q_hot, tolerance)
    conditions = [
        (c == -1) & (w == 1) & (h == 1),
        (c == 1) & (w == -1) & (h == -1),
        (c == -1) & (w == -1) & (h == -1),
        (c == -1) & (w == -1) & (h == 1),
        (w == 0) & (h >= 0) & (c <= 0),
    ]
    choices = [MODE_CODES[m] for m in MODES[:5]]
    return np.select(conditions, choices, default=MODE_CODES[OperationalMode.FORBIDDEN])


def classify(record, tolerance=DEFAULT_TOLERANCE) -> OperationalMode:
    if tolerance <= 0:
        raise ValueError("tolerance must be > 0")
    code = classify_arrays(record.q_hot, record.q_cold, record.work_out, tolerance)
    return MODES[int(code)]


def kappa_from_cop(cop):
    return cop / (1.0 + cop)


def performance_arrays(
    q_hot, q_cold, work, modes, t_cold, t_hot, tolerance=DEFAULT_TOLERANCE, division_tolerance=None
):
    """Return ``(metric, kappa, kappa_carnot, div0)``; NaN where undefined.

    ``div0`` marks cells whose denominator is below ``division_tolerance``
    (default: ``tolerance``). With the default this only happens for
    hand-supplied mode codes, since a classified mode already has |W| and
    the input heat above the sign dead-band.

    Engine: metric = eta = work / q_hot (q_hot is the hot-side input heat),
    kappa = eta, kappa_carnot = eta / (1 - Tc/Th). Refrigerator:
    COP = q_cold / |work|. Heater and accelerator: COP = |q_cold| / |work|;
    kappa = COP / (1 + COP).
    """
    q_hot, q_cold, work, modes = np.broadcast_arrays(q_hot, q_cold, work, modes)
    engine = modes == MODE_CODES[OperationalMode.ENGINE]
    cop_modes = np.isin(
        modes,
        [MODE_CODES[m] for m in (OperationalMode.REFRIGERATOR, OperationalMode.HEATER, OperationalMode.ACCELERATOR)],
    )
    denom = np.where(engine, q_hot, np.abs(work))
    active = engine | cop_modes
    limit = tolerance if division_tolerance is None else division_tolerance
    div0 = active & (np.abs(denom) < limit)
    good = active & ~div0
    safe = np.where(good, denom, 1.0)
    metric = np.where(good, np.where(engine, work, np.abs(q_cold)) / safe, np.nan)
    kappa = np.where(engine, metric, kappa_from_cop(metric))
    bound = 1.0 - np.asarray(t_cold, dtype=float) / np.asarray(t_hot, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        kc = np.where(engine, np.where(bound > 0, metric / np.where(bound > 0, bound, 1.0), np.nan), kappa)
    return metric, kappa, kc, div0


def performance(
    record, temperatures, regen=False, tolerance=DEFAULT_TOLERANCE, division_tolerance=None
) -> Performance:
    """Efficiency or COP of a classified cycle record.

    ``temperatures`` is ``(t_cold, t_hot)``. With ``regen`` the record must
    come from the regenerated Stirling cycle, whose ``q_hot`` is the
    regenerated heat input.
    """
    if regen and record.regen_delta is None:
        raise ValueError("regen performance needs a regenerated Stirling record")
    mode = classify(record, tolerance)
    if mode in (OperationalMode.IDLE, OperationalMode.FORBIDDEN):
        raise ValueError(f"no performance metric for mode {mode.value}")
    t_cold, t_hot = temperatures
    metric, kappa, kc, div0 = performance_arrays(
        record.q_hot, record.q_cold, record.work_out, MODE_CODES[mode], t_cold, t_hot, tolerance,
        division_tolerance,
    )
    if div0:
        limit = tolerance if division_tolerance is None else division_tolerance
        raise DivisionByNearZero(f"{mode.value} denominator below {limit}")
    kc = float(kc)
    return Performance(mode, float(metric), float(kappa), None if np.isnan(kc) else kc)


def clausius_residual(record, temperatures):
    """q_hot/Th + q_cold/Tc; admissible cycles give a value <= tolerance."""
    t_cold, t_hot = temperatures
    if t_cold <= 0 or t_hot <= 0:
        raise ValueError("temperatures must be > 0")
    return record.q_hot / t_hot + record.q_cold / t_cold
