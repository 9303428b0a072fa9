"""Carnot, Otto and Stirling cycles built from quasistatic strokes.

Each cycle has an array ledger (``*_ledger``) that broadcasts over the two
stroke frequencies and the bath temperatures, and a scalar ``run_*`` wrapper
returning a :class:`CycleRecord`. Heats are positive when absorbed by the
working medium; ``work_out`` is the net work delivered, ``q_hot + q_cold``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .spectral import MachineParams, build_spectrum, gibbs
from .strokes import NoRootInBracket, bisect_isentrope, solve_isentrope

CARNOT = "carnot"
OTTO = "otto"
STIRLING = "stirling"
STIRLING_REGEN = "stirling_regen"
CYCLES = (CARNOT, OTTO, STIRLING, STIRLING_REGEN)


@dataclass(frozen=True)
class CyclePoint:
    omega0: float
    omega1: float
    t_cold: float
    t_hot: float
    params: MachineParams = MachineParams()

    def __post_init__(self):
        for name in ("omega0", "omega1", "t_cold", "t_hot"):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite")
        if self.omega0 < 0 or self.omega1 < 0:
            raise ValueError("stroke frequencies must be >= 0")
        if self.t_cold <= 0 or self.t_hot <= 0:
            raise ValueError("bath temperatures must be > 0")


@dataclass
class CycleRecord:
    cycle: str
    q_hot: float
    q_cold: float
    work_out: float
    q_iso1: Optional[float] = None
    q_iso2: Optional[float] = None
    aux_frequencies: Optional[tuple] = None
    regen_delta: Optional[float] = None
    regen_delta_flag: Optional[int] = None
    t_cold: Optional[float] = None
    t_hot: Optional[float] = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def q_in(self):
        """Hot-side input heat used for the engine efficiency."""
        return self.q_hot


def _heat_between(energies, p_from, p_to):
    return (energies * (p_to - p_from)).sum(axis=-1)


def default_bracket(omega0, omega1):
    return 10.0 * np.maximum(np.maximum(omega0, omega1), 1.0)


def carnot_ledger(params, omega0, omega1, t_cold, t_hot, bracket_hi=None, widen=True):
    """Carnot cycle closed by two isentropes.

    The adiabats end at omega2, omega3 with S(omega2, Tc) = S(omega1, Th) and
    S(omega3, Tc) = S(omega0, Th), so the cold isotherm carries exactly the
    entropy of the hot one and ``q_cold = -Tc * dS``. ``ok`` is False where no
    such frequency exists in the bracket (after one x10 widening if
    ``widen``). A null hot isotherm (omega0 == omega1) needs no adiabats.
    """
    omega0, omega1, t_cold, t_hot = np.broadcast_arrays(
        *(np.asarray(a, dtype=float) for a in (omega0, omega1, t_cold, t_hot))
    )
    spec0, hot0 = gibbs(params, omega0, t_hot)
    spec1, hot1 = gibbs(params, omega1, t_hot)
    s_h0 = -(hot0.populations * hot0.log_populations).sum(-1)
    s_h1 = -(hot1.populations * hot1.log_populations).sum(-1)
    ds = s_h1 - s_h0
    q_hot = t_hot * ds
    q_cold = -t_cold * ds

    null = omega0 == omega1
    hi = default_bracket(omega0, omega1) if bracket_hi is None else np.broadcast_to(bracket_hi, omega0.shape)
    omega2, ok2 = bisect_isentrope(params, s_h1, t_cold, 0.0, hi)
    omega3, ok3 = bisect_isentrope(params, s_h0, t_cold, 0.0, hi)
    if widen and not (np.all(ok2) and np.all(ok3)):
        w2, k2 = bisect_isentrope(params, s_h1, t_cold, 0.0, 10.0 * hi)
        w3, k3 = bisect_isentrope(params, s_h0, t_cold, 0.0, 10.0 * hi)
        omega2, ok2 = np.where(ok2, omega2, w2), ok2 | k2
        omega3, ok3 = np.where(ok3, omega3, w3), ok3 | k3
    ok = null | (ok2 & ok3)
    omega2 = np.where(null, omega1, omega2)
    omega3 = np.where(null, omega0, omega3)

    # the isentropes match entropy, not populations, so adiabatic work is the
    # energy change between the Gibbs endpoints; population_mismatch records
    # how far each adiabat is from a population-preserving stroke
    safe2 = np.where(np.isfinite(omega2), omega2, 0.0)
    safe3 = np.where(np.isfinite(omega3), omega3, 0.0)
    spec2, cold2 = gibbs(params, safe2, t_cold)
    spec3, cold3 = gibbs(params, safe3, t_cold)
    s_c2 = -(cold2.populations * cold2.log_populations).sum(-1)
    s_c3 = -(cold3.populations * cold3.log_populations).sum(-1)
    u_h0 = (spec0.energies * hot0.populations).sum(-1)
    u_h1 = (spec1.energies * hot1.populations).sum(-1)
    u_c2 = (spec2.energies * cold2.populations).sum(-1)
    u_c3 = (spec3.energies * cold3.populations).sum(-1)
    residual = np.maximum(np.abs(s_c2 - s_h1), np.abs(s_c3 - s_h0))
    mismatch = np.maximum(
        np.max(np.abs(cold2.populations - hot1.populations), axis=-1),
        np.max(np.abs(cold3.populations - hot0.populations), axis=-1),
    )
    nan = np.nan
    return {
        "q_hot": q_hot,
        "q_cold": q_cold,
        "work": q_hot + q_cold,
        "omega2": omega2,
        "omega3": omega3,
        "ok": ok,
        "isothermal_work_hot": (u_h1 - u_h0) - q_hot,
        "adiabatic_work_1": np.where(ok & ~null, u_c2 - u_h1, np.where(null, 0.0, nan)),
        "isothermal_work_cold": np.where(ok & ~null, (u_c3 - u_c2) - q_cold, np.where(null, 0.0, nan)),
        "adiabatic_work_2": np.where(ok & ~null, u_h0 - u_c3, np.where(null, 0.0, nan)),
        "isentrope_residual": np.where(ok & ~null, residual, np.where(null, 0.0, nan)),
        "population_mismatch": np.where(ok & ~null, mismatch, np.where(null, 0.0, nan)),
    }


def otto_ledger(params, omega0, omega1, t_cold, t_hot):
    """Otto cycle starting from the cold Gibbs state at omega0."""
    spec0, cold0 = gibbs(params, omega0, t_cold)
    spec1, hot1 = gibbs(params, omega1, t_hot)
    p0, ph = cold0.populations, hot1.populations
    w1 = (p0 * (spec1.energies - spec0.energies)).sum(-1)
    w3 = (ph * (spec0.energies - spec1.energies)).sum(-1)
    q_hot = _heat_between(spec1.energies, p0, ph)
    q_cold = _heat_between(spec0.energies, ph, p0)
    return {
        "q_hot": q_hot,
        "q_cold": q_cold,
        "work": q_hot + q_cold,
        "adiabatic_work_1": w1,
        "adiabatic_work_2": w3,
    }


def stirling_ledger(params, omega0, omega1, t_cold, t_hot):
    """Stirling cycle; the hot isotherm runs omega1 -> omega0.

    Strokes: hot isotherm omega1 -> omega0 at Th, constant frequency at
    omega0 (Th -> Tc, heat ``q_iso1``), cold isotherm omega0 -> omega1 at Tc,
    constant frequency at omega1 (Tc -> Th, heat ``q_iso2``). Bath
    attribution: q_hot = hot isotherm + q_iso2, q_cold = q_iso1 + cold isotherm.
    """
    spec0, h0 = gibbs(params, omega0, t_hot)
    _, c0 = gibbs(params, omega0, t_cold)
    spec1, h1 = gibbs(params, omega1, t_hot)
    _, c1 = gibbs(params, omega1, t_cold)

    def s(state):
        return -(state.populations * state.log_populations).sum(-1)

    def u(spec, state):
        return (spec.energies * state.populations).sum(-1)

    q_h_iso = t_hot * (s(h0) - s(h1))
    q_c_iso = t_cold * (s(c1) - s(c0))
    q_iso1 = _heat_between(spec0.energies, h0.populations, c0.populations)
    q_iso2 = _heat_between(spec1.energies, c1.populations, h1.populations)
    q_hot = q_h_iso + q_iso2
    q_cold = q_iso1 + q_c_iso
    return {
        "q_hot": q_hot,
        "q_cold": q_cold,
        "work": q_hot + q_cold,
        "q_h_iso": q_h_iso,
        "q_c_iso": q_c_iso,
        "q_iso1": q_iso1,
        "q_iso2": q_iso2,
        "isothermal_work_hot": (u(spec0, h0) - u(spec1, h1)) - q_h_iso,
        "isothermal_work_cold": (u(spec1, c1) - u(spec0, c0)) - q_c_iso,
    }


def stirling_regen_ledger(params, omega0, omega1, t_cold, t_hot):
    """Stirling cycle with an ideal regenerator.

    The regenerator nets the two constant-frequency heats, dQ = q_iso1 + q_iso2.
    A deficit (dQ > 0) is drawn from the hot bath, a surplus is rejected to
    the cold bath: q_hot = Q_h + delta*dQ with delta = [dQ > 0], and
    q_cold = work - q_hot. The net work equals the plain Stirling cycle's.
    """
    out = stirling_ledger(params, omega0, omega1, t_cold, t_hot)
    dq = out["q_iso1"] + out["q_iso2"]
    delta = (dq > 0).astype(int)
    q_in = out["q_h_iso"] + delta * dq
    out["regen_delta"] = dq
    out["regen_delta_flag"] = delta
    out["q_hot"] = q_in
    out["q_cold"] = out["work"] - q_in
    return out


LEDGERS = {
    OTTO: otto_ledger,
    STIRLING: stirling_ledger,
    STIRLING_REGEN: stirling_regen_ledger,
    CARNOT: carnot_ledger,
}


def _record(cycle, point, ledger, **extra):
    diag_keys = [
        k
        for k in ledger
        if k not in ("q_hot", "q_cold", "work", "q_iso1", "q_iso2", "regen_delta", "regen_delta_flag", "ok", "omega2", "omega3")
    ]
    return CycleRecord(
        cycle=cycle,
        q_hot=float(ledger["q_hot"]),
        q_cold=float(ledger["q_cold"]),
        work_out=float(ledger["work"]),
        t_cold=point.t_cold,
        t_hot=point.t_hot,
        diagnostics={k: float(ledger[k]) for k in diag_keys},
        **extra,
    )


def run_carnot(point: CyclePoint, bracket=None) -> CycleRecord:
    """Carnot cycle at one point.

    With ``bracket=None`` the isentropes are searched in
    [0, 10*max(omega0, omega1, 1)] and once more in a x10 wider interval; an
    explicit bracket is used as given. Raises :class:`NoRootInBracket` when an
    isentrope cannot be found.
    """
    p = point.params
    if point.omega0 == point.omega1:
        ledger = carnot_ledger(p, point.omega0, point.omega1, point.t_cold, point.t_hot)
        return _record(CARNOT, point, ledger, aux_frequencies=(point.omega1, point.omega0))
    if bracket is None:
        ledger = carnot_ledger(p, point.omega0, point.omega1, point.t_cold, point.t_hot)
        if not ledger["ok"]:
            hi = 100.0 * max(point.omega0, point.omega1, 1.0)
            # re-run the scalar solver to report the failing endpoint residuals
            solve_isentrope(p, point.t_hot, point.omega1, point.t_cold, (0.0, hi))
            solve_isentrope(p, point.t_hot, point.omega0, point.t_cold, (0.0, hi))
            raise NoRootInBracket((0.0, hi), (np.nan, np.nan))
        omega2, omega3 = float(ledger["omega2"]), float(ledger["omega3"])
    else:
        omega2 = solve_isentrope(p, point.t_hot, point.omega1, point.t_cold, bracket)
        omega3 = solve_isentrope(p, point.t_hot, point.omega0, point.t_cold, bracket)
        ledger = carnot_ledger(
            p, point.omega0, point.omega1, point.t_cold, point.t_hot, bracket_hi=bracket[1], widen=False
        )
        # the array bisection uses the same endpoints, but keep the scalar roots
        ledger["omega2"], ledger["omega3"] = omega2, omega3
    return _record(CARNOT, point, ledger, aux_frequencies=(omega2, omega3))


def run_otto(point: CyclePoint) -> CycleRecord:
    ledger = otto_ledger(point.params, point.omega0, point.omega1, point.t_cold, point.t_hot)
    return _record(OTTO, point, ledger)


def run_stirling(point: CyclePoint) -> CycleRecord:
    ledger = stirling_ledger(point.params, point.omega0, point.omega1, point.t_cold, point.t_hot)
    return _record(
        STIRLING, point, ledger, q_iso1=float(ledger["q_iso1"]), q_iso2=float(ledger["q_iso2"])
    )


def run_stirling_regen(point: CyclePoint) -> CycleRecord:
    ledger = stirling_regen_ledger(point.params, point.omega0, point.omega1, point.t_cold, point.t_hot)
    return _record(
        STIRLING_REGEN,
        point,
        ledger,
        q_iso1=float(ledger["q_iso1"]),
        q_iso2=float(ledger["q_iso2"]),
        regen_delta=float(ledger["regen_delta"]),
        regen_delta_flag=int(ledger["regen_delta_flag"]),
    )


RUNNERS = {CARNOT: run_carnot, OTTO: run_otto, STIRLING: run_stirling, STIRLING_REGEN: run_stirling_regen}


def run_cycle(cycle: str, point: CyclePoint) -> CycleRecord:
    try:
        return RUNNERS[cycle](point)
    except KeyError:
        raise ValueError(f"unknown cycle {cycle!r}; expected one of {', '.join(CYCLES)}") from None


def stroke_energy_changes(record: CycleRecord):
    """Per-stroke internal-energy changes; they sum to zero over a closed cycle."""
    d = record.diagnostics
    if record.cycle == CARNOT:
        return [
            record.q_hot + d["isothermal_work_hot"],
            d["adiabatic_work_1"],
            record.q_cold + d["isothermal_work_cold"],
            d["adiabatic_work_2"],
        ]
    if record.cycle == OTTO:
        return [d["adiabatic_work_1"], record.q_hot, d["adiabatic_work_2"], record.q_cold]
    if record.cycle in (STIRLING, STIRLING_REGEN):
        return [
            d["q_h_iso"] + d["isothermal_work_hot"],
            record.q_iso1,
            d["q_c_iso"] + d["isothermal_work_cold"],
            record.q_iso2,
        ]
    raise ValueError(f"unknown cycle {record.cycle!r}")
