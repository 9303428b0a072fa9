import math

import numpy as np
import pytest

from qtm.classifier import OperationalMode, classify, clausius_residual
from qtm.cycles import (
    CARNOT,
    OTTO,
    STIRLING,
    STIRLING_REGEN,
    CyclePoint,
    carnot_ledger,
    otto_ledger,
    run_carnot,
    run_cycle,
    run_otto,
    run_stirling,
    run_stirling_regen,
    stirling_ledger,
    stirling_regen_ledger,
    stroke_energy_changes,
)
from qtm.spectral import MachineParams, energy_at, entropy_at
from qtm.strokes import NoRootInBracket, isochoric_heat

from . import oracles

P11 = MachineParams(g=1.0, r=1.0)


@pytest.mark.parametrize(
    "args", [(-1, 1, 1, 2), (1, -1, 1, 2), (1, 1, 0, 2), (1, 1, 1, -2), (math.nan, 1, 1, 2), (1, 1, 1, math.inf)]
)
def test_point_validation(args):
    with pytest.raises(ValueError):
        CyclePoint(*args)


def test_unknown_cycle():
    with pytest.raises(ValueError):
        run_cycle("diesel", CyclePoint(1, 2, 1, 2))


# Carnot


def test_carnot_null_cycle():
    rec = run_carnot(CyclePoint(1.0, 1.0, 1.0, 2.0))
    assert (rec.q_hot, rec.q_cold, rec.work_out) == (0.0, 0.0, 0.0)
    assert classify(rec) is OperationalMode.IDLE


def test_carnot_engine_point_is_reversible():
    pt = CyclePoint(4.0, 3.0, 1.0, 2.0)
    rec = run_carnot(pt)
    assert classify(rec) is OperationalMode.ENGINE
    assert rec.work_out / rec.q_hot == pytest.approx(0.5, abs=1e-12)
    assert abs(clausius_residual(rec, (1.0, 2.0))) < 1e-10
    w2, w3 = rec.aux_frequencies
    assert entropy_at(P11, w2, 1.0) == pytest.approx(entropy_at(P11, 3.0, 2.0), abs=1e-10)
    assert entropy_at(P11, w3, 1.0) == pytest.approx(entropy_at(P11, 4.0, 2.0), abs=1e-10)


def test_carnot_hot_heat_from_density_matrix_entropy():
    rec = run_carnot(CyclePoint(4.0, 3.0, 1.0, 2.0))
    expected = 2.0 * (oracles.entropy(1, 1, 3.0, 2.0) - oracles.entropy(1, 1, 4.0, 2.0))
    assert rec.q_hot == pytest.approx(expected, abs=1e-9)
    assert rec.q_cold == pytest.approx(-expected / 2, abs=1e-9)


def test_carnot_explicit_bracket():
    pt = CyclePoint(4.0, 3.0, 1.0, 2.0)
    a, b = run_carnot(pt), run_carnot(pt, bracket=(0.0, 40.0))
    assert a.aux_frequencies == pytest.approx(b.aux_frequencies, abs=1e-9)
    with pytest.raises(NoRootInBracket):
        run_carnot(pt, bracket=(0.0, 0.5))


def test_carnot_without_isentrope_raises():
    # at omega0 = 0 the hot state is more mixed than any cold state
    with pytest.raises(NoRootInBracket):
        run_carnot(CyclePoint(0.0, 1.0, 0.1, 1.0))


def test_carnot_vector_ledger_flags_failures():
    led = carnot_ledger(P11, np.array([4.0, 0.0, 2.0]), np.array([3.0, 1.0, 2.0]), 1.0, 2.0)
    assert led["ok"].tolist() == [True, False, True]
    assert led["work"][2] == 0.0


def test_carnot_strokes_close():
    rec = run_carnot(CyclePoint(5.0, 2.5, 1.0, 2.0))
    assert sum(stroke_energy_changes(rec)) == pytest.approx(0.0, abs=1e-12)


# Otto


def test_otto_null_cycle():
    rec = run_otto(CyclePoint(2.0, 2.0, 1.0, 2.0))
    iso = isochoric_heat(P11, 2.0, 1.0, 2.0).heat
    assert rec.q_hot == pytest.approx(iso, abs=1e-14)
    assert rec.q_cold == pytest.approx(-iso, abs=1e-14)
    assert rec.work_out == pytest.approx(0.0, abs=1e-14)


def test_otto_engine_signs():
    rec = run_otto(CyclePoint(1.0, 2.0, 1.0, 2.0))
    assert rec.q_hot > 0 and rec.q_cold < 0 and rec.work_out > 0
    assert classify(rec) is OperationalMode.ENGINE


@pytest.mark.parametrize("pt", [(1.0, 2.0, 1.0, 2.0), (3.0, 0.5, 0.7, 4.0), (0.2, 4.0, 1.0, 5.0)])
def test_otto_heats_match_sorted_level_oracle(pt):
    hot, cold = oracles.otto_heats(1.0, 1.0, *pt)
    rec = run_otto(CyclePoint(*pt))
    assert rec.q_hot == pytest.approx(hot, abs=1e-12)
    assert rec.q_cold == pytest.approx(cold, abs=1e-12)


def test_otto_equal_temperatures_cannot_output_work():
    rng = np.random.default_rng(11)
    w0, w1, t = rng.uniform(0, 8, 1000), rng.uniform(0, 8, 1000), rng.uniform(0.1, 5, 1000)
    led = otto_ledger(MachineParams(g=1.0, r=2.0), w0, w1, t, t)
    assert np.all(led["work"] <= 1e-12)


def test_otto_strokes_close():
    rec = run_otto(CyclePoint(1.0, 3.0, 1.0, 2.0))
    assert sum(stroke_energy_changes(rec)) == pytest.approx(0.0, abs=1e-12)


# Stirling


def test_stirling_null_cycle():
    rec = run_stirling(CyclePoint(2.0, 2.0, 1.0, 2.0))
    d = rec.diagnostics
    assert d["q_h_iso"] == 0.0 and d["q_c_iso"] == 0.0
    assert rec.q_iso1 == pytest.approx(-rec.q_iso2, abs=1e-14)
    assert rec.work_out == pytest.approx(0.0, abs=1e-14)


def test_stirling_equal_temperatures():
    rec = run_stirling(CyclePoint(3.0, 1.0, 1.5, 1.5))
    assert rec.q_iso1 == 0.0 and rec.q_iso2 == 0.0
    assert rec.work_out == pytest.approx(0.0, abs=1e-14)
    assert rec.q_hot == pytest.approx(-rec.q_cold, abs=1e-14)


def test_stirling_record_against_density_matrix_oracle():
    w0, w1, tc, th = 2.5, 1.0, 1.0, 2.0
    rec = run_stirling(CyclePoint(w0, w1, tc, th))
    q_h = th * (oracles.entropy(1, 1, w0, th) - oracles.entropy(1, 1, w1, th))
    q_c = tc * (oracles.entropy(1, 1, w1, tc) - oracles.entropy(1, 1, w0, tc))
    q2 = oracles.energy(1, 1, w0, tc) - oracles.energy(1, 1, w0, th)
    q4 = oracles.energy(1, 1, w1, th) - oracles.energy(1, 1, w1, tc)
    assert rec.q_iso1 == pytest.approx(q2, abs=1e-12)
    assert rec.q_iso2 == pytest.approx(q4, abs=1e-12)
    assert rec.q_hot == pytest.approx(q_h + q4, abs=1e-9)
    assert rec.q_cold == pytest.approx(q2 + q_c, abs=1e-9)


def test_stirling_refrigerator_at_large_compression():
    rec = run_stirling(CyclePoint(4.0, 0.5, 1.0, 2.0))
    assert classify(rec) is OperationalMode.REFRIGERATOR


def test_stirling_four_to_one_is_a_heater():
    rec = run_stirling(CyclePoint(4.0, 1.0, 1.0, 2.0))
    assert classify(rec) is OperationalMode.HEATER
    assert rec.q_hot == pytest.approx(-0.6331544594820178, abs=1e-9)


def test_stirling_strokes_close():
    for cyc in (STIRLING, STIRLING_REGEN):
        rec = run_cycle(cyc, CyclePoint(0.7, 3.1, 0.6, 2.4))
        assert sum(stroke_energy_changes(rec)) == pytest.approx(0.0, abs=1e-12)


# regenerated Stirling


def test_regen_null_cycle():
    rec = run_stirling_regen(CyclePoint(2.0, 2.0, 1.0, 2.0))
    assert rec.regen_delta == pytest.approx(0.0, abs=1e-14)
    assert rec.regen_delta_flag == 0
    assert rec.q_hot == pytest.approx(0.0, abs=1e-14)


def test_regen_heat_accounting():
    rng = np.random.default_rng(5)
    n = 2000
    args = (rng.uniform(0, 6, n), rng.uniform(0, 6, n), rng.uniform(0.2, 2, n))
    th = args[2] + rng.uniform(0, 3, n)
    plain = stirling_ledger(P11, *args, th)
    regen = stirling_regen_ledger(P11, *args, th)
    dq = plain["q_iso1"] + plain["q_iso2"]
    np.testing.assert_array_equal(regen["regen_delta_flag"], (dq > 0).astype(int))
    np.testing.assert_allclose(regen["q_hot"], plain["q_h_iso"] + np.where(dq > 0, dq, 0.0))
    np.testing.assert_array_equal(regen["work"], plain["work"])
    np.testing.assert_allclose(regen["q_hot"] + regen["q_cold"], regen["work"], atol=1e-12)


def test_records_expose_input_heat():
    rec = run_stirling_regen(CyclePoint(1.0, 3.0, 1.0, 2.0))
    assert rec.q_in == rec.q_hot
    assert rec.cycle == STIRLING_REGEN and rec.t_hot == 2.0


def test_all_cycles_conserve_energy_at_a_point():
    pt = CyclePoint(4.0, 3.0, 1.0, 2.0)
    for cyc in (CARNOT, OTTO, STIRLING, STIRLING_REGEN):
        rec = run_cycle(cyc, pt)
        assert rec.work_out == pytest.approx(rec.q_hot + rec.q_cold, abs=1e-12)
