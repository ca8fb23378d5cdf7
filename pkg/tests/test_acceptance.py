"""Acceptance criteria; each test prints one PASS/FAIL line with its measured margin."""
import math
import time
from pathlib import Path

import numpy as np
import pytest

from conftest import C_MAX, C_MIN, F_OP, CALIBRATION_ROWS, record_acceptance
from risangle.array import ColumnProfile, wrap_phase
from risangle.circuit import (
    CalibrationTable,
    CircuitParams,
    UnitCellModel,
    reflection_coefficient,
    resonance_frequency,
)
from risangle.cli import main
from risangle.errors import InfeasiblePhaseError
from risangle.pattern import peak_angle, reflected_direction
from risangle.reciprocity import first_order_reverse_angle, reciprocity_scan, reciprocity_window, reverse_angle
from risangle.steering import (
    PhaseInverter,
    design_deflection,
    phase_to_capacitance,
    realize_profile,
    realized_profile,
    tunable_phase_range,
)

pytestmark = pytest.mark.acceptance

GOLDEN = Path(__file__).parent / "golden"


def row_params(i):
    return CircuitParams.from_display_units(*CALIBRATION_ROWS[i][1:5])


def test_c1_table_resonances():
    errs = []
    for i, row in enumerate(CALIBRATION_ROWS):
        fr = resonance_frequency(row_params(i), C_MIN)
        errs.append(abs(fr / (row[5] * 1e9) - 1))
    ok = max(errs) <= 0.005
    record_acceptance(1, ok, "resonances vs calibration table, max rel err %.4f%% (limit 0.5%%)" % (100 * max(errs)))
    assert ok


def test_c2_resonance_phase_and_dip(model):
    t0 = time.perf_counter()
    freqs = np.arange(4000, 7001) * 1e6
    worst_zero = worst_dip = 0.0
    for row in CALIBRATION_ROWS:
        g = reflection_coefficient(math.radians(row[0]), freqs, C_MIN, model)
        fr = row[5] * 1e9
        ph = np.angle(g)
        crossings = [i for i in np.flatnonzero(np.diff(np.sign(ph)) != 0) if abs(ph[i]) < 1.0]
        near = min((abs(freqs[i] - fr) / fr for i in crossings), default=math.inf)
        worst_zero = max(worst_zero, near)
        worst_dip = max(worst_dip, abs(freqs[np.argmin(np.abs(g))] - fr) / fr)
    elapsed = time.perf_counter() - t0
    ok = worst_zero <= 0.01 and worst_dip <= 0.02 and elapsed < 5.0
    record_acceptance(2, ok, "zero crossing off by %.3f%% (<=1%%), |G| dip off by %.3f%% (<=2%%), %.2fs"
                      % (100 * worst_zero, 100 * worst_dip, elapsed))
    assert ok


def test_c3_oracle_equivalence(geom):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    n = np.arange(geom.n_columns)
    worst = 0.0
    mismatched = 0
    for _ in range(200):
        t1, t2 = np.radians(rng.uniform(-45, 45, 2))
        delta = rng.uniform(-0.1, 0.1)
        dphi1 = design_deflection(geom, t1, t2).delta_phi
        dphi2 = dphi1 - delta
        # what the surface looks like from theta2 after the angle-dependent shift
        reverse = ColumnProfile(wrap_phase(n * dphi2))
        expected = reverse_angle(t1, dphi1, dphi2, geom)
        found = reflected_direction(reverse, geom, t2)
        if expected is None or found is None:
            mismatched += (expected is None) != (found is None)
            continue
        worst = max(worst, math.degrees(abs(found - expected)))
    elapsed = time.perf_counter() - t0
    ok = mismatched == 0 and worst <= 0.2 and elapsed < 30.0
    record_acceptance(3, ok, "200 pairs, max |peak - closed form| = %.4f deg (<=0.2), evanescent mismatches %d, %.2fs"
                      % (worst, mismatched, elapsed))
    assert ok


def test_c4_flat_calibration_is_reciprocal(flat_model, geom):
    grid = np.radians(np.arange(-40.0, 40.1, 5.0))
    reports = reciprocity_scan(flat_model, geom, grid, grid)
    cells = [r for row in reports for r in row]
    exact = all(r.feasible and r.theta3_exact == r.theta1 and r.deviation == 0.0 for r in cells)
    record_acceptance(4, exact, "single-knot scan, %d cells, max deviation %g"
                      % (len(cells), max(r.deviation for r in cells)))
    assert exact


def test_c5_first_order_bound():
    deltas = np.arange(-100, 101) * 1e-3
    thetas = np.radians(np.arange(-60.0, 60.01, 0.5))
    worst_ratio = 0.0
    worst_at = None
    for t1 in thetas:
        for d in deltas:
            if d == 0.0:
                continue
            err = abs(math.asin(math.sin(t1) + d) - first_order_reverse_angle(t1, d))
            ratio = err / (2 * d * d)
            if ratio > worst_ratio:
                worst_ratio, worst_at = ratio, (math.degrees(t1), d)
    ok = worst_ratio <= 1.0
    record_acceptance(5, ok, "max |exact - first order| / (2 delta^2) = %.3f (<=1) at theta1 = %g deg, delta = %g"
                      % (worst_ratio, *worst_at))
    assert ok


def test_c6_passivity():
    rng = np.random.default_rng(6)
    worst = worst_lossless = 0.0
    for i in range(10_000):
        lossless = i % 2 == 0
        p = CircuitParams.from_display_units(
            rng.uniform(1, 50), rng.uniform(1, 80), 0.0 if lossless else rng.uniform(0, 20), rng.uniform(0.5, 300))
        m = UnitCellModel(CalibrationTable.single(p))
        g = abs(reflection_coefficient(rng.uniform(-1.5, 1.5), rng.uniform(1e9, 10e9), rng.uniform(0.3e-12, 5e-12), m))
        worst = max(worst, g - 1.0)
        if lossless:
            worst_lossless = max(worst_lossless, abs(g - 1.0))
    ok = worst <= 1e-12 and worst_lossless <= 1e-12
    record_acceptance(6, ok, "10000 draws, max |G| - 1 = %.2e, lossless max ||G| - 1| = %.2e (<=1e-12)"
                      % (worst, worst_lossless))
    assert ok


def test_c7_inversion_round_trip(model):
    rng = np.random.default_rng(7)
    worst = 0.0
    done = 0
    inverters = {}
    while done < 1000:
        ang = math.radians(float(rng.choice([0.0, 15.0, 30.0, 40.0])))
        freq = float(rng.choice([4.8e9, F_OP, 5.5e9]))
        inv = inverters.setdefault((ang, freq), PhaseInverter(model, ang, freq))
        lo, _, width = inv.phase_range
        target = wrap_phase(lo + rng.uniform(0, width))
        try:
            c = phase_to_capacitance(model, ang, freq, target)
        except InfeasiblePhaseError:
            continue
        assert C_MIN * (1 - 1e-12) <= c <= C_MAX * (1 + 1e-12)
        err = abs(wrap_phase(np.angle(reflection_coefficient(ang, freq, c, model)) - target))
        worst = max(worst, err)
        done += 1
    ok = worst <= 1e-6
    record_acceptance(7, ok, "1000 targets, max phase error %.2e rad (<=1e-6)" % worst)
    assert ok


def test_c8_deflection_design(model, geom):
    d = design_deflection(geom, 0.0, math.radians(30))
    d = realize_profile(model, d, geom, 0.25)
    peak = math.degrees(peak_angle(realized_profile(model, d, 0.0, geom.freq), geom, 0.0))
    ok = abs(d.delta_phi + 0.4356) <= 1e-4 and abs(peak - 30.0) <= 0.1
    record_acceptance(8, ok, "dphi = %.6f rad (-0.4356 +- 1e-4), peak %.4f deg (30 +- 0.1), %d/64 columns at endpoints"
                      % (d.delta_phi, peak, d.n_infeasible))
    assert ok


def test_c9a_tunable_width_decreases(model):
    angles = np.arange(0.0, 70.1, 5.0)
    widths = [math.degrees(tunable_phase_range(model, math.radians(a), F_OP)[2]) for a in angles]
    ok = widths[-1] < widths[0]
    record_acceptance("9a", ok, "tunable width at %.3f GHz: %.1f deg at 0 deg, %.1f deg at 70 deg"
                      % (F_OP / 1e9, widths[0], widths[-1]))
    assert ok


def test_c9b_deviation_grows_with_theta1(model, geom):
    grid = np.radians(np.arange(-30.0, 30.1, 10.0))
    reports = reciprocity_scan(model, geom, grid, grid)
    measured = sorted({round(r.delta, 12) for row in reports for r in row if r.feasible and r.delta != 0.0})
    theta = np.radians(np.arange(0.0, 60.01, 1.0))
    kd = geom.wavenumber_d
    monotone = True
    for delta in measured:
        # the deviation's sign follows delta; mirror theta1 onto that side
        t1s = math.copysign(1.0, delta) * theta
        dev = [abs(reverse_angle(t, delta * kd, 0.0, geom) - t) for t in t1s]
        monotone &= all(b >= a for a, b in zip(dev, dev[1:]))
    ok = bool(measured) and monotone
    record_acceptance("9b", ok, "%d measured delta values, deviation non-decreasing in |theta1| over 0-60 deg: %s"
                      % (len(measured), monotone))
    assert ok


def test_c9c_window_contains_diagonal(model, geom):
    grid = np.radians(np.arange(-40.0, 40.1, 5.0))
    reports = reciprocity_scan(model, geom, grid, grid)
    threshold = math.radians(1.0)
    window = reciprocity_window(reports, threshold)
    diag = [r for row in reports for r in row if r.theta1 == r.theta2]
    diag_ok = all(r.feasible and r.deviation <= threshold for r in diag)
    ok = window is not None and diag_ok
    shown = "none" if window is None else "+-%g deg" % math.degrees(window)
    record_acceptance("9c", ok, "window at 1 deg threshold %s, %d/%d diagonal cells within"
                      % (shown, sum(r.deviation <= threshold for r in diag), len(diag)))
    assert ok


def test_c10_cli_determinism(tmp_path):
    cfg = str(GOLDEN / "golden.cfg")
    identical = golden_match = True
    n_files = 0
    for cmd in ("sweep-freq", "sweep-angle", "design", "reciprocity", "pattern"):
        a, b = tmp_path / "a" / cmd, tmp_path / "b" / cmd
        assert main([cmd, "--config", cfg, "--out", str(a)]) == 0
        assert main([cmd, "--config", cfg, "--out", str(b)]) == 0
        for p in sorted((GOLDEN / "expected" / cmd).iterdir()):
            n_files += 1
            identical &= (a / p.name).read_bytes() == (b / p.name).read_bytes()
            golden_match &= (a / p.name).read_bytes() == p.read_bytes()
    ok = identical and golden_match
    record_acceptance(10, ok, "5 subcommands, %d files: repeat runs identical %s, golden match %s"
                      % (n_files, identical, golden_match))
    assert ok
