"""Reverse-incidence reflection angle and reciprocity scans.

A surface configured to send a wave from ``theta1`` to ``theta2`` is
illuminated backwards from ``theta2``. The reverse wave leaves towards
``theta3`` with

    sin(theta3) = sin(theta1) + wrap(dphi1 - dphi2) / (2 pi D / lambda)

where ``dphi1``/``dphi2`` are the adjacent-column phase steps the cell
actually produces at the two incidence angles. Reciprocity holds
(``theta3 == theta1``) iff the two steps agree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from risangle.array import ColumnProfile, RisGeometry, wrap_phase
from risangle.circuit import UnitCellModel, gamma_from_params
from risangle.csvio import parse_bool, read_csv, write_csv
from risangle.errors import DomainError, RealizationError, UnstableExpansionError
from risangle.steering import PhaseInverter, design_deflection, realize_columns

SCAN_HEADER = [
    "theta1_deg", "theta2_deg", "delta_phi1_rad", "delta_phi2_rad", "delta_rad",
    "theta3_deg", "deviation_deg", "evanescent", "dispersion_rad",
]
FIRST_ORDER_LIMIT = math.radians(89.0)
NAN = float("nan")


@dataclass(frozen=True)
class ReciprocityReport:
    theta1: float
    theta2: float
    delta_phi_1: float
    delta_phi_2: float
    delta: float
    theta3_exact: float | None
    theta3_first_order: float
    deviation: float
    dispersion: float = 0.0
    feasible: bool = True
    n_infeasible: int = 0

    @property
    def evanescent(self):
        return self.feasible and self.theta3_exact is None


def reciprocity_delta(delta_phi_1: float, delta_phi_2: float, geom: RisGeometry) -> float:
    """Sine-space offset (lambda / 2 pi D) * wrap(dphi1 - dphi2)."""
    return wrap_phase(delta_phi_1 - delta_phi_2) / geom.wavenumber_d


def reverse_angle(theta1: float, delta_phi_1: float, delta_phi_2: float, geom: RisGeometry):
    """Exact reverse reflection angle, or None when the reverse wave is evanescent."""
    if not (math.isfinite(theta1) and abs(theta1) < math.pi / 2):
        raise DomainError(f"|theta1| must be < pi/2, got {theta1!r}")
    delta = reciprocity_delta(delta_phi_1, delta_phi_2, geom)
    if delta == 0.0:
        return theta1
    s = math.sin(theta1) + delta
    if abs(s) > 1.0:
        return None
    return math.asin(s)


def first_order_reverse_angle(theta1: float, delta: float) -> float:
    """theta1 + delta / cos(theta1); refuses |theta1| > 89 deg."""
    if not math.isfinite(theta1) or abs(theta1) > FIRST_ORDER_LIMIT:
        raise UnstableExpansionError(
            f"first-order expansion unstable at theta1 = {math.degrees(theta1):.6g} deg"
        )
    return theta1 + delta / math.cos(theta1)


def profile_phase_difference(model: UnitCellModel, profile: ColumnProfile, angle: float,
                             freq: float, mask=None):
    """Circular mean and circular std of the realized adjacent-column phase steps.

    Phases come from the circuit at each column's capacitance as seen from
    ``angle``. With ``mask`` only steps between two ``True`` columns count.
    """
    caps = profile.capacitances
    if caps is None or np.any(~np.isfinite(caps)):
        raise DomainError("profile needs a capacitance for every column")
    phase = np.angle(gamma_from_params(freq, caps, model.params_at(angle), model.z_free_space))
    steps = wrap_phase(np.diff(phase))
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        steps = steps[mask[:-1] & mask[1:]]
    if steps.size == 0:
        raise DomainError("no usable adjacent column pairs")
    z = np.mean(np.exp(1j * steps))
    r = min(abs(z), 1.0)
    dispersion = math.sqrt(-2.0 * math.log(r)) if r < 1.0 else 0.0
    return float(np.angle(z)), dispersion


def _report(theta1, theta2, dphi1, dphi2, dispersion, geom, n_infeasible=0):
    delta = reciprocity_delta(dphi1, dphi2, geom)
    theta3 = reverse_angle(theta1, dphi1, dphi2, geom)
    try:
        first = first_order_reverse_angle(theta1, delta)
    except UnstableExpansionError:
        first = NAN
    deviation = abs(theta3 - theta1) if theta3 is not None else NAN
    return ReciprocityReport(theta1, theta2, dphi1, dphi2, delta, theta3, first, deviation,
                             dispersion, True, n_infeasible)


def _infeasible_report(theta1, theta2, n_infeasible):
    return ReciprocityReport(theta1, theta2, NAN, NAN, NAN, None, NAN, NAN, NAN, False, n_infeasible)


def reciprocity_scan(model: UnitCellModel, geom: RisGeometry, theta1_grid, theta2_grid,
                     freq: float | None = None, max_infeasible_fraction: float = 0.25):
    """Reports for every (theta1, theta2): design at theta1, realize, measure, compare.

    Rows follow ``theta1_grid``, columns ``theta2_grid``. Columns whose
    target phase falls outside the tunable arc sit at the nearest endpoint
    capacitance and still count in the phase-step statistics (they are what
    the hardware reflects). A cell with more than ``max_infeasible_fraction``
    such columns is reported as infeasible rather than aborting the scan.
    """
    freq = geom.freq if freq is None else freq
    out = []
    for t1 in theta1_grid:
        t1 = float(t1)
        inv = PhaseInverter(model, t1, freq)
        row = []
        for t2 in theta2_grid:
            t2 = float(t2)
            design = design_deflection(geom, t1, t2)
            try:
                design = realize_columns(inv, design, max_infeasible_fraction)
            except RealizationError as exc:
                row.append(_infeasible_report(t1, t2, exc.design.n_infeasible))
                continue
            dphi1, _ = profile_phase_difference(model, design.profile, t1, freq)
            dphi2, disp = profile_phase_difference(model, design.profile, t2, freq)
            row.append(_report(t1, t2, dphi1, dphi2, disp, geom, design.n_infeasible))
        out.append(row)
    return out


def reciprocity_window(reports, threshold: float):
    """Largest origin-centred square |theta1|, |theta2| <= w whose cells all deviate <= threshold.

    Returns ``w`` in radians, or None if not even the innermost cell passes.
    Infeasible and evanescent cells fail the test.
    """
    cells = [r for row in reports for r in row]
    if not cells:
        return None
    ok = {}
    for r in cells:
        ok[(r.theta1, r.theta2)] = r.feasible and r.theta3_exact is not None and r.deviation <= threshold
    radii = sorted({max(abs(r.theta1), abs(r.theta2)) for r in cells})
    best = None
    for w in radii:
        inside = [v for (a, b), v in ok.items() if abs(a) <= w and abs(b) <= w]
        if inside and all(inside):
            best = w
        else:
            break
    return best


def cells_within(reports, threshold: float):
    return [r for row in reports for r in row
            if r.feasible and r.theta3_exact is not None and r.deviation <= threshold]


def write_scan_csv(reports, path):
    rows = []
    for row in reports:
        for r in row:
            theta3 = math.degrees(r.theta3_exact) if r.theta3_exact is not None else NAN
            rows.append((
                math.degrees(r.theta1), math.degrees(r.theta2), r.delta_phi_1, r.delta_phi_2,
                r.delta, theta3, math.degrees(r.deviation), r.evanescent, r.dispersion,
            ))
    return write_csv(path, SCAN_HEADER, rows)


def read_scan_csv(path):
    """List of dicts keyed by the scan header; numbers as floats."""
    out = []
    for row in read_csv(path, SCAN_HEADER):
        rec = {k: float(v) for k, v in zip(SCAN_HEADER, row) if k != "evanescent"}
        rec["evanescent"] = parse_bool(row[SCAN_HEADER.index("evanescent")])
        out.append(rec)
    return out
