"""Phase-gradient deflection design and its realization with varactor capacitances."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from risangle import kernels
from risangle.array import ColumnProfile, RisGeometry, wrap_phase
from risangle.circuit import PF, UnitCellModel, gamma_from_params
from risangle.csvio import parse_bool, read_csv, write_csv
from risangle.errors import (
    DomainError,
    InfeasiblePhaseError,
    NonMonotoneError,
    RealizationError,
)

TWO_PI = 2.0 * math.pi
PHASE_TOL = 1e-6
MAX_BISECTION_ITER = 200
REALIZE_TOL = 1e-9
DESIGN_HEADER = ["column", "phase_rad", "capacitance_pF", "feasible"]


@dataclass
class DeflectionDesign:
    theta_in: float
    theta_out: float
    delta_phi: float
    profile: ColumnProfile
    # None until realize_profile has run
    feasible_per_column: np.ndarray | None = None

    @property
    def n_infeasible(self):
        if self.feasible_per_column is None:
            return 0
        return int(np.count_nonzero(~self.feasible_per_column))

    @property
    def infeasible_fraction(self):
        return self.n_infeasible / len(self.profile)


def design_deflection(geom: RisGeometry, theta_in: float, theta_out: float) -> DeflectionDesign:
    """Arithmetic-progression phases steering ``theta_in`` into ``theta_out``.

    The gradient solves -kD sin(out) = dphi + kD sin(in) (mod 2 pi), reduced
    to (-pi, pi]; column 0 carries phase 0.
    """
    for a in (theta_in, theta_out):
        if not (math.isfinite(a) and abs(a) < math.pi / 2):
            raise DomainError(f"|angle| must be < pi/2, got {a!r}")
    dphi = wrap_phase(-geom.wavenumber_d * (math.sin(theta_in) + math.sin(theta_out)))
    n = np.arange(geom.n_columns)
    profile = ColumnProfile(wrap_phase(n * dphi))
    return DeflectionDesign(theta_in, theta_out, dphi, profile)


def _phase_curve(params, z0, freq, c_min, c_max, n_grid, max_step=math.pi / 4, max_refine=16):
    """Capacitance grid (log-spaced, refined where the phase moves fast) and unwrapped phase."""
    caps = np.geomspace(c_min, c_max, max(int(n_grid), 2))
    caps[0], caps[-1] = c_min, c_max
    phase = np.angle(gamma_from_params(freq, caps, params, z0))
    for _ in range(max_refine):
        jumps = np.abs(wrap_phase(np.diff(phase))) > max_step
        if not jumps.any():
            break
        idx = np.flatnonzero(jumps)
        mids = np.sqrt(caps[idx] * caps[idx + 1])
        mid_phase = np.angle(gamma_from_params(freq, mids, params, z0))
        caps = np.insert(caps, idx + 1, mids)
        phase = np.insert(phase, idx + 1, mid_phase)
    return caps, phase[0] + np.concatenate(([0.0], np.cumsum(wrap_phase(np.diff(phase)))))


class PhaseInverter:
    """Reusable capacitance solver for one (angle, frequency) operating point.

    The phase curve over ``[c_min, c_max]`` is sampled once; each call to
    :meth:`solve` then bisects in the compiled kernel.
    """

    def __init__(self, model: UnitCellModel, angle: float, freq: float, n_grid: int = 64):
        self.params = model.params_at(angle)
        self.z0 = model.z_free_space
        self.freq = float(freq)
        self.c_min = model.varactor.c_min
        self.c_max = model.varactor.c_max
        self.caps, self.unwrapped = _phase_curve(
            self.params, self.z0, self.freq, self.c_min, self.c_max, n_grid
        )
        steps = np.diff(self.unwrapped)
        self.span = float(self.unwrapped[-1] - self.unwrapped[0])
        self.monotone = bool(np.all(steps > 0) or np.all(steps < 0))
        self.constant = bool(np.all(steps == 0))
        self.width = float(self.unwrapped.max() - self.unwrapped.min())
        gr, gi, _ = kernels.gamma_scalar(self.freq, self.c_min, *self.params.as_tuple(), self.z0)
        self.phase_start = math.atan2(gi, gr)
        gr, gi, _ = kernels.gamma_scalar(self.freq, self.c_max, *self.params.as_tuple(), self.z0)
        self.phase_end = math.atan2(gi, gr)

    @property
    def phase_range(self):
        """``(phase_lo, phase_hi, width)``: the arc runs counter-clockwise lo -> hi."""
        lo = float(self.unwrapped.min())
        return wrap_phase(lo), wrap_phase(lo + self.width), self.width

    def phase_at(self, cap):
        return float(np.angle(gamma_from_params(self.freq, cap, self.params, self.z0)))

    def nearest_endpoint(self, target):
        d_lo = abs(wrap_phase(self.phase_start - target))
        d_hi = abs(wrap_phase(self.phase_end - target))
        return self.c_min if d_lo <= d_hi else self.c_max

    def solve(self, target, tol=PHASE_TOL, maxiter=MAX_BISECTION_ITER):
        if abs(wrap_phase(self.phase_start - target)) <= tol:
            return self.c_min
        if abs(wrap_phase(self.phase_end - target)) <= tol:
            return self.c_max
        lo, hi, width = self.phase_range
        if self.constant:
            raise InfeasiblePhaseError(
                f"phase is independent of C here; target {target:.6g} unreachable", target, lo, hi
            )
        if not self.monotone:
            raise NonMonotoneError("reflection phase is not monotone in capacitance at this operating point")
        if width >= TWO_PI:
            raise NonMonotoneError("phase sweeps more than a full turn; inversion is ambiguous")
        direction = 1.0 if self.span > 0 else -1.0
        t_rel = (direction * (target - self.phase_start)) % TWO_PI
        if t_rel > width:
            raise InfeasiblePhaseError(
                f"target phase {target:.6g} rad outside achievable arc [{lo:.6g}, {hi:.6g}]",
                target, lo, hi,
            )
        cap, _, converged = kernels.solve_capacitance(
            self.freq, *self.params.as_tuple(), self.z0, self.c_min, self.c_max,
            self.phase_start, direction, t_rel, tol, maxiter,
        )
        if not converged or abs(wrap_phase(self.phase_at(cap) - target)) > tol:
            raise NonMonotoneError("bisection failed to converge; phase bracket is not monotone")
        return cap


def phase_to_capacitance(model: UnitCellModel, angle: float, freq: float, target_phase: float,
                         tol: float = PHASE_TOL) -> float:
    """Varactor capacitance whose reflection phase equals ``target_phase`` (mod 2 pi)."""
    return PhaseInverter(model, angle, freq).solve(target_phase, tol)


def realize_profile(model: UnitCellModel, design: DeflectionDesign, geom: RisGeometry,
                    max_infeasible_fraction: float = 0.0, freq: float | None = None) -> DeflectionDesign:
    """Per-column capacitances for ``design`` at its incidence angle.

    Unreachable target phases keep their target in the profile, are flagged
    in ``feasible_per_column``, and get the endpoint capacitance whose phase
    is circularly nearest. Raises RealizationError (carrying the partial
    design) when the flagged fraction exceeds ``max_infeasible_fraction``.
    """
    design.profile.check_geometry(geom)
    freq = geom.freq if freq is None else freq
    return realize_columns(PhaseInverter(model, design.theta_in, freq), design, max_infeasible_fraction)


def realize_columns(inv: PhaseInverter, design: DeflectionDesign,
                    max_infeasible_fraction: float = 0.0) -> DeflectionDesign:
    """:func:`realize_profile` with a prebuilt inverter (the scan reuses one per incidence angle)."""
    caps = np.empty(len(design.profile))
    feasible = np.ones(len(design.profile), dtype=bool)
    for i, target in enumerate(design.profile.phases):
        try:
            caps[i] = inv.solve(target, REALIZE_TOL)
        except InfeasiblePhaseError:
            feasible[i] = False
            caps[i] = inv.nearest_endpoint(target)
    profile = ColumnProfile(design.profile.phases.copy(), design.profile.amplitudes.copy(), caps)
    out = replace(design, profile=profile, feasible_per_column=feasible)
    if out.infeasible_fraction > max_infeasible_fraction:
        raise RealizationError(
            f"{out.n_infeasible}/{len(profile)} columns infeasible "
            f"(allowed fraction {max_infeasible_fraction:g})",
            design=out,
        )
    return out


def realized_profile(model: UnitCellModel, design: DeflectionDesign, angle: float, freq: float) -> ColumnProfile:
    """What the hardware actually reflects: Gamma at each column's capacitance seen from ``angle``."""
    caps = design.profile.capacitances
    if caps is None:
        raise DomainError("design has no capacitances; run realize_profile first")
    params = model.params_at(angle)
    gamma = gamma_from_params(freq, caps, params, model.z_free_space)
    return ColumnProfile.from_gamma(gamma, caps.copy())


def tunable_phase_range(model: UnitCellModel, angle: float, freq: float, n_grid: int = 64):
    """``(phase_lo, phase_hi, width)`` of reflection phase reachable over [c_min, c_max]."""
    return PhaseInverter(model, angle, freq, n_grid).phase_range


def select_operating_frequency(model: UnitCellModel, angle: float, f_grid, n_grid: int = 64) -> float:
    """Grid frequency with the widest tunable phase range; ties go to the lowest frequency."""
    f_grid = [float(f) for f in f_grid]
    if not f_grid:
        raise DomainError("empty frequency grid")
    widths = [tunable_phase_range(model, angle, f, n_grid)[2] for f in f_grid]
    best = max(widths)
    return min(f for f, w in zip(f_grid, widths) if w == best)


def write_design_csv(design: DeflectionDesign, path):
    prof = design.profile
    caps = prof.capacitances if prof.capacitances is not None else np.full(len(prof), np.nan)
    feas = design.feasible_per_column
    if feas is None:
        feas = np.zeros(len(prof), dtype=bool)
    rows = [(i, prof.phases[i], caps[i] / PF, bool(feas[i])) for i in range(len(prof))]
    return write_csv(path, DESIGN_HEADER, rows)


def read_design_csv(path):
    """``(phases, capacitances [F], feasible)`` arrays from a design CSV."""
    rows = read_csv(path, DESIGN_HEADER)
    phases = np.array([float(r[1]) for r in rows])
    caps = np.array([float(r[2]) for r in rows]) * PF
    feasible = np.array([parse_bool(r[3]) for r in rows])
    return phases, caps, feasible
