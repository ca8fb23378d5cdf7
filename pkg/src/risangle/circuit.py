"""Angle-dependent equivalent circuit of a varactor-loaded unit cell.

The cell is a bottom-layer inductance ``L_B`` in parallel with a top-layer
series branch ``R_T + L_T + C_T + C`` where ``C`` is the varactor. All four
circuit values depend on the incidence angle through a calibration table.

Frequency convention
--------------------
Reactances are written as ``X_L = f*L`` and ``X_C = -1/(f*C)`` with ``f`` in
hertz, *not* ``2*pi*f``. The bundled calibration only reproduces its
listed resonance frequencies under this scaling, so it is used
consistently throughout: ``resonance_frequency`` returns
``1/sqrt(L*C)`` and the reflection phase crosses zero there.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from risangle import kernels
from risangle._kernels_py import SINGULAR_RTOL
from risangle.errors import (
    CalibrationRangeError,
    DomainError,
    EmptyTableError,
    ResonanceSingularityError,
    VoltageRangeError,
)

Z0_FREE_SPACE = 376.73

NH = 1e-9
PF = 1e-12
GHZ = 1e9

CALIBRATION_HEADER = ["angle_deg", "L_B_nH", "L_T_nH", "R_T_ohm", "C_T_pF"]
CV_HEADER = ["voltage_V", "capacitance_pF"]


def _finite_positive(name, value):
    if not math.isfinite(value) or value <= 0.0:
        raise DomainError(f"{name} must be finite and > 0, got {value!r}")


@dataclass(frozen=True)
class CircuitParams:
    """Equivalent-circuit values at one incidence angle, SI units.

    ``r_top`` may be zero (lossless cell); the reactive elements must be
    strictly positive.
    """

    l_bottom: float
    l_top: float
    r_top: float
    c_top: float

    def __post_init__(self):
        _finite_positive("l_bottom", self.l_bottom)
        _finite_positive("l_top", self.l_top)
        _finite_positive("c_top", self.c_top)
        if not math.isfinite(self.r_top) or self.r_top < 0.0:
            raise DomainError(f"r_top must be finite and >= 0, got {self.r_top!r}")

    @classmethod
    def from_display_units(cls, l_bottom_nh, l_top_nh, r_top_ohm, c_top_pf):
        return cls(l_bottom_nh * NH, l_top_nh * NH, float(r_top_ohm), c_top_pf * PF)

    def as_tuple(self):
        return (self.l_bottom, self.l_top, self.r_top, self.c_top)


@dataclass(frozen=True)
class CalibrationTable:
    """Knots ``(angle [rad], CircuitParams)`` with strictly increasing angles."""

    entries: tuple
    provenance: str = ""

    def __post_init__(self):
        entries = tuple((float(a), p) for a, p in self.entries)
        if not entries:
            raise EmptyTableError("calibration table needs at least one entry")
        angles = [a for a, _ in entries]
        for a in angles:
            if not (0.0 <= a < math.pi / 2):
                raise DomainError(f"calibration angle {a!r} rad outside [0, pi/2)")
        if any(b <= a for a, b in zip(angles, angles[1:])):
            raise DomainError("calibration angles must be strictly increasing")
        for _, p in entries:
            if not isinstance(p, CircuitParams):
                raise TypeError("calibration entries must hold CircuitParams")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def single(cls, params, provenance="angle-independent"):
        return cls(((0.0, params),), provenance)

    @property
    def angles(self):
        return np.array([a for a, _ in self.entries])

    def __len__(self):
        return len(self.entries)


def read_calibration_csv(path) -> CalibrationTable:
    """Parse a calibration CSV (degrees, nH, ohm, pF) into SI knots."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != CALIBRATION_HEADER:
            raise ValueError(f"{path}: expected header {','.join(CALIBRATION_HEADER)}")
        entries = []
        for lineno, row in enumerate(reader, start=2):
            if not row or not "".join(row).strip():
                continue
            if len(row) != 5:
                raise ValueError(f"{path}:{lineno}: expected 5 fields, got {len(row)}")
            ang, lb, lt, rt, ct = (float(x) for x in row)
            entries.append((math.radians(ang), CircuitParams.from_display_units(lb, lt, rt, ct)))
    return CalibrationTable(tuple(entries), provenance=str(path))


def write_calibration_csv(table: CalibrationTable, path):
    with Path(path).open("w", newline="") as fh:
        fh.write(",".join(CALIBRATION_HEADER) + "\n")
        for ang, p in table.entries:
            fields = (math.degrees(ang), p.l_bottom / NH, p.l_top / NH, p.r_top, p.c_top / PF)
            fh.write(",".join(f"{v:.9g}" for v in fields) + "\n")
    return Path(path)


def default_calibration() -> CalibrationTable:
    """Bundled calibration knots at 0, 30 and 40 degrees."""
    ref = resources.files("risangle") / "data" / "table1.csv"
    with resources.as_file(ref) as path:
        table = read_calibration_csv(path)
    return CalibrationTable(table.entries, provenance="bundled calibration")


def interpolate_params(table: CalibrationTable, angle: float, mode: str = "clamp") -> CircuitParams:
    """Circuit values at ``angle`` by component-wise linear interpolation.

    Negative angles are mirrored (the cell is symmetric). Knots are returned
    as the stored objects. Outside the knot span, ``mode="clamp"`` returns
    the nearest knot and ``mode="strict"`` raises CalibrationRangeError.

    Note: the bundled table has C_T going 15.6 -> 8.9 -> 200 pF across its knots, so
    interpolated C_T between 30 and 40 degrees has no physical backing.
    """
    if mode not in ("clamp", "strict"):
        raise ValueError(f"unknown interpolation mode {mode!r}")
    if not table.entries:
        raise EmptyTableError("empty calibration table")
    if not math.isfinite(angle):
        raise DomainError(f"angle must be finite, got {angle!r}")
    a = abs(angle)
    entries = table.entries
    first, last = entries[0], entries[-1]
    if a < first[0] or a > last[0]:
        if mode == "strict":
            lo, hi = math.degrees(first[0]), math.degrees(last[0])
            raise CalibrationRangeError(
                f"|angle| = {math.degrees(a):.6g} deg outside calibration span [{lo:.6g}, {hi:.6g}] deg"
            )
        return first[1] if a < first[0] else last[1]
    for (a0, p0), (a1, p1) in zip(entries, entries[1:]):
        if a == a0:
            return p0
        if a0 < a < a1:
            t = (a - a0) / (a1 - a0)
            return CircuitParams(
                *(v0 + t * (v1 - v0) for v0, v1 in zip(p0.as_tuple(), p1.as_tuple()))
            )
    return last[1]


@dataclass(frozen=True)
class VaractorModel:
    """Varactor C(V) law between ``(v_at_cmax, c_max)`` and ``(v_at_cmin, c_min)``.

    Without a C-V table an abrupt-junction law
    ``C(V) = c_max / (1 + (V - v_at_cmax)/V_j)**m`` is used, with ``V_j`` fixed
    and the grading exponent ``m`` fitted through both endpoints.
    """

    c_min: float = 0.63 * PF
    c_max: float = 2.67 * PF
    v_at_cmin: float = 30.0
    v_at_cmax: float = 0.0
    cv_table: tuple | None = None
    junction_potential: float = 0.7

    def __post_init__(self):
        _finite_positive("c_min", self.c_min)
        if not self.c_min < self.c_max:
            raise DomainError("need 0 < c_min < c_max")
        if not self.v_at_cmin > self.v_at_cmax:
            raise DomainError("reverse voltage at c_min must exceed voltage at c_max")
        _finite_positive("junction_potential", self.junction_potential)
        if self.cv_table is not None:
            table = tuple((float(v), float(c)) for v, c in self.cv_table)
            if len(table) < 2:
                raise DomainError("C-V table needs at least two points")
            vs = [v for v, _ in table]
            cs = [c for _, c in table]
            if any(b <= a for a, b in zip(vs, vs[1:])):
                raise DomainError("C-V table voltages must be strictly increasing")
            if any(b >= a for a, b in zip(cs, cs[1:])):
                raise DomainError("C-V table capacitance must strictly decrease with voltage")
            ends = ((vs[0], cs[0]), (vs[-1], cs[-1]))
            want = ((self.v_at_cmax, self.c_max), (self.v_at_cmin, self.c_min))
            for (v, c), (vw, cw) in zip(ends, want):
                if not (math.isclose(v, vw, rel_tol=1e-9, abs_tol=1e-12)
                        and math.isclose(c, cw, rel_tol=1e-9)):
                    raise DomainError("C-V table endpoints disagree with c_min/c_max voltages")
            object.__setattr__(self, "cv_table", table)

    @property
    def grading_exponent(self):
        span = (self.v_at_cmin - self.v_at_cmax) / self.junction_potential
        return math.log(self.c_max / self.c_min) / math.log1p(span)

    @classmethod
    def from_cv_table(cls, points, junction_potential=0.7):
        pts = tuple((float(v), float(c)) for v, c in points)
        if len(pts) < 2:
            raise DomainError("C-V table needs at least two points")
        return cls(
            c_min=pts[-1][1], c_max=pts[0][1], v_at_cmin=pts[-1][0], v_at_cmax=pts[0][0],
            cv_table=pts, junction_potential=junction_potential,
        )


def read_cv_csv(path) -> VaractorModel:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != CV_HEADER:
            raise ValueError(f"{path}: expected header {','.join(CV_HEADER)}")
        points = [(float(v), float(c) * PF) for v, c in (r for r in reader if r and "".join(r).strip())]
    return VaractorModel.from_cv_table(points)


def capacitance_from_voltage(varactor: VaractorModel, v: float) -> float:
    """Varactor capacitance in farads at reverse bias ``v`` volts."""
    lo, hi = varactor.v_at_cmax, varactor.v_at_cmin
    if not (lo <= v <= hi):
        raise VoltageRangeError(f"bias {v!r} V outside [{lo}, {hi}] V")
    if varactor.cv_table is not None:
        vs, cs = zip(*varactor.cv_table)
        return float(np.interp(v, vs, cs))
    if v == lo:
        return varactor.c_max
    if v == hi:
        return varactor.c_min
    return varactor.c_max / (1.0 + (v - lo) / varactor.junction_potential) ** varactor.grading_exponent


@dataclass(frozen=True)
class CellGeometry:
    """Physical unit-cell record; informational only, never used in the model."""

    period_d: float = 8e-3
    a1: float = 5.5e-3
    a2: float = 2.9e-3
    a3: float = 1.5e-3
    a4: float = 0.4e-3
    substrate_h: float = 2e-3
    substrate: str = "F4B"
    varactor_part: str = "SMV1405-079LF"


@dataclass(frozen=True)
class UnitCellModel:
    table: CalibrationTable
    varactor: VaractorModel = field(default_factory=VaractorModel)
    z_free_space: float = Z0_FREE_SPACE
    metadata: CellGeometry = field(default_factory=CellGeometry)
    angle_mode: str = "clamp"

    def __post_init__(self):
        _finite_positive("z_free_space", self.z_free_space)
        if self.angle_mode not in ("clamp", "strict"):
            raise ValueError(f"unknown angle_mode {self.angle_mode!r}")

    def params_at(self, angle):
        return interpolate_params(self.table, angle, self.angle_mode)


def default_model(**overrides) -> UnitCellModel:
    """Bundled calibration with the SMV1405 varactor endpoints."""
    return UnitCellModel(table=default_calibration(), **overrides)


def _check_freq_cap(freq, cap):
    f = np.asarray(freq, dtype=np.float64)
    c = np.asarray(cap, dtype=np.float64)
    if not np.all(np.isfinite(f)) or np.any(f <= 0.0):
        raise DomainError("frequency must be finite and > 0")
    if not np.all(np.isfinite(c)) or np.any(c <= 0.0):
        raise DomainError("capacitance must be finite and > 0")
    return f, c


def impedance(angle, freq, cap, params: CircuitParams):
    """Input impedance of the cell (ohm), complex.

    ``angle`` enters only through ``params``; it is accepted so the call
    mirrors Z(theta, f, C). Raises ResonanceSingularityError when the
    parallel denominator vanishes (lossless cell at exact resonance).
    """
    f, c = _check_freq_cap(freq, cap)
    lb, lt, rt, ct = params.as_tuple()
    jf = 1j * f
    series = rt + jf * lt + 1.0 / (jf * ct) + 1.0 / (jf * c)
    shunt = jf * lb
    den = shunt + series
    scale = np.abs(shunt) + np.abs(series)
    if np.any(np.abs(den) <= SINGULAR_RTOL * scale):
        raise ResonanceSingularityError("impedance denominator vanished at resonance")
    z = shunt * series / den
    return complex(z) if z.ndim == 0 else z


def gamma_from_params(freq, cap, params: CircuitParams, z0=Z0_FREE_SPACE):
    """Reflection coefficient for explicit circuit values; broadcasts freq/cap."""
    f, c = _check_freq_cap(freq, cap)
    fb, cb = np.broadcast_arrays(f, c)
    shape = fb.shape
    g, nsing = kernels.gamma_array(fb.ravel(), cb.ravel(), *params.as_tuple(), float(z0))
    if nsing:
        raise ResonanceSingularityError(f"{nsing} evaluation(s) hit an exact lossless resonance")
    g = np.asarray(g).reshape(shape)
    return complex(g) if g.ndim == 0 else g


def reflection_coefficient(angle, freq, cap, model: UnitCellModel):
    """Gamma(theta, f, C) = (Z - Z0)/(Z + Z0) with circuit values taken at ``angle``.

    ``freq`` and ``cap`` broadcast; scalars in, complex scalar out.
    """
    return gamma_from_params(freq, cap, model.params_at(angle), model.z_free_space)


def reflection_phase(angle, freq, cap, model: UnitCellModel):
    return np.angle(reflection_coefficient(angle, freq, cap, model))


def resonance_frequency(params: CircuitParams, cap: float) -> float:
    """1/sqrt((L_B + L_T) * (C_T series C)), hertz, f-scaled convention."""
    _finite_positive("cap", cap)
    c_series = params.c_top * cap / (params.c_top + cap)
    return 1.0 / math.sqrt((params.l_bottom + params.l_top) * c_series)


def table_resonances(table: CalibrationTable, cap: float) -> Sequence[tuple]:
    """``[(angle, f_r), ...]`` for every knot."""
    return [(a, resonance_frequency(p, cap)) for a, p in table.entries]
