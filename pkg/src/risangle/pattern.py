"""Far-field array-factor oracle.

Only array geometry and per-column reflection coefficients go in; nothing
here knows the closed-form reverse-angle expression, so agreement between
the two is an independent check.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from risangle import kernels
from risangle.array import ColumnProfile, RisGeometry
from risangle.csvio import read_csv, write_csv

DEFAULT_GRID_STEP = math.radians(0.1)
CUT_HEADER = ["theta_obs_deg", "power_db"]
POWER_FLOOR = 1e-30


class AmbiguousPeakWarning(UserWarning):
    pass


@dataclass(frozen=True)
class FarFieldCut:
    angles: np.ndarray
    power: np.ndarray
    peak_angle: float
    peak_power: float
    peak_index: int

    @property
    def peak_on_edge(self):
        return self.peak_index in (0, self.angles.size - 1)

    def power_db(self):
        return 10.0 * np.log10(np.maximum(self.power, POWER_FLOOR))


def far_field_power(profile: ColumnProfile, geom: RisGeometry, theta_in: float, theta_obs):
    """|sum_n A_n e^{j phi_n} e^{j n kD (sin theta_in + sin theta_obs)}|^2; array in, array out."""
    profile.check_geometry(geom)
    obs = np.asarray(theta_obs, dtype=np.float64)
    p = kernels.array_factor_power(
        profile.phases, profile.amplitudes, geom.wavenumber_d, math.sin(theta_in),
        np.sin(obs).ravel(),
    )
    return float(p[0]) if obs.ndim == 0 else p.reshape(obs.shape)


def observation_grid(grid_step: float) -> np.ndarray:
    """Multiples of ``grid_step`` strictly inside (-90, 90) degrees, including 0."""
    if not grid_step > 0:
        raise ValueError("grid_step must be > 0")
    n = int(math.ceil((math.pi / 2) / grid_step)) - 1
    return np.arange(-n, n + 1) * grid_step


def _refine(angles, power, i):
    if i == 0 or i == angles.size - 1:
        return float(angles[i])
    y0, y1, y2 = np.log(np.maximum(power[i - 1:i + 2], POWER_FLOOR))
    denom = y0 - 2.0 * y1 + y2
    if denom >= 0.0:
        return float(angles[i])
    offset = 0.5 * (y0 - y2) / denom
    return float(angles[i] + offset * (angles[i + 1] - angles[i]))


def _check_ambiguous(angles, power, i_peak, geom):
    interior = (power[1:-1] >= power[:-2]) & (power[1:-1] >= power[2:])
    maxima = np.flatnonzero(interior) + 1
    if maxima.size < 2:
        return
    close = maxima[power[maxima] >= power[i_peak] * 10 ** (-0.1)]
    lobe = 2.0 / (geom.n_columns * geom.d_over_lambda)  # null-to-null width in sin space
    s = np.sin(angles)
    far = close[np.abs(s[close] - s[i_peak]) > lobe]
    if far.size:
        warnings.warn(
            f"{far.size} competing maxima within 1 dB of the peak at "
            f"{math.degrees(angles[i_peak]):.3f} deg",
            AmbiguousPeakWarning,
            stacklevel=3,
        )


def far_field_cut(profile: ColumnProfile, geom: RisGeometry, theta_in: float,
                  grid_step: float = DEFAULT_GRID_STEP) -> FarFieldCut:
    angles = observation_grid(grid_step)
    power = far_field_power(profile, geom, theta_in, angles)
    i = int(np.argmax(power))
    _check_ambiguous(angles, power, i, geom)
    peak = _refine(angles, power, i)
    return FarFieldCut(angles, power, peak, float(power[i]), i)


def peak_angle(profile: ColumnProfile, geom: RisGeometry, theta_in: float,
               grid_step: float = DEFAULT_GRID_STEP) -> float:
    """Direction of maximum reflected power, refined by a log-power parabola."""
    return far_field_cut(profile, geom, theta_in, grid_step).peak_angle


def reflected_direction(profile: ColumnProfile, geom: RisGeometry, theta_in: float,
                        grid_step: float = DEFAULT_GRID_STEP, min_gain: float = 0.5):
    """Peak angle, or None when no propagating main beam exists.

    A beam counts as propagating when the grid maximum is interior and
    reaches ``min_gain`` times the coherent maximum (sum A_n)^2.
    """
    cut = far_field_cut(profile, geom, theta_in, grid_step)
    coherent = float(np.sum(profile.amplitudes)) ** 2
    if cut.peak_on_edge or cut.peak_power < min_gain * coherent:
        return None
    return cut.peak_angle


def write_cut_csv(cut: FarFieldCut, path):
    db = cut.power_db()
    rows = [(math.degrees(a), p) for a, p in zip(cut.angles, db)]
    return write_csv(path, CUT_HEADER, rows)


def read_cut_csv(path):
    rows = read_csv(path, CUT_HEADER)
    return np.array([float(r[0]) for r in rows]), np.array([float(r[1]) for r in rows])
