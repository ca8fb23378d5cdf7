"""Column-steered RIS geometry, array responses and the diagonal reflection."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from risangle.errors import DomainError

SPEED_OF_LIGHT = 299_792_458.0


def wrap_phase(x):
    """Map phases to (-pi, pi]."""
    x = np.asarray(x, dtype=np.float64)
    inside = (x > -np.pi) & (x <= np.pi)
    w = np.where(inside, x, np.pi - np.mod(np.pi - x, 2.0 * np.pi))
    return float(w) if w.ndim == 0 else w


@dataclass(frozen=True)
class RisGeometry:
    """N independently biased columns of period ``period_d`` at carrier ``freq``.

    ``m_rows`` is kept for bookkeeping only: every cell in a column shares
    one bias, so the model is one-dimensional.
    """

    n_columns: int
    period_d: float
    freq: float
    m_rows: int = 1

    def __post_init__(self):
        if int(self.n_columns) != self.n_columns or self.n_columns < 2:
            raise DomainError("n_columns must be an integer >= 2")
        if int(self.m_rows) != self.m_rows or self.m_rows < 1:
            raise DomainError("m_rows must be a positive integer")
        if not (math.isfinite(self.period_d) and self.period_d > 0):
            raise DomainError("period_d must be > 0")
        if not (math.isfinite(self.freq) and self.freq > 0):
            raise DomainError("freq must be > 0")

    @property
    def wavelength(self):
        return SPEED_OF_LIGHT / self.freq

    @property
    def d_over_lambda(self):
        return self.period_d / self.wavelength

    @property
    def wavenumber_d(self):
        """Inter-column phase scale 2*pi*D/lambda."""
        return 2.0 * math.pi * self.period_d / self.wavelength

    @property
    def grating_lobe_free(self):
        return self.d_over_lambda < 0.5


@dataclass
class ColumnProfile:
    phases: np.ndarray
    amplitudes: np.ndarray | None = None
    capacitances: np.ndarray | None = None

    def __post_init__(self):
        self.phases = wrap_phase(np.atleast_1d(np.asarray(self.phases, dtype=np.float64)))
        n = self.phases.size
        if self.amplitudes is None:
            self.amplitudes = np.ones(n)
        else:
            self.amplitudes = np.asarray(self.amplitudes, dtype=np.float64)
        if self.amplitudes.shape != (n,):
            raise DomainError("amplitudes must match phases in length")
        if np.any(self.amplitudes < 0.0) or np.any(self.amplitudes > 1.0):
            raise DomainError("amplitudes must lie in [0, 1]")
        if self.capacitances is not None:
            self.capacitances = np.asarray(self.capacitances, dtype=np.float64)
            if self.capacitances.shape != (n,):
                raise DomainError("capacitances must match phases in length")

    def __len__(self):
        return self.phases.size

    @property
    def coefficients(self):
        return self.amplitudes * np.exp(1j * self.phases)

    @classmethod
    def from_gamma(cls, gamma, capacitances=None):
        """Profile from complex per-column reflection coefficients (|gamma| <= 1)."""
        gamma = np.asarray(gamma, dtype=np.complex128)
        return cls(np.angle(gamma), np.minimum(np.abs(gamma), 1.0), capacitances)

    def check_geometry(self, geom: RisGeometry):
        if len(self) != geom.n_columns:
            raise DomainError(f"profile has {len(self)} columns, geometry has {geom.n_columns}")


def _check_angle(angle):
    if not (math.isfinite(angle) and abs(angle) < math.pi / 2):
        raise DomainError(f"|angle| must be < pi/2, got {angle!r}")


def array_response_in(geom: RisGeometry, angle: float) -> np.ndarray:
    """Incident plane-wave phases across the columns: exp(j n kD sin(angle)), n = 0..N-1."""
    _check_angle(angle)
    n = np.arange(geom.n_columns)
    return np.exp(1j * n * geom.wavenumber_d * math.sin(angle))


def array_response_out(geom: RisGeometry, angle: float) -> np.ndarray:
    """Reflected-wave steering vector towards ``angle`` (negated exponent)."""
    _check_angle(angle)
    n = np.arange(geom.n_columns)
    return np.exp(-1j * n * geom.wavenumber_d * math.sin(angle))


def reflect(profile: ColumnProfile, a_in) -> np.ndarray:
    """y = diag(A e^{j phi}) a_in."""
    a_in = np.asarray(a_in, dtype=np.complex128)
    if a_in.shape != (len(profile),):
        raise DomainError(f"a_in has shape {a_in.shape}, profile has {len(profile)} columns")
    return profile.coefficients * a_in
