"""Pure-Python/numpy implementations of the hot kernels.

Every routine here has a twin in ``_kernels.pyx`` that performs the same
floating-point operations in the same order, so both backends give
bit-identical reflection coefficients and bisection results.
"""
import math

import numpy as np

# |den| below this fraction of the branch magnitudes counts as a singular resonance
SINGULAR_RTOL = 1e-14


def gamma_scalar(freq, cap, lb, lt, rt, ct, z0):
    """Reflection coefficient of one cell as ``(re, im, singular)``.

    Reactances use the f-scaled convention ``X = f*L`` and ``X = -1/(f*C)``.
    """
    a = freq * lb
    sr = rt
    si = freq * lt - 1.0 / (freq * ct) - 1.0 / (freq * cap)
    nr = -a * si
    ni = a * sr
    dr = sr
    di = a + si
    d2 = dr * dr + di * di
    scale = abs(a) + abs(sr) + abs(si)
    if d2 <= SINGULAR_RTOL * SINGULAR_RTOL * scale * scale:
        return 1.0, 0.0, True
    zr = (nr * dr + ni * di) / d2
    zi = (ni * dr - nr * di) / d2
    pr = zr - z0
    qr = zr + z0
    e2 = qr * qr + zi * zi
    gr = (pr * qr + zi * zi) / e2
    gi = (zi * qr - pr * zi) / e2
    return gr, gi, False


def gamma_array(freq, cap, lb, lt, rt, ct, z0):
    """Vectorized :func:`gamma_scalar` over equal-length float64 arrays.

    Returns ``(gamma, n_singular)``; singular entries are set to ``1+0j``.
    """
    freq = np.ascontiguousarray(freq, dtype=np.float64)
    cap = np.ascontiguousarray(cap, dtype=np.float64)
    a = freq * lb
    sr = rt
    si = freq * lt - 1.0 / (freq * ct) - 1.0 / (freq * cap)
    nr = -a * si
    ni = a * sr
    dr = sr
    di = a + si
    d2 = dr * dr + di * di
    scale = np.abs(a) + abs(sr) + np.abs(si)
    singular = d2 <= SINGULAR_RTOL * SINGULAR_RTOL * scale * scale
    d2 = np.where(singular, 1.0, d2)
    zr = (nr * dr + ni * di) / d2
    zi = (ni * dr - nr * di) / d2
    pr = zr - z0
    qr = zr + z0
    e2 = qr * qr + zi * zi
    gr = (pr * qr + zi * zi) / e2
    gi = (zi * qr - pr * zi) / e2
    out = np.empty(freq.shape, dtype=np.complex128)
    out.real = np.where(singular, 1.0, gr)
    out.imag = np.where(singular, 0.0, gi)
    return out, int(np.count_nonzero(singular))


def _progress(freq, cap, lb, lt, rt, ct, z0, phase_start, direction):
    gr, gi, _ = gamma_scalar(freq, cap, lb, lt, rt, ct, z0)
    p = direction * (math.atan2(gi, gr) - phase_start)
    return p - 2.0 * math.pi * math.floor(p / (2.0 * math.pi))


def solve_capacitance(freq, lb, lt, rt, ct, z0, c_lo, c_hi, phase_start,
                      direction, target, tol, maxiter):
    """Bisect for the capacitance whose phase progress equals ``target``.

    Phase progress is ``direction * (arg Gamma(C) - phase_start)`` reduced to
    [0, 2*pi); it is zero at ``c_lo`` and increases monotonically towards
    ``c_hi``. Returns ``(c, iterations, converged)``.
    """
    lo = c_lo
    hi = c_hi
    mid = lo
    for it in range(1, maxiter + 1):
        mid = 0.5 * (lo + hi)
        err = _progress(freq, mid, lb, lt, rt, ct, z0, phase_start, direction) - target
        if abs(err) <= tol:
            return mid, it, True
        if err < 0.0:
            lo = mid
        else:
            hi = mid
    return mid, maxiter, False


def array_factor_power(phases, amps, k, sin_in, sin_obs):
    """``|sum_n A_n exp(j(phi_n + n*k*(sin_in + sin_obs)))|**2`` per observation."""
    phases = np.asarray(phases, dtype=np.float64)
    amps = np.asarray(amps, dtype=np.float64)
    sin_obs = np.atleast_1d(np.asarray(sin_obs, dtype=np.float64))
    n = np.arange(phases.size, dtype=np.float64)
    arg = phases[None, :] + np.outer(k * (sin_in + sin_obs), n)
    re = (amps[None, :] * np.cos(arg)).sum(axis=1)
    im = (amps[None, :] * np.sin(arg)).sum(axis=1)
    return re * re + im * im
