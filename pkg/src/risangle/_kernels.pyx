# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled twins of the routines in ``_kernels_py``.

Operation order matches the fallback exactly; keep them in sync.
"""
import numpy as np

from libc.math cimport atan2, cos, fabs, floor, sin

cdef double SINGULAR_RTOL = 1e-14
cdef double TWO_PI = 6.283185307179586


cdef inline bint _gamma(double freq, double cap, double lb, double lt, double rt,
                        double ct, double z0, double* gr, double* gi) noexcept nogil:
    cdef double a = freq * lb
    cdef double sr = rt
    cdef double si = freq * lt - 1.0 / (freq * ct) - 1.0 / (freq * cap)
    cdef double nr = -a * si
    cdef double ni = a * sr
    cdef double dr = sr
    cdef double di = a + si
    cdef double d2 = dr * dr + di * di
    cdef double scale = fabs(a) + fabs(sr) + fabs(si)
    cdef double zr, zi, pr, qr, e2
    if d2 <= SINGULAR_RTOL * SINGULAR_RTOL * scale * scale:
        gr[0] = 1.0
        gi[0] = 0.0
        return True
    zr = (nr * dr + ni * di) / d2
    zi = (ni * dr - nr * di) / d2
    pr = zr - z0
    qr = zr + z0
    e2 = qr * qr + zi * zi
    gr[0] = (pr * qr + zi * zi) / e2
    gi[0] = (zi * qr - pr * zi) / e2
    return False


def gamma_scalar(double freq, double cap, double lb, double lt, double rt,
                 double ct, double z0):
    cdef double gr, gi
    cdef bint sing = _gamma(freq, cap, lb, lt, rt, ct, z0, &gr, &gi)
    return gr, gi, bool(sing)


def gamma_array(freq, cap, double lb, double lt, double rt, double ct, double z0):
    cdef const double[::1] f = np.ascontiguousarray(freq, dtype=np.float64)
    cdef const double[::1] c = np.ascontiguousarray(cap, dtype=np.float64)
    cdef Py_ssize_t n = f.shape[0], i
    out = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] o = out
    cdef double gr, gi
    cdef Py_ssize_t nsing = 0
    with nogil:
        for i in range(n):
            if _gamma(f[i], c[i], lb, lt, rt, ct, z0, &gr, &gi):
                nsing += 1
            o[i] = gr + 1j * gi
    return out.reshape(np.shape(freq)), nsing


cdef inline double _progress(double freq, double cap, double lb, double lt, double rt,
                             double ct, double z0, double phase_start,
                             double direction) noexcept nogil:
    cdef double gr, gi, p
    _gamma(freq, cap, lb, lt, rt, ct, z0, &gr, &gi)
    p = direction * (atan2(gi, gr) - phase_start)
    return p - TWO_PI * floor(p / TWO_PI)


def solve_capacitance(double freq, double lb, double lt, double rt, double ct,
                      double z0, double c_lo, double c_hi, double phase_start,
                      double direction, double target, double tol, int maxiter):
    cdef double lo = c_lo, hi = c_hi, mid = c_lo, err
    cdef int it
    with nogil:
        for it in range(1, maxiter + 1):
            mid = 0.5 * (lo + hi)
            err = _progress(freq, mid, lb, lt, rt, ct, z0, phase_start, direction) - target
            if fabs(err) <= tol:
                break
            if err < 0.0:
                lo = mid
            else:
                hi = mid
        else:
            it = maxiter + 1
    if it > maxiter:
        return mid, maxiter, False
    return mid, it, True


def array_factor_power(phases, amps, double k, double sin_in, sin_obs):
    cdef const double[::1] ph = np.ascontiguousarray(phases, dtype=np.float64)
    cdef const double[::1] am = np.ascontiguousarray(amps, dtype=np.float64)
    obs_arr = np.ascontiguousarray(np.atleast_1d(sin_obs), dtype=np.float64)
    cdef const double[::1] so = obs_arr
    cdef Py_ssize_t n = ph.shape[0], m = so.shape[0], i, j
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] o = out
    cdef double re, im, step, arg
    with nogil:
        for i in range(m):
            step = k * (sin_in + so[i])
            re = 0.0
            im = 0.0
            for j in range(n):
                arg = ph[j] + j * step
                re += am[j] * cos(arg)
                im += am[j] * sin(arg)
            o[i] = re * re + im * im
    return out
