# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled mean-field kernels; mirrors ``_kernels_py`` exactly."""

from libc.math cimport cos, sin, sqrt, fabs, pow

import numpy as np

cdef enum:
    NP = 13
    ST_OK = 0
    ST_UNDERFLOW = 1
    ST_MAX_STEPS = 2

N_PARAMS = NP
STATUS_OK = ST_OK
STATUS_UNDERFLOW = ST_UNDERFLOW
STATUS_MAX_STEPS = ST_MAX_STEPS

cdef double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9
cdef double A21 = 1.0 / 5
cdef double A31 = 3.0 / 40, A32 = 9.0 / 40
cdef double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9
cdef double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187
cdef double A53 = 64448.0 / 6561, A54 = -212.0 / 729
cdef double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247
cdef double A64 = 49.0 / 176, A65 = -5103.0 / 18656
cdef double A71 = 35.0 / 384, A73 = 500.0 / 1113, A74 = 125.0 / 192
cdef double A75 = -2187.0 / 6784, A76 = 11.0 / 84
cdef double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920
cdef double E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40


cdef inline void _torque(const double* p, double t, const double* s,
                         double* out) noexcept nogil:
    cdef double axx = p[0], ayy = p[1], azz = p[2]
    cdef double axy = p[3], axz = p[4], ayz = p[5]
    cdef double a, c, sn, bx, by, bz
    cdef double x = s[0], y = s[1], z = s[2]
    if p[6] != 0.0:
        a = p[7] * t + p[8]
        c = cos(a)
        sn = sin(a)
        axx += p[6] * c
        ayy -= p[6] * c
        axy -= p[6] * sn
    bx = 2.0 * (axx * x + axy * y + axz * z) + p[9]
    by = 2.0 * (axy * x + ayy * y + ayz * z) + p[10]
    bz = 2.0 * (axz * x + ayz * y + azz * z) + p[11]
    out[0] = by * z - bz * y - p[12] * x * z
    out[1] = bz * x - bx * z - p[12] * y * z
    out[2] = bx * y - by * x + p[12] * (x * x + y * y)


cdef inline double _ratio(double e, double y0, double y1, double atol,
                          double rtol) noexcept nogil:
    cdef double m = fabs(y0)
    if fabs(y1) > m:
        m = fabs(y1)
    return fabs(e) / (atol + rtol * m)


cdef int _dopri(const double* p, double* y, const double* t_out, int n_out,
                double rtol, double atol, double h0, long max_steps,
                double* ys, long* counts, double* t_last) noexcept nogil:
    """Integrate in place; ``ys`` receives one row per output time reached."""
    cdef double t = t_out[0]
    cdef double t_end = t_out[n_out - 1]
    cdef double k1[3]
    cdef double k2[3]
    cdef double k3[3]
    cdef double k4[3]
    cdef double k5[3]
    cdef double k6[3]
    cdef double k7[3]
    cdef double tmp[3]
    cdef double yn[3]
    cdef double h, h_try, h_min, err, r, fac, ynorm, fnorm, target
    cdef long n_acc = 0, n_rej = 0
    cdef int k = 1, i, last
    ys[0] = y[0]
    ys[1] = y[1]
    ys[2] = y[2]
    _torque(p, t, y, k1)
    h = h0
    if h <= 0.0:
        ynorm = sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2])
        fnorm = sqrt(k1[0] * k1[0] + k1[1] * k1[1] + k1[2] * k1[2])
        h = t_end - t
        if fnorm != 0.0 and ynorm != 0.0 and 0.01 * ynorm / fnorm < h:
            h = 0.01 * ynorm / fnorm
    if h <= 0.0:
        h = 1.0
    h_min = fabs(t_end - t)
    if fabs(t_end) > h_min:
        h_min = fabs(t_end)
    if h_min < 1e-300:
        h_min = 1e-300
    h_min *= 1e-14
    while k < n_out:
        target = t_out[k]
        if t >= target:
            for i in range(3):
                ys[3 * k + i] = y[i]
            k += 1
            continue
        if n_acc + n_rej >= max_steps:
            counts[0] = n_acc
            counts[1] = n_rej
            t_last[0] = t
            return ST_MAX_STEPS
        last = 0
        if t + h >= target:
            h_try = target - t
            last = 1
        else:
            h_try = h
        for i in range(3):
            tmp[i] = y[i] + h_try * A21 * k1[i]
        _torque(p, t + C2 * h_try, tmp, k2)
        for i in range(3):
            tmp[i] = y[i] + h_try * (A31 * k1[i] + A32 * k2[i])
        _torque(p, t + C3 * h_try, tmp, k3)
        for i in range(3):
            tmp[i] = y[i] + h_try * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
        _torque(p, t + C4 * h_try, tmp, k4)
        for i in range(3):
            tmp[i] = y[i] + h_try * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i]
                                     + A54 * k4[i])
        _torque(p, t + C5 * h_try, tmp, k5)
        for i in range(3):
            tmp[i] = y[i] + h_try * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i]
                                     + A64 * k4[i] + A65 * k5[i])
        _torque(p, t + h_try, tmp, k6)
        for i in range(3):
            yn[i] = y[i] + h_try * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i]
                                    + A75 * k5[i] + A76 * k6[i])
        _torque(p, t + h_try, yn, k7)
        err = 0.0
        for i in range(3):
            r = _ratio(h_try * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i]
                                + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]),
                       y[i], yn[i], atol, rtol)
            if r > err:
                err = r
        if err <= 1.0:
            if last:
                t = target
            else:
                t = t + h_try
            for i in range(3):
                y[i] = yn[i]
                k1[i] = k7[i]
            n_acc += 1
            if last:
                for i in range(3):
                    ys[3 * k + i] = y[i]
                k += 1
            if err == 0.0:
                fac = 5.0
            else:
                fac = 0.9 * pow(err, -0.2)
                if fac > 5.0:
                    fac = 5.0
                elif fac < 0.2:
                    fac = 0.2
            if not last or fac < 1.0:
                h = h_try * fac
        else:
            n_rej += 1
            fac = 0.9 * pow(err, -0.2)
            if fac < 0.2:
                fac = 0.2
            h = h_try * fac
        if h < h_min:
            counts[0] = n_acc
            counts[1] = n_rej
            t_last[0] = t
            return ST_UNDERFLOW
    counts[0] = n_acc
    counts[1] = n_rej
    t_last[0] = t
    return ST_OK


def _params(params):
    p = np.ascontiguousarray(params, dtype=np.float64)
    if p.shape != (NP,):
        raise ValueError(f"expected {NP} parameters, got {p.size}")
    return p


def torque(params, double t, state):
    """Torque dJ/dt at time ``t``; returns a length-3 array."""
    cdef double[::1] p = _params(params)
    cdef double[::1] s = np.ascontiguousarray(state, dtype=np.float64)
    out = np.empty(3)
    cdef double[::1] o = out
    _torque(&p[0], t, &s[0], &o[0])
    return out


def integrate(params, y0, t_out, double rtol, double atol, double h0=0.0,
              long max_steps=1_000_000):
    """Adaptive Dormand-Prince integration sampled exactly at ``t_out``.

    Same contract as ``_kernels_py.integrate``.
    """
    cdef double[::1] p = _params(params)
    cdef double[::1] times = np.ascontiguousarray(t_out, dtype=np.float64)
    cdef int n_out = times.shape[0]
    y = np.array(y0, dtype=np.float64).reshape(3)
    cdef double[::1] yv = y
    ys = np.zeros((n_out, 3))
    cdef double[:, ::1] ysv = ys
    cdef long counts[2]
    cdef double t_last = 0.0
    cdef int status
    with nogil:
        status = _dopri(&p[0], &yv[0], &times[0], n_out, rtol, atol, h0,
                        max_steps, &ysv[0, 0], counts, &t_last)
    reached = n_out
    if status != STATUS_OK:
        reached = int(np.searchsorted(times, t_last, side="right"))
    return ys[:reached].copy(), counts[0], counts[1], status, t_last, y


def flow_batch(params, starts, double duration, double rtol, double atol,
               long max_steps=1_000_000):
    """Propagate every row of ``starts`` for ``duration`` (GIL released)."""
    cdef double[::1] p = _params(params)
    finals = np.array(starts, dtype=np.float64, order="C").reshape(-1, 3)
    cdef double[:, ::1] fv = finals
    cdef Py_ssize_t n = fv.shape[0], i
    status = np.zeros(n, dtype=np.int64)
    cdef long long[::1] sv = status
    cdef double times[2]
    cdef double ys[6]
    cdef long counts[2]
    cdef double t_last
    times[0] = 0.0
    times[1] = duration
    with nogil:
        for i in range(n):
            sv[i] = _dopri(&p[0], &fv[i, 0], times, 2, rtol, atol, 0.0,
                           max_steps, ys, counts, &t_last)
    return finals, status
