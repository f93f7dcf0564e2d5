"""Pure-Python mean-field kernels.

Reference implementation of the hot loops; ``_ckernels.pyx`` mirrors it
line for line.  Both expose the same three functions and the same
parameter layout, so :mod:`cavity_xyz.kernels` can pick either at import.

Parameter vector (13 floats)::

    0..5   axx, ayy, azz, axy, axz, ayz   static quadratic form A0
    6      pair       rotating pair amplitude (chi_P)
    7      delta      four-photon detuning (rad/s)
    8      phase      pair phase offset (rad)
    9..11  hx, hy, hz linear drive
    12     gamma      mean-field superradiance rate

The energy is ``J.A(t).J + h.J`` with ``A(t) = A0 + pair * R(delta*t + phase)``
and ``R(a) = [[cos a, -sin a, 0], [-sin a, -cos a, 0], [0, 0, 0]]``.
"""

from math import cos, sin, sqrt

import numpy as np

N_PARAMS = 13

STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_MAX_STEPS = 2

# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = (
    9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656)
_A71, _A73, _A74, _A75, _A76 = (
    35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84)
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)


def _torque(p, t, x, y, z):
    axx, ayy, azz, axy, axz, ayz, pair, delta, phase, hx, hy, hz, gam = p
    if pair != 0.0:
        a = delta * t + phase
        c = cos(a)
        s = sin(a)
        axx += pair * c
        ayy -= pair * c
        axy -= pair * s
    bx = 2.0 * (axx * x + axy * y + axz * z) + hx
    by = 2.0 * (axy * x + ayy * y + ayz * z) + hy
    bz = 2.0 * (axz * x + ayz * y + azz * z) + hz
    return (
        by * z - bz * y - gam * x * z,
        bz * x - bx * z - gam * y * z,
        bx * y - by * x + gam * (x * x + y * y),
    )


def torque(params, t, state):
    """Torque dJ/dt at time ``t``; returns a length-3 array."""
    p = tuple(float(v) for v in params)
    x, y, z = (float(v) for v in state)
    return np.array(_torque(p, float(t), x, y, z))


def _initial_step(p, t, y, f, span):
    ynorm = sqrt(y[0] ** 2 + y[1] ** 2 + y[2] ** 2)
    fnorm = sqrt(f[0] ** 2 + f[1] ** 2 + f[2] ** 2)
    if fnorm == 0.0 or ynorm == 0.0:
        return span
    return min(span, 0.01 * ynorm / fnorm)


def _dopri(p, y0, t_out, rtol, atol, h0, max_steps):
    """Core loop.  Returns (ys, n_accept, n_reject, status, t_last, y_last)."""
    t = t_out[0]
    x, y, z = y0
    ys = [(x, y, z)]
    t_end = t_out[-1]
    n_acc = n_rej = 0
    f1 = _torque(p, t, x, y, z)
    h = h0 if h0 > 0.0 else _initial_step(p, t, (x, y, z), f1, t_end - t)
    if h <= 0.0:
        h = 1.0
    h_min = 1e-14 * max(abs(t_end - t), abs(t_end), 1e-300)
    k = 1
    while k < len(t_out):
        target = t_out[k]
        if t >= target:
            ys.append((x, y, z))
            k += 1
            continue
        if n_acc + n_rej >= max_steps:
            return ys, n_acc, n_rej, STATUS_MAX_STEPS, t, (x, y, z)
        last = False
        if t + h >= target:
            h_try = target - t
            last = True
        else:
            h_try = h
        k1x, k1y, k1z = f1
        k2x, k2y, k2z = _torque(
            p, t + _C2 * h_try,
            x + h_try * _A21 * k1x, y + h_try * _A21 * k1y,
            z + h_try * _A21 * k1z)
        k3x, k3y, k3z = _torque(
            p, t + _C3 * h_try,
            x + h_try * (_A31 * k1x + _A32 * k2x),
            y + h_try * (_A31 * k1y + _A32 * k2y),
            z + h_try * (_A31 * k1z + _A32 * k2z))
        k4x, k4y, k4z = _torque(
            p, t + _C4 * h_try,
            x + h_try * (_A41 * k1x + _A42 * k2x + _A43 * k3x),
            y + h_try * (_A41 * k1y + _A42 * k2y + _A43 * k3y),
            z + h_try * (_A41 * k1z + _A42 * k2z + _A43 * k3z))
        k5x, k5y, k5z = _torque(
            p, t + _C5 * h_try,
            x + h_try * (_A51 * k1x + _A52 * k2x + _A53 * k3x + _A54 * k4x),
            y + h_try * (_A51 * k1y + _A52 * k2y + _A53 * k3y + _A54 * k4y),
            z + h_try * (_A51 * k1z + _A52 * k2z + _A53 * k3z + _A54 * k4z))
        k6x, k6y, k6z = _torque(
            p, t + h_try,
            x + h_try * (_A61 * k1x + _A62 * k2x + _A63 * k3x + _A64 * k4x
                         + _A65 * k5x),
            y + h_try * (_A61 * k1y + _A62 * k2y + _A63 * k3y + _A64 * k4y
                         + _A65 * k5y),
            z + h_try * (_A61 * k1z + _A62 * k2z + _A63 * k3z + _A64 * k4z
                         + _A65 * k5z))
        nx = x + h_try * (_A71 * k1x + _A73 * k3x + _A74 * k4x + _A75 * k5x
                          + _A76 * k6x)
        ny = y + h_try * (_A71 * k1y + _A73 * k3y + _A74 * k4y + _A75 * k5y
                          + _A76 * k6y)
        nz = z + h_try * (_A71 * k1z + _A73 * k3z + _A74 * k4z + _A75 * k5z
                          + _A76 * k6z)
        k7x, k7y, k7z = _torque(p, t + h_try, nx, ny, nz)
        ex = h_try * (_E1 * k1x + _E3 * k3x + _E4 * k4x + _E5 * k5x
                      + _E6 * k6x + _E7 * k7x)
        ey = h_try * (_E1 * k1y + _E3 * k3y + _E4 * k4y + _E5 * k5y
                      + _E6 * k6y + _E7 * k7y)
        ez = h_try * (_E1 * k1z + _E3 * k3z + _E4 * k4z + _E5 * k5z
                      + _E6 * k6z + _E7 * k7z)
        err = max(
            abs(ex) / (atol + rtol * max(abs(x), abs(nx))),
            abs(ey) / (atol + rtol * max(abs(y), abs(ny))),
            abs(ez) / (atol + rtol * max(abs(z), abs(nz))),
        )
        if err <= 1.0:
            t = target if last else t + h_try
            x, y, z = nx, ny, nz
            f1 = (k7x, k7y, k7z)
            n_acc += 1
            if last:
                ys.append((x, y, z))
                k += 1
            fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            # a clipped final step says nothing about the natural step size
            if not last or fac < 1.0:
                h = h_try * fac
        else:
            n_rej += 1
            h = h_try * max(0.2, 0.9 * err ** -0.2)
        if h < h_min:
            return ys, n_acc, n_rej, STATUS_UNDERFLOW, t, (x, y, z)
    return ys, n_acc, n_rej, STATUS_OK, t, (x, y, z)


def integrate(params, y0, t_out, rtol, atol, h0=0.0, max_steps=1_000_000):
    """Adaptive Dormand-Prince integration sampled exactly at ``t_out``.

    ``t_out`` must be non-decreasing; ``t_out[0]`` is the start time.
    Returns ``(ys, n_accept, n_reject, status, t_last, y_last)`` where ``ys``
    has one row per output time reached.
    """
    p = tuple(float(v) for v in params)
    if len(p) != N_PARAMS:
        raise ValueError(f"expected {N_PARAMS} parameters, got {len(p)}")
    times = [float(v) for v in t_out]
    y = tuple(float(v) for v in y0)
    ys, n_acc, n_rej, status, t_last, y_last = _dopri(
        p, y, times, float(rtol), float(atol), float(h0), int(max_steps))
    return (np.array(ys, dtype=float).reshape(-1, 3), n_acc, n_rej, status,
            t_last, np.array(y_last))


def flow_batch(params, starts, duration, rtol, atol, max_steps=1_000_000):
    """Propagate every row of ``starts`` for ``duration``.

    Returns ``(finals, status)``; rows that fail keep their last good state.
    """
    p = tuple(float(v) for v in params)
    starts = np.asarray(starts, dtype=float)
    finals = np.empty_like(starts)
    status = np.zeros(len(starts), dtype=np.int64)
    times = [0.0, float(duration)]
    for i, row in enumerate(starts):
        _, _, _, st, _, y_last = _dopri(
            p, (row[0], row[1], row[2]), times, float(rtol), float(atol), 0.0,
            int(max_steps))
        finals[i] = y_last
        status[i] = st
    return finals, status
