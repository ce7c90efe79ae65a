"""Pure-Python DOP853 kernel for the reduced SOL geodesic system.

The state is ``(x, y, z, w)`` with ``w = dz/dt`` and the principal constants
``a, b`` enter as parameters::

    x' = a e^{2z},  y' = b e^{-2z},  z' = w,  w' = -a^2 e^{2z} + b^2 e^{-2z}

This module mirrors ``_kernel.pyx`` line for line and is used when the
compiled extension is unavailable.
"""

import math

import numpy as np

from . import _tableau as tb

STATUS_OK = 0
STATUS_MAX_STEPS = 1
STATUS_STEP_UNDERFLOW = 2

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0
_EXPONENT = -1.0 / (tb.ERROR_ORDER + 1)
_NS = tb.N_STAGES
_NX = tb.N_STAGES_EXTENDED


def _rhs(a, b, y):
    ep = math.exp(2.0 * y[2])
    em = math.exp(-2.0 * y[2])
    ax = a * ep
    by = b * em
    return [ax, by, y[3], -a * ax + b * by]


def _rms_scaled(v, scale):
    s = 0.0
    for i in range(4):
        q = v[i] / scale[i]
        s += q * q
    return math.sqrt(s / 4.0)


def _initial_step(a, b, y0, f0, span, rtol, atol):
    scale = [atol + abs(y0[i]) * rtol for i in range(4)]
    d0 = _rms_scaled(y0, scale)
    d1 = _rms_scaled(f0, scale)
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6
    else:
        h0 = 0.01 * d0 / d1
    h0 = min(h0, span)
    y1 = [y0[i] + h0 * f0[i] for i in range(4)]
    f1 = _rhs(a, b, y1)
    d2 = _rms_scaled([f1[i] - f0[i] for i in range(4)], scale) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / (tb.ERROR_ORDER + 1))
    return min(100.0 * h0, h1, span)


def _dense_coefficients(a, b, y_old, y_new, f_new, K, h):
    for s in range(_NS + 1, _NX):
        row = tb.A[s]
        arg = list(y_old)
        for i in range(4):
            acc = 0.0
            for j in range(s):
                acc += row[j] * K[j][i]
            arg[i] += h * acc
        K[s] = _rhs(a, b, arg)
    f_old = K[0]
    F = [[0.0] * 4 for _ in range(tb.INTERPOLATOR_POWER)]
    for i in range(4):
        dy = y_new[i] - y_old[i]
        F[0][i] = dy
        F[1][i] = h * f_old[i] - dy
        F[2][i] = 2.0 * dy - h * (f_new[i] + f_old[i])
        for r in range(4):
            drow = tb.D[r]
            acc = 0.0
            for j in range(_NX):
                acc += drow[j] * K[j][i]
            F[3 + r][i] = h * acc
    return F


def _dense_eval(F, y_old, x):
    out = [0.0] * 4
    for i in range(4):
        acc = 0.0
        for r in range(tb.INTERPOLATOR_POWER):
            acc += F[tb.INTERPOLATOR_POWER - 1 - r][i]
            if r % 2 == 0:
                acc *= x
            else:
                acc *= 1.0 - x
        out[i] = y_old[i] + acc
    return out


def propagate(a, b, state0, t_out, rtol, atol, max_steps):
    """Integrate forward from ``t = 0`` and sample at ``t_out``.

    Parameters
    ----------
    a, b : float
        Principal constants of motion.
    state0 : sequence of 4 floats
        Initial ``(x, y, z, w)``.
    t_out : 1-D array
        Nondecreasing, nonnegative output times.
    rtol, atol : float
        Per-step tolerances.
    max_steps : int
        Budget on attempted steps.

    Returns
    -------
    out : ndarray, shape (n, 4)
    n_steps : int
    status : int
        ``0`` on success, ``1`` if the step budget ran out, ``2`` on step
        size underflow.  Rows past the failure point are NaN.
    """
    a = float(a)
    b = float(b)
    t_out = np.ascontiguousarray(t_out, dtype=float)
    n_out = t_out.shape[0]
    out = np.full((n_out, 4), np.nan)
    y = [float(v) for v in state0]
    t = 0.0
    idx = 0
    while idx < n_out and t_out[idx] <= 0.0:
        out[idx] = y
        idx += 1
    if idx == n_out:
        return out, 0, STATUS_OK
    t_end = float(t_out[-1])
    f = _rhs(a, b, y)
    h = _initial_step(a, b, y, f, t_end, rtol, atol)
    K = [None] * _NX
    n_steps = 0
    while idx < n_out:
        if n_steps >= max_steps:
            return out, n_steps, STATUS_MAX_STEPS
        min_step = 10.0 * abs(math.nextafter(t, math.inf) - t)
        if t_end - t < min_step:
            # span below time resolution: one Euler step is exact to rounding
            while idx < n_out:
                out[idx] = [y[i] + (t_out[idx] - t) * f[i] for i in range(4)]
                idx += 1
            break
        if h < min_step:
            return out, n_steps, STATUS_STEP_UNDERFLOW
        rejected = False
        while True:
            n_steps += 1
            last = t + h >= t_end
            if last:
                h = t_end - t
            K[0] = f
            for s in range(1, _NS):
                row = tb.A[s]
                arg = list(y)
                for i in range(4):
                    acc = 0.0
                    for j in range(s):
                        acc += row[j] * K[j][i]
                    arg[i] += h * acc
                K[s] = _rhs(a, b, arg)
            y_new = list(y)
            for i in range(4):
                acc = 0.0
                for j in range(_NS):
                    acc += tb.B[j] * K[j][i]
                y_new[i] += h * acc
            finite = all(math.isfinite(v) for v in y_new)
            if finite:
                f_new = _rhs(a, b, y_new)
                K[_NS] = f_new
                e5 = 0.0
                e3 = 0.0
                for i in range(4):
                    sc = atol + max(abs(y[i]), abs(y_new[i])) * rtol
                    s5 = 0.0
                    s3 = 0.0
                    for j in range(_NS + 1):
                        s5 += K[j][i] * tb.E5[j]
                        s3 += K[j][i] * tb.E3[j]
                    s5 /= sc
                    s3 /= sc
                    e5 += s5 * s5
                    e3 += s3 * s3
                if e5 == 0.0 and e3 == 0.0:
                    err = 0.0
                else:
                    err = h * e5 / math.sqrt((e5 + 0.01 * e3) * 4.0)
                if not math.isfinite(err):
                    finite = False
            if finite and err < 1.0:
                break
            if finite:
                h *= max(_MIN_FACTOR, _SAFETY * err ** _EXPONENT)
            else:
                h *= _MIN_FACTOR
            rejected = True
            if n_steps >= max_steps:
                return out, n_steps, STATUS_MAX_STEPS
            if h < min_step:
                return out, n_steps, STATUS_STEP_UNDERFLOW
        t_new = t_end if last else t + h
        if idx < n_out and t_out[idx] < t_new:
            F = _dense_coefficients(a, b, y, y_new, f_new, K, h)
            while idx < n_out and t_out[idx] < t_new:
                out[idx] = _dense_eval(F, y, (t_out[idx] - t) / h)
                idx += 1
        while idx < n_out and t_out[idx] <= t_new:
            out[idx] = y_new
            idx += 1
        if err == 0.0:
            factor = _MAX_FACTOR
        else:
            factor = min(_MAX_FACTOR, _SAFETY * err ** _EXPONENT)
        if rejected:
            factor = min(1.0, factor)
        t = t_new
        y = y_new
        f = f_new
        h *= factor
    return out, n_steps, STATUS_OK
