# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled DOP853 kernel for the reduced SOL geodesic system.

Same algorithm and signature as ``_kernel_py.propagate``; the tableau is
read once from ``_tableau`` into C arrays at import.
"""

import numpy as np

from libc.math cimport exp, fabs, sqrt, pow, nextafter, isfinite, INFINITY

from . import _tableau as tb

DEF NS = 12
DEF NX = 16
DEF NP = 7

cdef double C_A[NX][NX]
cdef double C_B[NS]
cdef double C_E3[NS + 1]
cdef double C_E5[NS + 1]
cdef double C_D[4][NX]

cdef int _i, _j
for _i in range(NX):
    for _j in range(NX):
        C_A[_i][_j] = 0.0
    for _j in range(len(tb.A[_i])):
        C_A[_i][_j] = tb.A[_i][_j]
for _i in range(NS):
    C_B[_i] = tb.B[_i]
for _i in range(NS + 1):
    C_E3[_i] = tb.E3[_i]
    C_E5[_i] = tb.E5[_i]
for _i in range(4):
    for _j in range(NX):
        C_D[_i][_j] = tb.D[_i][_j]

cdef double SAFETY = 0.9
cdef double MIN_FACTOR = 0.2
cdef double MAX_FACTOR = 10.0
cdef double EXPONENT = -1.0 / (tb.ERROR_ORDER + 1)

STATUS_OK = 0
STATUS_MAX_STEPS = 1
STATUS_STEP_UNDERFLOW = 2


cdef inline void _rhs(double a, double b, const double* y, double* out) noexcept nogil:
    cdef double ep = exp(2.0 * y[2])
    cdef double em = exp(-2.0 * y[2])
    cdef double ax = a * ep
    cdef double by = b * em
    out[0] = ax
    out[1] = by
    out[2] = y[3]
    out[3] = -a * ax + b * by


cdef inline double _rms_scaled(const double* v, const double* scale) noexcept nogil:
    cdef double s = 0.0, q
    cdef int i
    for i in range(4):
        q = v[i] / scale[i]
        s += q * q
    return sqrt(s / 4.0)


cdef double _initial_step(double a, double b, const double* y0, const double* f0,
                          double span, double rtol, double atol) noexcept nogil:
    cdef double scale[4]
    cdef double y1[4]
    cdef double f1[4]
    cdef double df[4]
    cdef double d0, d1, d2, h0, h1
    cdef int i
    for i in range(4):
        scale[i] = atol + fabs(y0[i]) * rtol
    d0 = _rms_scaled(y0, scale)
    d1 = _rms_scaled(f0, scale)
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6
    else:
        h0 = 0.01 * d0 / d1
    if h0 > span:
        h0 = span
    for i in range(4):
        y1[i] = y0[i] + h0 * f0[i]
    _rhs(a, b, y1, f1)
    for i in range(4):
        df[i] = f1[i] - f0[i]
    d2 = _rms_scaled(df, scale) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = h0 * 1e-3
        if h1 < 1e-6:
            h1 = 1e-6
    else:
        h1 = pow(0.01 / (d1 if d1 > d2 else d2), -EXPONENT)
    if 100.0 * h0 < h1:
        h1 = 100.0 * h0
    if span < h1:
        h1 = span
    return h1


cdef void _dense_coefficients(double a, double b, const double* y_old, const double* y_new,
                              const double* f_new, double K[NX][4], double h,
                              double F[NP][4]) noexcept nogil:
    cdef double arg[4]
    cdef double acc, dy
    cdef int s, i, j, r
    for s in range(NS + 1, NX):
        for i in range(4):
            acc = 0.0
            for j in range(s):
                acc += C_A[s][j] * K[j][i]
            arg[i] = y_old[i] + h * acc
        _rhs(a, b, arg, K[s])
    for i in range(4):
        dy = y_new[i] - y_old[i]
        F[0][i] = dy
        F[1][i] = h * K[0][i] - dy
        F[2][i] = 2.0 * dy - h * (f_new[i] + K[0][i])
        for r in range(4):
            acc = 0.0
            for j in range(NX):
                acc += C_D[r][j] * K[j][i]
            F[3 + r][i] = h * acc


cdef inline void _dense_eval(double F[NP][4], const double* y_old, double x,
                             double[:, ::1] out, Py_ssize_t row) noexcept nogil:
    cdef double acc
    cdef int i, r
    for i in range(4):
        acc = 0.0
        for r in range(NP):
            acc += F[NP - 1 - r][i]
            if r % 2 == 0:
                acc *= x
            else:
                acc *= 1.0 - x
        out[row, i] = y_old[i] + acc


def propagate(double a, double b, state0, t_out, double rtol, double atol, long max_steps):
    """Integrate forward from ``t = 0`` and sample at ``t_out``.

    See ``_kernel_py.propagate`` for the contract.
    """
    cdef double[::1] tv = np.ascontiguousarray(t_out, dtype=np.float64)
    cdef Py_ssize_t n_out = tv.shape[0]
    out_arr = np.full((n_out, 4), np.nan)
    cdef double[:, ::1] out = out_arr
    cdef double y[4]
    cdef double y_new[4]
    cdef double f[4]
    cdef double f_new[4]
    cdef double arg[4]
    cdef double K[NX][4]
    cdef double F[NP][4]
    cdef double t = 0.0, t_end, t_new, h, acc, e5, e3, s5, s3, sc, err = 0.0
    cdef double factor, min_step
    cdef long n_steps = 0
    cdef Py_ssize_t idx = 0
    cdef int i, j, s, status = 0
    cdef bint rejected, last, finite

    for i in range(4):
        y[i] = float(state0[i])
    while idx < n_out and tv[idx] <= 0.0:
        for i in range(4):
            out[idx, i] = y[i]
        idx += 1
    if idx == n_out:
        return out_arr, 0, STATUS_OK
    t_end = tv[n_out - 1]

    with nogil:
        _rhs(a, b, y, f)
        h = _initial_step(a, b, y, f, t_end, rtol, atol)
        while idx < n_out:
            if n_steps >= max_steps:
                status = 1
                break
            min_step = 10.0 * fabs(nextafter(t, INFINITY) - t)
            if t_end - t < min_step:
                # span below time resolution: one Euler step is exact to rounding
                while idx < n_out:
                    for i in range(4):
                        out[idx, i] = y[i] + (tv[idx] - t) * f[i]
                    idx += 1
                break
            if h < min_step:
                status = 2
                break
            rejected = False
            while True:
                n_steps += 1
                last = t + h >= t_end
                if last:
                    h = t_end - t
                for i in range(4):
                    K[0][i] = f[i]
                for s in range(1, NS):
                    for i in range(4):
                        acc = 0.0
                        for j in range(s):
                            acc += C_A[s][j] * K[j][i]
                        arg[i] = y[i] + h * acc
                    _rhs(a, b, arg, K[s])
                finite = True
                for i in range(4):
                    acc = 0.0
                    for j in range(NS):
                        acc += C_B[j] * K[j][i]
                    y_new[i] = y[i] + h * acc
                    if not isfinite(y_new[i]):
                        finite = False
                if finite:
                    _rhs(a, b, y_new, f_new)
                    for i in range(4):
                        K[NS][i] = f_new[i]
                    e5 = 0.0
                    e3 = 0.0
                    for i in range(4):
                        sc = fabs(y[i])
                        if fabs(y_new[i]) > sc:
                            sc = fabs(y_new[i])
                        sc = atol + sc * rtol
                        s5 = 0.0
                        s3 = 0.0
                        for j in range(NS + 1):
                            s5 += K[j][i] * C_E5[j]
                            s3 += K[j][i] * C_E3[j]
                        s5 /= sc
                        s3 /= sc
                        e5 += s5 * s5
                        e3 += s3 * s3
                    if e5 == 0.0 and e3 == 0.0:
                        err = 0.0
                    else:
                        err = h * e5 / sqrt((e5 + 0.01 * e3) * 4.0)
                    if not isfinite(err):
                        finite = False
                if finite and err < 1.0:
                    break
                if finite:
                    factor = SAFETY * pow(err, EXPONENT)
                    if factor < MIN_FACTOR:
                        factor = MIN_FACTOR
                    h *= factor
                else:
                    h *= MIN_FACTOR
                rejected = True
                if n_steps >= max_steps:
                    status = 1
                    break
                if h < min_step:
                    status = 2
                    break
            if status != 0:
                break
            t_new = t_end if last else t + h
            if idx < n_out and tv[idx] < t_new:
                _dense_coefficients(a, b, y, y_new, f_new, K, h, F)
                while idx < n_out and tv[idx] < t_new:
                    _dense_eval(F, y, (tv[idx] - t) / h, out, idx)
                    idx += 1
            while idx < n_out and tv[idx] <= t_new:
                for i in range(4):
                    out[idx, i] = y_new[i]
                idx += 1
            if err == 0.0:
                factor = MAX_FACTOR
            else:
                factor = SAFETY * pow(err, EXPONENT)
                if factor > MAX_FACTOR:
                    factor = MAX_FACTOR
            if rejected and factor > 1.0:
                factor = 1.0
            t = t_new
            for i in range(4):
                y[i] = y_new[i]
                f[i] = f_new[i]
            h *= factor
    return out_arr, n_steps, status
