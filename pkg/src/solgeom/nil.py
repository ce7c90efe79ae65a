"""Closed-form geodesics of the Heisenberg group NIL.

The metric is ``dx^2 + dy^2 + (dz - x dy)^2``.  Along a unit-speed geodesic
``c = z' - x y'`` and ``b = (1 + x^2) y' - x z'`` are conserved.  For ``c != 0``
the projection to the ``xy``-plane is a circle of radius
``A = sqrt(1 - c^2)/|c|`` centred at ``x = -b/c``; for ``c = 0`` it is a line
and the height is quadratic in time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from .errors import NormalizationError
from .group import Point, TangentVec

__all__ = [
    "NilGeodesic",
    "nil_norm",
    "nil_from_initial",
    "nil_eval",
    "nil_states",
    "nil_integrate",
]

UNIT_SPEED_TOL = 1e-10


@dataclass(frozen=True)
class NilGeodesic:
    """Constants and phase data of a unit-speed NIL geodesic.

    For ``c != 0``: ``x = x0 + A cos(ct - phi)``, ``y = y0 + A sin(ct - phi)``.
    For ``c = 0``: ``x = a t + x0``, ``y = b t + y0`` with ``amplitude = 0``.
    """

    b: float
    c: float
    amplitude: float
    phase: float
    x0: float
    y0: float
    z0: float
    a: Optional[float] = None


def nil_norm(v: TangentVec) -> float:
    """Length of ``v`` in the NIL metric."""
    x = v.base.x
    return math.sqrt(v.dx**2 + v.dy**2 + (v.dz - x * v.dy) ** 2)


def nil_from_initial(p: Point, v) -> NilGeodesic:
    """Geodesic through ``p`` with unit NIL velocity ``v``.

    Raises
    ------
    NormalizationError
        If ``v`` does not have unit NIL length within ``1e-10``.
    """
    if not isinstance(v, TangentVec):
        v = TangentVec(p, *v)
    n = nil_norm(v)
    if abs(n - 1.0) > UNIT_SPEED_TOL:
        raise NormalizationError(f"NIL velocity has norm {n!r}, expected 1")
    x, y, z = p
    c = v.dz - x * v.dy
    b = (1.0 + x * x) * v.dy - x * v.dz
    if c == 0.0:
        return NilGeodesic(b, 0.0, 0.0, 0.0, x, y, z, a=v.dx)
    A = math.sqrt(max(0.0, 1.0 - c * c)) / abs(c)
    if A == 0.0:
        phi = 0.0
    else:
        # x(0) = -b/c + A cos(phi),  x'(0) = A c sin(phi)
        phi = math.atan2(v.dx / c, x + b / c)
    x0 = -b / c
    y0 = y + A * math.sin(phi)
    z0 = z + 0.25 * A * A * math.sin(2.0 * phi) - (b * A / c) * math.sin(phi)
    return NilGeodesic(b, c, A, phi, x0, y0, z0)


def nil_states(g: NilGeodesic, times) -> np.ndarray:
    """Rows ``(x, y, z, x', y', z')`` at each time."""
    t = np.atleast_1d(np.asarray(times, dtype=float))
    if g.c == 0.0:
        a, b = g.a, g.b
        x = a * t + g.x0
        y = b * t + g.y0
        z = 0.5 * a * b * t * t + b * g.x0 * t + g.z0
        xd = np.full_like(t, a)
        yd = np.full_like(t, b)
    else:
        A, c, b = g.amplitude, g.c, g.b
        th = c * t - g.phase
        cos_t, sin_t = np.cos(th), np.sin(th)
        x = g.x0 + A * cos_t
        y = g.y0 + A * sin_t
        z = (
            g.z0
            + (c + 0.5 * c * A * A) * t
            + 0.25 * A * A * np.sin(2.0 * th)
            - (b * A / c) * sin_t
        )
        xd = -A * c * sin_t
        yd = A * c * cos_t
    zd = g.c + x * yd
    return np.column_stack([x, y, z, xd, yd, zd])


def nil_eval(g: NilGeodesic, t: float) -> tuple[Point, TangentVec]:
    """Position and velocity at time ``t``."""
    x, y, z, xd, yd, zd = nil_states(g, [t])[0]
    p = Point(x, y, z)
    return p, TangentVec(p, xd, yd, zd)


def nil_integrate(p: Point, v, times, rtol: float = 1e-12, atol: float = 1e-12) -> np.ndarray:
    """Independent check: integrate the Euler-Lagrange system numerically.

    Uses ``x'' = -c^2 x - bc``, ``y' = b + cx``, ``z' = c + bx + cx^2`` with
    ``b, c`` taken from the initial data.  Returns rows ``(x, y, z, x', y', z')``.
    """
    if not isinstance(v, TangentVec):
        v = TangentVec(p, *v)
    x, y, z = p
    c = v.dz - x * v.dy
    b = (1.0 + x * x) * v.dy - x * v.dz
    times = np.atleast_1d(np.asarray(times, dtype=float))

    def rhs(_t, s):
        xx, u, _yy, _zz = s
        return [u, -c * c * xx - b * c, b + c * xx, c + b * xx + c * xx * xx]

    sol = solve_ivp(
        rhs,
        (0.0, float(times.max())),
        [x, v.dx, y, z],
        method="DOP853",
        t_eval=times,
        rtol=rtol,
        atol=atol,
    )
    xx, u, yy, zz = sol.y
    yd = b + c * xx
    return np.column_stack([xx, yy, zz, u, yd, c + xx * yd])
