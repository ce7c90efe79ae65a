"""Geodesic construction, classification and integration of the geodesic flow.

A unit-speed geodesic ``(x, y, z)`` of SOL carries three first integrals::

    a = e^{-2z} x',   b = e^{2z} y',   c = a x - b y + z'

so that ``x' = a e^{2z}``, ``y' = b e^{-2z}`` and ``z'' = -a^2 e^{2z} + b^2 e^{-2z}``.
Generic geodesics (``0 < 2|ab| < 1``) are integrated numerically on the state
``(x, y, z, z')``; vertical, horizontal and hyperbolic ones use closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from scipy import optimize

from . import kernel
from .errors import (
    AdmissibilityError,
    DomainError,
    IntegrationError,
    NormalizationError,
    PreconditionError,
)
from .group import Isometry, Point, TangentVec, metric_norm, potential
from .invariants import ab_from_kh, amplitude, invariant_set, modulus_from_ab

__all__ = [
    "VERTICAL",
    "HORIZONTAL",
    "HYPERBOLIC",
    "GENERIC",
    "MotionConstants",
    "time_span",
    "GeodesicSpec",
    "Trajectory",
    "GraysonCylinder",
    "NormalForm",
    "spec_from_initial",
    "spec_from_kh",
    "transform_spec",
    "reverse_spec",
    "geodesic_states",
    "evaluate",
    "integrate",
    "period",
    "hyperbolic_closed_form",
    "velocity_from_states",
    "grayson_residual",
    "grayson_form",
    "frame_fields",
    "cylinders_through",
    "cylinder_of",
    "critical_times",
    "normal_form",
]

VERTICAL = "vertical"
HORIZONTAL = "horizontal"
HYPERBOLIC = "hyperbolic"
GENERIC = "generic"

UNIT_SPEED_TOL = 1e-10
HORIZONTAL_TIE = 1e-12
MIN_TOL = 1e-13
MAX_TOL = 1e-6
DEFAULT_MAX_STEPS = 2_000_000
# kernel tolerances never go below this (DOP853 loses meaning near 100 eps)
_KERNEL_FLOOR = 2.5e-14


@dataclass(frozen=True)
class MotionConstants:
    """The first integrals ``(a, b, c)`` of a geodesic."""

    a: float
    b: float
    c: float


@dataclass(frozen=True)
class GeodesicSpec:
    """A unit-speed geodesic given by initial data at time ``t_init``.

    Attributes
    ----------
    constants : MotionConstants
    kind : str
        One of ``"vertical"``, ``"horizontal"``, ``"hyperbolic"``, ``"generic"``.
    k : float
        Modulus; ``1`` for vertical and hyperbolic, ``0`` for horizontal.
    h : float or None
        Average height ``log|b/a| / 2``; ``None`` when ``ab = 0``.
    point, velocity
        Position and unit velocity at ``t_init``.
    t_init : float
        Time at which the initial data is attached.
    """

    constants: MotionConstants
    kind: str
    k: float
    h: Optional[float]
    point: Point
    velocity: TangentVec
    t_init: float = 0.0

    @property
    def a(self) -> float:
        return self.constants.a

    @property
    def b(self) -> float:
        return self.constants.b

    @property
    def c(self) -> float:
        return self.constants.c

    @property
    def speed(self) -> float:
        return 1.0

    @property
    def initial(self) -> tuple[Point, TangentVec]:
        return self.point, self.velocity

    @property
    def initial_state(self) -> np.ndarray:
        """``(x, y, z, z')`` at ``t_init``."""
        p = self.point
        return np.array([p.x, p.y, p.z, self.velocity.dz])


def _as_vector(p: Point, v) -> TangentVec:
    if isinstance(v, TangentVec):
        if v.base != p:
            raise DomainError(f"tangent vector based at {v.base}, expected {p}")
        return v
    dx, dy, dz = v
    return TangentVec(p, float(dx), float(dy), float(dz))


def spec_from_initial(
    p: Point, v: Union[TangentVec, Sequence[float]], t_init: float = 0.0
) -> GeodesicSpec:
    """Build the geodesic through ``p`` with unit velocity ``v`` at ``t_init``.

    Raises
    ------
    NormalizationError
        If ``v`` is not of unit length within ``1e-10``.
    """
    v = _as_vector(p, v)
    n = metric_norm(v)
    if abs(n - 1.0) > UNIT_SPEED_TOL:
        raise NormalizationError(f"initial velocity has norm {n!r}, expected 1")
    e2z = math.exp(2.0 * p.z)
    a = v.dx / e2z
    b = v.dy * e2z
    c = a * p.x - b * p.y + v.dz
    if a == 0.0 and b == 0.0:
        kind, k, h = VERTICAL, 1.0, None
    elif a == 0.0 or b == 0.0:
        kind, k, h = HYPERBOLIC, 1.0, None
    else:
        h = 0.5 * math.log(abs(b / a))
        if abs(2.0 * abs(a * b) - 1.0) <= HORIZONTAL_TIE:
            kind, k = HORIZONTAL, 0.0
        else:
            kind, k = GENERIC, modulus_from_ab(a, b)
    return GeodesicSpec(MotionConstants(a, b, c), kind, k, h, p, v, float(t_init))


def spec_from_kh(
    k: float,
    h: float = 0.0,
    c: float = 0.0,
    sign_a: int = 1,
    sign_b: int = 1,
    z0: Optional[float] = None,
    descending: bool = False,
    t_init: float = 0.0,
) -> GeodesicSpec:
    """Geodesic with modulus ``k``, average height ``h`` and third constant ``c``.

    The initial point has ``y = 0`` and height ``z0`` (default: the top of
    the oscillation ``h + A(k)``, where ``z' = 0``).  ``descending`` picks
    ``z' < 0`` at ``z0``.
    """
    if sign_a not in (1, -1) or sign_b not in (1, -1):
        raise DomainError("signs must be +1 or -1")
    md = ab_from_kh(k, h)
    a = sign_a * md.absA
    b = sign_b * md.absB
    A = amplitude(k)
    if z0 is None:
        z0 = h + A
        zdot = 0.0
    else:
        if abs(z0 - h) > A + 1e-12:
            raise AdmissibilityError(
                f"height {z0} outside the band [h - A, h + A] = [{h - A}, {h + A}]",
                threshold=A,
            )
        zdot = math.sqrt(max(0.0, 1.0 - 2.0 * potential(a, b, z0)))
        if descending:
            zdot = -zdot
    x0 = (c - zdot) / a
    p = Point(x0, 0.0, z0)
    v = TangentVec(p, a * math.exp(2.0 * z0), b * math.exp(-2.0 * z0), zdot)
    return spec_from_initial(p, v, t_init)


def transform_spec(g: Isometry, spec: GeodesicSpec) -> GeodesicSpec:
    """Image of a geodesic under an isometry (same time parametrization)."""
    v = g.apply_vector(spec.velocity)
    return spec_from_initial(v.base, v, spec.t_init)


def reverse_spec(spec: GeodesicSpec) -> GeodesicSpec:
    """Spec of the reversed curve ``t -> gamma(-t)``."""
    v = spec.velocity
    return spec_from_initial(spec.point, (-v.dx, -v.dy, -v.dz), -spec.t_init)


def time_span(
    spec: GeodesicSpec,
    periods: Optional[float] = None,
    duration: Optional[float] = None,
    t0: Optional[float] = None,
) -> tuple[float, float]:
    """Interval ``[t0, t0 + span]`` with the span in periods or in time units.

    ``t0`` defaults to the attachment time of ``spec``.  Exactly one of
    ``periods`` and ``duration`` must be given; ``periods`` needs a generic
    geodesic.
    """
    if (periods is None) == (duration is None):
        raise DomainError("give exactly one of periods or duration")
    start = spec.t_init if t0 is None else float(t0)
    if periods is not None:
        if spec.kind != GENERIC:
            raise DomainError(f"periods need a generic geodesic, got {spec.kind}")
        if not periods > 0.0:
            raise DomainError(f"periods must be positive, got {periods}")
        return start, start + periods * invariant_set(spec.k).T
    if not duration > 0.0:
        raise DomainError(f"duration must be positive, got {duration}")
    return start, start + duration


def period(spec: GeodesicSpec) -> float:
    """Period of the height oscillation; infinite for non-generic classes."""
    if spec.kind != GENERIC:
        return math.inf
    return invariant_set(spec.k).T


# ----------------------------------------------------------------------------
# closed forms


def _log_cosh(s):
    s = np.abs(s)
    return s + np.log1p(np.exp(-2.0 * s)) - math.log(2.0)


def _tanh_gap(tau, s, s0):
    # tanh(s) - tanh(s0) = sinh(tau) / (cosh s cosh s0), evaluated in logs
    at = np.abs(tau)
    with np.errstate(divide="ignore"):
        log_sinh = at + np.log1p(-np.exp(-2.0 * at)) - math.log(2.0)
    return np.sign(tau) * np.exp(log_sinh - _log_cosh(s) - _log_cosh(s0))


def hyperbolic_closed_form(
    a: float, x0: float, t: float, y0: float = 0.0
) -> tuple[Point, TangentVec]:
    """Hyperbolic geodesic in the plane ``y = y0`` with apex at ``t = 0``.

    ``x(t) = x0 + tanh(t)/a``, ``z(t) = -log(a cosh t)``; requires ``a > 0``.
    """
    if not a > 0.0:
        raise DomainError(f"hyperbolic closed form needs a > 0, got {a}")
    th = math.tanh(t)
    z = -math.log(a) - float(_log_cosh(t))
    p = Point(x0 + th / a, y0, z)
    sech2 = 1.0 - th * th if abs(t) < 1.0 else 1.0 / math.cosh(t) ** 2
    return p, TangentVec(p, sech2 / a, 0.0, -th)


def _closed_form_states(spec: GeodesicSpec, tau: np.ndarray) -> np.ndarray:
    x0, y0, z0 = spec.point
    v = spec.velocity
    out = np.empty((tau.size, 4))
    if spec.kind == VERTICAL:
        out[:, 0] = x0
        out[:, 1] = y0
        out[:, 2] = z0 + v.dz * tau
        out[:, 3] = v.dz
    elif spec.kind == HORIZONTAL:
        out[:, 0] = x0 + v.dx * tau
        out[:, 1] = y0 + v.dy * tau
        out[:, 2] = z0
        out[:, 3] = 0.0
    elif spec.a != 0.0:
        # plane y = y0: e^{-z} = |a| cosh s, z' = -tanh s
        s0 = math.asinh(-v.dz / (abs(spec.a) * math.exp(z0)))
        s = tau + s0
        out[:, 0] = x0 + _tanh_gap(tau, s, s0) / spec.a
        out[:, 1] = y0
        out[:, 2] = z0 - (_log_cosh(s) - _log_cosh(s0))
        out[:, 3] = -np.tanh(s)
    else:
        # plane x = x0: e^{z} = |b| cosh s, z' = tanh s
        s0 = math.asinh(v.dz / (abs(spec.b) * math.exp(-z0)))
        s = tau + s0
        out[:, 0] = x0
        out[:, 1] = y0 + _tanh_gap(tau, s, s0) / spec.b
        out[:, 2] = z0 + (_log_cosh(s) - _log_cosh(s0))
        out[:, 3] = np.tanh(s)
    return out


# ----------------------------------------------------------------------------
# numerical flow


def _run_kernel(a, b, state0, tau, rtol, max_steps):
    out, _, status = kernel.propagate(a, b, state0, tau, rtol, rtol, max_steps)
    if status != 0:
        reason = "step budget exhausted" if status == 1 else "step size underflow"
        raise IntegrationError(f"geodesic flow integration failed: {reason}")
    return out


def _flow_states(spec, times, kernel_tol, max_steps):
    a, b = spec.a, spec.b
    state0 = spec.initial_state
    tau = times - spec.t_init
    out = np.empty((times.size, 4))
    fwd = tau >= 0.0
    if fwd.any():
        idx = np.nonzero(fwd)[0]
        order = idx[np.argsort(tau[idx], kind="stable")]
        out[order] = _run_kernel(a, b, state0, tau[order], kernel_tol, max_steps)
    if (~fwd).any():
        idx = np.nonzero(~fwd)[0]
        order = idx[np.argsort(-tau[idx], kind="stable")]
        back0 = state0.copy()
        back0[3] = -back0[3]
        res = _run_kernel(-a, -b, back0, -tau[order], kernel_tol, max_steps)
        res[:, 3] = -res[:, 3]
        out[order] = res
    return out


def _kernel_tol(tol):
    return max(_KERNEL_FLOOR, 0.1 * tol)


def geodesic_states(
    spec: GeodesicSpec,
    times,
    tol: float = 1e-10,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> np.ndarray:
    """States ``(x, y, z, z')`` of the geodesic at arbitrary times.

    Times may be unsorted and may precede ``spec.t_init``; generic
    geodesics are integrated forward and backward from ``t_init``.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if spec.kind != GENERIC:
        return _closed_form_states(spec, times - spec.t_init)
    return _flow_states(spec, times, _kernel_tol(tol), max_steps)


def velocity_from_states(spec: GeodesicSpec, states: np.ndarray) -> np.ndarray:
    """Coordinate velocities ``(x', y', z')`` reconstructed from the constants."""
    states = np.atleast_2d(states)
    e2z = np.exp(2.0 * states[:, 2])
    return np.column_stack([spec.a * e2z, spec.b / e2z, states[:, 3]])


def evaluate(spec: GeodesicSpec, t: float, tol: float = 1e-10) -> tuple[Point, TangentVec]:
    """Position and velocity at a single time."""
    s = geodesic_states(spec, [t], tol)[0]
    p = Point(*s[:3])
    vel = velocity_from_states(spec, s[None, :])[0]
    return p, TangentVec(p, *vel)


@dataclass(frozen=True)
class Trajectory:
    """Time-ordered samples of a geodesic with residual diagnostics.

    ``drift_a`` and ``drift_b`` compare ``e^{-2z}x'`` and ``e^{2z}y'`` with
    ``a`` and ``b``; because ``x'`` and ``y'`` are rebuilt from the constants
    these only measure rounding.  ``drift_c``, ``res_speed`` and
    ``res_grayson`` carry the real integration error.
    """

    spec: GeodesicSpec
    tol: float
    t: np.ndarray
    states: np.ndarray
    res_speed: np.ndarray
    res_grayson: np.ndarray
    drift_a: np.ndarray
    drift_b: np.ndarray
    drift_c: np.ndarray

    @property
    def samples(self) -> np.ndarray:
        """``(n, 5)`` array of ``(t, x, y, z, z')``."""
        return np.column_stack([self.t, self.states])

    @property
    def x(self):
        return self.states[:, 0]

    @property
    def y(self):
        return self.states[:, 1]

    @property
    def z(self):
        return self.states[:, 2]

    @property
    def zdot(self):
        return self.states[:, 3]

    def worst_residual(self) -> float:
        return float(
            max(
                np.max(np.abs(r))
                for r in (self.res_speed, self.res_grayson, self.drift_a, self.drift_b, self.drift_c)
            )
        )

    def __len__(self):
        return self.t.size


def _diagnostics(spec, states):
    a, b, c = spec.a, spec.b, spec.c
    x, y, z, w = states.T
    two_u = 2.0 * np.asarray(potential(a, b, z), dtype=float)
    res_speed = two_u + w * w - 1.0
    lin = a * x - b * y
    res_grayson = (lin - c) ** 2 + two_u - 1.0
    drift_c = lin + w - c
    vel = velocity_from_states(spec, states)
    e2z = np.exp(2.0 * z)
    drift_a = vel[:, 0] / e2z - a
    drift_b = vel[:, 1] * e2z - b
    return res_speed, res_grayson, drift_a, drift_b, drift_c


def _time_grid(t0, t1, dt, num, times):
    if times is not None:
        grid = np.asarray(times, dtype=float)
        if grid.ndim != 1 or grid.size == 0:
            raise DomainError("times must be a nonempty 1-D sequence")
    else:
        if not (math.isfinite(t0) and math.isfinite(t1)) or t1 < t0:
            raise DomainError(f"need finite t0 <= t1, got {(t0, t1)}")
        if t1 == t0:
            return np.array([t0])
        if dt is not None:
            if not dt > 0.0:
                raise DomainError(f"dt must be positive, got {dt}")
            steps = (t1 - t0) / dt
            n = int(math.floor(steps + 1e-9))
            grid = t0 + dt * np.arange(n + 1)
            if t1 - grid[-1] > 1e-9 * dt:
                grid = np.append(grid, t1)
            else:
                grid[-1] = t1
        else:
            grid = np.linspace(t0, t1, int(num))
    if grid.size > 1 and not np.all(np.diff(grid) > 0.0):
        raise DomainError("sample times must be strictly increasing")
    return grid


def integrate(
    spec: GeodesicSpec,
    t0: float = 0.0,
    t1: float = 1.0,
    tol: float = 1e-10,
    *,
    dt: Optional[float] = None,
    num: int = 201,
    times=None,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> Trajectory:
    """Sample the geodesic on ``[t0, t1]`` and attach residual diagnostics.

    Parameters
    ----------
    spec : GeodesicSpec
    t0, t1 : float
        Time span; ignored when ``times`` is given.
    tol : float
        Accuracy target in ``[1e-13, 1e-6]``.  Every residual must end up
        within ``10 * tol``; the kernel tolerance is tightened up to twice
        before giving up.
    dt, num, times
        Sampling: spacing ``dt``, or ``num`` equispaced points, or explicit
        strictly increasing ``times``.

    Raises
    ------
    IntegrationError
        If the residual budget cannot be met.
    """
    if not (MIN_TOL <= tol <= MAX_TOL):
        raise DomainError(f"tol must lie in [{MIN_TOL}, {MAX_TOL}], got {tol}")
    grid = _time_grid(t0, t1, dt, num, times)
    budget = 10.0 * tol
    worst = math.inf
    factors = (0.1, 0.01, 0.001) if spec.kind == GENERIC else (0.1,)
    for f in factors:
        if spec.kind == GENERIC:
            states = _flow_states(spec, grid, max(_KERNEL_FLOOR, f * tol), max_steps)
        else:
            states = _closed_form_states(spec, grid - spec.t_init)
        diag = _diagnostics(spec, states)
        worst = max(float(np.max(np.abs(d))) for d in diag)
        if worst <= budget:
            return Trajectory(spec, tol, grid, states, *diag)
        if max(_KERNEL_FLOOR, f * tol) == _KERNEL_FLOOR:
            break
    raise IntegrationError(
        f"residual {worst:.3e} exceeds the budget {budget:.1e}", worst_residual=worst
    )


# ----------------------------------------------------------------------------
# Grayson cylinders


@dataclass(frozen=True)
class GraysonCylinder:
    """Level set ``(ax - by - c)^2 + 2U(z) = 1`` of a generic geodesic."""

    constants: MotionConstants

    def __post_init__(self):
        t = 2.0 * abs(self.constants.a * self.constants.b)
        if not (0.0 < t < 1.0):
            raise DomainError(f"Grayson cylinder needs 0 < 2|ab| < 1, got {t}")

    @property
    def k(self) -> float:
        return modulus_from_ab(self.constants.a, self.constants.b)

    @property
    def h(self) -> float:
        return 0.5 * math.log(abs(self.constants.b / self.constants.a))

    @property
    def A(self) -> float:
        return amplitude(self.k)


def cylinder_of(spec: GeodesicSpec) -> GraysonCylinder:
    """The Grayson cylinder containing a generic geodesic."""
    return GraysonCylinder(spec.constants)


def grayson_residual(cyl: GraysonCylinder, p: Point) -> float:
    """``(ax - by - c)^2 + 2U(z) - 1``; zero exactly on the cylinder."""
    a, b, c = cyl.constants.a, cyl.constants.b, cyl.constants.c
    return (a * p.x - b * p.y - c) ** 2 + 2.0 * potential(a, b, p.z) - 1.0


def grayson_form(cyl: GraysonCylinder, p: Point) -> tuple[float, float, float]:
    """Coefficients of half the differential of the defining function at ``p``."""
    a, b, c = cyl.constants.a, cyl.constants.b, cyl.constants.c
    s = a * p.x - b * p.y - c
    e2z = math.exp(2.0 * p.z)
    return (s * a, -s * b, a * a * e2z - b * b / e2z)


def frame_fields(
    cyl: GraysonCylinder, p: Point, tol: float = 1e-8
) -> tuple[TangentVec, TangentVec, float]:
    """The tangent fields ``xi``, ``eta`` of the cylinder at ``p`` and ``cos`` of their angle.

    ``xi`` is the velocity of the geodesic through ``p`` on the cylinder and
    ``eta = b d/dx + a d/dy`` generates its translations.
    """
    res = grayson_residual(cyl, p)
    if abs(res) > tol:
        raise PreconditionError(f"point is off the cylinder (residual {res:.3e})")
    a, b, c = cyl.constants.a, cyl.constants.b, cyl.constants.c
    e2z = math.exp(2.0 * p.z)
    s = a * p.x - b * p.y - c
    xi = TangentVec(p, a * e2z, b / e2z, -s)
    eta = TangentVec(p, b, a, 0.0)
    cos_theta = 2.0 * a * b / math.sqrt(1.0 - s * s)
    return xi, eta, cos_theta


def cylinders_through(a: float, b: float, p: Point, tol: float = 1e-14) -> list[GraysonCylinder]:
    """Grayson cylinders with principal constants ``(a, b)`` containing ``p``.

    Two when ``|z - h| < A(k)``, one when equality holds (within ``tol`` on
    ``1 - 2U(z)``), none otherwise.
    """
    t = 2.0 * abs(a * b)
    if not (0.0 < t < 1.0):
        raise DomainError(f"need 0 < 2|ab| < 1, got {t}")
    disc = 1.0 - 2.0 * potential(a, b, p.z)
    lin = a * p.x - b * p.y
    if disc < -tol:
        return []
    if disc <= tol:
        return [GraysonCylinder(MotionConstants(a, b, lin))]
    r = math.sqrt(disc)
    return [
        GraysonCylinder(MotionConstants(a, b, lin + r)),
        GraysonCylinder(MotionConstants(a, b, lin - r)),
    ]


# ----------------------------------------------------------------------------
# critical times and normal form


def critical_times(
    spec: GeodesicSpec,
    t_start: float,
    t_end: float,
    tol: float = 1e-12,
    kind: str = "max",
) -> list[float]:
    """Times in ``[t_start, t_end]`` where ``z' = 0`` (height extrema).

    ``kind`` selects ``"max"``, ``"min"`` or ``"both"``.
    """
    if spec.kind != GENERIC:
        raise DomainError("critical times are only defined for generic geodesics")
    T = period(spec)
    n = max(16, int(math.ceil(32 * (t_end - t_start) / T)) + 1)
    grid = np.linspace(t_start, t_end, n)
    zd = geodesic_states(spec, grid, tol)[:, 3]

    def f(t):
        return float(geodesic_states(spec, [t], tol)[0, 3])

    found = []
    for i in range(n - 1):
        lo, hi = zd[i], zd[i + 1]
        if lo == 0.0:
            root = grid[i]
        elif lo * hi < 0.0:
            fa, fb = f(grid[i]), f(grid[i + 1])
            if fa * fb < 0.0:
                root = optimize.brentq(f, grid[i], grid[i + 1], xtol=1e-15, rtol=1e-15)
            else:
                # a root at a grid node: the pointwise re-evaluation disagrees in sign at noise level
                root = grid[i] if abs(fa) <= abs(fb) else grid[i + 1]
        else:
            continue
        is_max = lo > 0.0 or (lo == 0.0 and hi < 0.0)
        if lo == 0.0 and hi == 0.0:
            continue
        if kind == "both" or (kind == "max") == is_max:
            if not found or root - found[-1] > 1e-9:
                found.append(float(root))
    if zd[-1] == 0.0 and (not found or grid[-1] - found[-1] > 1e-9):
        is_max = zd[-2] > 0.0
        if kind == "both" or (kind == "max") == is_max:
            found.append(float(grid[-1]))
    return found


@dataclass(frozen=True)
class NormalForm:
    """Result of :func:`normal_form`.

    ``spec`` is the image of the input geodesic, re-timed so that its
    initial time ``0`` corresponds to ``time_shift`` on the original and
    mapped by ``isometry`` to start at ``(0, 0, A(k))`` with ``a = b > 0``.
    """

    isometry: Isometry
    time_shift: float
    spec: GeodesicSpec


def normal_form(spec: GeodesicSpec, tol: float = 1e-12) -> NormalForm:
    """Move a generic geodesic to its normal position by isometries and a time shift.

    Steps: lift by ``-h`` so ``|a| = |b|``; translate horizontally so that
    ``c = 0``; change signs so ``a, b > 0``; shift time to a height maximum;
    translate horizontally so the maximum sits on the ``z``-axis.
    """
    if spec.kind != GENERIC:
        raise DomainError("normal form is defined for generic geodesics")
    word = Isometry.vertical_lift(-spec.h)
    s1 = transform_spec(word, spec)
    step = Isometry.left_translation(-s1.c / s1.a, 0.0, 0.0)
    word = word.then(step)
    s2 = transform_spec(step, s1)
    step = Isometry.sign_change(1 if s2.a > 0 else -1, 1 if s2.b > 0 else -1)
    word = word.then(step)
    s3 = transform_spec(step, s2)
    T = period(s3)
    tmax = critical_times(s3, s3.t_init, s3.t_init + 1.05 * T, tol, "max")[0]
    p, v = evaluate(s3, tmax, tol)
    step = Isometry.left_translation(-p.x, -p.y, 0.0)
    word = word.then(step)
    v = step.apply_vector(v)
    # the top of the oscillation has z' = 0 exactly; drop root-finding noise
    v = TangentVec(v.base, v.dx, v.dy, 0.0)
    return NormalForm(word, tmax - spec.t_init, spec_from_initial(v.base, v, 0.0))
