"""Distances in SOL: closed forms, cut lengths and geodesic shooting.

Any geodesic segment no longer than its cut length is minimizing, and the
cut length of every class is known (infinite, ``T(k)`` or ``sqrt(2) pi``).  The
general solver therefore shoots from the origin over unit directions and
accepts a converged witness of length ``L`` as soon as ``L`` does not exceed
the cut length of its own class; the shortest accepted witness is returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy import optimize

from . import kernel
from .errors import AdmissibilityError, DomainError, SolverError
from .flow import (
    GENERIC,
    HORIZONTAL,
    HYPERBOLIC,
    VERTICAL,
    GeodesicSpec,
    geodesic_states,
    spec_from_initial,
    transform_spec,
)
from .group import ORIGIN, Isometry, Point, group_inverse, group_mul
from .invariants import SQRT2_PI, invariant_set, invert_H, two_abs_ab

__all__ = [
    "DistanceResult",
    "Candidate",
    "StaircaseBound",
    "AsymptoticSolution",
    "cut_length",
    "direction_cut_length",
    "dist_special",
    "staircase_bound",
    "upper_bound",
    "distance",
    "shoot_distance",
    "lambda_star",
    "ground_asymptotic",
    "horizontal_jacobi_components",
    "horizontal_family_field",
    "horizontal_conjugate_time",
    "sphere_points",
    "asymptotic_table",
]

CUT_MARGIN = 1e-6
SHOOTING = "shooting"
CLOSED_FORM = "hyperbolic-closed-form"


def cut_length(kind: str, k: Optional[float] = None) -> float:
    """Cut length of a geodesic class: infinite, ``T(k)`` or ``sqrt(2) pi``.

    Raises
    ------
    DomainError
        If ``k`` is missing for a generic geodesic, or the class is unknown.
    """
    if kind in (VERTICAL, HYPERBOLIC):
        return math.inf
    if kind == HORIZONTAL:
        return SQRT2_PI
    if kind == GENERIC:
        if k is None:
            raise DomainError("cut_length needs k for a generic geodesic")
        if k >= 1.0:
            # moduli that round to 1: T(k) -> infinity
            return math.inf
        return invariant_set(k).T
    raise DomainError(f"unknown geodesic class {kind!r}")


def direction_cut_length(a: float, b: float) -> float:
    """Cut length of the geodesic with principal constants ``(a, b)``."""
    if a == 0.0 or b == 0.0:
        return math.inf
    t = 2.0 * abs(a * b)
    if abs(t - 1.0) <= 1e-12:
        return SQRT2_PI
    t = min(t, 1.0)
    k = math.sqrt((1.0 - t) / (1.0 + t))
    if k >= 1.0:
        return math.inf
    return invariant_set(k).T


@dataclass(frozen=True)
class Candidate:
    """A converged shooting witness from the origin in the reduced frame."""

    direction: tuple
    length: float
    residual: float
    cut: float


@dataclass(frozen=True)
class DistanceResult:
    """Distance together with a minimizing witness.

    ``witness`` starts at the first point at time ``0``; evaluating it at
    ``witness_time`` lands within ``residual`` of the second point.
    """

    value: float
    witness: Optional[GeodesicSpec]
    witness_time: float
    method: str
    residual: float
    candidates: tuple = field(default=(), repr=False)


# ----------------------------------------------------------------------------
# closed forms


def _plane_distance(u1, v1, u2, v2):
    # hyperbolic distance in the upper half-plane, stable for close points
    return 2.0 * math.asinh(math.sqrt(((u2 - u1) ** 2 + (v2 - v1) ** 2) / (4.0 * v1 * v2)))


def _plane_witness_y(p: Point, q: Point) -> GeodesicSpec:
    # plane y = const: u = x, v = e^z, geodesic is a semicircle centred on v = 0
    u1, v1, u2, v2 = p.x, math.exp(p.z), q.x, math.exp(q.z)
    u0 = ((u2 - u1) * (u2 + u1) + (v2 - v1) * (v2 + v1)) / (2.0 * (u2 - u1))
    radius = math.hypot(u1 - u0, v1)
    a = math.copysign(1.0 / radius, u2 - u1)
    zdot = a * (u0 - u1)
    return spec_from_initial(p, (a * v1 * v1, 0.0, zdot))


def _plane_witness_x(p: Point, q: Point) -> GeodesicSpec:
    # plane x = const: u = y, v = e^{-z}
    u1, v1, u2, v2 = p.y, math.exp(-p.z), q.y, math.exp(-q.z)
    u0 = ((u2 - u1) * (u2 + u1) + (v2 - v1) * (v2 + v1)) / (2.0 * (u2 - u1))
    radius = math.hypot(u1 - u0, v1)
    b = math.copysign(1.0 / radius, u2 - u1)
    zdot = b * (u1 - u0)
    return spec_from_initial(p, (0.0, b * v1 * v1, zdot))


def _endpoint_miss(spec: GeodesicSpec, t: float, q: Point, tol: float = 1e-13) -> float:
    end = geodesic_states(spec, [t], tol)[0, :3]
    return float(np.linalg.norm(end - q.as_array()))


def dist_special(p: Point, q: Point) -> Optional[DistanceResult]:
    """Closed-form distance when ``p, q`` lie in a common totally geodesic plane.

    Handles pairs differing only in height (vertical segment) and pairs
    sharing ``y`` or sharing ``x`` (hyperbolic planes).  Returns ``None``
    otherwise.
    """
    if p.x == q.x and p.y == q.y:
        d = abs(q.z - p.z)
        dz = 1.0 if q.z >= p.z else -1.0
        spec = spec_from_initial(p, (0.0, 0.0, dz))
        return DistanceResult(d, spec, d, VERTICAL, _endpoint_miss(spec, d, q))
    if p.y == q.y:
        d = _plane_distance(p.x, math.exp(p.z), q.x, math.exp(q.z))
        spec = _plane_witness_y(p, q)
    elif p.x == q.x:
        d = _plane_distance(p.y, math.exp(-p.z), q.y, math.exp(-q.z))
        spec = _plane_witness_x(p, q)
    else:
        return None
    return DistanceResult(d, spec, d, CLOSED_FORM, _endpoint_miss(spec, d, q))


class StaircaseBound(NamedTuple):
    """Length of the staircase path to ``(p, p, 0)`` and the straight chord ``sqrt(2) p``."""

    length: float
    chord: float


def staircase_bound(p: float) -> StaircaseBound:
    """Upper bound ``4 log(p/2) + 4`` for the distance from the origin to ``(p, p, 0)``."""
    if not p >= 2.0:
        raise DomainError(f"staircase bound needs p >= 2, got {p}")
    return StaircaseBound(4.0 * math.log(p / 2.0) + 4.0, math.sqrt(2.0) * p)


def _two_leg_length(X, Y, Z, zm, x_first):
    if x_first:
        # origin -> (X, 0, zm) in plane y = 0, then -> (X, Y, Z) in plane x = X
        l1 = _plane_distance(0.0, 1.0, X, math.exp(zm))
        l2 = _plane_distance(0.0, math.exp(-zm), Y, math.exp(-Z))
    else:
        l1 = _plane_distance(0.0, 1.0, Y, math.exp(-zm))
        l2 = _plane_distance(0.0, math.exp(zm), X, math.exp(Z))
    return l1 + l2


def upper_bound(p: Point, q: Point) -> float:
    """Length of the best two-leg path through hyperbolic planes from ``p`` to ``q``."""
    r = group_mul(group_inverse(p), q)
    X, Y, Z = r
    best = math.inf
    for x_first in (True, False):
        grid = np.linspace(-12.0, 12.0, 97)
        vals = [_two_leg_length(X, Y, Z, zm, x_first) for zm in grid]
        i = int(np.argmin(vals))
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
        res = optimize.minimize_scalar(
            lambda zm: _two_leg_length(X, Y, Z, zm, x_first),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-10},
        )
        best = min(best, vals[i], float(res.fun))
    return best


# ----------------------------------------------------------------------------
# shooting


def _fibonacci_directions(n):
    i = np.arange(n) + 0.5
    zc = 1.0 - 2.0 * i / n
    r = np.sqrt(1.0 - zc * zc)
    phi = math.pi * (3.0 - math.sqrt(5.0)) * i
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), zc])


def _tangent_basis(v):
    helper = np.array([1.0, 0.0, 0.0]) if abs(v[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(v, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(v, e1)
    return e1, e2


class _Shooter:
    """Endpoint map from the origin with a diagonal weighting of the miss."""

    def __init__(self, target, weights, tol, max_steps=400_000):
        self.target = target
        self.weights = weights
        self.kernel_tol = max(2.5e-14, 1e-3 * tol)
        self.max_steps = max_steps

    def states(self, v, times):
        times = np.asarray(times, dtype=float)
        out, _, status = kernel.propagate(
            v[0], v[1], (0.0, 0.0, 0.0, v[2]), times, self.kernel_tol, self.kernel_tol, self.max_steps
        )
        if status != 0:
            return None
        return out

    def miss(self, v, L):
        st = self.states(v, [L])
        if st is None:
            return None, None
        s = st[0]
        F = self.weights * (s[:3] - self.target)
        e2z = math.exp(2.0 * s[2])
        vel = self.weights * np.array([v[0] * e2z, v[1] / e2z, s[3]])
        return F, vel


def _refine(sh: _Shooter, v, L, tol, max_iter=60):
    v = v / np.linalg.norm(v)
    F, vel = sh.miss(v, L)
    if F is None:
        return None
    nf = float(np.linalg.norm(F))
    mu = 1e-3
    h = 1e-7
    for _ in range(max_iter):
        if nf <= tol:
            return v, L, nf
        e1, e2 = _tangent_basis(v)
        cols = []
        for e in (e1, e2):
            Fp, _ = sh.miss((v + h * e) / np.linalg.norm(v + h * e), L)
            Fm, _ = sh.miss((v - h * e) / np.linalg.norm(v - h * e), L)
            if Fp is None or Fm is None:
                return None
            cols.append((Fp - Fm) / (2.0 * h))
        cols.append(vel)
        J = np.column_stack(cols)
        JTJ = J.T @ J
        g = J.T @ F
        accepted = False
        for _ in range(12):
            A = JTJ + mu * np.diag(np.diag(JTJ) + 1e-300)
            try:
                step = np.linalg.solve(A, -g)
            except np.linalg.LinAlgError:
                mu *= 10.0
                continue
            v_new = v + step[0] * e1 + step[1] * e2
            v_new /= np.linalg.norm(v_new)
            L_new = L + step[2]
            if L_new <= 0.0:
                mu *= 10.0
                continue
            F_new, vel_new = sh.miss(v_new, L_new)
            if F_new is not None:
                nf_new = float(np.linalg.norm(F_new))
                if nf_new < nf:
                    v, L, F, vel, nf = v_new, L_new, F_new, vel_new, nf_new
                    mu = max(mu / 10.0, 1e-12)
                    accepted = True
                    break
            mu *= 10.0
        if not accepted:
            break
    if nf <= tol:
        return v, L, nf
    return None


def _coarse_length(sh: _Shooter, v, L_max, n=48):
    times = np.linspace(L_max / n, L_max, n)
    st = sh.states(v, times)
    if st is None:
        return None
    d = np.linalg.norm(sh.weights * (st[:, :3] - sh.target), axis=1)
    return float(times[int(np.argmin(d))])


def _asymptotic_seeds(X, Y, Z):
    if Z != 0.0 or X == 0.0 or Y == 0.0:
        return []
    lam = math.hypot(X, Y)
    theta = math.atan2(abs(Y), abs(X))
    if lam < lambda_star(theta):
        return []
    sol = ground_asymptotic(theta, lam)
    sa, sb = math.copysign(1.0, X), math.copysign(1.0, Y)
    seeds = []
    for c in (sol.c, -sol.c):
        seeds.append((np.array([sa * sol.a, sb * sol.b, c]), sol.T))
    return seeds


def _shoot(p: Point, q: Point, tol: float, n_starts: int) -> DistanceResult:
    r = group_mul(group_inverse(p), q)
    target = r.as_array()
    weights = np.array([math.exp(p.z), math.exp(-p.z), 1.0])
    sh = _Shooter(target, weights, tol)
    bound = upper_bound(p, q)
    starts = [(d, None) for d in _fibonacci_directions(max(32, int(n_starts)))]
    starts = _asymptotic_seeds(*r) + starts
    found = []
    best_residual = math.inf
    for v0, L0 in starts:
        cap = direction_cut_length(v0[0], v0[1])
        L_max = min(cap + CUT_MARGIN, bound * (1.0 + 1e-9) + CUT_MARGIN)
        if L0 is None:
            L0 = _coarse_length(sh, v0, L_max)
            if L0 is None:
                continue
        res = _refine(sh, v0, L0, tol)
        if res is None:
            F, _ = sh.miss(v0 / np.linalg.norm(v0), L0)
            if F is not None:
                best_residual = min(best_residual, float(np.linalg.norm(F)))
            continue
        v, L, nf = res
        best_residual = min(best_residual, nf)
        cut = direction_cut_length(v[0], v[1])
        if L <= cut + CUT_MARGIN:
            found.append(Candidate(tuple(float(c) for c in v), float(L), nf, cut))
    if not found:
        raise SolverError(
            "no shooting start converged to a witness within its cut length",
            best_residual=best_residual,
        )
    best = min(found, key=lambda c: c.length)
    reduced = spec_from_initial(ORIGIN, best.direction)
    witness = transform_spec(Isometry.left_translation(*p), reduced)
    return DistanceResult(best.length, witness, best.length, SHOOTING, best.residual, tuple(found))


def _check_tol(tol):
    if not (1e-13 <= tol <= 1e-4):
        raise DomainError(f"tol must lie in [1e-13, 1e-4], got {tol}")


def shoot_distance(p: Point, q: Point, tol: float = 1e-10, n_starts: int = 32) -> DistanceResult:
    """Distance by multi-start shooting only, never using closed forms."""
    _check_tol(tol)
    if p == q:
        return DistanceResult(0.0, spec_from_initial(p, (0.0, 0.0, 1.0)), 0.0, VERTICAL, 0.0)
    return _shoot(p, q, tol, n_starts)


def distance(p: Point, q: Point, tol: float = 1e-10, n_starts: int = 32) -> DistanceResult:
    """Riemannian distance between two points of SOL with a minimizing witness.

    Closed forms are used when the points share a totally geodesic plane;
    otherwise the pair is reduced to the origin by a left translation and
    solved by :func:`shoot_distance`.

    Raises
    ------
    SolverError
        If no start converges; ``best_residual`` records the closest miss.
    """
    _check_tol(tol)
    if p == q:
        return DistanceResult(0.0, spec_from_initial(p, (0.0, 0.0, 1.0)), 0.0, VERTICAL, 0.0)
    special = dist_special(p, q)
    if special is not None:
        return special
    return _shoot(p, q, tol, n_starts)


# ----------------------------------------------------------------------------
# asymptotics in the ground plane


class AsymptoticSolution(NamedTuple):
    """Geodesic from the origin reaching ``lambda (cos theta, sin theta, 0)`` after one period."""

    k: float
    a: float
    b: float
    c: float
    T: float
    relative_miss: float
    spec: GeodesicSpec


def lambda_star(theta: float) -> float:
    """Smallest ``lambda`` for which the one-period construction exists in direction ``theta``."""
    if not (0.0 < theta < 0.5 * math.pi):
        raise DomainError(f"theta must lie in (0, pi/2), got {theta}")
    sc = math.sin(theta) * math.cos(theta)
    two_sc = min(2.0 * sc, 1.0)
    k_theta = math.sqrt((1.0 - two_sc) / (1.0 + two_sc))
    return invariant_set(k_theta).H / math.sqrt(sc)


def ground_asymptotic(theta: float, lam: float) -> AsymptoticSolution:
    """Constants of the geodesic whose first period ends at ``lam (cos theta, sin theta, 0)``.

    Chooses ``k`` with ``H(k) = lam sqrt(sin theta cos theta)``; the length
    ``T(k)`` of that period is the distance.

    Raises
    ------
    AdmissibilityError
        If ``lam < lambda_star(theta)``; the threshold is attached.
    """
    if not (0.0 < theta < 0.5 * math.pi):
        raise DomainError(f"theta must lie in (0, pi/2), got {theta}")
    sc = math.sin(theta) * math.cos(theta)
    threshold = lambda_star(theta)
    if not lam >= threshold * (1.0 - 1e-12):
        raise AdmissibilityError(
            f"lambda = {lam} below the threshold {threshold} for theta = {theta}",
            threshold=threshold,
        )
    k = invert_H(max(lam * math.sqrt(sc), math.pi))
    half = 0.5 * two_abs_ab(k)
    a2 = math.tan(theta) * half
    b2 = half / math.tan(theta)
    if a2 + b2 > 1.0 + 1e-12:
        raise AdmissibilityError(
            f"a^2 + b^2 = {a2 + b2} exceeds 1 (lambda below threshold {threshold})",
            threshold=threshold,
        )
    a, b = math.sqrt(a2), math.sqrt(b2)
    c = math.sqrt(max(0.0, 1.0 - a2 - b2))
    inv = invariant_set(k)
    miss = max(abs(inv.M * b - lam * math.cos(theta)), abs(inv.M * a - lam * math.sin(theta))) / lam
    norm = math.sqrt(a2 + b2 + c * c)
    spec = spec_from_initial(ORIGIN, (a / norm, b / norm, c / norm))
    return AsymptoticSolution(k, a, b, c, inv.T, miss, spec)


def asymptotic_table(theta: float, lambdas) -> list[dict]:
    """Rows comparing ``T(k)`` with ``4 log lambda`` for each ``lambda``."""
    rows = []
    for lam in lambdas:
        sol = ground_asymptotic(theta, float(lam))
        rows.append(
            {
                "lambda": float(lam),
                "k": sol.k,
                "a": sol.a,
                "b": sol.b,
                "c": sol.c,
                "T": sol.T,
                "four_log_lambda": 4.0 * math.log(lam),
                "difference": sol.T - 4.0 * math.log(lam),
            }
        )
    return rows


# ----------------------------------------------------------------------------
# the horizontal conjugate point


def horizontal_jacobi_components(t):
    """``(p, q)`` with ``J = p (X - Y) + q Z`` along the horizontal line ``(t, t, 0)/sqrt 2``."""
    t = np.asarray(t, dtype=float)
    w = math.sqrt(2.0) * t
    return 1.0 - np.cos(w), np.sin(w)


def horizontal_family_field(times, ds: float = 1e-4, tol: float = 1e-13) -> np.ndarray:
    """Central-difference Jacobi field of the pencil ``cos s (X+Y)/sqrt 2 + sin s Z`` from the origin.

    Rows are frame components ``(X, Y, Z)`` along the horizontal geodesic.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    r = 1.0 / math.sqrt(2.0)
    states = []
    for s in (ds, -ds):
        spec = spec_from_initial(ORIGIN, (math.cos(s) * r, math.cos(s) * r, math.sin(s)))
        states.append(geodesic_states(spec, times, tol)[:, :3])
    J = (states[0] - states[1]) / (2.0 * ds)
    # along the base curve z = 0, so coordinate and frame components coincide
    return J


def horizontal_conjugate_time(tol: float = 1e-13, ds: float = 1e-4) -> float:
    """First positive zero of the pencil Jacobi field along the horizontal geodesic."""
    grid = np.linspace(0.25, 3.0 * math.pi, 400)
    norms = np.linalg.norm(horizontal_family_field(grid, ds, tol), axis=1)
    scale = norms.max()
    for i in range(1, grid.size - 1):
        if norms[i] <= norms[i - 1] and norms[i] <= norms[i + 1] and norms[i] < 1e-2 * scale:
            res = optimize.minimize_scalar(
                lambda t: float(np.linalg.norm(horizontal_family_field([t], ds, tol)[0])),
                bounds=(grid[i - 1], grid[i + 1]),
                method="bounded",
                options={"xatol": 1e-9},
            )
            return float(res.x)
    raise SolverError("no zero of the Jacobi field in the search bracket")


# ----------------------------------------------------------------------------
# sphere sweep


def sphere_points(radius: float, n_polar: int = 12, n_azimuth: int = 24, tol: float = 1e-10) -> list[dict]:
    """Endpoints ``exp(min(radius, cut) v)`` for a grid of unit directions ``v`` at the origin.

    Rows flag whether the radius was clipped at the cut length.
    """
    if not radius > 0.0:
        raise DomainError(f"radius must be positive, got {radius}")
    rows = []
    for i in range(n_polar + 1):
        polar = math.pi * i / n_polar
        azimuths = [0.0] if i in (0, n_polar) else [2.0 * math.pi * j / n_azimuth for j in range(n_azimuth)]
        for az in azimuths:
            v = (math.sin(polar) * math.cos(az), math.sin(polar) * math.sin(az), math.cos(polar))
            spec = spec_from_initial(ORIGIN, v)
            cut = cut_length(spec.kind, spec.k if spec.kind == GENERIC else None)
            t = min(radius, cut)
            x, y, z, _ = geodesic_states(spec, [t], tol)[0]
            rows.append(
                {
                    "polar": polar,
                    "azimuth": az,
                    "a": spec.a,
                    "b": spec.b,
                    "c": spec.c,
                    "k": spec.k,
                    "class": spec.kind,
                    "t": t,
                    "x": float(x),
                    "y": float(y),
                    "z": float(z),
                    "clipped": bool(cut < radius),
                }
            )
    return rows
