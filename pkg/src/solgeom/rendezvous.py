"""Partner geodesics, the one-period displacement and conjugate-point checks.

The partner of a generic geodesic ``gamma`` at time ``t1`` starts at
``gamma(t1)`` with the vertical component of the velocity reversed.  Both
curves share ``(a, b)`` and meet again after one period ``T(k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate as sp_integrate

from .errors import GeodesicClassError, PreconditionError
from .flow import (
    GENERIC,
    GeodesicSpec,
    evaluate,
    geodesic_states,
    integrate,
    spec_from_initial,
    velocity_from_states,
)
from .group import vertical_flip
from .invariants import invariant_set

__all__ = [
    "PartnerPair",
    "RendezvousReport",
    "partner_at",
    "reflected_states",
    "period_displacement",
    "rendezvous_check",
    "jacobi_field",
    "jacobi_endpoint_defect",
]

# below this |z'(t1)| the partner is treated as the same geodesic
DISTINCT_THRESHOLD = 1e-8


def _require_generic(spec: GeodesicSpec, what: str):
    if spec.kind != GENERIC:
        raise GeodesicClassError(f"{what} needs a generic geodesic, got {spec.kind}")


@dataclass(frozen=True)
class PartnerPair:
    """A geodesic and its partner at time ``t1`` (both specs attached at ``t1`` or earlier)."""

    original: GeodesicSpec
    partner: GeodesicSpec
    t1: float


def partner_at(spec: GeodesicSpec, t1: float, tol: float = 1e-13) -> PartnerPair:
    """Partner of ``spec`` at time ``t1``, built from the flipped velocity at ``gamma(t1)``."""
    _require_generic(spec, "partner_at")
    p, v = evaluate(spec, t1, tol)
    partner = spec_from_initial(p, vertical_flip(v), t_init=t1)
    return PartnerPair(spec, partner, float(t1))


def reflected_states(spec: GeodesicSpec, t1: float, times, tol: float = 1e-13) -> np.ndarray:
    """Partner states from the reflection ``x*(t) = 2x(t1) - x(2t1 - t)``, ``z*(t) = z(2t1 - t)``."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    both = geodesic_states(spec, np.concatenate([[t1], 2.0 * t1 - times]), tol)
    base, mirrored = both[0], both[1:]
    out = np.empty_like(mirrored)
    out[:, 0] = 2.0 * base[0] - mirrored[:, 0]
    out[:, 1] = 2.0 * base[1] - mirrored[:, 1]
    out[:, 2] = mirrored[:, 2]
    out[:, 3] = -mirrored[:, 3]
    return out


def period_displacement(spec: GeodesicSpec) -> np.ndarray:
    """Displacement over one period: ``sgn(ab) M(k) (b, a, 0)``."""
    _require_generic(spec, "period_displacement")
    M = invariant_set(spec.k).M
    s = math.copysign(1.0, spec.a * spec.b)
    return np.array([s * M * spec.b, s * M * spec.a, 0.0])


@dataclass(frozen=True)
class RendezvousReport:
    """Outcome of :func:`rendezvous_check`."""

    t1: float
    period: float
    meet_error: float
    distinct: bool
    length_original: float
    length_partner: float
    end_original: np.ndarray
    end_partner: np.ndarray


def _arc_length(traj) -> float:
    vel = velocity_from_states(traj.spec, traj.states)
    e2z = np.exp(2.0 * traj.z)
    speed = np.sqrt(vel[:, 0] ** 2 / e2z + vel[:, 1] ** 2 * e2z + vel[:, 2] ** 2)
    return float(sp_integrate.simpson(speed, x=traj.t))


def rendezvous_check(
    spec: GeodesicSpec, t1: float, tol: float = 1e-10, num: int = 257
) -> RendezvousReport:
    """Integrate a geodesic and its partner at ``t1`` over ``[t1, t1 + T]`` and compare endpoints."""
    _require_generic(spec, "rendezvous_check")
    pair = partner_at(spec, t1, min(tol, 1e-12))
    T = invariant_set(spec.k).T
    orig = integrate(spec, t1, t1 + T, tol, num=num)
    part = integrate(pair.partner, t1, t1 + T, tol, num=num)
    e1 = orig.states[-1, :3]
    e2 = part.states[-1, :3]
    distinct = 2.0 * abs(pair.partner.velocity.dz) > DISTINCT_THRESHOLD
    return RendezvousReport(
        float(t1),
        T,
        float(np.linalg.norm(e1 - e2)),
        bool(distinct),
        _arc_length(orig),
        _arc_length(part),
        e1,
        e2,
    )


def _psi(spec, t1, s, times, tol):
    pivot = t1 + s
    st = geodesic_states(spec, np.concatenate([[pivot], 2.0 * pivot - times]), tol)
    base, mirrored = st[0], st[1:]
    return np.column_stack(
        [2.0 * base[0] - mirrored[:, 0], 2.0 * base[1] - mirrored[:, 1], mirrored[:, 2]]
    )


def jacobi_field(spec: GeodesicSpec, t1: float, ds: float, times, tol: float = 1e-13) -> np.ndarray:
    """Central-difference Jacobi field of the shifted-pivot partner family.

    The family is ``psi(t, s) = (2x(t1+s) - x(2(t1+s)-t), 2y(t1+s) - y(2(t1+s)-t),
    z(2(t1+s)-t))``; returns ``(psi(t, ds) - psi(t, -ds)) / (2 ds)`` in
    coordinate components, one row per time.
    """
    _require_generic(spec, "jacobi_field")
    times = np.atleast_1d(np.asarray(times, dtype=float))
    plus = _psi(spec, t1, ds, times, tol)
    minus = _psi(spec, t1, -ds, times, tol)
    return (plus - minus) / (2.0 * ds)


def _metric_norms(spec, times, J, tol):
    z = geodesic_states(spec, times, tol)[:, 2]
    ez = np.exp(z)
    return np.sqrt((J[:, 0] / ez) ** 2 + (J[:, 1] * ez) ** 2 + J[:, 2] ** 2)


def jacobi_endpoint_defect(
    spec: GeodesicSpec,
    t1: float,
    ds: float,
    tol: float = 1e-13,
    num: int = 201,
    return_field: bool = False,
):
    """Norms of the finite-difference Jacobi field at ``t1`` and ``t1 + T``.

    ``t1`` must be a critical time (``|z'(t1)| <= 1e-10``).  With
    ``return_field`` the sample times, field and ``max |J|`` are appended.
    """
    _require_generic(spec, "jacobi_endpoint_defect")
    if not (1e-6 <= ds <= 1e-3):
        raise PreconditionError(f"ds must lie in [1e-6, 1e-3], got {ds}")
    zdot = geodesic_states(spec, [t1], tol)[0, 3]
    if abs(zdot) > 1e-10:
        raise PreconditionError(f"t1 = {t1} is not critical (z' = {zdot:.3e})")
    T = invariant_set(spec.k).T
    times = np.linspace(t1, t1 + T, num)
    J = jacobi_field(spec, t1, ds, times, tol)
    norms = _metric_norms(spec, times, J, tol)
    out = (float(norms[0]), float(norms[-1]))
    if return_field:
        return out + (times, J, float(norms.max()))
    return out
