"""Modulus dictionary and the invariant functions A, T, M, H of a geodesic.

For a generic unit-speed geodesic with principal constants ``a, b`` the
modulus is ``k = sqrt((1 - 2|ab|) / (1 + 2|ab|))`` and

* ``A(k) = artanh(k)`` is the half-width of the height oscillation,
* ``T(k) = sqrt(8(1+k^2)) K(k)`` is its period,
* ``M(k) = sqrt(8(1+k^2)) (2E - (1-k^2)K) / (1-k^2)`` scales the drift per period,
* ``H(k) = (4E - 2(1-k^2)K) / sqrt(1-k^2) = sqrt(|ab|) M(k)`` is the drift invariant.

``k`` is the canonical argument everywhere; helpers convert from ``(a, b)``.
"""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

from scipy import integrate

from .elliptic import agm, complementary_modulus, complete_elliptic
from .errors import AdmissibilityError, DomainError

__all__ = [
    "ModulusDict",
    "InvariantSet",
    "two_abs_ab",
    "modulus_from_ab",
    "ab_from_kh",
    "amplitude",
    "invariant_set",
    "invariant_derivatives",
    "drift_factor_derivative_alt",
    "invariant_row",
    "modulus_grid",
    "invert_H",
    "invert_T",
    "agm_period",
    "period_integral",
    "drift_factor_integral",
]

SQRT2_PI = math.sqrt(2.0) * math.pi
_ADMISSIBLE_SLACK = 1e-12
_HORIZONTAL_TIE = 1e-12


class ModulusDict(NamedTuple):
    """Dictionary between ``(k, h)`` and the magnitudes ``|a|, |b|``."""

    k: float
    h: float
    absA: float
    absB: float
    twoAbsAB: float


class InvariantSet(NamedTuple):
    """Amplitude, period, drift factor and drift invariant for one modulus."""

    k: float
    A: float
    T: float
    M: float
    H: float


def _check_modulus(k):
    if not (0.0 <= k < 1.0) or not math.isfinite(k):
        raise DomainError(f"modulus must lie in [0, 1), got {k}")


def two_abs_ab(k: float) -> float:
    """``2|ab| = (1 - k^2) / (1 + k^2)``."""
    return (1.0 - k) * (1.0 + k) / (1.0 + k * k)


def modulus_from_ab(a: float, b: float) -> float:
    """Modulus of a unit-speed geodesic with principal constants ``a, b``.

    Returns ``0`` when ``2|ab|`` is within ``1e-12`` of ``1``.

    Raises
    ------
    AdmissibilityError
        If ``2|ab| > 1``, which no unit-speed geodesic can have.
    """
    t = 2.0 * abs(a * b)
    if t > 1.0 + _ADMISSIBLE_SLACK:
        raise AdmissibilityError(f"2|ab| = {t} exceeds 1", threshold=1.0)
    if t >= 1.0 - _HORIZONTAL_TIE:
        # k ~ sqrt(1 - 2|ab|) amplifies rounding in 2|ab|; treat the tie as horizontal
        return 0.0
    return math.sqrt((1.0 - t) / (1.0 + t))


def ab_from_kh(k: float, h: float) -> ModulusDict:
    """Magnitudes ``|a|, |b|`` for modulus ``k`` and average height ``h``.

    The signs of ``a`` and ``b`` are free; only magnitudes are returned.
    """
    _check_modulus(k)
    root = math.sqrt((1.0 - k) * (1.0 + k) / (2.0 * (1.0 + k * k)))
    return ModulusDict(k, h, math.exp(-h) * root, math.exp(h) * root, two_abs_ab(k))


def amplitude(k: float) -> float:
    """``A(k) = artanh(k)``."""
    _check_modulus(k)
    return math.atanh(k)


def invariant_set(k: float) -> InvariantSet:
    """Evaluate ``A, T, M, H`` from the complete elliptic integrals."""
    _check_modulus(k)
    _, K, E = complete_elliptic(k)
    kp2 = (1.0 - k) * (1.0 + k)
    root = math.sqrt(8.0 * (1.0 + k * k))
    T = root * K
    M = root * (2.0 * E - kp2 * K) / kp2
    H = (4.0 * E - 2.0 * kp2 * K) / math.sqrt(kp2)
    return InvariantSet(k, math.atanh(k), T, M, H)


def _check_derivative_modulus(k):
    if not (1e-8 <= k < 1.0):
        raise DomainError(f"derivative formulas need 1e-8 <= k < 1, got {k}")


def invariant_derivatives(k: float) -> tuple[float, float, float]:
    """Closed-form ``(dT/dk, dM/dk, dH/dk)``.

    Refuses ``k < 1e-8`` where the formulas carry a removable ``1/k``.
    """
    _check_derivative_modulus(k)
    _, K, E = complete_elliptic(k)
    k2 = k * k
    kp2 = (1.0 - k) * (1.0 + k)
    core = (1.0 + k2) * E - kp2 * K
    dT = math.sqrt(8.0 / (1.0 + k2)) * core / (k * kp2)
    dH = 2.0 * core / (k * kp2**1.5)
    dM = math.sqrt(8.0 * (1.0 + k2)) * (
        (E - kp2 * K) / (k * kp2)
        + k * (3.0 + k2) * (2.0 * E - kp2 * K) / ((1.0 + k2) * kp2 * kp2)
    )
    return dT, dM, dH


def drift_factor_derivative_alt(k: float) -> float:
    """``dM/dk`` in the form ``(M - T)/(2k) + k(3+k^2) M / ((1-k^2)(1+k^2))``."""
    _check_derivative_modulus(k)
    inv = invariant_set(k)
    kp2 = (1.0 - k) * (1.0 + k)
    return (inv.M - inv.T) / (2.0 * k) + k * (3.0 + k * k) * inv.M / (kp2 * (1.0 + k * k))


def invariant_row(k: float) -> dict:
    """``k, A, T, M, H`` and their derivatives (``None`` below ``k = 1e-8``)."""
    inv = invariant_set(k)
    row = dict(inv._asdict())
    if k >= 1e-8:
        dT, dM, dH = invariant_derivatives(k)
    else:
        dT = dM = dH = None
    row.update(dT=dT, dM=dM, dH=dH)
    return row


def modulus_grid(start: float, stop: float, num: int) -> list[float]:
    """``num`` equispaced moduli from ``start`` to ``stop`` inclusive, inside ``[0, 1)``."""
    if num < 1:
        raise DomainError(f"grid size must be positive, got {num}")
    for k in (start, stop):
        _check_modulus(k)
    if num == 1:
        return [float(start)]
    step = (stop - start) / (num - 1)
    return [float(start + i * step) for i in range(num - 1)] + [float(stop)]


def _invert(
    value: Callable[[float], float],
    slope: Callable[[float], float],
    target: float,
    name: str,
) -> float:
    """Invert a strictly increasing function on ``[0, 1)`` by safeguarded Newton.

    Returns the double ``k`` whose value is closest to ``target`` when the
    requested ``1e-10`` relative accuracy is finer than the spacing of
    representable moduli near ``k = 1``.
    """
    if not math.isfinite(target):
        raise DomainError(f"{name}: target must be finite, got {target}")
    floor = value(0.0)
    tol = 1e-10 * max(1.0, abs(target))
    if target < floor - tol:
        raise DomainError(f"{name}: target {target} below the range infimum {floor}")
    if target <= floor + tol:
        return 0.0
    lo, hi = 0.0, None
    for m in range(1, 17):
        cand = 1.0 - 10.0**-m
        if value(cand) >= target:
            hi = cand
            break
        lo = cand
    if hi is None:
        hi = math.nextafter(1.0, 0.0)
        if value(hi) < target:
            raise DomainError(f"{name}: target {target} beyond double-precision reach")
    x = 0.5 * (lo + hi)
    for _ in range(200):
        fx = value(x) - target
        if abs(fx) <= tol:
            return x
        if fx > 0.0:
            hi = x
        else:
            lo = x
        if math.nextafter(lo, 1.0) >= hi:
            break
        step_ok = False
        if x >= 1e-8:
            d = slope(x)
            if d > 0.0 and math.isfinite(d):
                nx = x - fx / d
                if lo < nx < hi:
                    x = nx
                    step_ok = True
        if not step_ok:
            x = 0.5 * (lo + hi)
    # resolution-limited: pick the better end of the final bracket
    candidates = [c for c in (lo, hi, x) if 0.0 <= c < 1.0]
    return min(candidates, key=lambda c: abs(value(c) - target))


def invert_H(target: float) -> float:
    """The modulus ``k`` with ``H(k) = target`` (``target >= pi``)."""
    return _invert(
        lambda k: invariant_set(k).H,
        lambda k: invariant_derivatives(k)[2],
        target,
        "invert_H",
    )


def invert_T(target: float) -> float:
    """The modulus ``k`` with ``T(k) = target`` (``target >= sqrt(2) pi``)."""
    return _invert(
        lambda k: invariant_set(k).T,
        lambda k: invariant_derivatives(k)[0],
        target,
        "invert_T",
    )


def agm_period(k: float | None = None, *, ab: float | None = None) -> float:
    """Period through the AGM: ``T = pi / AGM(sqrt|ab|, sqrt(1 + 2|ab|) / 2)``.

    Give either the modulus ``k`` or the product ``ab`` (keyword).
    """
    if (k is None) == (ab is None):
        raise DomainError("agm_period takes exactly one of k or ab")
    if ab is None:
        _check_modulus(k)
        abs_ab = 0.5 * two_abs_ab(k)
    else:
        abs_ab = abs(ab)
        if not (0.0 < 2.0 * abs_ab <= 1.0 + _ADMISSIBLE_SLACK):
            raise DomainError(f"agm_period needs 0 < 2|ab| <= 1, got {2 * abs_ab}")
    return math.pi / agm(math.sqrt(abs_ab), 0.5 * math.sqrt(1.0 + 2.0 * abs_ab))


def _reduced_quadrature(k: float, weight_power: int) -> float:
    """``4 int_0^A cosh(2z)^p dz / sqrt(1 - 2|ab| cosh 2z)`` via ``z = artanh(k u)``.

    Under this substitution ``dz = k du / (1 - k^2u^2)``, ``cosh 2z =
    (1 + k^2u^2)/(1 - k^2u^2)`` and ``1 - 2|ab| cosh 2z`` equals
    ``2k^2 (1-u^2) / ((1+k^2)(1-k^2u^2))``.  The remaining ``(1-u)^{-1/2}``
    endpoint factor is handed to QUADPACK as an algebraic weight, so the
    integrand is never evaluated at the turning point.
    """
    _check_modulus(k)
    k2 = k * k
    # k / sqrt(2k^2/(1+k^2)) simplified so that k = 0 is regular
    ratio = math.sqrt(0.5 * (1.0 + k2))

    def integrand(u):
        q = 1.0 - k2 * u * u
        cosh2z = (1.0 + k2 * u * u) / q
        dz_over_root_gap = ratio / math.sqrt(q)
        return 4.0 * cosh2z**weight_power * dz_over_root_gap / math.sqrt(1.0 + u)

    val, _ = integrate.quad(
        integrand, 0.0, 1.0, weight="alg", wvar=(0.0, -0.5), epsabs=1e-14, epsrel=1e-13, limit=200
    )
    return val


def period_integral(k: float) -> float:
    """``T(k)`` from its defining integral over one quarter oscillation."""
    return _reduced_quadrature(k, 0)


def drift_factor_integral(k: float) -> float:
    """``M(k)`` from its defining integral ``4 int_0^A cosh(2z) dz / sqrt(1 - 2|ab| cosh 2z)``."""
    return _reduced_quadrature(k, 1)
