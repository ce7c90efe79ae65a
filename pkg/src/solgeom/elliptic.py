"""Complete elliptic integrals of the first and second kind via the AGM.

``K(k) = pi / (2 AGM(1, k'))`` and ``E`` follows from the same descending
sequence through the classical correction sum

    E / K = 1 - sum_{n>=0} 2^{n-1} c_n^2,   c_0 = k,  c_{n+1} = (a_n - b_n) / 2.
"""

from __future__ import annotations

import math
from typing import NamedTuple

from .errors import DomainError

__all__ = [
    "EllipticPair",
    "agm",
    "complementary_modulus",
    "complete_elliptic",
    "elliptic_derivatives",
    "aux_integral",
]

_EPS = 2.220446049250313e-16
_MAX_ITER = 64


class EllipticPair(NamedTuple):
    """Modulus together with ``K(k)`` and ``E(k)``."""

    k: float
    K: float
    E: float


def agm(x: float, y: float) -> float:
    """Arithmetic-geometric mean of two positive numbers.

    Iterates ``(x, y) -> ((x + y)/2, sqrt(x y))`` until
    ``|x - y| <= 4 eps x``.

    Raises
    ------
    DomainError
        If either argument is not strictly positive.
    """
    if not (x > 0.0 and y > 0.0) or not (math.isfinite(x) and math.isfinite(y)):
        raise DomainError(f"agm needs positive finite arguments, got {(x, y)}")
    for _ in range(_MAX_ITER):
        if abs(x - y) <= 4.0 * _EPS * x:
            break
        x, y = 0.5 * (x + y), math.sqrt(x * y)
    return 0.5 * (x + y)


def complementary_modulus(k: float) -> float:
    """``sqrt(1 - k^2)`` evaluated without cancellation near ``k = 1``."""
    return math.sqrt((1.0 - k) * (1.0 + k))


def _check_modulus(k):
    if not (0.0 <= k < 1.0):
        raise DomainError(f"modulus must lie in [0, 1), got {k}")


def complete_elliptic(k: float) -> EllipticPair:
    """``K(k)`` and ``E(k)`` for ``0 <= k < 1``.

    Examples
    --------
    >>> complete_elliptic(0.0).K == complete_elliptic(0.0).E == math.pi / 2
    True
    """
    _check_modulus(k)
    a = 1.0
    b = complementary_modulus(k)
    # n = 0 term of the correction sum; later terms use c_{n+1} = c_n^2 / (4 a_{n+1})
    c = k
    total = 0.5 * c * c
    weight = 1.0
    for _ in range(_MAX_ITER):
        if abs(a - b) <= 4.0 * _EPS * a:
            break
        a_next = 0.5 * (a + b)
        c = c * c / (4.0 * a_next)
        b = math.sqrt(a * b)
        a = a_next
        total += weight * c * c
        weight *= 2.0
    K = math.pi / (2.0 * a)
    return EllipticPair(k, K, K * (1.0 - total))


def elliptic_derivatives(k: float) -> tuple[float, float]:
    """``(dK/dk, dE/dk)`` for ``0 < k < 1``."""
    if not (0.0 < k < 1.0):
        raise DomainError(f"derivatives need 0 < k < 1, got {k}")
    _, K, E = complete_elliptic(k)
    kp2 = (1.0 - k) * (1.0 + k)
    return (E - kp2 * K) / (k * kp2), (E - K) / k


def aux_integral(k: float) -> float:
    """``2E/(1-k^2) - K``, the value of ``int_0^1 (1+k^2u^2) / (sqrt(1-u^2)(1-k^2u^2)^{3/2}) du``."""
    _, K, E = complete_elliptic(k)
    kp2 = (1.0 - k) * (1.0 + k)
    return 2.0 * E / kp2 - K
