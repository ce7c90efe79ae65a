"""The SOL group, its left-invariant metric and its basic isometries.

Points are ``(x, y, z)`` in global coordinates with the product::

    (x1, y1, z1) * (x2, y2, z2) = (x1 + e^{z1} x2, y1 + e^{-z1} y2, z1 + z2)

and the metric ``e^{-2z} dx^2 + e^{2z} dy^2 + dz^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np

from .errors import DomainError

__all__ = [
    "Point",
    "TangentVec",
    "Isometry",
    "ORIGIN",
    "group_mul",
    "group_inverse",
    "matrix_rep",
    "apply_isometry",
    "vertical_flip",
    "metric_norm",
    "frame_components",
    "from_frame",
    "potential",
    "horizontal_distance",
]


def _check_finite(name, *values):
    for v in values:
        if not math.isfinite(v):
            raise DomainError(f"{name} has a non-finite coordinate: {values}")


@dataclass(frozen=True, slots=True)
class Point:
    """A point of SOL in global coordinates."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, float(getattr(self, name)))
        _check_finite("Point", self.x, self.y, self.z)

    def __iter__(self) -> Iterator[float]:
        return iter((self.x, self.y, self.z))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


ORIGIN = Point(0.0, 0.0, 0.0)


@dataclass(frozen=True, slots=True)
class TangentVec:
    """A tangent vector at ``base`` with coordinate components ``(dx, dy, dz)``."""

    base: Point
    dx: float
    dy: float
    dz: float

    def __post_init__(self):
        for name in ("dx", "dy", "dz"):
            object.__setattr__(self, name, float(getattr(self, name)))
        _check_finite("TangentVec", self.dx, self.dy, self.dz)

    @property
    def components(self) -> tuple[float, float, float]:
        return (self.dx, self.dy, self.dz)

    def norm(self) -> float:
        return metric_norm(self)

    def normalized(self) -> "TangentVec":
        n = metric_norm(self)
        if n == 0.0:
            raise DomainError("cannot normalize the zero vector")
        return TangentVec(self.base, self.dx / n, self.dy / n, self.dz / n)


def group_mul(p: Point, q: Point) -> Point:
    """Group product ``p * q``."""
    return Point(p.x + math.exp(p.z) * q.x, p.y + math.exp(-p.z) * q.y, p.z + q.z)


def group_inverse(p: Point) -> Point:
    """Group inverse ``(-e^{-z} x, -e^{z} y, -z)``."""
    return Point(-math.exp(-p.z) * p.x, -math.exp(p.z) * p.y, -p.z)


def matrix_rep(p: Point) -> np.ndarray:
    """Faithful 3x3 matrix representation of ``p``."""
    return np.array(
        [
            [math.exp(p.z), 0.0, p.x],
            [0.0, math.exp(-p.z), p.y],
            [0.0, 0.0, 1.0],
        ]
    )


def metric_norm(v: TangentVec) -> float:
    """Length of ``v`` in the left-invariant metric."""
    ez = math.exp(v.base.z)
    return math.sqrt((v.dx / ez) ** 2 + (v.dy * ez) ** 2 + v.dz**2)


def frame_components(v: TangentVec) -> tuple[float, float, float]:
    """Components of ``v`` in the orthonormal frame ``X = e^z d/dx, Y = e^{-z} d/dy, Z = d/dz``."""
    ez = math.exp(v.base.z)
    return (v.dx / ez, v.dy * ez, v.dz)


def from_frame(base: Point, X: float, Y: float, Z: float) -> TangentVec:
    """Inverse of :func:`frame_components`."""
    ez = math.exp(base.z)
    return TangentVec(base, X * ez, Y / ez, Z)


def vertical_flip(v: TangentVec) -> TangentVec:
    """Reverse the vertical component: ``(dx, dy, dz) -> (dx, dy, -dz)``."""
    return TangentVec(v.base, v.dx, v.dy, -v.dz)


# Isometry words.  Each step is a tuple whose first entry names the generator.
_TRANSLATE = "translate"
_SIGNS = "signs"
_SWAP = "swap"


@dataclass(frozen=True)
class Isometry:
    """A composition of left translations, sign changes and the swap-flip.

    Steps are applied left to right: ``Isometry((s1, s2))`` maps ``p`` to
    ``s2(s1(p))``.  Build instances with the class methods and combine
    them with :meth:`then`.
    """

    steps: tuple = ()

    @classmethod
    def identity(cls) -> "Isometry":
        return cls(())

    @classmethod
    def left_translation(cls, x0: float, y0: float, w: float) -> "Isometry":
        """Left multiplication by the group element ``(x0, y0, w)``."""
        _check_finite("translation", x0, y0, w)
        return cls(((_TRANSLATE, float(x0), float(y0), float(w)),))

    @classmethod
    def vertical_lift(cls, w: float) -> "Isometry":
        """``(x, y, z) -> (e^w x, e^{-w} y, z + w)``."""
        return cls.left_translation(0.0, 0.0, w)

    @classmethod
    def sign_change(cls, eps1: int, eps2: int) -> "Isometry":
        """``(x, y, z) -> (eps1 x, eps2 y, z)`` with ``eps1, eps2`` in ``{+1, -1}``."""
        if eps1 not in (1, -1) or eps2 not in (1, -1):
            raise DomainError(f"sign change needs entries in {{+1, -1}}, got {(eps1, eps2)}")
        return cls(((_SIGNS, int(eps1), int(eps2)),))

    @classmethod
    def swap_flip(cls) -> "Isometry":
        """The involution ``(x, y, z) -> (y, x, -z)``."""
        return cls(((_SWAP,),))

    def then(self, other: "Isometry") -> "Isometry":
        """Apply ``self`` first, then ``other``."""
        return Isometry(self.steps + other.steps)

    def inverse(self) -> "Isometry":
        inv = []
        for step in reversed(self.steps):
            if step[0] == _TRANSLATE:
                g = group_inverse(Point(step[1], step[2], step[3]))
                inv.append((_TRANSLATE, g.x, g.y, g.z))
            else:
                inv.append(step)
        return Isometry(tuple(inv))

    def apply_point(self, p: Point) -> Point:
        x, y, z = p
        for step in self.steps:
            kind = step[0]
            if kind == _TRANSLATE:
                _, x0, y0, w = step
                x, y, z = x0 + math.exp(w) * x, y0 + math.exp(-w) * y, z + w
            elif kind == _SIGNS:
                x, y = step[1] * x, step[2] * y
            else:
                x, y, z = y, x, -z
        return Point(x, y, z)

    def apply_vector(self, v: TangentVec) -> TangentVec:
        x, y, z = v.base
        dx, dy, dz = v.dx, v.dy, v.dz
        for step in self.steps:
            kind = step[0]
            if kind == _TRANSLATE:
                _, x0, y0, w = step
                ew = math.exp(w)
                x, y, z = x0 + ew * x, y0 + y / ew, z + w
                dx, dy = ew * dx, dy / ew
            elif kind == _SIGNS:
                x, y = step[1] * x, step[2] * y
                dx, dy = step[1] * dx, step[2] * dy
            else:
                x, y, z = y, x, -z
                dx, dy, dz = dy, dx, -dz
        return TangentVec(Point(x, y, z), dx, dy, dz)

    def apply_array(self, pts: np.ndarray) -> np.ndarray:
        """Apply to an ``(n, 3)`` array of points."""
        out = np.array(pts, dtype=float, copy=True)
        for step in self.steps:
            kind = step[0]
            if kind == _TRANSLATE:
                _, x0, y0, w = step
                out[:, 0] = x0 + math.exp(w) * out[:, 0]
                out[:, 1] = y0 + math.exp(-w) * out[:, 1]
                out[:, 2] = out[:, 2] + w
            elif kind == _SIGNS:
                out[:, 0] *= step[1]
                out[:, 1] *= step[2]
            else:
                out[:, [0, 1]] = out[:, [1, 0]]
                out[:, 2] = -out[:, 2]
        return out


def apply_isometry(g: Isometry, obj: Union[Point, TangentVec]):
    """Apply ``g`` to a point, or its differential to a tangent vector."""
    if isinstance(obj, TangentVec):
        return g.apply_vector(obj)
    return g.apply_point(obj)


def potential(a: float, b: float, z) -> float:
    """The potential ``U(z) = (a^2 e^{2z} + b^2 e^{-2z}) / 2``.

    Evaluated as ``|ab| cosh(2(z - h))`` with ``h = log|b/a| / 2`` when
    ``ab != 0`` so that large ``|z|`` does not overflow prematurely.
    Accepts a scalar or an array ``z``.
    """
    zz = np.asarray(z, dtype=float)
    if a != 0.0 and b != 0.0:
        h = 0.5 * math.log(abs(b / a))
        val = abs(a * b) * np.cosh(2.0 * (zz - h))
    else:
        val = np.zeros_like(zz)
        if a != 0.0:
            val = val + 0.5 * a * a * np.exp(2.0 * zz)
        if b != 0.0:
            val = val + 0.5 * b * b * np.exp(-2.0 * zz)
    return float(val) if val.ndim == 0 else val


def horizontal_distance(p1: Point, p2: Point) -> float:
    """Euclidean distance induced on a plane of constant altitude.

    Raises
    ------
    DomainError
        If the two points are not at the same altitude.
    """
    if p1.z != p2.z:
        raise DomainError(f"horizontal distance needs equal altitudes, got {p1.z} and {p2.z}")
    ez = math.exp(p1.z)
    return math.hypot((p2.x - p1.x) / ez, (p2.y - p1.y) * ez)
