"""Unit quaternion arithmetic on SU(2) and its bi-invariant metric.

Scalar values are :class:`UnitQuaternion` instances; the vectorised helpers
(``qmul``, ``qconj``, ``qdist``) act on float arrays of shape ``(..., 4)`` in
``(w, x, y, z)`` order and are what the heavier modules use internally.

The metric is the one induced by ``(X, Y) = -1/2 tr(XY)`` on su(2), under
which SU(2) is the round unit 3-sphere and ``d(a, b) = arccos(a . b)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import CutLocusError

NORM_TOL = 1e-12


def qmul(a, b):
    """Hamilton product of quaternion arrays, broadcasting over leading axes."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    aw, ax, ay, az = np.moveaxis(a, -1, 0)
    bw, bx, by, bz = np.moveaxis(b, -1, 0)
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=-1,
    )


def qconj(a):
    """Conjugate (the inverse, for unit quaternions)."""
    a = np.asarray(a, dtype=float)
    return a * np.array([1.0, -1.0, -1.0, -1.0])


def qnormalize(a):
    a = np.asarray(a, dtype=float)
    return a / np.linalg.norm(a, axis=-1, keepdims=True)


def qdist(a, b):
    """Geodesic distance on the unit 3-sphere, broadcasting.

    Uses ``2 atan2(|a - b|, |a + b|)``, which stays accurate near 0 and pi
    where ``arccos`` of the dot product loses half its digits.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return 2 * np.arctan2(np.linalg.norm(a - b, axis=-1), np.linalg.norm(a + b, axis=-1))


def pairwise_qdist(a, b):
    """Distance matrix between two stacks of quaternions."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    dot = a @ b.T
    out = np.arccos(np.clip(dot, -1.0, 1.0))
    i, j = np.nonzero(np.abs(dot) > 1 - 1e-4)
    out[i, j] = qdist(a[i], b[j])
    return out


@dataclass(frozen=True)
class UnitQuaternion:
    w: float
    x: float
    y: float
    z: float

    def __post_init__(self):
        norm2 = self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
        if abs(np.sqrt(norm2) - 1.0) > NORM_TOL:
            raise ValueError(f"quaternion is not unit: |q|^2 = {norm2!r}")

    @classmethod
    def from_array(cls, v, normalize: bool = True) -> UnitQuaternion:
        v = np.asarray(v, dtype=float).reshape(4)
        if normalize:
            v = v / np.linalg.norm(v)
        return cls(*(float(c) for c in v))

    @classmethod
    def identity(cls) -> UnitQuaternion:
        return cls(1.0, 0.0, 0.0, 0.0)

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def as_matrix(self) -> np.ndarray:
        """The SU(2) matrix ``[[w + ix, y + iz], [-y + iz, w - ix]]``."""
        return np.array(
            [
                [complex(self.w, self.x), complex(self.y, self.z)],
                [complex(-self.y, self.z), complex(self.w, -self.x)],
            ]
        )

    def inverse(self) -> UnitQuaternion:
        return UnitQuaternion(self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other: UnitQuaternion) -> UnitQuaternion:
        return multiply(self, other)

    def __neg__(self) -> UnitQuaternion:
        return UnitQuaternion(-self.w, -self.x, -self.y, -self.z)

    def __pow__(self, k: int) -> UnitQuaternion:
        base = self if k >= 0 else self.inverse()
        out = UnitQuaternion.identity()
        for _ in range(abs(k)):
            out = out * base
        return out

    def dot(self, other: UnitQuaternion) -> float:
        return self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z


@dataclass(frozen=True)
class TangentVector:
    """Element of su(2) in the basis i, j, k; the norm is geodesic length."""

    vx: float
    vy: float
    vz: float

    def as_array(self) -> np.ndarray:
        return np.array([self.vx, self.vy, self.vz])

    def inner(self, other: TangentVector) -> float:
        return self.vx * other.vx + self.vy * other.vy + self.vz * other.vz

    def norm(self) -> float:
        return float(np.sqrt(self.inner(self)))


IDENTITY = UnitQuaternion(1.0, 0.0, 0.0, 0.0)


def multiply(a: UnitQuaternion, b: UnitQuaternion) -> UnitQuaternion:
    """Hamilton product, renormalised so long chains do not drift off S^3."""
    return UnitQuaternion.from_array(qmul(a.as_array(), b.as_array()))


def su2_distance(a: UnitQuaternion, b: UnitQuaternion) -> float:
    return float(qdist(a.as_array(), b.as_array()))


def half_trace(a: UnitQuaternion, b: UnitQuaternion) -> float:
    """``1/2 Re tr(A B^H)`` for the matrix forms; equals ``a . b``."""
    return 0.5 * float(np.trace(a.as_matrix() @ b.as_matrix().conj().T).real)


def exp_map(v: TangentVector) -> UnitQuaternion:
    theta = v.norm()
    if theta == 0.0:
        return IDENTITY
    s = np.sin(theta) / theta
    return UnitQuaternion.from_array([np.cos(theta), s * v.vx, s * v.vy, s * v.vz])


def log_map(q: UnitQuaternion) -> TangentVector:
    """Inverse of :func:`exp_map` on the open ball of radius pi."""
    imag = np.array([q.x, q.y, q.z])
    s = float(np.linalg.norm(imag))
    theta = float(np.arctan2(s, q.w))
    if np.pi - theta < 1e-12:
        raise CutLocusError("log_map is undefined at -I")
    if s == 0.0:
        return TangentVector(0.0, 0.0, 0.0)
    v = imag * (theta / s)
    return TangentVector(float(v[0]), float(v[1]), float(v[2]))


def random_unit_quaternions(rng: np.random.Generator, size: int) -> np.ndarray:
    """Haar-uniform samples on SU(2) as an ``(size, 4)`` array."""
    return qnormalize(rng.standard_normal((size, 4)))
