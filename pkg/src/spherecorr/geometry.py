"""Metric primitives on unit spheres and on the circle.

Points on S^d are unit vectors in R^{d+1} with the geodesic metric
d(x, y) = arccos<x, y>; the circle additionally gets an angular coordinate
in [0, 2*pi) because all of the sphere-to-circle machinery works in angles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import RngStream

TWO_PI = 2.0 * np.pi


def clip_cosine(c):
    """Clamp cosines into [-1, 1] before arccos.

    Roundoff can push an inner product of unit vectors a few ulp outside the
    interval, where arccos is undefined; the induced angle error is O(eps).
    """
    return np.clip(c, -1.0, 1.0)


class UnitVector:
    """A point on S^d stored as d+1 coordinates, normalized on construction."""

    __slots__ = ("coords",)

    def __init__(self, coords):
        v = np.asarray(coords, dtype=float)
        if v.ndim != 1 or v.size < 2:
            raise ValueError("a sphere point needs at least two coordinates (dim >= 1)")
        if not np.all(np.isfinite(v)):
            raise ValueError("coordinates must be finite")
        norm = float(np.linalg.norm(v))
        if norm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        self.coords = v / norm

    @property
    def dim(self) -> int:
        return self.coords.size - 1

    def antipode(self) -> "UnitVector":
        # exact negation: renormalizing could perturb the last ulp
        other = object.__new__(UnitVector)
        other.coords = -self.coords
        return other

    def __eq__(self, other):
        return isinstance(other, UnitVector) and np.array_equal(self.coords, other.coords)

    def __repr__(self):
        return f"UnitVector({self.coords.tolist()!r})"


@dataclass(frozen=True)
class CircleAngle:
    """An angle on S^1, always reduced into [0, 2*pi)."""

    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", reduce_angle(self.theta))

    @classmethod
    def from_vector(cls, x: UnitVector) -> "CircleAngle":
        if x.dim != 1:
            raise ValueError("only points of S^1 have an angular coordinate")
        return cls(float(np.arctan2(x.coords[1], x.coords[0])))

    def to_vector(self) -> UnitVector:
        return UnitVector([np.cos(self.theta), np.sin(self.theta)])


def reduce_angle(theta: float) -> float:
    """Reduce an angle modulo 2*pi into [0, 2*pi)."""
    t = float(np.mod(theta, TWO_PI))
    # np.mod can return 2*pi itself for tiny negative inputs.
    return 0.0 if t >= TWO_PI else t


def _as_angle(a) -> float:
    return a.theta if isinstance(a, CircleAngle) else reduce_angle(float(a))


def geodesic_distance(x: UnitVector, y: UnitVector) -> float:
    """Geodesic distance arccos<x, y> on the common sphere, in [0, pi].

    Evaluated through the half-chord arcsine, which agrees with the clamped
    arccos but keeps full precision at coincident and antipodal pairs.
    """
    if x.dim != y.dim:
        raise ValueError(f"dimension mismatch: S^{x.dim} vs S^{y.dim}")
    return geodesic_accurate(x.coords, y.coords)


def projective_distance(x: UnitVector, y: UnitVector) -> float:
    """Distance arccos|<x, y>| between the lines through x and y, in [0, pi/2]."""
    if x.dim != y.dim:
        raise ValueError(f"dimension mismatch: S^{x.dim} vs S^{y.dim}")
    d = geodesic_accurate(x.coords, y.coords)
    return min(d, np.pi - d)


def circle_distance(a, b) -> float:
    """Arc distance between two angles (CircleAngle or radians), in [0, pi]."""
    d = abs(_as_angle(a) - _as_angle(b))
    return float(min(d, TWO_PI - d))


def geodesic_accurate(a: np.ndarray, b: np.ndarray) -> float:
    """Geodesic distance of two unit coordinate vectors, accurate at 0 and pi.

    arccos of the inner product loses ~1e-8 near the endpoints; the arcsine
    of the half-chord (to the nearer of b, -b) keeps full precision, which
    matters when witness objectives are compared against exact suprema.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.dot(a, b) >= 0.0:
        half = 0.5 * np.linalg.norm(a - b)
        return float(2.0 * np.arcsin(min(1.0, half)))
    half = 0.5 * np.linalg.norm(a + b)
    return float(np.pi - 2.0 * np.arcsin(min(1.0, half)))


def chord_length(x: UnitVector, y: UnitVector) -> float:
    """Euclidean distance ||x - y|| between points of the same sphere."""
    if x.dim != y.dim:
        raise ValueError(f"dimension mismatch: S^{x.dim} vs S^{y.dim}")
    return float(np.linalg.norm(x.coords - y.coords))


def sample_uniform(dim: int, rng: RngStream) -> UnitVector:
    """One rotation-invariant uniform sample on S^dim."""
    return UnitVector(sample_uniform_many(dim, 1, rng)[0])


def sample_uniform_many(dim: int, count: int, rng: RngStream) -> np.ndarray:
    """Uniform samples on S^dim as a (count, dim+1) array of unit rows.

    Normalizes independent standard normal deviates, which is
    rotation-invariant in every dimension.
    """
    if dim < 1:
        raise ValueError("sphere dimension must be >= 1")
    if count < 0:
        raise ValueError("sample count must be nonnegative")
    g = rng.generator().standard_normal((count, dim + 1))
    return normalize_rows(g)


def normalize_rows(arr: np.ndarray) -> np.ndarray:
    """Normalize the rows of an array to unit Euclidean norm."""
    norms = np.linalg.norm(arr, axis=-1, keepdims=True)
    if np.any(norms == 0.0):
        raise ValueError("cannot normalize a zero row")
    return arr / norms


def geodesic_many(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise geodesic distances between two (N, d+1) arrays of unit rows."""
    return np.arccos(clip_cosine(np.einsum("ij,ij->i", a, b)))


def projective_many(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise projective distances between two (N, d+1) arrays of unit rows."""
    return np.arccos(clip_cosine(np.abs(np.einsum("ij,ij->i", a, b))))


def circle_distance_many(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Element-wise arc distance between two arrays of angles in radians."""
    d = np.abs(np.mod(a, TWO_PI) - np.mod(b, TWO_PI))
    return np.minimum(d, TWO_PI - d)


def tangent_step(point: np.ndarray, direction: np.ndarray, step: float) -> np.ndarray:
    """Move ``point`` on its sphere along the tangent part of ``direction``.

    The direction is projected orthogonal to ``point``; a zero tangent leaves
    the point unchanged.
    """
    tangent = direction - np.dot(direction, point) * point
    norm = np.linalg.norm(tangent)
    if norm < 1e-300:
        return point
    moved = point + (step / norm) * tangent
    return moved / np.linalg.norm(moved)
