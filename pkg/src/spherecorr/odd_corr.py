"""The sphere-to-circle correspondence for odd-dimensional spheres.

For odd k >= 3 the 2k+2 signed Voronoi cells of the cross-polytope vertices
in S^k are linearly ordered, and cell m is matched with the circle interval
[(2m-3)pi/(2k+2), (2m-1)pi/(2k+2)] through an explicit map: a point of cell
m with distinguished coordinate x_m is sent to

    (m-1)pi/(k+1) + pi/(2k(k+1)) * (x_1+...+x_{m-1} - x_{m+1}-...-x_{k+1})/x_m

for m <= k+1, and to the antipodal-cell value shifted by pi for m > k+1.
The relation pairs every cell point with its image angle; points on cell
boundaries get one correspondent per containing cell.  Its distortion equals
(k-1)pi/k, attained on the boundary where the first and last ordered cells
meet.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import geometry
from .distortion import (
    Correspondence,
    ElementBatch,
    RelationElement,
)
from .geometry import CircleAngle, UnitVector, circle_distance, reduce_angle
from .rng import RngStream

DEFAULT_TOL = 1e-9


def _check_k(k: int):
    if k < 3 or k % 2 == 0:
        raise ValueError(f"the ordered-cell correspondence needs odd k >= 3, got {k}")


def cell_axis(k: int, m: int) -> int:
    """0-based distinguished coordinate of ordered cell m (1 <= m <= 2k+2)."""
    if not 1 <= m <= 2 * k + 2:
        raise ValueError(f"ordered cell index {m} out of range 1..{2 * k + 2}")
    return (m - 1) % (k + 1)


def cell_sign(k: int, m: int) -> int:
    """Sign of the distinguished coordinate inside ordered cell m.

    The first k+1 cells alternate +,-,+,...; the second half is the
    antipodal image of the first, so its signs are the negations.
    """
    if not 1 <= m <= 2 * k + 2:
        raise ValueError(f"ordered cell index {m} out of range 1..{2 * k + 2}")
    if m <= k + 1:
        return 1 if m % 2 == 1 else -1
    return -cell_sign(k, m - (k + 1))


def cell_from_axis_sign(k: int, axis: int, sign: int) -> int:
    """Ordered cell index with the given 0-based axis and coordinate sign."""
    parity = 1 if axis % 2 == 0 else -1
    return axis + 1 if sign == parity else axis + 1 + (k + 1)


@lru_cache(maxsize=None)
def _cell_tables(k: int) -> tuple[np.ndarray, np.ndarray]:
    """(axes, signs) arrays indexed by ordered cell m-1, for vectorized queries."""
    ms = np.arange(1, 2 * k + 3)
    axes = (ms - 1) % (k + 1)
    signs = np.array([cell_sign(k, int(m)) for m in ms])
    return axes, signs


def _cells_of_coords(k: int, coords: np.ndarray, tol: float) -> np.ndarray:
    """1-based ordered cells containing ``coords`` (fast array path)."""
    axes, signs = _cell_tables(k)
    vals = coords[axes]
    top = np.max(np.abs(coords))
    hit = (signs * vals > 0) & (np.abs(vals) >= top - tol)
    return np.flatnonzero(hit) + 1


@dataclass(frozen=True)
class OrderedCellId:
    """Ordered signed Voronoi cell m of the cross-polytope in S^k (k odd)."""

    m: int
    k: int

    def __post_init__(self):
        _check_k(self.k)
        if not 1 <= self.m <= 2 * self.k + 2:
            raise ValueError(f"cell index {self.m} out of range 1..{2 * self.k + 2}")

    @property
    def axis(self) -> int:
        return cell_axis(self.k, self.m)

    @property
    def sign(self) -> int:
        return cell_sign(self.k, self.m)


@dataclass(frozen=True)
class CircleInterval:
    """Circle interval paired with ordered cell m; width exactly pi/(k+1)."""

    lo: float
    hi: float

    @classmethod
    def of_cell(cls, k: int, m: int) -> "CircleInterval":
        _check_k(k)
        lo = (2 * m - 3) * np.pi / (2 * k + 2)
        hi = (2 * m - 1) * np.pi / (2 * k + 2)
        return cls(lo, hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, angle, tol: float = DEFAULT_TOL) -> bool:
        theta = angle.theta if isinstance(angle, CircleAngle) else float(angle)
        delta = reduce_angle(theta - self.lo)
        return delta <= self.width + tol or delta >= 2 * np.pi - tol


def ordered_cells_of(k: int, x: UnitVector, tol: float = DEFAULT_TOL) -> list[int]:
    """All ordered cells containing x: sign matches and |x_axis| is maximal."""
    _check_k(k)
    if x.dim != k:
        raise ValueError(f"point lives on S^{x.dim}, expected S^{k}")
    return [int(m) for m in _cells_of_coords(k, x.coords, tol)]


def cell_contains(k: int, m: int, x: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    coords = np.asarray(x, dtype=float)
    axis = cell_axis(k, m)
    return bool(
        cell_sign(k, m) * coords[axis] > 0
        and abs(coords[axis]) >= np.max(np.abs(coords)) - tol
    )


def cell_angle(k: int, m: int, x: UnitVector, tol: float = DEFAULT_TOL) -> CircleAngle:
    """Image angle of a point of ordered cell m; errors if x is outside m."""
    _check_k(k)
    if x.dim != k:
        raise ValueError(f"point lives on S^{x.dim}, expected S^{k}")
    if not cell_contains(k, m, x.coords, tol):
        raise ValueError(f"point is not in ordered cell {m} within tolerance {tol}")
    return CircleAngle(float(cell_angles_many(k, x.coords[None, :], np.array([m]))[0]))


def cell_angles_many(k: int, xs: np.ndarray, ms: np.ndarray) -> np.ndarray:
    """Vectorized image angles; row i of xs is assumed to lie in cell ms[i]."""
    ms = np.asarray(ms, dtype=int)
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    second_half = ms > k + 1
    m1 = np.where(second_half, ms - (k + 1), ms)
    base = np.where(second_half[:, None], -xs, xs)
    rows = np.arange(xs.shape[0])
    axis = m1 - 1
    csum = np.cumsum(base, axis=1)
    total = csum[:, -1]
    xm = base[rows, axis]
    prefix = np.where(axis > 0, csum[rows, np.maximum(axis - 1, 0)], 0.0)
    signed_sum = 2.0 * prefix + xm - total  # x_1+..+x_{m-1} - x_{m+1}-..-x_{k+1}
    coeff = np.pi / (2.0 * k * (k + 1))
    angles = (m1 - 1) * np.pi / (k + 1) + coeff * signed_sum / xm
    angles = angles + np.where(second_half, np.pi, 0.0)
    return np.mod(angles, 2 * np.pi)


def principal_cells_many(k: int, xs: np.ndarray) -> np.ndarray:
    """For each row, the ordered cell of its largest-magnitude coordinate."""
    xs = np.asarray(xs, dtype=float)
    rows = np.arange(xs.shape[0])
    axis = np.argmax(np.abs(xs), axis=1)
    sign = np.where(xs[rows, axis] > 0, 1, -1)
    parity = np.where(axis % 2 == 0, 1, -1)
    return np.where(sign == parity, axis + 1, axis + 1 + (k + 1))


def circle_correspondents(k: int, x: UnitVector, tol: float = DEFAULT_TOL) -> list[CircleAngle]:
    """All circle angles related to x, one per containing ordered cell."""
    return [cell_angle(k, m, x, tol) for m in ordered_cells_of(k, x, tol)]


def cyclic_shift(k: int, n: int, x: UnitVector) -> UnitVector:
    """n-fold application of (x_1, ..., x_{k+1}) -> (x_{k+1}, -x_1, ..., -x_k).

    An isometry of S^k that advances ordered cells by one step; k+1
    applications give the antipodal map and 2k+2 the identity.
    """
    _check_k(k)
    if x.dim != k:
        raise ValueError(f"point lives on S^{x.dim}, expected S^{k}")
    if n < 0:
        raise ValueError("shift count must be nonnegative")
    coords = x.coords.copy()
    for _ in range(n % (2 * k + 2)):
        coords = np.concatenate(([coords[-1]], -coords[:-1]))
    return UnitVector(coords)


def pair_distortion(
    k: int, i: int, j: int, x: UnitVector, z: UnitVector, tol: float = DEFAULT_TOL
) -> float:
    """|d_circle(angle_i(x), angle_j(z)) - d_sphere(x, z)| for cells i, j."""
    ai = cell_angle(k, i, x, tol)
    aj = cell_angle(k, j, z, tol)
    return abs(circle_distance(ai, aj) - geometry.geodesic_distance(x, z))


def case_reduction_pairs(k: int) -> list[tuple[int, int]]:
    """The two cell pairs left after exploiting the cyclic and antipodal symmetries.

    Shifting both cells reduces any pair to (1, j); the antipodal symmetry
    folds j onto k+3-j; and the pairs whose interval gap already forces a
    small objective drop out, leaving (1, k) and (1, k+1).
    """
    _check_k(k)
    return [(1, k), (1, k + 1)]


def compatible_boundary(k: int, m1: int, m2: int) -> bool:
    """Whether ordered cells m1, m2 can share boundary points (tied coordinates)."""
    if m1 == m2:
        return False
    return cell_axis(k, m1) != cell_axis(k, m2)


def sample_cell_boundary(k: int, m1: int, m2: int, rng: RngStream) -> UnitVector:
    """One sample from the tie set shared by ordered cells m1 and m2."""
    return UnitVector(sample_cell_boundary_many(k, m1, m2, 1, rng)[0])


def sample_cell_boundary_many(k: int, m1: int, m2: int, count: int, rng: RngStream) -> np.ndarray:
    """Samples with the two distinguished coordinates tied at the maximum magnitude."""
    _check_k(k)
    if not compatible_boundary(k, m1, m2):
        raise ValueError(f"ordered cells {m1} and {m2} do not share boundary points")
    gen = rng.generator()
    g = gen.standard_normal((count, k + 1))
    top = np.max(np.abs(g), axis=1)
    g[:, cell_axis(k, m1)] = cell_sign(k, m1) * top
    g[:, cell_axis(k, m2)] = cell_sign(k, m2) * top
    return geometry.normalize_rows(g)


def sample_in_ordered_cell_many(k: int, m: int, count: int, rng: RngStream) -> np.ndarray:
    """Uniform samples of ordered cell m.

    Draws uniform sphere points and maps each isometrically (coordinate swap
    plus sign flips) from its own cell onto cell m; cells have equal measure,
    so the result is uniform on the target cell.
    """
    _check_k(k)
    axis, sign = cell_axis(k, m), cell_sign(k, m)
    xs = geometry.sample_uniform_many(k, count, rng)
    rows = np.arange(count)
    src = np.argmax(np.abs(xs), axis=1)
    vals_src = xs[rows, src].copy()
    xs[rows, src] = xs[rows, axis]
    xs[rows, axis] = vals_src
    flip = np.sign(xs[rows, axis]) != sign
    xs[rows[flip], axis] *= -1.0
    return xs


def max_distortion_witness(k: int) -> tuple[tuple[tuple[UnitVector, CircleAngle], tuple[UnitVector, CircleAngle]], float]:
    """A pair of relation elements realizing the full distortion (k-1)pi/k.

    The base point (1, 0, ..., 0, -1)/sqrt(2) lies on the boundary between
    the first and last ordered cells; its two correspondents sit exactly
    (k-1)pi/k apart while the sphere distance of the pair is zero.
    """
    _check_k(k)
    coords = np.zeros(k + 1)
    coords[0] = 1.0
    coords[-1] = -1.0
    x = UnitVector(coords)
    a1 = cell_angle(k, 1, x)
    a2 = cell_angle(k, k + 1, x)
    value = circle_distance(a1, a2)
    return ((x, a1), (x, a2)), value


class OddCircleCorrespondence(Correspondence):
    """Engine adapter for the ordered-cell correspondence on odd S^k.

    Factor A is S^k (vector points); factor B is the circle (angles).  The
    focused sampler concentrates on the surviving case-reduction cell pairs
    and on boundary ties, where the distortion maximum lives.
    """

    def __init__(self, k: int, tol: float = DEFAULT_TOL):
        _check_k(k)
        self.k = k
        self.tol = tol
        self._focus_pairs = case_reduction_pairs(k)

    @property
    def n_strata(self) -> int:
        return 2 * self.k + 2

    def stratum_label(self, stratum: int) -> str:
        return f"cell-{stratum + 1}"

    def free_factor(self, side: int) -> int:
        return 0

    def sample_batch(self, count, rng):
        xs = geometry.sample_uniform_many(self.k, count, rng)
        ms = principal_cells_many(self.k, xs)
        angles = cell_angles_many(self.k, xs, ms)
        return ElementBatch(
            a=xs, b=angles, side=np.zeros(count, dtype=int), strata=ms - 1
        )

    def variants_of_free(self, side, free):
        free = np.asarray(free, dtype=float)
        ms = _cells_of_coords(self.k, free, self.tol)
        if ms.size == 0:
            return []
        rows = np.broadcast_to(free, (ms.size, free.size))
        angles = cell_angles_many(self.k, rows, ms)
        return [
            RelationElement(0, free, free, float(angles[t]), int(ms[t]) - 1)
            for t in range(ms.size)
        ]

    def dist_a(self, a1, a2):
        return geometry.geodesic_accurate(a1, a2)

    def dist_b(self, b1, b2):
        return circle_distance(float(b1), float(b2))

    def dist_a_many(self, a1, a2):
        return geometry.geodesic_many(a1, a2)

    def dist_b_many(self, b1, b2):
        return geometry.circle_distance_many(b1, b2)

    def _boundary_elements(self, m_main: int, m_other: int, count: int, rng: RngStream):
        xs = sample_cell_boundary_many(self.k, m_main, m_other, count, rng)
        angles = cell_angles_many(self.k, xs, np.full(count, m_main))
        return [
            RelationElement(0, xs[i], xs[i], float(angles[i]), m_main - 1)
            for i in range(count)
        ]

    def sample_focus_pairs(self, count, rng):
        k = self.k
        pairs: list[tuple[RelationElement, RelationElement]] = []
        per_case = max(1, count // (4 * len(self._focus_pairs)))
        for c, (i, j) in enumerate(self._focus_pairs):
            case_rng = rng.child(c)
            # Coincident boundary pairs: both elements over one tie point.
            if compatible_boundary(k, i, j):
                xs = sample_cell_boundary_many(k, i, j, per_case, case_rng.child(0))
                ai = cell_angles_many(k, xs, np.full(per_case, i))
                aj = cell_angles_many(k, xs, np.full(per_case, j))
                for t in range(per_case):
                    pairs.append(
                        (
                            RelationElement(0, xs[t], xs[t], float(ai[t]), i - 1),
                            RelationElement(0, xs[t], xs[t], float(aj[t]), j - 1),
                        )
                    )
            # Independent boundary pairs: x on a boundary of cell i, z of cell j.
            gen = case_rng.child(1).generator()
            others_i = [m for m in range(1, 2 * k + 3) if compatible_boundary(k, i, m)]
            others_j = [m for m in range(1, 2 * k + 3) if compatible_boundary(k, j, m)]
            mi = gen.choice(others_i, size=per_case)
            mj = gen.choice(others_j, size=per_case)
            lhs: list[RelationElement] = []
            rhs: list[RelationElement] = []
            for main, picks, out, sub in ((i, mi, lhs, 2), (j, mj, rhs, 3)):
                slots = np.empty(per_case, dtype=int)
                cursor = 0
                for u, m_other in enumerate(np.unique(picks)):
                    take = int(np.sum(picks == m_other))
                    slots[np.flatnonzero(picks == m_other)] = np.arange(cursor, cursor + take)
                    out.extend(
                        self._boundary_elements(main, int(m_other), take, case_rng.child(sub, u))
                    )
                    cursor += take
                # restore draw order so pairing does not depend on unique() grouping
                out[:] = [out[t] for t in slots]
            pairs.extend(zip(lhs, rhs))
        return pairs
