"""Finite antipodal point sets on spheres and their Voronoi statistics.

An antipodal set is stored through m representatives; the other m points are
the implicit negatives.  The module builds the three constructions used by
the correspondence machinery (evenly spaced circle points, cross-polytope
vertices, cross-polytope vertices augmented with arc points) and answers
separation, cell-membership, Voronoi-diameter, and covering queries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geometry
from .geometry import UnitVector, clip_cosine
from .parallel import run_shards, shard_sizes
from .rng import RngStream

# Cell membership uses a positive tolerance so that boundary points (ties
# between sites) are reported as members of every tied cell.
DEFAULT_CELL_TOL = 1e-9

# Construction-time guard against coincident points.
COINCIDENCE_TOL = 1e-9


@dataclass(frozen=True)
class CellIndex:
    """Identifier of a signed Voronoi cell.

    ``linear`` runs 1..2m; values up to m name the cells of the
    representatives, values above m the cells of their negatives.
    """

    linear: int
    rep_index: int
    sign: int

    @classmethod
    def from_linear(cls, linear: int, m: int) -> "CellIndex":
        if not 1 <= linear <= 2 * m:
            raise ValueError(f"linear cell index {linear} out of range 1..{2 * m}")
        if linear <= m:
            return cls(linear, linear, 1)
        return cls(linear, linear - m, -1)

    def antipode(self, m: int) -> "CellIndex":
        shifted = (self.linear + m - 1) % (2 * m) + 1
        return CellIndex.from_linear(shifted, m)


class AntipodalSet:
    """2m points {+-p_1, ..., +-p_m} on S^d, stored via the m representatives."""

    def __init__(self, reps, label: str = "custom"):
        arr = np.atleast_2d(np.asarray(reps, dtype=float))
        if arr.ndim != 2 or arr.shape[1] < 2:
            raise ValueError("representatives must be an (m, d+1) array with d >= 1")
        arr = geometry.normalize_rows(arr)
        self.reps = arr
        self.label = label
        self._points = np.vstack([arr, -arr])
        self._check_distinct()

    def _check_distinct(self):
        pts = self._points
        cos = clip_cosine(pts @ pts.T)
        np.fill_diagonal(cos, -1.0)
        closest = float(np.arccos(np.max(cos)))
        if closest < COINCIDENCE_TOL:
            raise ValueError(
                "antipodal set has coincident points "
                f"(closest pair at {closest:.3e} rad)"
            )

    @property
    def m(self) -> int:
        return self.reps.shape[0]

    @property
    def dim(self) -> int:
        return self.reps.shape[1] - 1

    def points(self) -> np.ndarray:
        """All 2m points, representatives first, as a (2m, d+1) array."""
        return self._points

    def site_distances(self, x: np.ndarray) -> np.ndarray:
        """Geodesic distances from ``x`` to all 2m sites."""
        return np.arccos(clip_cosine(self._points @ np.asarray(x, dtype=float)))

    def nearest_site_many(self, xs: np.ndarray) -> np.ndarray:
        """0-based nearest-site index for each row of ``xs`` (ties -> lowest)."""
        return np.argmax(xs @ self._points.T, axis=1)

    def to_json_dict(self) -> dict:
        return {"dim": self.dim, "label": self.label, "reps": self.reps.tolist()}

    @classmethod
    def from_json_dict(cls, data: dict) -> "AntipodalSet":
        aset = cls(data["reps"], label=data.get("label", "custom"))
        if int(data["dim"]) != aset.dim:
            raise ValueError("declared dim does not match coordinates")
        return aset


# ---------------------------------------------------------------------------
# Constructions
# ---------------------------------------------------------------------------

def evenly_spaced_circle_set(m: int) -> AntipodalSet:
    """2m evenly spaced points on S^1, at angles j*pi/m; separation pi/m."""
    if m < 2:
        raise ValueError("need at least 2 representatives on the circle")
    angles = np.arange(m) * np.pi / m
    reps = np.column_stack([np.cos(angles), np.sin(angles)])
    return AntipodalSet(reps, label="circle-even")


def cross_polytope_set(k: int) -> AntipodalSet:
    """The 2(k+1) points {+-e_1, ..., +-e_{k+1}} on S^k; separation pi/2."""
    if k < 1:
        raise ValueError("sphere dimension must be >= 1")
    return AntipodalSet(np.eye(k + 1), label="cross-polytope")


def positive_arcs(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Endpoint pairs of the n(n+1) positive geodesic arcs between basis axes.

    For i < j the positive copies are (+e_i, +e_j) and (+e_i, -e_j); their
    antipodal arcs are the negative copies.
    """
    eye = np.eye(n + 1)
    arcs = []
    for i in range(n + 1):
        for j in range(i + 1, n + 1):
            arcs.append((eye[i], eye[j]))
            arcs.append((eye[i], -eye[j]))
    return arcs


def arc_augmented_set(n: int, k: int) -> AntipodalSet:
    """Cross-polytope vertices of S^n plus k-n arc points, 2(k+1) points total.

    The extra representatives sit in the interiors of the positive arcs
    between non-antipodal vertex pairs, at even arc-length fractions, filling
    arcs in a fixed lexicographic order with at most
    N = ceil((k-n)/(n(n+1))) points each.  Consecutive gaps along any filled
    arc are at least pi/(2(N+1)), which bounds the separation of the whole
    set from below by pi/(k-n+3).
    """
    if n < 2:
        raise ValueError("the arc construction needs sphere dimension n >= 2")
    if k <= n:
        raise ValueError("need k > n so there are arc points to place")
    reps = [np.eye(n + 1)]
    arcs = positive_arcs(n)
    budget = k - n
    per_arc = -(-budget // len(arcs))  # ceil
    for a, b in arcs:
        if budget == 0:
            break
        take = min(per_arc, budget)
        budget -= take
        fracs = np.arange(1, take + 1) / (take + 1)
        t = fracs * (np.pi / 2)  # arcs between non-antipodal axes have length pi/2
        pts = np.outer(np.cos(t), a) + np.outer(np.sin(t), b)
        reps.append(pts)
    return AntipodalSet(np.vstack(reps), label="arc-augmented")


# ---------------------------------------------------------------------------
# Exact queries
# ---------------------------------------------------------------------------

def separation(aset: AntipodalSet) -> float:
    """Minimum geodesic distance over all distinct pairs of the 2m points."""
    pts = aset.points()
    if pts.shape[0] < 2:
        raise ValueError("separation needs at least two points")
    cos = clip_cosine(pts @ pts.T)
    np.fill_diagonal(cos, -1.0)
    return float(np.arccos(np.max(cos)))


def cross_polytope_vdiam_exact(k: int) -> float:
    """Voronoi diameter of the cross-polytope vertex set in S^k.

    Each cell is the set of points whose distinguished coordinate is largest
    in magnitude, and its diameter is arccos(-(k-1)/(k+1)).
    """
    if k < 1:
        raise ValueError("sphere dimension must be >= 1")
    return float(np.arccos(-(k - 1.0) / (k + 1.0)))


def voronoi_cells_of(aset: AntipodalSet, x: UnitVector, tol: float = DEFAULT_CELL_TOL) -> list[CellIndex]:
    """All cells whose site distance is within ``tol`` of the minimum."""
    if x.dim != aset.dim:
        raise ValueError(f"dimension mismatch: point on S^{x.dim}, set on S^{aset.dim}")
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    dists = aset.site_distances(x.coords)
    hits = np.flatnonzero(dists <= dists.min() + tol)
    return [CellIndex.from_linear(int(i) + 1, aset.m) for i in hits]


def cell_contains(aset: AntipodalSet, linear: int, x: np.ndarray, tol: float = DEFAULT_CELL_TOL) -> bool:
    """Whether ``x`` lies in cell ``linear`` (1-based) within ``tol``."""
    dists = aset.site_distances(x)
    return bool(dists[linear - 1] <= dists.min() + tol)


def sample_in_cell(
    aset: AntipodalSet,
    linear: int,
    count: int,
    rng: RngStream,
    max_batches: int = 200,
) -> np.ndarray:
    """Uniform samples from one Voronoi cell, by rejection from the sphere."""
    if not 1 <= linear <= 2 * aset.m:
        raise ValueError(f"linear cell index {linear} out of range")
    out: list[np.ndarray] = []
    have = 0
    gen_stream = rng.child(linear)
    for batch in range(max_batches):
        draw = geometry.sample_uniform_many(
            aset.dim, max(count * aset.m, 64), gen_stream.child(batch)
        )
        keep = draw[aset.nearest_site_many(draw) == linear - 1]
        if keep.size:
            out.append(keep)
            have += keep.shape[0]
        if have >= count:
            break
    if have < count:
        raise RuntimeError(f"rejection sampling failed to populate cell {linear}")
    return np.vstack(out)[:count]


# ---------------------------------------------------------------------------
# Sampled estimators
# ---------------------------------------------------------------------------

def _slide_direction(x, raw, site, sites, activation):
    """Tangent ascent direction projected onto the cell's active constraints.

    A Voronoi cell is cut out by the halfspaces <x, site - s'> >= 0; removing
    the infeasible components of the step lets the climb slide along cell
    walls instead of stalling against them.
    """
    g = raw - np.dot(raw, x) * x
    normals = site - sites
    margins = sites @ x
    margins = np.dot(site, x) - margins
    for _ in range(2):
        for j in np.flatnonzero(margins <= activation):
            n = normals[j]
            nn = np.dot(n, n)
            if nn < 1e-300:
                continue
            viol = np.dot(g, n)
            if viol < 0:
                g = g - (viol / nn) * n
    return g - np.dot(g, x) * x


def _climb_pair_in_cell(aset, linear0, u, v, iters, step, gen, tol):
    """Hill-climb a point pair inside one cell to larger geodesic distance.

    Each move pushes one endpoint away from the other, with the step slid
    along active cell walls; a random tangent proposal is kept as a fallback.
    Moves that leave the cell or decrease the objective are rejected, so the
    returned value is realized by a feasible pair.
    """
    sites = aset.points()
    site = sites[linear0]
    best = float(np.arccos(clip_cosine(np.dot(u, v))))
    pts = (u.copy(), v.copy())
    for it in range(iters):
        moving = it % 2
        cur, other = pts[moving], pts[1 - moving]
        slide = _slide_direction(cur, -other, site, sites, activation=step)
        proposals = (
            geometry.tangent_step(cur, slide, step),
            geometry.tangent_step(cur, -other, step),
            geometry.tangent_step(cur, gen.standard_normal(cur.size), step),
        )
        accepted = False
        for cand in proposals:
            val = float(np.arccos(clip_cosine(np.dot(cand, other))))
            if val > best and cell_contains(aset, linear0 + 1, cand, tol):
                best = val
                pts = (cand, other) if moving == 0 else (other, cand)
                accepted = True
                break
        step = min(step * 1.3, 0.5) if accepted else step * 0.8
        if step < 1e-14:
            break
    return best, pts


def _far_pair(points: np.ndarray) -> tuple[float, int, int]:
    """Greedy farthest-pair search inside one bucket of sampled points."""
    best = (-1.0, 0, 0)
    i = 0
    for _ in range(6):
        d = np.arccos(clip_cosine(points @ points[i]))
        j = int(np.argmax(d))
        if d[j] > best[0]:
            best = (float(d[j]), i, j)
        if j == i:
            break
        i = j
    return best


def _circle_vdiam_exact(aset: AntipodalSet) -> tuple[float, tuple[UnitVector, UnitVector]]:
    """On S^1 the Voronoi diameter is exact: widest cell between gap midpoints."""
    pts = aset.points()
    angles = np.sort(np.mod(np.arctan2(pts[:, 1], pts[:, 0]), 2 * np.pi))
    gaps = np.diff(np.append(angles, angles[0] + 2 * np.pi))
    widths = (gaps + np.roll(gaps, 1)) / 2.0  # cell of site i spans half of each adjacent gap
    i = int(np.argmax(widths))
    lo = angles[i] - gaps[i - 1] / 2.0
    hi = angles[i] + gaps[i] / 2.0
    witness = (
        UnitVector([np.cos(lo), np.sin(lo)]),
        UnitVector([np.cos(hi), np.sin(hi)]),
    )
    return float(widths[i]), witness


def voronoi_diameter_estimate(
    aset: AntipodalSet,
    samples: int,
    refine_iters: int = 200,
    rng: RngStream = RngStream(0),
    tol: float = DEFAULT_CELL_TOL,
    threads: int | None = None,
) -> tuple[float, tuple[UnitVector, UnitVector]]:
    """Lower estimate of the largest Voronoi cell diameter, with witness pair.

    Samples are bucketed by nearest site; each shard finds a far pair per
    cell and hill-climbs the most promising ones without leaving the cell.
    On S^1 the answer is computed exactly instead.

    Returns
    -------
    (value, (u, v)) where u, v lie in a common cell and realize ``value``.
    """
    if samples < 1:
        raise ValueError("sample budget must be >= 1")
    if aset.dim == 1:
        return _circle_vdiam_exact(aset)

    # Phase A (parallel, vectorized): bucket samples by cell and pull a far
    # pair per cell.  Phase B (serial in shard order): hill-climb the best
    # candidates; worker count therefore never influences the result.
    def work(index, count, shard_rng):
        xs = geometry.sample_uniform_many(aset.dim, count, shard_rng.child(0))
        assign = aset.nearest_site_many(xs)
        candidates = []
        for cell in range(2 * aset.m):
            bucket = xs[assign == cell]
            if bucket.shape[0] < 2:
                continue
            val, i, j = _far_pair(bucket)
            candidates.append((val, cell, bucket[i], bucket[j]))
        candidates.sort(key=lambda c: (-c[0], c[1]))
        return candidates[:4]

    results = run_shards(work, shard_sizes(samples, 8192), rng, threads)
    best_val, best_pair = -1.0, None
    for index, candidates in enumerate(results):
        gen = rng.child(index, 1).generator()
        for val, cell, u, v in candidates:
            if refine_iters > 0:
                val, (u, v) = _climb_pair_in_cell(
                    aset, cell, u, v, refine_iters, np.pi / 16, gen, tol
                )
            if val > best_val:
                best_val, best_pair = val, (u, v)
    if best_pair is None:
        # Degenerate budget: fall back to a site paired with itself.
        p = UnitVector(aset.reps[0])
        return 0.0, (p, p)
    return best_val, (UnitVector(best_pair[0]), UnitVector(best_pair[1]))


def hausdorff_to_sphere_estimate(
    aset: AntipodalSet,
    samples: int,
    rng: RngStream = RngStream(0),
    refine_iters: int = 120,
    threads: int | None = None,
) -> float:
    """Lower estimate of the covering radius sup_x min_i d(x, site_i).

    Useful as the sampled side of the inequality vdiam <= 2 * d_H.
    """
    if samples < 1:
        raise ValueError("sample budget must be >= 1")
    sites = aset.points()

    def covering(x):
        return float(np.arccos(clip_cosine(np.max(sites @ x))))

    def work(index, count, shard_rng):
        xs = geometry.sample_uniform_many(aset.dim, count, shard_rng.child(0))
        cov = np.arccos(clip_cosine(np.max(xs @ sites.T, axis=1)))
        order = np.argsort(-cov)[:2]
        return [(float(cov[i]), xs[i]) for i in order]

    results = run_shards(work, shard_sizes(samples, 8192), rng, threads)
    best = 0.0
    for index, candidates in enumerate(results):
        gen = rng.child(index, 1).generator()
        for val, x in candidates:
            step = np.pi / 16
            for _ in range(refine_iters):
                nearest = sites[int(np.argmax(sites @ x))]
                proposals = (
                    geometry.tangent_step(x, x - nearest, step),
                    geometry.tangent_step(x, gen.standard_normal(x.size), step),
                )
                accepted = False
                for cand in proposals:
                    cval = covering(cand)
                    if cval > val:
                        x, val = cand, cval
                        accepted = True
                        break
                step = min(step * 1.3, 0.5) if accepted else step * 0.7
                if step < 1e-14:
                    break
            best = max(best, val)
    return best
