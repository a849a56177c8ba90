"""Projective packings (line configurations) and packing-driven bounds.

Points of RP^n are represented by canonically-signed unit vectors in S^n with
the distance arccos|<x, y>|.  The optimizer maximizes the minimum pairwise
distance with a smoothed max-min ascent (soft-min energy under a sharpening
schedule) followed by direct polishing of the minimum pairs, over parallel
restarts.  The resulting minimum distance is always re-verified from the
points, so every result is a certified lower bound for the packing value it
estimates.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import geometry, serialize
from .distortion import SearchBudget
from .parallel import run_shards, shard_sizes
from .pointsets import positive_arcs
from .rng import RngStream

BETA_SCHEDULE = (8.0, 32.0, 128.0, 512.0)

CACHE_ENV = "SPHERECORR_CACHE"

DEFAULT_PACKING_BUDGET = SearchBudget(
    samples=1600, refine_iters=400, initial_step=0.08, decay=0.9, restarts=16
)


def projective_gram(points: np.ndarray) -> np.ndarray:
    """Pairwise projective distances, with +inf on the diagonal."""
    cos = np.abs(points @ points.T)
    d = np.arccos(geometry.clip_cosine(cos))
    np.fill_diagonal(d, np.inf)
    return d


def min_pair_distance(points: np.ndarray) -> float:
    """Exact minimum pairwise projective distance of a configuration."""
    if points.shape[0] < 2:
        raise ValueError("need at least two points")
    return float(np.min(projective_gram(points)))


def canonicalize_signs(points: np.ndarray) -> np.ndarray:
    """Flip representatives so the first coordinate above 1e-12 is positive."""
    pts = np.array(points, dtype=float)
    for row in pts:
        for c in row:
            if abs(c) > 1e-12:
                if c < 0:
                    row *= -1.0
                break
    return pts


@dataclass
class PackingResult:
    """A line configuration and its verified minimum pairwise distance."""

    points: np.ndarray
    min_dist: float
    iterations: int
    restarts_used: int

    def to_json_dict(self) -> dict:
        return {
            "points": self.points.tolist(),
            "min_dist": self.min_dist,
            "iterations": self.iterations,
            "restarts_used": self.restarts_used,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "PackingResult":
        pts = canonicalize_signs(np.asarray(data["points"], dtype=float))
        return cls(
            points=pts,
            min_dist=min_pair_distance(pts),
            iterations=int(data["iterations"]),
            restarts_used=int(data["restarts_used"]),
        )


@dataclass
class CoveringResult:
    """Sampled lower estimate of the covering radius of a configuration."""

    points: np.ndarray
    radius_estimate: float
    samples: int

    def to_json_dict(self) -> dict:
        return {
            "points": self.points.tolist(),
            "radius_estimate": self.radius_estimate,
            "samples": self.samples,
        }


# ---------------------------------------------------------------------------
# Optimizer
# ---------------------------------------------------------------------------

def _arc_start(n: int, m: int) -> np.ndarray:
    """Warm start: basis vectors plus evenly spread arc points (m > n+1)."""
    base = np.eye(n + 1)
    if m <= n + 1:
        return base[:m]
    arcs = positive_arcs(n)
    budget = m - (n + 1)
    per_arc = -(-budget // len(arcs))
    rows = [base]
    for a, b in arcs:
        if budget == 0:
            break
        take = min(per_arc, budget)
        budget -= take
        t = (np.arange(1, take + 1) / (take + 1)) * (np.pi / 2)
        rows.append(np.outer(np.cos(t), a) + np.outer(np.sin(t), b))
    return np.vstack(rows)


def _soft_ascent(points: np.ndarray, iters_per_beta: int, step0: float) -> np.ndarray:
    """Ascend the soft-min energy through the sharpening schedule."""
    x = points.copy()
    for beta in BETA_SCHEDULE:
        step = step0
        shrink = (1e-2) ** (1.0 / max(iters_per_beta, 1))
        for _ in range(iters_per_beta):
            gram = x @ x.T
            d = np.arccos(geometry.clip_cosine(np.abs(gram)))
            np.fill_diagonal(d, np.inf)
            w = np.exp(-beta * (d - d.min()))
            np.fill_diagonal(w, 0.0)
            total = w.sum()
            if total <= 0:
                break
            w /= total
            sin = np.sqrt(np.maximum(1.0 - np.minimum(np.abs(gram), 1.0) ** 2, 1e-12))
            coef = -w * np.sign(gram) / sin
            grad = coef @ x
            grad -= np.einsum("ij,ij->i", grad, x)[:, None] * x
            top = float(np.max(np.linalg.norm(grad, axis=1)))
            if top < 1e-300:
                break
            x = geometry.normalize_rows(x + (step / top) * grad)
            step *= shrink
    return x


def _circle_polish(points: np.ndarray, iters: int) -> np.ndarray:
    """Gap-diffusion polish on the projective circle (n = 1).

    Lines through the origin of R^2 live on a circle of circumference pi;
    averaging adjacent gaps converges to even spacing, the max-min optimum in
    one dimension, far faster than pairwise nudging.
    """
    angles = np.sort(np.mod(np.arctan2(points[:, 1], points[:, 0]), np.pi))
    for _ in range(iters):
        gaps = np.diff(np.append(angles, angles[0] + np.pi))
        angles = angles + (gaps - np.roll(gaps, 1)) / 4.0
        angles = np.sort(angles)
    return np.column_stack([np.cos(angles), np.sin(angles)])


def _polish(points: np.ndarray, iters: int, step0: float, decay: float) -> tuple[np.ndarray, int]:
    """Greedy max-min polish: push apart only the pairs realizing the minimum."""
    x = points.copy()
    best = min_pair_distance(x)
    step = step0
    used = 0
    for it in range(iters):
        used = it + 1
        d = projective_gram(x)
        tight = np.argwhere(d <= d.min() + 1e-12)
        move = np.zeros_like(x)
        for i, j in tight:
            if i < j:
                g = float(x[i] @ x[j])
                move[i] += -np.sign(g) * x[j]
                move[j] += -np.sign(g) * x[i]
        norms = np.linalg.norm(move, axis=1)
        active = norms > 1e-300
        if not np.any(active):
            break
        trial = x.copy()
        trial[active] += step * move[active] / norms[active][:, None]
        trial = geometry.normalize_rows(trial)
        val = min_pair_distance(trial)
        if val > best:
            x, best = trial, val
            step = min(step * 1.2, 0.3)
        else:
            step *= decay
            if step < 1e-13:
                break
    return x, used


def optimize_packing(
    n: int,
    m: int,
    budget: SearchBudget | None = None,
    rng: RngStream = RngStream(0),
    threads: int | None = None,
) -> PackingResult:
    """Maximize the minimum pairwise projective distance of m points in RP^n.

    Runs ``budget.restarts`` independent starts (basis / arc-augmented warm
    starts plus random configurations), each ascended and polished; keeps the
    best.  ``min_dist`` of the result is re-verified directly from the
    returned points.
    """
    if n < 1:
        raise ValueError("projective dimension must be >= 1")
    if m < 2:
        raise ValueError("need at least two points to pack")
    budget = DEFAULT_PACKING_BUDGET if budget is None else budget
    iters_per_beta = max(1, budget.samples // len(BETA_SCHEDULE))

    def work(index, _count, shard_rng):
        if index == 0:
            start = _arc_start(n, m)
        else:
            start = geometry.sample_uniform_many(n, m, shard_rng)
        x = _soft_ascent(start, iters_per_beta, budget.initial_step)
        if n == 1:
            x = _circle_polish(x, budget.refine_iters)
        x, used = _polish(x, budget.refine_iters, budget.initial_step, budget.decay)
        x = canonicalize_signs(geometry.normalize_rows(x))
        return min_pair_distance(x), x, iters_per_beta * len(BETA_SCHEDULE) + used

    results = run_shards(work, [1] * budget.restarts, rng, threads)
    best_val, best_x, best_iters = -1.0, None, 0
    for val, x, used in results:
        key = x.tolist()
        if val > best_val or (val == best_val and best_x is not None and key < best_x.tolist()):
            best_val, best_x, best_iters = val, x, used
    return PackingResult(
        points=best_x,
        min_dist=best_val,
        iterations=best_iters,
        restarts_used=budget.restarts,
    )


def covering_radius_estimate(
    points,
    samples: int,
    rng: RngStream = RngStream(0),
    refine_iters: int = 120,
    threads: int | None = None,
) -> CoveringResult:
    """Sampled lower estimate of sup_x min_i d_RP(x, x_i) with hill climbing."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] < 1:
        raise ValueError("need at least one point")
    if samples < 1:
        raise ValueError("sample budget must be >= 1")
    dim = pts.shape[1] - 1

    def cov(x):
        return float(np.arccos(geometry.clip_cosine(np.max(np.abs(pts @ x)))))

    def work(index, count, shard_rng):
        xs = geometry.sample_uniform_many(dim, count, shard_rng.child(0))
        vals = np.arccos(geometry.clip_cosine(np.max(np.abs(xs @ pts.T), axis=1)))
        order = np.argsort(-vals)[:2]
        return [(float(vals[i]), xs[i]) for i in order]

    results = run_shards(work, shard_sizes(samples, 8192), rng, threads)
    best = 0.0
    for index, candidates in enumerate(results):
        gen = rng.child(index, 1).generator()
        for val, x in candidates:
            step = np.pi / 16
            for _ in range(refine_iters):
                nearest = pts[int(np.argmax(np.abs(pts @ x)))]
                if np.dot(nearest, x) < 0:
                    nearest = -nearest
                proposals = (
                    geometry.tangent_step(x, x - nearest, step),
                    geometry.tangent_step(x, gen.standard_normal(x.size), step),
                )
                accepted = False
                for cand in proposals:
                    cval = cov(cand)
                    if cval > val:
                        x, val = cand, cval
                        accepted = True
                        break
                step = min(step * 1.3, 0.5) if accepted else step * 0.7
                if step < 1e-14:
                    break
            best = max(best, val)
    return CoveringResult(points=pts, radius_estimate=best, samples=samples)


# ---------------------------------------------------------------------------
# Bounds
# ---------------------------------------------------------------------------

def cross_polytope_cell_diameter(k: int) -> float:
    return float(np.arccos(-(k - 1.0) / (k + 1.0)))


def packing_bound_terms(n: int, k: int, p_lower: float) -> dict:
    """The three competing terms of the packing-based distortion bound.

    ``pi_minus_p`` is conservative when evaluated at a lower packing estimate,
    while ``two_p`` is anti-conservative; callers that need a certified value
    must control the provenance of ``p_lower`` themselves.
    """
    if n < 2 or k <= n:
        raise ValueError("the packing bound needs 2 <= n < k")
    if not 0.0 < p_lower <= np.pi / 2:
        raise ValueError("packing distance must lie in (0, pi/2]")
    return {
        "cell_diameter": cross_polytope_cell_diameter(k),
        "pi_minus_p": np.pi - p_lower,
        "two_p": 2.0 * p_lower,
    }


def packing_bound(n: int, k: int, p_lower: float) -> float:
    """max(arccos(-(k-1)/(k+1)), pi - p, 2p) evaluated at the supplied p."""
    return max(packing_bound_terms(n, k, p_lower).values())


def circle_to_sphere_exact(k: int) -> float:
    """Exact doubled distance between the circle and S^k (k >= 2).

    Even k: k*pi/(k+1); odd k: (k-1)*pi/k.  Both equal 2*pi*l/(2l+1) with
    l = floor(k/2).
    """
    if k < 2:
        raise ValueError("needs k >= 2")
    half = k // 2
    return 2.0 * np.pi * half / (2 * half + 1)


def collapse_bound(k: int) -> float:
    """The even-circle / cross-polytope collapse bound pi*k/(k+1)."""
    return np.pi * k / (k + 1.0)


def best_bound(n: int, k: int, p_lower: float | None = None) -> tuple[float, str]:
    """Best available upper bound on the doubled distance between S^n and S^k.

    For n = 1 the value is exact.  For n >= 2 the collapse bound pi*k/(k+1)
    always applies; when a packing estimate is supplied the packing bound may
    improve on it.
    """
    if not 1 <= n < k:
        raise ValueError("need 1 <= n < k")
    if n == 1:
        return circle_to_sphere_exact(k), "exact"
    value = collapse_bound(k)
    if p_lower is not None:
        value = min(value, packing_bound(n, k, p_lower))
    return value, "upper-bound"


def bound_source(n: int, k: int, p_lower: float | None = None) -> str:
    if n == 1:
        return "circle-even" if k % 2 == 0 else "circle-odd"
    if p_lower is not None and packing_bound(n, k, p_lower) < collapse_bound(k):
        return "packing"
    return "even-cross-collapse"


def euclidean_bound(two_dgh_geodesic: float) -> float:
    """Chord-metric bound sin(t/2) from a doubled geodesic bound t in [0, pi]."""
    if not 0.0 <= two_dgh_geodesic <= np.pi + 1e-12:
        raise ValueError("doubled geodesic bound must lie in [0, pi]")
    return float(np.sin(min(two_dgh_geodesic, np.pi) / 2.0))


# ---------------------------------------------------------------------------
# On-disk cache and the asymptotic table
# ---------------------------------------------------------------------------

class PackingStore:
    """Directory of best-known packings, keyed by (n, m, budget, seed)."""

    def __init__(self, root: str | Path | None = None):
        if root is None:
            root = os.environ.get(CACHE_ENV) or Path.home() / ".cache" / "spherecorr"
        self.root = Path(root)

    def _path(self, n: int, m: int, budget: SearchBudget, seed: int) -> Path:
        blob = serialize.dumps(
            {
                "samples": budget.samples,
                "refine_iters": budget.refine_iters,
                "initial_step": budget.initial_step,
                "decay": budget.decay,
                "restarts": budget.restarts,
                "seed": seed,
            }
        )
        digest = hashlib.sha256(blob.encode()).hexdigest()[:12]
        return self.root / f"pack_n{n}_m{m}_{digest}.json"

    def load(self, n: int, m: int, budget: SearchBudget, seed: int) -> PackingResult | None:
        path = self._path(n, m, budget, seed)
        if not path.exists():
            return None
        return PackingResult.from_json_dict(json.loads(path.read_text()))

    def save(self, n: int, m: int, budget: SearchBudget, seed: int, result: PackingResult):
        self.root.mkdir(parents=True, exist_ok=True)
        path = self._path(n, m, budget, seed)
        path.write_text(serialize.dumps(result.to_json_dict()))


def asymptotic_table(
    n: int,
    k_values,
    budget: SearchBudget | None = None,
    rng: RngStream = RngStream(0),
    store: PackingStore | None = None,
    threads: int | None = None,
) -> list[dict]:
    """Rows (k, bound, gap, gap*sqrt(k)) using packing-improved bounds.

    Packings of k+1 points in RP^n come from the store when available and are
    optimized (and cached) otherwise.
    """
    if n < 2:
        raise ValueError("the table needs n >= 2")
    budget = DEFAULT_PACKING_BUDGET if budget is None else budget
    rows = []
    for k in k_values:
        if k <= n:
            raise ValueError(f"every k must exceed n; got k={k}, n={n}")
        m = k + 1
        result = store.load(n, m, budget, rng.seed) if store is not None else None
        if result is None:
            result = optimize_packing(n, m, budget, rng.child(int(k)), threads)
            if store is not None:
                store.save(n, m, budget, rng.seed, result)
        bound, _ = best_bound(n, k, result.min_dist)
        gap = np.pi - bound
        rows.append(
            {
                "k": int(k),
                "bound": float(bound),
                "gap": float(gap),
                "gap_sqrtk": float(gap * np.sqrt(k)),
                "p_lower": float(result.min_dist),
            }
        )
    return rows
