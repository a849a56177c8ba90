"""The cell-collapse correspondence induced by two equal-size antipodal sets.

Given antipodal sets P in S^n and Q in S^k with the same number of
representatives, each Voronoi cell of Q collapses onto the matching site of
P and vice versa.  The distortion of the resulting relation is at most

    max( vdiam(P), pi - sep(P), vdiam(Q), pi - sep(Q) ),

which is the quantity :func:`rpq_bound` evaluates.  The relation itself is a
continuum and is exposed only through correspondent queries and samplers.
"""

from __future__ import annotations

import numpy as np

from . import geometry, pointsets
from .distortion import Correspondence, ElementBatch, RelationElement
from .geometry import UnitVector, clip_cosine
from .pointsets import AntipodalSet
from .rng import RngStream

DEFAULT_TOL = 1e-9

LOW, HIGH = "low", "high"


class VoronoiCorrespondence(Correspondence):
    """Cell-collapse relation between S^n (side ``low``) and S^k (side ``high``).

    Relation elements are tracked by their free point: either a point of the
    low sphere paired with the site of a containing cell of Q, or a point of
    the high sphere paired with the site of a containing cell of P.  Strata
    are the 4m signed cells, counted per direction.
    """

    def __init__(self, p_set: AntipodalSet, q_set: AntipodalSet, tol: float = DEFAULT_TOL):
        if p_set.m != q_set.m:
            raise ValueError(
                f"the two sets must have equal size: {p_set.m} vs {q_set.m} representatives"
            )
        self.P = p_set
        self.Q = q_set
        self.tol = tol

    def to_json_dict(self) -> dict:
        return {"P": self.P.to_json_dict(), "Q": self.Q.to_json_dict()}

    @classmethod
    def from_json_dict(cls, data: dict) -> "VoronoiCorrespondence":
        return cls(
            AntipodalSet.from_json_dict(data["P"]),
            AntipodalSet.from_json_dict(data["Q"]),
        )

    # -- engine interface ---------------------------------------------------

    @property
    def n_strata(self) -> int:
        return 4 * self.P.m

    def stratum_label(self, stratum: int) -> str:
        m = self.P.m
        if stratum < 2 * m:
            return f"P-cell-{stratum + 1}"
        return f"Q-cell-{stratum - 2 * m + 1}"

    def free_factor(self, side: int) -> int:
        return side  # side 0 = low free (factor A), side 1 = high free (factor B)

    def sample_batch(self, count, rng):
        n_low = count // 2
        n_high = count - n_low
        xs = geometry.sample_uniform_many(self.P.dim, n_low, rng.child(0))
        cells_x = self.P.nearest_site_many(xs)
        ys = geometry.sample_uniform_many(self.Q.dim, n_high, rng.child(1))
        cells_y = self.Q.nearest_site_many(ys)
        a = np.vstack([xs, self.P.points()[cells_y]])
        b = np.vstack([self.Q.points()[cells_x], ys])
        side = np.concatenate([np.zeros(n_low, dtype=int), np.ones(n_high, dtype=int)])
        strata = np.concatenate([cells_x, 2 * self.P.m + cells_y])
        # Shuffle so that pairing the two batch halves mixes the directions.
        perm = rng.child(2).generator().permutation(count)
        return ElementBatch(a=a[perm], b=b[perm], side=side[perm], strata=strata[perm])

    def variants_of_free(self, side, free):
        free = np.asarray(free, dtype=float)
        out = []
        if side == 0:
            dists = self.P.site_distances(free)
            hits = np.flatnonzero(dists <= dists.min() + self.tol)
            for c in hits:
                out.append(RelationElement(0, free, free, self.Q.points()[c], int(c)))
        else:
            dists = self.Q.site_distances(free)
            hits = np.flatnonzero(dists <= dists.min() + self.tol)
            for c in hits:
                out.append(
                    RelationElement(1, free, self.P.points()[c], free, 2 * self.P.m + int(c))
                )
        return out

    def dist_a(self, a1, a2):
        return geometry.geodesic_accurate(a1, a2)

    dist_b = dist_a

    def dist_a_many(self, a1, a2):
        return geometry.geodesic_many(a1, a2)

    dist_b_many = dist_a_many

    # -- boundary-focused candidates -----------------------------------------

    @staticmethod
    def _tie_points_many(aset: AntipodalSet, ys: np.ndarray) -> np.ndarray:
        """Slide each row toward its second-nearest site until the top two tie.

        Bisection along the chord toward the second site; rows whose second
        site is antipodal are left in place (they get a single variant and are
        dropped by the caller).
        """
        sites = aset.points()
        dists = np.arccos(clip_cosine(ys @ sites.T))
        order = np.argsort(dists, axis=1, kind="stable")
        c1, c2 = order[:, 0], order[:, 1]
        target = sites[c2]
        movable = np.einsum("ij,ij->i", ys, target) > -1.0 + 1e-12
        lo = np.zeros(len(ys))
        hi = np.where(movable, 1.0, 0.0)
        s1, s2 = sites[c1], sites[c2]
        pts = ys
        for _ in range(50):
            mid = 0.5 * (lo + hi)
            pts = geometry.normalize_rows((1 - mid)[:, None] * ys + mid[:, None] * target)
            gap = geometry.geodesic_many(pts, s1) - geometry.geodesic_many(pts, s2)
            lo = np.where(gap < 0, mid, lo)
            hi = np.where(gap < 0, hi, mid)
        return geometry.normalize_rows((1 - hi)[:, None] * ys + hi[:, None] * target)

    def sample_focus_pairs(self, count, rng):
        pairs = []
        per_side = max(1, count // 8)
        for side, aset in ((1, self.Q), (0, self.P)):
            ys = geometry.sample_uniform_many(aset.dim, per_side, rng.child(side))
            ties = self._tie_points_many(aset, ys)
            for i in range(per_side):
                variants = self.variants_of_free(side, ties[i])
                if len(variants) < 2:
                    continue
                pairs.append((variants[0], variants[1]))
                if len(variants) > 2:
                    pairs.append((variants[0], variants[2]))
        return pairs


# ---------------------------------------------------------------------------
# Module-level queries matching the correspondence contract
# ---------------------------------------------------------------------------

def rpq_bound(
    corr: VoronoiCorrespondence, vdiam_p: float, vdiam_q: float
) -> float:
    """Distortion bound max(vdiam(P), pi - sep(P), vdiam(Q), pi - sep(Q)).

    Voronoi diameters are supplied by the caller (exact where known, sampled
    estimates otherwise); separations are computed exactly here.
    """
    sep_p = pointsets.separation(corr.P)
    sep_q = pointsets.separation(corr.Q)
    return max(vdiam_p, np.pi - sep_p, vdiam_q, np.pi - sep_q)


def rpq_correspondents(
    corr: VoronoiCorrespondence, point: UnitVector, side: str, tol: float = DEFAULT_TOL
) -> list[UnitVector]:
    """Site correspondents of ``point``: the signed sites of its cells.

    side ``low``: point lives on S^n and maps to sites of Q; side ``high``:
    point lives on S^k and maps to sites of P.  Boundary points return one
    correspondent per tied cell.
    """
    if side == LOW:
        if point.dim != corr.P.dim:
            raise ValueError(f"low-side point must live on S^{corr.P.dim}")
        cells = pointsets.voronoi_cells_of(corr.P, point, tol)
        return [UnitVector(corr.Q.points()[c.linear - 1]) for c in cells]
    if side == HIGH:
        if point.dim != corr.Q.dim:
            raise ValueError(f"high-side point must live on S^{corr.Q.dim}")
        cells = pointsets.voronoi_cells_of(corr.Q, point, tol)
        return [UnitVector(corr.P.points()[c.linear - 1]) for c in cells]
    raise ValueError(f"side must be '{LOW}' or '{HIGH}', got {side!r}")


def rpq_sample_pair(
    corr: VoronoiCorrespondence, rng: RngStream
) -> tuple[UnitVector, UnitVector]:
    """One relation element (x, y), mixing the two collapse directions 50/50."""
    gen = rng.generator()
    if gen.random() < 0.5:
        x = geometry.sample_uniform_many(corr.P.dim, 1, rng.child(0))[0]
        cells = pointsets.voronoi_cells_of(corr.P, UnitVector(x), corr.tol)
        pick = cells[gen.integers(len(cells))]
        return UnitVector(x), UnitVector(corr.Q.points()[pick.linear - 1])
    y = geometry.sample_uniform_many(corr.Q.dim, 1, rng.child(1))[0]
    cells = pointsets.voronoi_cells_of(corr.Q, UnitVector(y), corr.tol)
    pick = cells[gen.integers(len(cells))]
    return UnitVector(corr.P.points()[pick.linear - 1]), UnitVector(y)
