"""Numeric verification suite behind the ``verify`` CLI command.

Each invariant check returns a record with the observed worst violation and a
witness, emitted by the CLI as one JSON line per invariant.  Budgets scale
with the ``samples`` argument so the same checks serve quick smoke runs and
long verification sweeps.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import geometry, odd_corr, packing, pointsets
from .distortion import SearchBudget, estimate_distortion
from .geometry import UnitVector
from .odd_corr import OddCircleCorrespondence, cell_angles_many
from .rng import RngStream
from .voronoi_corr import VoronoiCorrespondence, rpq_bound, rpq_correspondents

SCOPES = ("geometry", "pointsets", "rpq", "odd", "packing")


@dataclass
class InvariantResult:
    invariant: str
    scope: str
    passed: bool
    max_violation: float
    detail: str
    witness: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "invariant": self.invariant,
            "scope": self.scope,
            "status": "pass" if self.passed else "fail",
            "max_violation": self.max_violation,
            "detail": self.detail,
            "witness": self.witness,
        }


def _result(invariant, scope, violation, tol, detail, witness=None):
    return InvariantResult(
        invariant=invariant,
        scope=scope,
        passed=bool(violation <= tol),
        max_violation=float(violation),
        detail=detail,
        witness=witness or {},
    )


# ---------------------------------------------------------------------------
# geometry
# ---------------------------------------------------------------------------

def check_geometry(samples: int, rng: RngStream) -> list[InvariantResult]:
    out = []
    n = max(1000, samples // 10)
    xs = geometry.sample_uniform_many(3, n, rng.child(0))
    ys = geometry.sample_uniform_many(3, n, rng.child(1))
    zs = geometry.sample_uniform_many(3, n, rng.child(2))
    dxy = geometry.geodesic_many(xs, ys)
    dyz = geometry.geodesic_many(ys, zs)
    dxz = geometry.geodesic_many(xs, zs)
    out.append(
        _result(
            "triangle-inequality", "geometry",
            float(np.max(dxz - dxy - dyz)), 1e-12,
            f"geodesic triples on S^3, n={n}",
        )
    )
    out.append(
        _result(
            "antipodal-invariance", "geometry",
            float(np.max(np.abs(geometry.geodesic_many(-xs, -ys) - dxy))), 0.0,
            "d(-x, -y) == d(x, y) exactly",
        )
    )
    proj = geometry.projective_many(xs, ys)
    folded = np.minimum(dxy, np.pi - dxy)
    out.append(
        _result(
            "projective-fold", "geometry",
            float(np.max(np.abs(proj - folded))), 1e-12,
            "arccos|<x,y>| == min(d, pi - d)",
        )
    )
    chords = np.linalg.norm(xs - ys, axis=1)
    out.append(
        _result(
            "chord-identity", "geometry",
            float(np.max(np.abs(2 * np.sin(dxy / 2) - chords))), 1e-12,
            "2 sin(d/2) equals the Euclidean chord",
        )
    )
    angles = rng.child(3).generator().uniform(0, 2 * np.pi, size=n)
    angles2 = rng.child(4).generator().uniform(0, 2 * np.pi, size=n)
    emb1 = np.column_stack([np.cos(angles), np.sin(angles)])
    emb2 = np.column_stack([np.cos(angles2), np.sin(angles2)])
    circ = geometry.circle_distance_many(angles, angles2)
    out.append(
        _result(
            "circle-embedding", "geometry",
            float(np.max(np.abs(circ - geometry.geodesic_many(emb1, emb2)))), 1e-12,
            "angle distance matches geodesic distance on the embedded circle",
        )
    )
    big = geometry.sample_uniform_many(2, max(samples, 10000), rng.child(5))
    mean_dev = float(np.max(np.abs(big.mean(axis=0))))
    frac = float(np.mean(big[:, 0] > 0))
    out.append(
        _result(
            "uniform-sampling", "geometry",
            max(mean_dev - 0.02, abs(frac - 0.5) - 0.01, 0.0), 0.0,
            f"mean deviation {mean_dev:.4f}, halfspace fraction {frac:.4f}",
        )
    )
    return out


# ---------------------------------------------------------------------------
# pointsets
# ---------------------------------------------------------------------------

def check_pointsets(samples: int, rng: RngStream, threads=None) -> list[InvariantResult]:
    out = []
    ks = np.arange(3, 1001)
    lhs = np.arccos(-(ks - 1.0) / (ks + 1.0))
    rhs = (ks - 1.0) * np.pi / ks
    out.append(
        _result(
            "cross-cell-diameter-inequality", "pointsets",
            float(np.max(lhs - rhs)), 1e-12,
            "cell diameter <= (k-1)pi/k for 3 <= k <= 1000",
        )
    )
    out.append(
        _result(
            "cross-cell-diameter-equality-k3", "pointsets",
            abs(pointsets.cross_polytope_vdiam_exact(3) - 2 * np.pi / 3), 1e-12,
            "equality holds at k = 3",
        )
    )

    worst = 0.0
    worst_cfg = {}
    for n in range(2, 30):
        for k in range(n + 1, 31):
            aset = pointsets.arc_augmented_set(n, k)
            gap = np.pi / (k - n + 3) - pointsets.separation(aset)
            count_err = abs(aset.points().shape[0] - 2 * (k + 1))
            v = max(gap, float(count_err))
            if v > worst:
                worst, worst_cfg = v, {"n": n, "k": k}
    out.append(
        _result(
            "arc-set-separation-sweep", "pointsets",
            max(worst, 0.0), 1e-12,
            "2(k+1) points with separation >= pi/(k-n+3), 2 <= n < k <= 30",
            worst_cfg,
        )
    )

    sep_err = max(
        abs(pointsets.separation(pointsets.cross_polytope_set(3)) - np.pi / 2),
        abs(pointsets.separation(pointsets.evenly_spaced_circle_set(4)) - np.pi / 4),
    )
    out.append(
        _result(
            "construction-separations", "pointsets", sep_err, 1e-12,
            "cross-polytope pi/2; even circle pi/m",
        )
    )

    cp = pointsets.cross_polytope_set(3)
    xs = geometry.sample_uniform_many(3, max(200, samples // 100), rng.child(0))
    equiv_bad = 0
    for row in xs:
        cells = {c.linear for c in pointsets.voronoi_cells_of(cp, UnitVector(row))}
        flipped = {
            c.antipode(cp.m).linear
            for c in pointsets.voronoi_cells_of(cp, UnitVector(-row))
        }
        if cells != flipped:
            equiv_bad += 1
    out.append(
        _result(
            "voronoi-antipode-equivariance", "pointsets", float(equiv_bad), 0.0,
            "cells(-x) are the antipodal cells of cells(x)",
        )
    )

    worst = 0.0
    for k in (2, 3):
        est, _ = pointsets.voronoi_diameter_estimate(
            pointsets.cross_polytope_set(k), max(20000, samples), 200,
            rng.child(10 + k), threads=threads,
        )
        worst = max(worst, abs(est - pointsets.cross_polytope_vdiam_exact(k)))
    out.append(
        _result(
            "cross-vdiam-estimate", "pointsets", worst, 0.01,
            "sampled Voronoi diameter matches the closed form (k = 2, 3)",
        )
    )

    vd, _ = pointsets.voronoi_diameter_estimate(
        cp, max(20000, samples), 100, rng.child(20), threads=threads
    )
    dh = pointsets.hausdorff_to_sphere_estimate(
        cp, max(20000, samples), rng.child(21), threads=threads
    )
    out.append(
        _result(
            "vdiam-vs-hausdorff", "pointsets", max(vd / 2 - dh - 0.01, 0.0), 0.0,
            "covering estimate >= vdiam estimate / 2 - 0.01",
        )
    )
    return out


# ---------------------------------------------------------------------------
# cell-collapse correspondence
# ---------------------------------------------------------------------------

def nine_case_witnesses(k: int, samples: int, rng: RngStream) -> list[tuple[str, float, float]]:
    """(case, objective, case bound) triples for the collapse-relation proof cases.

    Uses the evenly spaced circle set against the cross-polytope, whose
    separations and Voronoi diameters are known exactly.
    """
    P = pointsets.evenly_spaced_circle_set(k + 1)
    Q = pointsets.cross_polytope_set(k)
    vd_p = np.pi / (k + 1)
    vd_q = pointsets.cross_polytope_vdiam_exact(k)
    sep_p = pointsets.separation(P)
    sep_q = pointsets.separation(Q)
    m = P.m
    count = max(8, samples // 2000)

    def cell_pts(aset, linear, n, stream):
        return pointsets.sample_in_cell(aset, linear, n, rng.child(stream))

    rows: list[tuple[str, float, float]] = []

    def emit(case, d_low, d_high, bound):
        rows.append((case, float(np.max(np.abs(d_low - d_high))), bound))

    # Cases 1-3: both low points are sites of P.
    ys = cell_pts(Q, 1, count, 1)
    ys2 = cell_pts(Q, 1, count, 2)
    emit("case-1", 0.0, geometry.geodesic_many(ys, ys2), vd_q)
    ys_neg = -cell_pts(Q, 1, count, 3)
    emit("case-2", np.pi, geometry.geodesic_many(ys, ys_neg), vd_q)
    j = 2 if m > 2 else 1
    d_pp = geometry.geodesic_many(P.points()[:1], P.points()[j:j + 1])[0]
    emit("case-3", d_pp, geometry.geodesic_many(cell_pts(Q, 1, count, 4), cell_pts(Q, j + 1, count, 5)), np.pi - sep_p)
    # Cases 4-6: one point of P, one site of Q.
    xs = cell_pts(P, 1, count, 6)
    emit(
        "case-4",
        geometry.geodesic_many(np.repeat(P.points()[:1], count, axis=0), xs),
        geometry.geodesic_many(ys, np.repeat(Q.points()[:1], count, axis=0)),
        np.pi - sep_p,
    )
    emit(
        "case-5",
        geometry.geodesic_many(np.repeat(P.points()[:1], count, axis=0), -xs),
        geometry.geodesic_many(ys, np.repeat(-Q.points()[:1], count, axis=0)),
        np.pi - sep_p,
    )
    emit(
        "case-6",
        geometry.geodesic_many(np.repeat(P.points()[:1], count, axis=0), cell_pts(P, j + 1, count, 7)),
        geometry.geodesic_many(ys, np.repeat(Q.points()[j:j + 1], count, axis=0)),
        max(np.pi - sep_p, np.pi - sep_q),
    )
    # Cases 7-9: both high points are sites of Q.
    d_qq = geometry.geodesic_many(Q.points()[:1], Q.points()[j:j + 1])[0]
    xs2 = cell_pts(P, j + 1, count, 8)
    emit("case-7", geometry.geodesic_many(xs, xs2), d_qq, np.pi - sep_q)
    emit("case-8", geometry.geodesic_many(xs, -cell_pts(P, 1, count, 9)), np.pi, vd_p)
    emit("case-9", geometry.geodesic_many(xs, cell_pts(P, 1, count, 10)), 0.0, vd_p)
    return rows


def check_rpq(k_values, samples: int, rng: RngStream, threads=None) -> list[InvariantResult]:
    out = []
    worst_case = 0.0
    worst = {}
    for k in k_values:
        for case, obj, bound in nine_case_witnesses(k, samples, rng.child(k)):
            v = obj - bound
            if v > worst_case:
                worst_case, worst = v, {"k": k, "case": case}
    out.append(
        _result(
            "nine-case-bounds", "rpq", max(worst_case, 0.0), 1e-9,
            "every proof case stays within its own bound", worst,
        )
    )

    worst_sound = 0.0
    worst = {}
    for k in k_values:
        P = pointsets.evenly_spaced_circle_set(k + 1)
        Q = pointsets.cross_polytope_set(k)
        corr = VoronoiCorrespondence(P, Q)
        bound = rpq_bound(corr, np.pi / (k + 1), pointsets.cross_polytope_vdiam_exact(k))
        rep = estimate_distortion(
            corr,
            SearchBudget(samples=max(20000, samples), refine_iters=60),
            rng.child(100 + k),
            bound=bound,
            threads=threads,
        )
        v = rep.estimate - bound
        if v > worst_sound:
            worst_sound, worst = v, {"k": k, "estimate": rep.estimate, "bound": bound}
    out.append(
        _result(
            "estimate-within-bound", "rpq", max(worst_sound, 0.0), 1e-6,
            "empirical distortion never exceeds the collapse bound", worst,
        )
    )

    # Antipodal equivariance of correspondent queries.
    P = pointsets.evenly_spaced_circle_set(4)
    Q = pointsets.cross_polytope_set(3)
    corr = VoronoiCorrespondence(P, Q)
    bad = 0
    for row in geometry.sample_uniform_many(3, 100, rng.child(200)):
        ups = {tuple(np.round(u.coords, 9)) for u in rpq_correspondents(corr, UnitVector(row), "high")}
        downs = {
            tuple(np.round(-u.coords, 9))
            for u in rpq_correspondents(corr, UnitVector(-row), "high")
        }
        if ups != downs:
            bad += 1
    out.append(
        _result(
            "correspondent-equivariance", "rpq", float(bad), 0.0,
            "correspondents of -y are the negated correspondents of y",
        )
    )
    return out


# ---------------------------------------------------------------------------
# ordered-cell correspondence
# ---------------------------------------------------------------------------

def cyclic_shift_violation(k: int, count: int, rng: RngStream) -> float:
    """Worst deviation of angle(m+n, A_n x) from angle(m, x) + n pi/(k+1)."""
    xs = geometry.sample_uniform_many(k, count, rng.child(0))
    ms = odd_corr.principal_cells_many(k, xs)
    base = cell_angles_many(k, xs, ms)
    ns = rng.child(1).generator().integers(0, 2 * k + 2, size=count)
    worst = 0.0
    shifted = xs.copy()
    for n in range(2 * k + 2):
        rows = np.flatnonzero(ns == n)
        if rows.size:
            m_new = (ms[rows] + n - 1) % (2 * k + 2) + 1
            lhs = cell_angles_many(k, shifted[rows], m_new)
            rhs = base[rows] + n * np.pi / (k + 1)
            worst = max(worst, float(np.max(geometry.circle_distance_many(lhs, rhs))))
        shifted = np.concatenate([shifted[:, -1:], -shifted[:, :-1]], axis=1)
    return worst


def z2_violation(k: int, count: int, rng: RngStream) -> float:
    """Worst deviation of angle(m+k+1, -x) from angle(m, x) + pi."""
    xs = geometry.sample_uniform_many(k, count, rng)
    ms = odd_corr.principal_cells_many(k, xs)
    lhs = cell_angles_many(k, -xs, (ms + k) % (2 * k + 2) + 1)
    rhs = cell_angles_many(k, xs, ms) + np.pi
    return float(np.max(geometry.circle_distance_many(lhs, rhs)))


def sample_same_cell_pairs(k: int, count: int, rng: RngStream) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(X, Y, m): uniform pairs lying in a common ordered cell."""
    xs = geometry.sample_uniform_many(k, count, rng.child(0))
    ms = odd_corr.principal_cells_many(k, xs)
    ys = geometry.sample_uniform_many(k, count, rng.child(1))
    rows = np.arange(count)
    axes_tbl, signs_tbl = odd_corr._cell_tables(k)
    tgt_axis = axes_tbl[ms - 1]
    tgt_sign = signs_tbl[ms - 1]
    src = np.argmax(np.abs(ys), axis=1)
    tmp = ys[rows, tgt_axis].copy()
    ys[rows, tgt_axis] = ys[rows, src]
    ys[rows, src] = tmp
    flip = np.sign(ys[rows, tgt_axis]) != tgt_sign
    ys[rows[flip], tgt_axis[flip]] *= -1.0
    return xs, ys, ms


def distance_decrease_violations(k: int, count: int, rng: RngStream) -> tuple[int, float]:
    """Strict contraction failures of the cell maps on same-cell pairs."""
    chunk = 250_000
    bad = 0
    closest = np.inf
    done = 0
    part = 0
    while done < count:
        take = min(chunk, count - done)
        xs, ys, ms = sample_same_cell_pairs(k, take, rng.child(part))
        d_sphere = geometry.geodesic_many(xs, ys)
        d_circle = geometry.circle_distance_many(
            cell_angles_many(k, xs, ms), cell_angles_many(k, ys, ms)
        )
        strict = (d_circle < d_sphere) | (d_sphere <= 1e-12)
        bad += int(np.sum(~strict))
        closest = min(closest, float(np.min(d_sphere - d_circle)))
        done += take
        part += 1
    return bad, closest


def check_odd(k_values, samples: int, rng: RngStream, threads=None) -> list[InvariantResult]:
    out = []
    for k in k_values:
        if k % 2 == 0 or k < 3:
            raise ValueError(f"odd scope needs odd k >= 3, got {k}")
    scope_rng = rng

    # Worked example at k = 3: corner correspondents take their known values.
    if 3 in k_values:
        x = UnitVector([0.5, -0.5, 0.5, 0.5])
        cells = odd_corr.ordered_cells_of(3, x)
        expect_cells = [1, 2, 3, 8]
        got = sorted(a.theta for a in odd_corr.circle_correspondents(3, x))
        expect = sorted(
            t % (2 * np.pi) for t in (-np.pi / 24, 7 * np.pi / 24, 11 * np.pi / 24, 43 * np.pi / 24)
        )
        err = max(abs(a - b) for a, b in zip(got, expect)) if cells == expect_cells else np.inf
        out.append(
            _result(
                "corner-correspondents-k3", "odd", err, 1e-12,
                "the (1/2, -1/2, 1/2, 1/2) corner maps to its four known angles",
            )
        )

    worst = 0.0
    for k in k_values:
        _, value = odd_corr.max_distortion_witness(k)
        worst = max(worst, abs(value - (k - 1) * np.pi / k))
    out.append(
        _result(
            "witness-value", "odd", worst, 1e-12,
            "the boundary witness realizes (k-1)pi/k exactly",
        )
    )

    count = max(5000, samples)
    worst_cyc = max(cyclic_shift_violation(k, count, scope_rng.child(30 + k)) for k in k_values)
    out.append(
        _result(
            "cyclic-shift-relation", "odd", worst_cyc, 1e-12,
            "angle(m+n, A_n x) == angle(m, x) + n pi/(k+1) (mod 2 pi)",
        )
    )
    worst_z2 = max(z2_violation(k, count, scope_rng.child(60 + k)) for k in k_values)
    out.append(
        _result(
            "antipodal-shift-relation", "odd", worst_z2, 1e-12,
            "angle(m+k+1, -x) == angle(m, x) + pi (mod 2 pi)",
        )
    )

    worst_bad = 0
    for k in k_values:
        bad, _ = distance_decrease_violations(k, count, scope_rng.child(90 + k))
        worst_bad = max(worst_bad, bad)
    out.append(
        _result(
            "cell-maps-contract", "odd", float(worst_bad), 0.0,
            "every cell map strictly decreases distances on same-cell pairs",
        )
    )

    # Image confinement: angles land in the matching interval.
    worst_conf = 0.0
    for k in k_values:
        xs = geometry.sample_uniform_many(k, count, scope_rng.child(120 + k))
        ms = odd_corr.principal_cells_many(k, xs)
        angles = cell_angles_many(k, xs, ms)
        for m in range(1, 2 * k + 3):
            rows = np.flatnonzero(ms == m)
            if rows.size == 0:
                continue
            iv = odd_corr.CircleInterval.of_cell(k, m)
            delta = np.mod(angles[rows] - iv.lo, 2 * np.pi)
            off = np.minimum(np.abs(delta - np.clip(delta, 0, iv.width)), np.abs(delta - 2 * np.pi))
            worst_conf = max(worst_conf, float(np.max(off)))
    out.append(
        _result(
            "interval-confinement", "odd", worst_conf, 1e-9,
            "cell maps send each cell into its own circle interval",
        )
    )

    # Euclidean comparison inequalities used by the distortion proof.
    worst_sq = 0.0
    worst_simple = 0.0
    for k in k_values:
        gen_rng = scope_rng.child(150 + k)
        xs = odd_corr.sample_in_ordered_cell_many(k, 1, count, gen_rng.child(0))
        for idx, j in enumerate((k, k + 1)):
            zs = odd_corr.sample_in_ordered_cell_many(k, j, count, gen_rng.child(1 + idx))
            axis = odd_corr.cell_axis(k, j)
            sq = (xs[:, 0] - np.abs(zs[:, axis])) ** 2
            dist2 = np.einsum("ij,ij->i", xs - zs, xs - zs)
            worst_sq = max(worst_sq, float(np.max(sq - dist2)))
            coeff = np.pi / (2 * k * (k + 1))
            sum_x = xs.sum(axis=1) / xs[:, 0]
            if j == k:
                sum_z = (zs[:, : k - 1].sum(axis=1) + zs[:, k - 1] - zs[:, k]) / zs[:, k - 1]
                lhs = coeff * (sum_x + sum_z - 2 * k)
            else:
                sum_z = zs.sum(axis=1) / zs[:, k]
                lhs = coeff * (sum_x + sum_z)
            gap = lhs - np.sqrt(dist2)
            worst_simple = max(worst_simple, float(np.max(gap)))
    out.append(
        _result(
            "coordinate-gap-inequality", "odd", max(worst_sq, 0.0), 1e-12,
            "(x_1 - |z_m|)^2 <= |x - z|^2 on sampled cell pairs",
        )
    )
    out.append(
        _result(
            "reduced-case-inequality", "odd", max(worst_simple, 0.0), 1e-12,
            "the sufficient linear form stays below the Euclidean distance",
        )
    )

    # Boundary-restricted search dominates interior search.
    worst_gap = 0.0
    for k in k_values:
        probe = max(2000, samples // 10)
        for (i, j) in odd_corr.case_reduction_pairs(k):
            b_rng = scope_rng.child(200 + k, i, j)
            others_i = [m for m in range(1, 2 * k + 3) if odd_corr.compatible_boundary(k, i, m)]
            others_j = [m for m in range(1, 2 * k + 3) if odd_corr.compatible_boundary(k, j, m)]
            xs = np.vstack([
                odd_corr.sample_cell_boundary_many(k, i, int(mm), probe // len(others_i) + 1, b_rng.child(1, t))
                for t, mm in enumerate(others_i)
            ])[:probe]
            zs = np.vstack([
                odd_corr.sample_cell_boundary_many(k, j, int(mm), probe // len(others_j) + 1, b_rng.child(2, t))
                for t, mm in enumerate(others_j)
            ])[:probe]
            d_bnd = np.abs(
                geometry.circle_distance_many(
                    cell_angles_many(k, xs, np.full(len(xs), i)),
                    cell_angles_many(k, zs, np.full(len(zs), j)),
                )
                - geometry.geodesic_many(xs, zs)
            )
            xi = odd_corr.sample_in_ordered_cell_many(k, i, probe, b_rng.child(3))
            zi = odd_corr.sample_in_ordered_cell_many(k, j, probe, b_rng.child(4))
            d_int = np.abs(
                geometry.circle_distance_many(
                    cell_angles_many(k, xi, np.full(probe, i)),
                    cell_angles_many(k, zi, np.full(probe, j)),
                )
                - geometry.geodesic_many(xi, zi)
            )
            worst_gap = max(worst_gap, float(np.max(d_int) - np.max(d_bnd)))
    out.append(
        _result(
            "boundary-search-dominates", "odd", max(worst_gap, 0.0), 0.0,
            "boundary-restricted search finds at least the interior maximum",
        )
    )

    # Global distortion window, concentrated on the reduced case pairs.
    worst_lo, worst_hi = 0.0, 0.0
    for k in k_values:
        corr = OddCircleCorrespondence(k)
        target = (k - 1) * np.pi / k
        rep = estimate_distortion(
            corr,
            SearchBudget(samples=max(30000, samples), refine_iters=80),
            scope_rng.child(250 + k),
            bound=target,
            threads=threads,
        )
        worst_lo = max(worst_lo, target - 0.02 - rep.estimate)
        worst_hi = max(worst_hi, rep.estimate - target - 1e-6)
    out.append(
        _result(
            "global-distortion-window", "odd", max(worst_lo, worst_hi, 0.0), 0.0,
            "estimates fall in [(k-1)pi/k - 0.02, (k-1)pi/k + 1e-6]",
        )
    )
    return out


# ---------------------------------------------------------------------------
# packing
# ---------------------------------------------------------------------------

def check_packing(samples: int, rng: RngStream, threads=None) -> list[InvariantResult]:
    out = []
    budget = SearchBudget(samples=1200, refine_iters=300, initial_step=0.08, decay=0.9, restarts=12)
    r15 = packing.optimize_packing(1, 5, budget, rng.child(0), threads)
    out.append(
        _result(
            "circle-five-lines", "packing", abs(r15.min_dist - np.pi / 5), 1e-4,
            "five projective points on the circle pack at pi/5",
        )
    )
    r23 = packing.optimize_packing(2, 3, budget, rng.child(1), threads)
    out.append(
        _result(
            "orthogonal-lines", "packing", abs(r23.min_dist - np.pi / 2), 1e-6,
            "m <= n+1 lines reach the projective diameter",
        )
    )
    r24 = packing.optimize_packing(2, 4, budget, rng.child(2), threads)
    out.append(
        _result(
            "four-lines-plane", "packing", abs(r24.min_dist - np.arccos(1 / 3)), 1e-3,
            "four lines in RP^2 pack at arccos(1/3)",
        )
    )
    cov = packing.covering_radius_estimate(np.eye(3), max(20000, samples), rng.child(3), threads=threads)
    out.append(
        _result(
            "basis-covering-radius", "packing",
            abs(cov.radius_estimate - np.arccos(1 / np.sqrt(3))), 0.01,
            "basis lines of RP^2 cover at arccos(1/sqrt(3))",
        )
    )
    worst = 0.0
    for n, m in ((2, 4), (2, 6), (3, 8)):
        res = packing.optimize_packing(n, m, budget, rng.child(10 + m), threads)
        c = packing.covering_radius_estimate(res.points, max(20000, samples), rng.child(20 + m), threads=threads)
        worst = max(worst, c.radius_estimate - res.min_dist - 0.01)
    out.append(
        _result(
            "covering-below-packing", "packing", max(worst, 0.0), 0.0,
            "covering radius estimate <= packing distance + 0.01",
        )
    )
    return out


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------

def run_verify(
    scope: str,
    k_values=None,
    samples: int = 20000,
    seed: int = 0,
    threads: int | None = None,
) -> list[InvariantResult]:
    """Run one verification scope (or all) and return its invariant records."""
    rng = RngStream(seed)
    scopes = SCOPES if scope == "all" else (scope,)
    out: list[InvariantResult] = []
    for sc in scopes:
        if sc == "geometry":
            out.extend(check_geometry(samples, rng.child(1)))
        elif sc == "pointsets":
            out.extend(check_pointsets(samples, rng.child(2), threads))
        elif sc == "rpq":
            ks = k_values or [2, 3, 4]
            out.extend(check_rpq(ks, samples, rng.child(3), threads))
        elif sc == "odd":
            ks = [k for k in (k_values or [3])]
            out.extend(check_odd(ks, samples, rng.child(4), threads))
        elif sc == "packing":
            out.extend(check_packing(samples, rng.child(5), threads))
        else:
            raise ValueError(f"unknown scope {scope!r}")
    return out
