import numpy as np
import pytest
from scipy.optimize import minimize

from spherecorr import (
    PackingStore,
    RngStream,
    SearchBudget,
    asymptotic_table,
    best_bound,
    covering_radius_estimate,
    euclidean_bound,
    optimize_packing,
    packing_bound,
)
from spherecorr import packing
from spherecorr.serialize import dumps

FAST = SearchBudget(samples=1200, refine_iters=300, initial_step=0.08, decay=0.9, restarts=12)


# -- independent oracles ------------------------------------------------------

def lines_from_angles(ang):
    ang = ang.reshape(-1, 2)
    return np.column_stack(
        [
            np.sin(ang[:, 0]) * np.cos(ang[:, 1]),
            np.sin(ang[:, 0]) * np.sin(ang[:, 1]),
            np.cos(ang[:, 0]),
        ]
    )


def pairwise_line_distances(pts):
    cos = np.abs(pts @ pts.T)
    iu = np.triu_indices(pts.shape[0], 1)
    return np.arccos(np.clip(cos[iu], -1, 1))


def slsqp_line_packing_oracle(m, tries, seed):
    """Constrained-NLP oracle: maximize the slack below all pair distances."""
    gen = np.random.default_rng(seed)
    n_pairs = m * (m - 1) // 2
    best = 0.0
    for _ in range(tries):
        ang0 = np.column_stack(
            [gen.uniform(0, np.pi, m), gen.uniform(0, 2 * np.pi, m)]
        ).ravel()
        x0 = np.append(ang0, 0.5)
        cons = [
            {
                "type": "ineq",
                "fun": (lambda x, idx=idx: pairwise_line_distances(lines_from_angles(x[:-1]))[idx] - x[-1]),
            }
            for idx in range(n_pairs)
        ]
        res = minimize(
            lambda x: -x[-1], x0, method="SLSQP", constraints=cons,
            options={"maxiter": 300, "ftol": 1e-12},
        )
        best = max(best, float(pairwise_line_distances(lines_from_angles(res.x[:-1])).min()))
    return best


def test_gap_vector_oracle_for_circle_packing():
    # on the projective circle the gaps of m points sum to pi, so the minimum
    # gap never exceeds pi/m; even spacing attains it
    gen = np.random.default_rng(0)
    m = 5
    for _ in range(20000):
        gaps = gen.dirichlet(np.ones(m)) * np.pi
        assert gaps.min() <= np.pi / m + 1e-12
    even = np.full(m, np.pi / m)
    assert even.min() == pytest.approx(np.pi / m, abs=1e-15)


def test_optimizer_matches_circle_oracle():
    result = optimize_packing(1, 5, FAST, RngStream(3))
    assert result.min_dist == pytest.approx(np.pi / 5, abs=1e-4)


def test_optimizer_matches_slsqp_oracle_four_lines():
    oracle = slsqp_line_packing_oracle(4, 8, 2)
    assert oracle == pytest.approx(np.arccos(1 / 3), abs=1e-6)
    result = optimize_packing(2, 4, FAST, RngStream(3))
    assert result.min_dist == pytest.approx(np.arccos(1 / 3), abs=1e-3)
    assert abs(result.min_dist - oracle) <= 1e-3


def test_basis_configurations_reach_diameter():
    for m in (2, 3):
        result = optimize_packing(2, m, FAST, RngStream(4))
        assert result.min_dist == pytest.approx(np.pi / 2, abs=1e-6)


def test_min_dist_reverified_from_points():
    result = optimize_packing(2, 5, FAST, RngStream(5))
    assert result.min_dist == pytest.approx(packing.min_pair_distance(result.points), abs=0)
    assert result.min_dist <= np.pi / 2 + 1e-12
    assert result.restarts_used == FAST.restarts


def test_canonical_signs():
    pts = packing.canonicalize_signs(np.array([[-1.0, 0.2, 0.0], [0.0, -0.5, 0.8]]))
    assert pts[0, 0] > 0
    assert pts[1, 1] > 0


def test_packing_monotone_in_m():
    # adjacent m can share one optimal value (a plateau), so allow polish-level
    # noise; real restart failures show up orders of magnitude above this
    budget = SearchBudget(samples=1600, refine_iters=400, initial_step=0.08, decay=0.9, restarts=24)
    for n in (2, 3):
        values = [
            optimize_packing(n, m, budget, RngStream(6).child(n, m)).min_dist
            for m in range(2, 13)
        ]
        for lo, hi in zip(values[1:], values):
            assert lo <= hi + 1e-4, (n, values)


def test_packing_scaling_band():
    # min distance scales like m**(-1/n): the normalized values stay in a band
    for n in (2, 3):
        norms = []
        for m in (8, 16, 32, 64):
            r = optimize_packing(n, m, FAST, RngStream(7).child(n, m))
            norms.append(r.min_dist * m ** (1.0 / n))
        assert max(norms) <= 2.0 * min(norms)


def test_covering_radius_examples():
    # four evenly spaced projective points on the circle cover at pi/8
    angles = np.arange(4) * np.pi / 4
    pts = np.column_stack([np.cos(angles), np.sin(angles)])
    cov = covering_radius_estimate(pts, 20000, RngStream(8))
    assert cov.radius_estimate == pytest.approx(np.pi / 8, abs=1e-3)
    # the basis lines of RP^2: farthest line is the main diagonal
    cov = covering_radius_estimate(np.eye(3), 20000, RngStream(9))
    assert cov.radius_estimate == pytest.approx(np.arccos(1 / np.sqrt(3)), abs=0.01)


def test_covering_never_exceeds_packing():
    for n, m in ((2, 4), (2, 6), (3, 8)):
        r = optimize_packing(n, m, FAST, RngStream(10).child(n, m))
        c = covering_radius_estimate(r.points, 20000, RngStream(11).child(n, m))
        assert c.radius_estimate <= r.min_dist + 0.01


def test_packing_bound_formula():
    p = np.arccos(1 / 3)
    value = packing_bound(2, 3, p)
    assert value == pytest.approx(max(2 * np.pi / 3, np.pi - p, 2 * p), abs=1e-15)
    assert value == pytest.approx(2 * p, abs=1e-15)  # 2p binds here
    with pytest.raises(ValueError):
        packing_bound(1, 3, 0.5)
    with pytest.raises(ValueError):
        packing_bound(2, 2, 0.5)
    with pytest.raises(ValueError):
        packing_bound(2, 3, 2.0)


def test_best_bound_closed_forms():
    assert best_bound(1, 4) == (pytest.approx(4 * np.pi / 5, abs=1e-15), "exact")
    assert best_bound(1, 5) == (pytest.approx(4 * np.pi / 5, abs=1e-15), "exact")
    assert best_bound(1, 6) == (pytest.approx(6 * np.pi / 7, abs=1e-15), "exact")
    value, tag = best_bound(2, 3)
    assert value == pytest.approx(3 * np.pi / 4, abs=1e-15)
    assert tag == "upper-bound"
    with pytest.raises(ValueError):
        best_bound(3, 3)


def test_best_bound_uses_packing_when_better():
    # at large k the packing term beats pi*k/(k+1)
    value, _ = best_bound(2, 30, p_lower=0.45)
    assert value < 30 * np.pi / 31
    assert value == pytest.approx(packing_bound(2, 30, 0.45), abs=1e-15)


def test_euclidean_bound():
    assert euclidean_bound(0.0) == 0.0
    assert euclidean_bound(4 * np.pi / 5) == pytest.approx(np.sin(2 * np.pi / 5), abs=1e-15)
    assert euclidean_bound(3 * np.pi / 4) == pytest.approx(np.sin(3 * np.pi / 8), abs=1e-15)
    with pytest.raises(ValueError):
        euclidean_bound(-0.1)
    with pytest.raises(ValueError):
        euclidean_bound(3.3)


def test_store_roundtrip(tmp_path):
    store = PackingStore(tmp_path)
    result = optimize_packing(2, 4, FAST, RngStream(12))
    store.save(2, 4, FAST, 12, result)
    loaded = store.load(2, 4, FAST, 12)
    assert loaded is not None
    assert loaded.min_dist == pytest.approx(result.min_dist, abs=1e-15)
    assert np.allclose(loaded.points, result.points, atol=0)
    assert store.load(2, 4, FAST, 13) is None


def test_asymptotic_table_n3_slope_not_steeper_than_sqrt(tmp_path):
    # this construction only yields a 1/sqrt(k) gap in every dimension, so
    # the fitted log-log slope should not drop much below -1/2 for n = 3
    budget = SearchBudget(samples=1000, refine_iters=250, initial_step=0.08, decay=0.9, restarts=8)
    ks = list(range(8, 25, 2))
    rows = asymptotic_table(3, ks, budget, RngStream(21), store=PackingStore(tmp_path))
    gaps = np.array([row["gap"] for row in rows])
    assert np.all(gaps > 0)
    slope = float(np.polyfit(np.log(ks), np.log(gaps), 1)[0])
    assert slope >= -0.5 - 0.15


def test_asymptotic_table_rows(tmp_path):
    store = PackingStore(tmp_path)
    rows = asymptotic_table(2, [3, 4, 5], FAST, RngStream(1), store=store)
    assert [row["k"] for row in rows] == [3, 4, 5]
    for row in rows:
        assert row["gap"] > 0
        assert row["gap_sqrtk"] == pytest.approx(row["gap"] * np.sqrt(row["k"]), abs=1e-12)
    # warm rerun hits the cache and reproduces the rows byte for byte
    rows2 = asymptotic_table(2, [3, 4, 5], FAST, RngStream(1), store=store)
    assert dumps(rows) == dumps(rows2)


def test_restart_reduction_deterministic():
    a = optimize_packing(2, 4, FAST, RngStream(3), threads=1)
    b = optimize_packing(2, 4, FAST, RngStream(3), threads=4)
    assert dumps(a.to_json_dict()) == dumps(b.to_json_dict())
