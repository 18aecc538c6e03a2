import numpy as np
import numpy.testing as npt
import pytest

from nsdyn import (
    SelectionPolicy,
    StabilityQuery,
    convex_bounds_report,
    estimate_lipschitz,
    get_function,
    local_min_check,
    probe,
)
from nsdyn.errors import InvalidQuery, NotConvex
from nsdyn.reporting import json_text, verdict_json_dict


def test_estimate_lipschitz_abs_sum_is_sharp():
    # every off-axis generator in dim 2 has norm exactly sqrt(2)
    fn = get_function("abs_sum", 2)
    L = estimate_lipschitz(fn, [0.0, 0.0], 0.5, samples=64, seed=3)
    assert L == pytest.approx(1.1 * np.sqrt(2), rel=1e-12)


def test_estimate_lipschitz_quad_tracks_ball_radius():
    fn = get_function("quad", 2)
    L = estimate_lipschitz(fn, [0.0, 0.0], 1.0, samples=512, seed=3)
    assert 1.0 <= L <= 1.1 + 1e-12


def test_estimate_lipschitz_cross_below_analytic_sup():
    fn = get_function("cross")
    L = estimate_lipschitz(fn, [1.0, 0.0], 0.5, samples=512, seed=3)
    sup = 1.5 * np.sqrt(1.5 * 0.5 ** 3 + 1.5 ** 3 * 0.5)
    assert L <= 1.1 * sup
    assert L >= 0.5 * sup  # the sample actually explores the ball


def test_probe_quad_certificate():
    verdict = probe(StabilityQuery("quad", np.zeros(2), 0.1,
                                   delta_grid=(0.05,), alpha_grid=(0.5, 0.1),
                                   n_samples=100, max_iters=1000, seed=21))
    assert verdict.status == "no_escape_observed"
    cert = verdict.certificate
    assert verdict.witness is None
    assert (cert.delta, cert.alpha_bar) == (0.05, 0.5)
    assert np.all(verdict.escape_counts == 0)


def test_probe_neg_norm_radial_escape():
    eps = 0.1
    verdict = probe(StabilityQuery("neg_norm", np.zeros(2), eps,
                                   delta_grid=(eps / 10,), alpha_grid=(eps / 2, eps / 50),
                                   n_samples=20, seed=4))
    assert verdict.status == "escape_witnessed"
    w = verdict.witness
    assert np.all(verdict.escape_counts == 20)
    # witness replays to a genuine exit at the recorded index
    pts = w.trajectory_ref.points
    assert np.linalg.norm(pts[w.exit_index]) > eps
    assert np.all(np.linalg.norm(pts[: w.exit_index], axis=1) <= eps)


def test_probe_cross_escapes_at_desk_scale_alphas():
    verdict = probe(StabilityQuery("cross", np.array([1.0, 0.0]), 0.25,
                                   alpha_grid=(0.3, 0.1), max_iters=20_000,
                                   n_samples=8, seed=4))
    assert verdict.status == "escape_witnessed"
    w = verdict.witness
    d = np.linalg.norm(w.trajectory_ref.points[w.exit_index] - np.array([1.0, 0.0]))
    assert d > 0.25


def test_probe_determinism_and_json_stability():
    q = StabilityQuery("neg_norm", np.zeros(2), 0.1, n_samples=10, seed=77)
    a, b = probe(q), probe(q)
    assert json_text(verdict_json_dict(a)) == json_text(verdict_json_dict(b))
    assert a.witness.trajectory_ref.points.tobytes() == b.witness.trajectory_ref.points.tobytes()


def test_probe_certificate_monotone_under_subgrids():
    # shrinking both grids preserves the certificate (cells are seeded by
    # their values, so the sub-grid reruns identical trajectories)
    full = probe(StabilityQuery("quad", np.zeros(2), 0.1,
                                delta_grid=(0.05, 0.025), alpha_grid=(0.2, 0.1, 0.05),
                                n_samples=40, max_iters=400, seed=9))
    assert full.status == "no_escape_observed"
    for dg in ((0.05, 0.025), (0.025,)):
        for ag in ((0.2, 0.1, 0.05), (0.1, 0.05), (0.05,)):
            sub = probe(StabilityQuery("quad", np.zeros(2), 0.1, delta_grid=dg,
                                       alpha_grid=ag, n_samples=40, max_iters=400, seed=9))
            assert sub.status == "no_escape_observed"


def test_probe_validates_query():
    with pytest.raises(InvalidQuery):
        probe(StabilityQuery("quad", np.zeros(2), 0.1, delta_grid=(0.2,), seed=1))
    with pytest.raises(InvalidQuery):
        probe(StabilityQuery("quad", np.zeros(2), 0.1, delta_grid=(0.01, 0.05), seed=1))
    with pytest.raises(InvalidQuery):
        probe(StabilityQuery("quad", np.zeros(2), 0.1, n_samples=0, seed=1))
    with pytest.raises(InvalidQuery):
        probe(StabilityQuery("quad", np.zeros(2), -0.1, seed=1))


def test_probe_scalar_policy_path():
    verdict = probe(StabilityQuery("neg_norm", np.zeros(2), 0.1,
                                   delta_grid=(0.05,), alpha_grid=(0.01,),
                                   n_samples=5, max_iters=200, seed=2,
                                   policy=SelectionPolicy("random_extreme")))
    assert verdict.status == "escape_witnessed"


def test_local_min_check_examples():
    out = local_min_check(get_function("cross"), [1.0, 0.0], 0.2, samples=4000, seed=1)
    assert out.status == "consistent_with_local_min"
    assert out.counterexample is None

    out = local_min_check(get_function("neg_norm", 2), [0.0, 0.0], 0.1, samples=50, seed=1)
    assert out.status == "counterexample_point"
    fn = get_function("neg_norm", 2)
    assert fn.value(out.counterexample) < out.f_center - 1e-12

    out = local_min_check(get_function("wiggle"), [0.0], 0.05, samples=500, seed=1)
    assert out.status == "counterexample_point"
    assert get_function("wiggle").value(out.counterexample) < -1e-12


def test_convex_bounds_abs_sum_from_one():
    fn = get_function("abs_sum", 1)
    rep = convex_bounds_report(fn, [1.0], 0.1, 0.1, n_steps=400, seed=0)
    assert rep.c == 1.0
    assert rep.iters_budget == 100
    assert rep.bound_c2a2 == pytest.approx(0.05)
    assert rep.liminf_gap <= rep.bound_c2a2 + 1e-12
    assert rep.achieved_within_budget
    assert rep.dist_bound is None


def test_convex_bounds_abs_sum_oscillation_pair():
    fn = get_function("abs_sum", 1)
    rep = convex_bounds_report(fn, [0.07], 0.1, 0.1, n_steps=400, seed=0)
    # tail oscillates between 0.07 and -0.03, so the liminf gap is 0.03
    assert rep.liminf_gap == pytest.approx(0.03, abs=1e-12)
    assert rep.liminf_gap <= rep.c ** 2 * rep.alpha / 2


def test_convex_bounds_quad_distance_bound():
    fn = get_function("quad", 1)
    rep = convex_bounds_report(fn, [1.0], 0.5, 0.1, n_steps=200, seed=0)
    assert rep.beta == 0.5
    assert rep.dist_bound == pytest.approx(rep.c * np.sqrt(0.5))
    assert rep.terminal_distance <= rep.dist_bound
    assert rep.terminal_distance == pytest.approx(0.0, abs=1e-30)


def test_convex_bounds_rejects_nonconvex():
    with pytest.raises(NotConvex):
        convex_bounds_report(get_function("cross"), [1.0, 0.1], 0.1, 0.1)


def test_no_escape_points_pass_local_min_check():
    # probed no-escape fixtures are also sample-consistent local minima
    for name, x_star in [("quad", np.zeros(2)), ("abs_sum", np.zeros(2)),
                         ("vee_bowl", np.zeros(2))]:
        verdict = probe(StabilityQuery(name, x_star, 0.1, n_samples=20,
                                       max_iters=300, seed=13))
        assert verdict.status == "no_escape_observed"
        check = local_min_check(get_function(name, 2), x_star, 0.05,
                                samples=2000, seed=13)
        assert check.status == "consistent_with_local_min"
