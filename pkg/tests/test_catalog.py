import itertools

import numpy as np
import numpy.testing as npt
import pytest

from nsdyn import (
    SubdifferentialSet,
    evaluate,
    get_function,
    hull_distance,
    list_catalog,
    minimal_norm_element,
    subdifferential,
)
from nsdyn.engine import make_rng, sample_ball
from nsdyn.errors import DimensionMismatch, NonFiniteInput


def test_evaluate_examples():
    cross = get_function("cross")
    assert evaluate(cross, [1.0, 0.1]) == pytest.approx(0.1 ** 1.5, rel=1e-15)
    assert evaluate(cross, [1.0, 0.0]) == 0.0
    assert evaluate(get_function("quad", 2), [3.0, 4.0]) == 12.5


def test_evaluate_errors():
    quad = get_function("quad", 2)
    with pytest.raises(DimensionMismatch):
        evaluate(quad, [1.0, 2.0, 3.0])
    with pytest.raises(NonFiniteInput):
        evaluate(quad, [np.nan, 0.0])
    with pytest.raises(NonFiniteInput):
        evaluate(quad, [np.inf, 0.0])


def test_subdifferential_examples():
    abs1 = get_function("abs_sum", 1)
    s = subdifferential(abs1, [0.0], 0.0)
    npt.assert_array_equal(np.sort(s.generators, axis=0), [[-1.0], [1.0]])

    cross = get_function("cross")
    s = subdifferential(cross, [1.0, 0.1], 0.0)
    assert s.generators.shape == (1, 2)
    npt.assert_allclose(s.generators[0],
                        [1.5 * 0.1 ** 1.5, 1.5 * 0.1 ** 0.5], rtol=1e-15)

    s = subdifferential(cross, [1.0, 0.0], 0.0)
    npt.assert_array_equal(s.generators, [[0.0, 0.0]])


def test_active_tol_widens_kinks():
    vb = get_function("vee_bowl")
    assert subdifferential(vb, [1e-9, 0.5], 0.0).generators.shape == (1, 2)
    s = subdifferential(vb, [1e-9, 0.5], 1e-8)
    assert s.generators.shape == (2, 2)
    npt.assert_array_equal(s.generators[:, 1], [1.0, 1.0])

    abs3 = get_function("abs_sum", 3)
    s = subdifferential(abs3, [0.0, 2.0, 0.0], 0.0)
    assert s.generators.shape == (4, 3)
    assert np.all(s.generators[:, 1] == 1.0)


def test_wiggle_at_zero_and_away():
    wig = get_function("wiggle")
    assert evaluate(wig, [0.0]) == 0.0
    s = subdifferential(wig, [0.0], 0.0)
    npt.assert_array_equal(np.sort(s.generators, axis=0), [[-1.0], [1.0]])
    t = 0.02
    s = subdifferential(wig, [t], 0.0)
    npt.assert_allclose(s.generators[0, 0],
                        2 * t * np.sin(1 / t) - np.cos(1 / t), rtol=1e-15)
    assert not wig.semialgebraic


def test_minimal_norm_examples():
    npt.assert_array_equal(minimal_norm_element(np.array([[-1.0], [1.0]])), [0.0])
    g = np.array([[0.047434164902525694, 0.4743416490252569]])
    npt.assert_array_equal(minimal_norm_element(g), g[0])
    npt.assert_allclose(minimal_norm_element(np.array([[1.0, 0.0], [0.0, 1.0]])),
                        [0.5, 0.5], rtol=1e-12)


def _min_norm_by_subset_enumeration(gens):
    # exhaustive oracle: the solution is the min-norm point of the affine
    # hull of some generator subset, with nonnegative weights and no
    # improving generator left outside
    m = gens.shape[0]
    best, best_norm = None, np.inf
    for size in range(1, m + 1):
        for subset in itertools.combinations(range(m), size):
            pts = gens[list(subset)]
            gram = pts @ pts.T
            lhs = np.block([[gram, np.ones((size, 1))], [np.ones((1, size)), np.zeros((1, 1))]])
            rhs = np.zeros(size + 1)
            rhs[size] = 1.0
            try:
                lam = np.linalg.lstsq(lhs, rhs, rcond=None)[0][:size]
            except np.linalg.LinAlgError:
                continue
            if np.any(lam < -1e-9):
                continue
            x = lam @ pts
            if np.any(gens @ x < x @ x - 1e-9):
                continue
            n = np.linalg.norm(x)
            if n < best_norm:
                best, best_norm = x, n
    return best


def test_minimal_norm_against_enumeration_oracle():
    rng = make_rng(314159)
    for trial in range(60):
        m = int(rng.integers(3, 7))
        dim = int(rng.integers(2, 5))
        gens = rng.normal(0.0, 1.0, (m, dim))
        if trial % 3 == 0:
            gens = gens + 2.0  # push hull away from the origin
        got = minimal_norm_element(gens)
        want = _min_norm_by_subset_enumeration(gens)
        assert abs(np.linalg.norm(got) - np.linalg.norm(want)) < 1e-9
        assert hull_distance(gens, got) < 1e-9


def test_minimal_norm_exact_zero_for_symmetric_hulls():
    gens = np.concatenate([np.eye(4), -np.eye(4)], axis=0)
    npt.assert_array_equal(minimal_norm_element(gens), np.zeros(4))


SAMPLE_SPECS = [
    ("quad", 2, [0.0, 0.0], 1.5),
    ("abs_sum", 2, [0.0, 0.0], 1.5),
    ("abs_sum", 3, [0.0, 0.0, 0.0], 1.0),
    ("cross", 2, [1.0, 0.0], 0.5),
    ("vee_bowl", 2, [0.0, 0.0], 1.0),
    ("neg_norm", 2, [0.5, 0.5], 0.4),
    ("wiggle", 1, [0.1], 0.05),
]


def test_min_norm_lies_in_hull_with_smallest_norm():
    rng = make_rng(7)
    for name, dim, center, radius in SAMPLE_SPECS:
        fn = get_function(name, dim)
        for x in sample_ball(np.array(center), radius, 40, rng):
            s = subdifferential(fn, x, 0.0)
            v = minimal_norm_element(s)
            assert hull_distance(s, v) <= 1e-10
            gen_norms = np.linalg.norm(s.generators, axis=1)
            assert np.linalg.norm(v) <= gen_norms.min() + 1e-12


def test_no_duplicate_generators():
    checks = [
        ("abs_sum", 2, [0.0, 0.0]),
        ("vee_bowl", 2, [0.0, 0.3]),
        ("wiggle", 1, [0.0]),
        ("neg_norm", 3, [0.0, 0.0, 0.0]),
    ]
    for name, dim, x in checks:
        gens = subdifferential(get_function(name, dim), x, 0.0).generators
        assert len(np.unique(gens, axis=0)) == gens.shape[0]


def _central_difference(fn, x, i, step=1e-6):
    e = np.zeros_like(x)
    e[i] = step
    return (fn.value(x + e) - fn.value(x - e)) / (2 * step)


def test_singleton_generator_matches_finite_differences():
    # margin 1e-3 from every kink, relative tolerance 1e-6
    rng = make_rng(99)
    cases = [
        ("quad", 3, lambda x: True),
        ("cross", 2, lambda x: min(abs(x[0]), abs(x[1])) > 1e-3),
        ("vee_bowl", 2, lambda x: abs(x[0]) > 1e-3),
        ("abs_sum", 2, lambda x: np.min(np.abs(x)) > 1e-3),
        ("neg_norm", 2, lambda x: np.linalg.norm(x) > 1e-3),
        ("wiggle", 1, lambda x: abs(x[0]) > 0.05),
    ]
    for name, dim, away in cases:
        fn = get_function(name, dim)
        tested = 0
        while tested < 25:
            x = rng.uniform(-1.2, 1.2, dim)
            if not away(x):
                continue
            tested += 1
            s = subdifferential(fn, x, 0.0)
            assert s.generators.shape[0] == 1
            g = s.generators[0]
            fd = np.array([_central_difference(fn, x, i) for i in range(dim)])
            npt.assert_allclose(g, fd, rtol=1e-6, atol=1e-6)


def test_cross_sign_symmetry():
    cross = get_function("cross")
    rng = make_rng(5)
    for _ in range(50):
        x = rng.uniform(0.05, 1.5, 2)
        base = subdifferential(cross, x, 0.0).generators[0]
        for s1, s2 in itertools.product((-1.0, 1.0), repeat=2):
            flipped = np.array([s1 * x[0], s2 * x[1]])
            assert evaluate(cross, flipped) == evaluate(cross, x)
            g = subdifferential(cross, flipped, 0.0).generators[0]
            npt.assert_array_equal(g, [s1 * base[0], s2 * base[1]])


def test_generator_norms_respect_analytic_lipschitz_constants():
    rng = make_rng(31)
    cases = [
        ("abs_sum", 3, [0.2, -0.1, 0.4], 1.0, np.sqrt(3)),
        ("quad", 2, [0.0, 0.0], 1.0, 1.0),
        ("vee_bowl", 2, [0.0, 0.0], 1.0, np.sqrt(1.0 + 4.0)),
        ("neg_norm", 3, [0.3, 0.0, 0.0], 2.0, 1.0),
        ("wiggle", 1, [0.0], 1.0, 3.0),
        ("cross", 2, [1.0, 0.0], 0.5, 1.5 * np.sqrt(1.5 * 0.5 ** 3 + 1.5 ** 3 * 0.5)),
    ]
    for name, dim, center, radius, bound in cases:
        fn = get_function(name, dim)
        for x in sample_ball(np.array(center, float), radius, 200, rng):
            norms = np.linalg.norm(fn.generators(x, 0.0), axis=1)
            assert norms.max() <= bound + 1e-9


def test_list_catalog_descriptors():
    cat = {fn.name: fn for fn in list_catalog()}
    assert len(cat) == 6
    assert cat["cross"].semialgebraic
    assert not cat["wiggle"].semialgebraic
    assert cat["quad"].convex
    npt.assert_array_equal(cat["quad"].known_minimizers[0], np.zeros(cat["quad"].dim))
    for fn in cat.values():
        if fn.convex:
            assert len(fn.known_minimizers) > 0
        d = fn.describe()
        assert set(d) == {"id", "dim", "semialgebraic", "convex"}


def test_subdifferential_set_validates_dim():
    with pytest.raises(DimensionMismatch):
        SubdifferentialSet(np.array([[1.0, 0.0]]), np.array([1.0, 2.0, 3.0]))
    with pytest.raises(DimensionMismatch):
        subdifferential(get_function("cross"), [1.0], 0.0)
