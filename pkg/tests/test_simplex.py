import numpy as np
import pytest

from eberhard.simplex import Bounds, SimplexConfig, multi_start, nelder_mead


def rosenbrock(x):
    return float((1.0 - x[0]) ** 2 + 100.0 * (x[1] - x[0] ** 2) ** 2)


class Recorder:
    """Wraps an objective and keeps every evaluated point and value."""

    def __init__(self, fn):
        self.fn = fn
        self.points = []
        self.values = []

    def __call__(self, x):
        v = float(self.fn(x))
        self.points.append(np.array(x, dtype=float))
        self.values.append(v)
        return v


class TestNelderMead:
    @pytest.mark.parametrize("dim", [1, 2, 3, 5])
    def test_quadratic_bowl(self, dim, rng):
        center = rng.uniform(-2.0, 2.0, size=dim)
        res = nelder_mead(lambda x: float(np.sum((x - center) ** 2)), np.zeros(dim))
        assert res.converged
        np.testing.assert_allclose(res.x, center, atol=1e-7)
        assert res.f < 1e-13

    def test_rosenbrock_classic_start(self):
        res = nelder_mead(rosenbrock, np.array([-1.2, 1.0]))
        assert res.converged
        np.testing.assert_allclose(res.x, [1.0, 1.0], atol=1e-6)

    @pytest.mark.parametrize("scale", [1e-2, 1.0, 1e2])
    def test_objective_scale_invariance_of_argmin(self, scale):
        res = nelder_mead(
            lambda x: scale * ((x[0] - 3.0) ** 2 + 2.0 * (x[1] + 1.0) ** 2),
            np.array([0.0, 0.0]),
        )
        assert res.converged
        np.testing.assert_allclose(res.x, [3.0, -1.0], atol=1e-6)

    def test_reported_f_is_best_evaluation_seen(self):
        rec = Recorder(rosenbrock)
        res = nelder_mead(rec, np.array([0.5, -0.5]))
        assert res.f == min(rec.values)
        assert res.f == rosenbrock(res.x)

    def test_nan_region_is_avoided(self):
        def partial(x):
            if x[0] < 0.0:
                return float("nan")
            return (x[0] - 1.0) ** 2

        res = nelder_mead(partial, np.array([0.05]))
        assert res.converged
        assert res.x[0] == pytest.approx(1.0, abs=1e-7)

    def test_iteration_budget_respected(self):
        cfg = SimplexConfig(max_iter=3)
        res = nelder_mead(rosenbrock, np.array([-1.2, 1.0]), cfg)
        assert not res.converged
        assert res.iterations <= 3

    def test_deterministic_rerun(self):
        a = nelder_mead(rosenbrock, np.array([-1.2, 1.0]))
        b = nelder_mead(rosenbrock, np.array([-1.2, 1.0]))
        assert np.array_equal(a.x, b.x)
        assert a.f == b.f and a.iterations == b.iterations


class TestBoundsHandling:
    def test_all_evaluations_stay_in_box(self):
        box = Bounds.box([(-1.0, 2.0), (0.5, 4.0)])
        rec = Recorder(lambda x: (x[0] - 5.0) ** 2 + (x[1] - 0.6) ** 2)
        res = nelder_mead(rec, np.array([0.0, 1.0]), bounds=box)
        pts = np.array(rec.points)
        assert np.all(pts[:, 0] >= -1.0) and np.all(pts[:, 0] <= 2.0)
        assert np.all(pts[:, 1] >= 0.5) and np.all(pts[:, 1] <= 4.0)
        assert res.x[0] == pytest.approx(2.0, abs=1e-7)  # pinned to the face
        assert res.x[1] == pytest.approx(0.6, abs=1e-6)

    def test_boundary_optimum_converges(self):
        # a simplex squeezed against a face must not restart forever
        box = Bounds.box([(0.0, 4.0)])
        res = nelder_mead(lambda x: (x[0] + 2.0) ** 2, np.array([3.0]), bounds=box)
        assert res.converged
        assert res.x[0] == pytest.approx(0.0, abs=1e-8)

    def test_start_at_upper_bound_flips_step_inward(self):
        box = Bounds.box([(0.0, 1.0)])
        rec = Recorder(lambda x: (x[0] - 0.25) ** 2)
        res = nelder_mead(rec, np.array([1.0]), bounds=box)
        pts = np.array(rec.points)
        assert np.all((pts >= 0.0) & (pts <= 1.0))
        assert res.x[0] == pytest.approx(0.25, abs=1e-7)

    def test_degenerate_start_box_corner(self):
        box = Bounds.box([(0.0, 1.0), (0.0, 1.0)])
        res = nelder_mead(
            lambda x: (x[0] - 0.5) ** 2 + (x[1] - 0.5) ** 2,
            np.array([0.0, 0.0]),
            bounds=box,
        )
        assert res.converged
        np.testing.assert_allclose(res.x, [0.5, 0.5], atol=1e-7)

    def test_bounds_validation(self):
        with pytest.raises(ValueError):
            Bounds(np.array([1.0]), np.array([0.0]))
        with pytest.raises(ValueError):
            Bounds(np.array([np.nan]), np.array([1.0]))


class TestIllConditioned:
    def test_anisotropic_quadratic_4d(self):
        scales = np.array([1.0, 1e2, 1e4, 1e6])
        res = nelder_mead(
            lambda x: float(np.sum(scales * x**2)),
            np.array([1.0, 1.0, 1.0, 1.0]),
            SimplexConfig(max_iter=20000),
        )
        assert res.converged
        assert res.f < 1e-10

    def test_flat_valley_restarts_recover(self):
        # the first term collapses the simplex onto a hyperplane; the tiny
        # second term is only visible after a restart re-inflates it
        def valley(x):
            s = x[0] + x[1] + x[2]
            return s * s + 1e-8 * ((x[0] - 1.0) ** 2 + x[1] ** 2)

        res = nelder_mead(valley, np.array([2.0, 2.0, 2.0]), SimplexConfig(max_iter=20000))
        assert res.converged
        assert res.f < 1e-12


class TestMultiStart:
    def test_single_start_equals_plain_run(self):
        box = Bounds.box([(-2.0, 2.0), (-1.0, 3.0)])
        seed = 42
        ms = multi_start(rosenbrock, box, 1, seed)
        x0 = box.lower + np.random.default_rng(seed).random((1, 2))[0] * (
            box.upper - box.lower
        )
        single = nelder_mead(rosenbrock, x0, None, box)
        assert np.array_equal(ms.x, single.x)
        assert ms.f == single.f
        assert ms.iterations == single.iterations

    def test_finds_global_among_local_minima(self):
        # double well: global at x = 2, local at x = -1.8
        def well(x):
            return float((x[0] ** 2 - 4.0) ** 2 + 0.3 * (x[0] - 2.0) ** 2 + (x[1]) ** 2)

        box = Bounds.box([(-3.0, 3.0), (-1.0, 1.0)])
        res = multi_start(well, box, 12, 7)
        assert res.x[0] == pytest.approx(2.0, abs=1e-4)

    def test_totals_accumulate_over_runs(self):
        box = Bounds.box([(-2.0, 2.0), (-1.0, 3.0)])
        one = multi_start(rosenbrock, box, 1, 0)
        many = multi_start(rosenbrock, box, 6, 0)
        assert many.iterations > one.iterations

    def test_seeded_rerun_is_identical(self):
        box = Bounds.box([(-2.0, 2.0), (-1.0, 3.0)])
        a = multi_start(rosenbrock, box, 5, 123)
        b = multi_start(rosenbrock, box, 5, 123)
        assert np.array_equal(a.x, b.x) and a.f == b.f

    def test_requires_finite_bounds(self):
        with pytest.raises(ValueError, match="finite"):
            multi_start(rosenbrock, Bounds.unbounded(2), 3, 0)

    def test_rejects_zero_starts(self):
        box = Bounds.box([(-1.0, 1.0)])
        with pytest.raises(ValueError):
            multi_start(lambda x: float(x[0] ** 2), box, 0, 0)


class TestConfigValidation:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"reflection": 0.0},
            {"expansion": 1.0},
            {"contraction": 1.0},
            {"shrink": 0.0},
            {"f_tol": 0.0},
            {"x_tol": -1.0},
            {"max_iter": 0},
            {"initial_step": 0.0},
            {"initial_step": (0.1, float("inf"))},
        ],
    )
    def test_bad_values_rejected(self, kwargs):
        with pytest.raises(ValueError):
            SimplexConfig(**kwargs)

    def test_step_dimension_mismatch(self):
        cfg = SimplexConfig(initial_step=(0.1, 0.2, 0.3))
        with pytest.raises(ValueError, match="dimension"):
            nelder_mead(lambda x: float(np.sum(x**2)), np.zeros(2), cfg)
