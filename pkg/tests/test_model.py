import numpy as np
import pytest

from eberhard import linalg, model
from eberhard.model import (
    EberhardParams,
    EberhardState,
    EfficiencyPair,
    Settings,
    closed_form_B,
    courant_fischer_check,
    eberhard_state,
    j_per_n,
    operator_sum_B,
    settings_for,
    sigma_op,
    tau_op,
    zeta_max,
)

MAX_QUANTUM_J = -0.5 * (np.sqrt(2.0) - 1.0)


def random_params(rng):
    return EberhardParams(
        state=EberhardState(
            r=float(rng.uniform(0.0, 1.0)), omega_deg=float(rng.uniform(-180, 180))
        ),
        theta_deg=float(rng.uniform(-90, 90)),
        eff=EfficiencyPair(float(rng.uniform(0.05, 1.0)), float(rng.uniform(0.05, 1.0))),
        zeta=float(rng.uniform(0.0, 0.01)),
    )


class TestValidation:
    def test_efficiency_bounds(self):
        with pytest.raises(ValueError):
            EfficiencyPair(0.0, 0.5)
        with pytest.raises(ValueError):
            EfficiencyPair(0.5, 1.2)
        assert EfficiencyPair(1e-6, 1.0).swapped() == EfficiencyPair(1.0, 1e-6)

    def test_state_bounds(self):
        with pytest.raises(ValueError):
            EberhardState(r=-0.1, omega_deg=0.0)
        with pytest.raises(ValueError):
            EberhardState(r=1.1, omega_deg=0.0)
        with pytest.raises(ValueError):
            EberhardState(r=0.5, omega_deg=np.inf)

    def test_settings_require_finite(self):
        with pytest.raises(ValueError):
            Settings(0.0, np.nan, 0.0, 0.0)

    def test_zeta_nonnegative(self):
        with pytest.raises(ValueError):
            EberhardParams(
                state=EberhardState(0.5, 0.0),
                theta_deg=30.0,
                eff=EfficiencyPair(0.9, 0.9),
                zeta=-1e-9,
            )


class TestStateVector:
    def test_unit_norm(self, rng):
        for _ in range(100):
            v = eberhard_state(float(rng.uniform(0, 1)), float(rng.uniform(-360, 360)))
            assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-14)

    def test_r_one_is_phase_bell_pair(self):
        omega = np.deg2rad(37.0)
        v = eberhard_state(1.0, 37.0)
        expected = np.array([np.exp(-1j * omega), 0, 0, np.exp(1j * omega)]) / np.sqrt(2)
        np.testing.assert_allclose(v, expected, atol=1e-15)

    def test_r_zero_is_product_like_corner(self):
        np.testing.assert_allclose(
            eberhard_state(0.0, 0.0), np.array([1, -1, -1, 1]) / 2.0, atol=1e-15
        )


class TestPolarizerOperators:
    def test_phase_entry(self):
        op = sigma_op(30.0, 10.0)
        assert op[0, 1] == pytest.approx(np.exp(1j * np.deg2rad(40.0)), abs=1e-14)

    def test_squares_to_identity(self, rng):
        for _ in range(20):
            a, ref = rng.uniform(-180, 180, size=2)
            s = sigma_op(float(a), float(ref))
            t = tau_op(float(a), float(ref))
            np.testing.assert_allclose(s @ s, np.eye(4), atol=1e-14)
            np.testing.assert_allclose(t @ t, np.eye(4), atol=1e-14)

    def test_sides_commute(self, rng):
        a, b = rng.uniform(-180, 180, size=2)
        s = sigma_op(float(a), 0.0)
        t = tau_op(float(b), 0.0)
        np.testing.assert_allclose(s @ t, t @ s, atol=1e-14)


class TestOperatorConstruction:
    def test_closed_form_is_hermitian(self, rng):
        for _ in range(50):
            eff = EfficiencyPair(float(rng.uniform(0.05, 1)), float(rng.uniform(0.05, 1)))
            b = closed_form_B(
                eff, float(rng.uniform(0, 0.1)), float(rng.uniform(-90, 90)),
                float(rng.uniform(-90, 90)),
            )
            linalg.as_hermitian(b)  # raises on defect

    def test_operator_sum_matches_closed_form(self, rng):
        """Two constructions of the same operator: projector products vs
        the explicit entrywise matrix."""
        for _ in range(200):
            omega = float(rng.uniform(-180, 180))
            theta = float(rng.uniform(-90, 90))
            eff = EfficiencyPair(float(rng.uniform(0.05, 1)), float(rng.uniform(0.05, 1)))
            zeta = float(rng.uniform(0, 0.1))
            s = settings_for(omega, theta)
            lhs = operator_sum_B(s, eff, zeta)
            rhs = closed_form_B(eff, zeta, theta, theta)
            np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    def test_reference_shift_preserves_spectrum(self, rng):
        s = settings_for(20.0, 40.0)
        eff = EfficiencyPair(0.9, 0.8)
        base = linalg.herm_eig4(operator_sum_B(s, eff, 0.0)).values
        for _ in range(10):
            aref, bref = rng.uniform(-180, 180, size=2)
            shifted = linalg.herm_eig4(
                operator_sum_B(s, eff, 0.0, float(aref), float(bref))
            ).values
            np.testing.assert_allclose(shifted, base, atol=1e-12)

    def test_unequal_setting_differences(self):
        # closed form accepts d_alpha != d_beta; spot-check hermiticity and
        # the background shift on the diagonal
        eff = EfficiencyPair(0.85, 0.7)
        b0 = closed_form_B(eff, 0.0, 33.0, -21.0)
        b1 = closed_form_B(eff, 0.25, 33.0, -21.0)
        np.testing.assert_allclose(b1 - b0, 0.5 * np.eye(4), atol=1e-14)


class TestObjective:
    def test_matches_quadratic_form(self, rng):
        """The dispatched kernel must agree with the matrix route."""
        for _ in range(200):
            p = random_params(rng)
            direct = j_per_n(p)
            matrix = linalg.quad_form(
                closed_form_B(p.eff, p.zeta, p.theta_deg, p.theta_deg),
                eberhard_state(p.state.r, p.state.omega_deg),
            )
            assert direct == pytest.approx(matrix, rel=1e-12, abs=1e-14)

    def test_perfect_detector_anchor(self):
        """At unit efficiency the strongest violation is -(sqrt(2)-1)/2."""
        p = EberhardParams(
            state=EberhardState(1.0, 22.5),
            theta_deg=45.0,
            eff=EfficiencyPair(1.0, 1.0),
            zeta=0.0,
        )
        assert j_per_n(p) == pytest.approx(MAX_QUANTUM_J, abs=1e-12)

    def test_background_shifts_by_two_zeta(self, rng):
        for _ in range(20):
            p = random_params(rng)
            p0 = EberhardParams(p.state, p.theta_deg, p.eff, 0.0)
            assert j_per_n(p) == pytest.approx(j_per_n(p0) + 2.0 * p.zeta, abs=1e-12)

    def test_mirror_symmetry(self, rng):
        for _ in range(50):
            r = float(rng.uniform(0, 1))
            omega = float(rng.uniform(-180, 180))
            theta = float(rng.uniform(-90, 90))
            eff = EfficiencyPair(0.88, 0.67)
            plus = EberhardParams(EberhardState(r, omega), theta, eff, 0.0)
            minus = EberhardParams(EberhardState(r, -omega), -theta, eff, 0.0)
            assert j_per_n(plus) == pytest.approx(j_per_n(minus), rel=1e-12, abs=1e-14)

    def test_settings_derived_from_state_phase(self):
        s = settings_for(omega_deg=20.0, theta_deg=40.0)
        assert s.alpha1 == pytest.approx(-80.0)
        assert s.beta1 == pytest.approx(10.0)
        assert s.alpha1 - s.alpha2 == pytest.approx(40.0)
        assert s.beta1 - s.beta2 == pytest.approx(40.0)


class TestZetaMax:
    def test_no_violation_reports_zero(self):
        assert zeta_max(0.1) == (0.0, False)
        assert zeta_max(0.0) == (0.0, False)

    def test_violation_value(self):
        zm = zeta_max(-0.04)
        assert zm.violation
        assert zm.value == pytest.approx(0.02)

    def test_extinguishes_violation_exactly(self):
        state = EberhardState(0.607424, 18.5808)
        eff = EfficiencyPair(0.85, 0.85)
        j0 = j_per_n(EberhardParams(state, 41.5341, eff, 0.0))
        assert j0 < 0
        zm = zeta_max(j0)
        j_at_max = j_per_n(EberhardParams(state, 41.5341, eff, zm.value))
        assert j_at_max == pytest.approx(0.0, abs=1e-15)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            zeta_max(np.nan)


class TestCourantFischer:
    def test_optimum_sits_on_minimal_eigenvector(self):
        b = closed_form_B(EfficiencyPair(1.0, 1.0), 0.0, 45.0, 45.0)
        psi = eberhard_state(1.0, 22.5)
        chk = courant_fischer_check(b, psi)
        assert chk.lambda_min == pytest.approx(MAX_QUANTUM_J, abs=1e-12)
        assert 0.0 <= chk.rayleigh_gap < 1e-10
        assert abs(chk.quantum_variance) < 1e-10

    def test_generic_state_has_positive_gap(self, rng):
        b = closed_form_B(EfficiencyPair(0.9, 0.9), 0.0, 43.6381, 43.6381)
        psi = eberhard_state(0.3, 5.0)
        chk = courant_fischer_check(b, psi)
        assert chk.rayleigh_gap > 1e-3
        assert chk.quantum_variance > 0.0
