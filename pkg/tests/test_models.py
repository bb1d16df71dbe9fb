import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import spherehop.models as models
from spherehop.errors import DomainError
from spherehop.gegenbauer import GegenbauerSeries
from spherehop.models import (
    INCONSISTENT,
    PD_CONSISTENT,
    STRICT_PD_CONSISTENT,
    CauchySphereModel,
    GmGammaModel,
    SpherePointSet,
    cauchy_closed_form_image,
    cauchy_eval,
    check_pd_coefficients,
    gm_eval,
    gm_image_closed_form,
    gram_check,
    ladder_walk,
    report_notes,
    sample_sphere,
)
from spherehop.operators import apply_CI_spectral, apply_I_quadrature
from spherehop.quadrature import project
from spherehop.zonal import ZonalFunction

GRID = np.linspace(-1, 1, 21)


class TestModelValues:
    def test_cauchy(self):
        assert cauchy_eval(3.7, 1.0) == 1.0
        assert cauchy_eval(2, -1.0) == pytest.approx(0.2)
        assert cauchy_eval(4, -1.0) == pytest.approx(0.04)
        np.testing.assert_allclose(CauchySphereModel(5)(GRID), (3 - 2 * GRID) ** -2.5)

    def test_gm(self):
        assert gm_eval(1, 1, -1.0) == 0.0
        assert gm_eval(0, 2, 1.0) == 1.0
        assert GmGammaModel(2, 1.5)(0.5) == pytest.approx(2.25 * 2**-1.5)

    @pytest.mark.parametrize("model", [CauchySphereModel(3.3), GmGammaModel(0, 1.7), GmGammaModel(2, 2.5)])
    def test_derivatives(self, model):
        x = np.linspace(-0.9, 0.9, 11)
        h = 1e-6
        fd = (model(x + h) - model(x - h)) / (2 * h)
        np.testing.assert_allclose(model.derivative(x), fd, rtol=1e-7)

    def test_parameter_validation(self):
        with pytest.raises(DomainError):
            CauchySphereModel(0)
        with pytest.raises(DomainError):
            GmGammaModel(-1, 2)
        with pytest.raises(DomainError):
            GmGammaModel(1, 0)


class TestClosedForms:
    def test_cauchy_spot_value(self):
        assert cauchy_closed_form_image(0.5, 1.0) == pytest.approx(math.pi / math.sqrt(5), rel=1e-14)
        assert cauchy_closed_form_image(1.3, -1.0) == 0.0

    @pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
    def test_cauchy_matches_quadrature(self, lam):
        x = np.linspace(-1 + 1e-6, 1 - 1e-6, 21)
        got = apply_I_quadrature("plus", lam, CauchySphereModel(2 * lam + 3))(x)
        np.testing.assert_allclose(got, cauchy_closed_form_image(lam, x), rtol=1e-8)

    def test_gm_quadrature_spot(self):
        got = apply_I_quadrature("plus", 0.5, GmGammaModel(1, 3))(0.0)
        # mpmath quadrature of the defining integral
        assert got == pytest.approx(0.033798155633113432475, rel=1e-8)
        assert gm_image_closed_form(1, 3, 0.0) == pytest.approx(0.033798155633113432475, rel=1e-13)

    @pytest.mark.parametrize("m, g", [(0, 1.2), (1, 3.0), (2, 3.6), (3, 4.75)])
    def test_gm_matches_quadrature(self, m, g):
        got = apply_I_quadrature("plus", g - m - 1.5, GmGammaModel(m, g))(GRID)
        np.testing.assert_allclose(got, gm_image_closed_form(m, g, GRID), rtol=1e-8)
        assert gm_image_closed_form(m, g, -1.0) == 0.0

    def test_gm_rejects_non_integrable_order(self):
        with pytest.raises(DomainError):
            gm_image_closed_form(1, 2.0, 0.0)

    @pytest.mark.parametrize("lam", [1.5, 2.0])
    def test_double_application(self, lam):
        # applying the order-(lam - 3/2) integral to the order-lam image of the Cauchy model
        first = apply_I_quadrature("plus", lam, CauchySphereModel(2 * lam + 3))
        second = apply_I_quadrature("plus", lam - 1.5, first)(GRID)
        want = (math.pi / 5) * math.gamma(lam + 0.5) / math.gamma(lam + 1.5) * (GRID + 1) ** 2 * (3 - 2 * GRID) ** -(lam + 0.5)
        np.testing.assert_allclose(second, want, rtol=1e-10, atol=1e-15)


class TestCoefficientCheck:
    def test_nonnegative_series(self):
        r = check_pd_coefficients(GegenbauerSeries(1.0, [1.0, 0.0, 2.0]))
        assert r.verdict == PD_CONSISTENT
        assert (r.has_positive_even_tail, r.has_positive_odd_tail) == (True, False)

    def test_negative_coefficient(self):
        r = check_pd_coefficients(GegenbauerSeries(1.0, [1.0, -0.5]))
        assert r.verdict == INCONSISTENT
        assert r.negative_coefficient_indices == (1,)
        assert r.min_coefficient == -0.5

    def test_tiny_negative_within_tolerance(self):
        r = check_pd_coefficients(GegenbauerSeries(1.0, [1.0, 1.0, -1e-13]))
        assert r.verdict == STRICT_PD_CONSISTENT

    def test_projected_cauchy_is_strict(self):
        s = project(CauchySphereModel(5), 1.0, 20)
        r = check_pd_coefficients(s)
        assert r.verdict == STRICT_PD_CONSISTENT
        assert r.truncation_degree == 20
        assert np.all(s.coefficients > 0)

    def test_circle_never_strict(self):
        r = check_pd_coefficients(GegenbauerSeries(0.0, [1.0, 1.0, 1.0]))
        assert r.sphere_dimension == 2
        assert r.verdict == PD_CONSISTENT
        assert any("necessary but not sufficient" in note for note in report_notes(r))

    def test_json_field_names(self):
        r = check_pd_coefficients(GegenbauerSeries(1.0, [1.0]))
        assert list(r.to_dict()) == [
            "lambda",
            "truncationDegree",
            "minCoefficient",
            "negativeCoefficientIndices",
            "hasPositiveEvenTail",
            "hasPositiveOddTail",
            "gramMinEigenvalue",
            "gramMaxEigenvalue",
            "pointCount",
            "sphereDimension",
            "verdict",
        ]
        json.dumps(r.to_dict())


class TestSampling:
    def test_unit_norm_and_determinism(self):
        a = sample_sphere(4, 100, seed=3)
        b = sample_sphere(4, 100, seed=3)
        np.testing.assert_array_equal(a.points, b.points)
        np.testing.assert_allclose(np.linalg.norm(a.points, axis=1), 1.0, atol=1e-12)
        assert a.count == 100 and a.dimension == 4

    def test_symmetry(self):
        pts = sample_sphere(3, 200, seed=0).points
        dots = (pts @ pts.T)[np.triu_indices(200, 1)]
        assert abs(dots.mean()) < 0.05

    def test_rejects_bad_input(self):
        with pytest.raises(DomainError):
            sample_sphere(1, 10, 0)
        with pytest.raises(DomainError):
            sample_sphere(3, 1, 0)

    def test_crowding_fails_after_retries(self, monkeypatch):
        # five points on a circle cannot be pairwise 3 radians apart
        monkeypatch.setattr(models, "MIN_SEPARATION", 3.0)
        with pytest.raises(RuntimeError):
            sample_sphere(2, 5, 0, max_retries=5)


class TestGram:
    def test_constant_kernel(self):
        pts = sample_sphere(3, 30, 1)
        r = gram_check(ZonalFunction.constant(1.0), pts)
        assert r.gram_max_eigenvalue == pytest.approx(30.0)
        assert abs(r.gram_min_eigenvalue) < 1e-12
        assert r.verdict == PD_CONSISTENT

    def test_linear_kernel_on_two_sphere(self):
        r = gram_check(lambda x: x, sample_sphere(3, 40, 2))
        assert r.gram_min_eigenvalue >= -1e-10 * r.gram_max_eigenvalue

    def test_circle_negative_control(self):
        # three points 120 degrees apart, kernel T_2 - 1/2 (negative constant term)
        angles = np.array([0, 2 * np.pi / 3, 4 * np.pi / 3])
        pts = SpherePointSet(2, np.column_stack([np.cos(angles), np.sin(angles)]))
        r = gram_check(lambda x: 2 * x**2 - 1.5, pts)
        assert r.gram_min_eigenvalue == pytest.approx(-1.5)
        assert r.gram_max_eigenvalue == pytest.approx(1.5)
        assert r.verdict == INCONSISTENT

    def test_non_finite_kernel_names_pair(self):
        with pytest.raises(ValueError, match="pair"), np.errstate(divide="ignore"):
            gram_check(lambda x: 1 / (1 - x), sample_sphere(3, 5, 0))

    @settings(max_examples=20, deadline=None)
    @given(
        st.sampled_from([3, 4, 5]),
        st.lists(st.floats(0, 1), min_size=1, max_size=21),
        st.integers(0, 10_000),
    )
    def test_nonnegative_coefficients_give_psd_gram(self, d, coeffs, seed):
        s = GegenbauerSeries((d - 2) / 2, coeffs)
        r = gram_check(s, sample_sphere(d, 50, seed))
        assert r.gram_min_eigenvalue >= -1e-8 * abs(r.gram_max_eigenvalue)


class TestLadder:
    def test_same_dimension_is_single_rung(self):
        rungs = ladder_walk(CauchySphereModel(5), 4, 4, points=0)
        assert len(rungs) == 1 and rungs[0].dimension == 4

    def test_one_step_down_uses_printed_scalar(self):
        e2 = GegenbauerSeries.basis_vector(1.0, 2)
        rungs = ladder_walk(e2, 4, 3, points=0)
        lam, n = 0.5, 2
        k = math.sqrt(math.pi) * math.gamma(lam) / math.gamma(lam + 0.5)
        assert rungs[1].series.lam == 0.5
        assert rungs[1].series.coefficients[2] == pytest.approx(k * (n + 2 * lam) / (n + lam + 0.5), rel=1e-14)

    @pytest.mark.parametrize("n", [1, 2, 5])
    def test_round_trip_scalar(self, n):
        rungs = ladder_walk(GegenbauerSeries.basis_vector(0.5, n), 3, 4, points=0)
        back = ladder_walk(rungs[-1].series, 4, 3, points=0)[-1].series
        lam = 0.5
        want = math.pi * 2 * n * (n + 2 * lam) / ((n + lam + 0.5) * (n + lam))
        assert back.coefficients[n] == pytest.approx(want, rel=1e-13)

    def test_rejects_wrong_start_basis(self):
        with pytest.raises(DomainError):
            ladder_walk(GegenbauerSeries(1.0, [1.0]), 3, 2)

    @pytest.mark.parametrize("beta_exp", [4.0, 5.0, 7.0])
    def test_cauchy_descent_stays_pd(self, beta_exp):
        for rung in ladder_walk(CauchySphereModel(beta_exp), 5, 3, points=50, seeds=(0, 1, 2)):
            r = rung.report
            assert r.min_coefficient >= -1e-10 * np.max(np.abs(rung.series.coefficients))
            assert r.gram_min_eigenvalue >= -1e-8 * r.gram_max_eigenvalue
            assert r.verdict != INCONSISTENT

    def test_ascent_stays_pd(self):
        for rung in ladder_walk(CauchySphereModel(5.0), 3, 6, points=30):
            assert rung.report.verdict == STRICT_PD_CONSISTENT

    def test_positive_image_of_positive_model(self):
        s = project(CauchySphereModel(5.0), 1.5, 24)
        out = apply_CI_spectral("plus", 1.0, s)
        assert np.all(out.coefficients > 0)
