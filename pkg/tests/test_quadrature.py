import math
import threading

import numpy as np
import pytest
from scipy import special as sp
from scipy.integrate import quad

from spherehop.errors import DomainError
from spherehop.gegenbauer import GegenbauerSeries
from spherehop.quadrature import (
    chebyshev_gauss,
    gauss_jacobi,
    gauss_legendre,
    halfweight_fractional_integral,
    project,
    rl_half_integral,
)
from spherehop.special import beta
from spherehop.zonal import ZonalFunction


@pytest.mark.parametrize("alpha, beta_", [(0.0, 0.0), (-0.5, 0.0), (-0.5, 2.5), (0.5, -0.5), (-0.5, -0.3), (3.0, 1.0)])
@pytest.mark.parametrize("order", [1, 2, 7, 40])
def test_gauss_jacobi_matches_scipy(order, alpha, beta_):
    rule = gauss_jacobi(order, alpha, beta_)
    nodes, weights = sp.roots_jacobi(order, alpha, beta_)
    np.testing.assert_allclose(rule.nodes, nodes, atol=1e-13)
    np.testing.assert_allclose(rule.weights, weights, rtol=1e-11)


def test_gauss_jacobi_exactness():
    rule = gauss_jacobi(10, -0.5, 1.5)
    for k in range(20):
        exact = 2.0 ** (1 + k + 1) * beta(0.5, 1.5 + k + 1)
        assert rule.integrate(lambda x: (1 + x) ** k) == pytest.approx(exact, rel=1e-12)


def test_rules_are_immutable_and_cached():
    rule = gauss_jacobi(8, -0.5, 0.25)
    assert rule is gauss_jacobi(8, -0.5, 0.25)
    with pytest.raises(ValueError):
        rule.nodes[0] = 0.0


def test_gauss_jacobi_rejects_bad_input():
    with pytest.raises(DomainError):
        gauss_jacobi(0, 0.0, 0.0)
    with pytest.raises(DomainError):
        gauss_jacobi(5, -1.0, 0.0)


def test_legendre_and_chebyshev_rules():
    np.testing.assert_allclose(gauss_legendre(9).nodes, sp.roots_legendre(9)[0], atol=1e-14)
    rule = chebyshev_gauss(12)
    assert rule.integrate(lambda x: x**2) == pytest.approx(math.pi / 2, rel=1e-14)
    assert np.all(np.diff(rule.nodes) > 0)


@pytest.mark.parametrize("lam", [0.0, 0.5, 1.0, 2.5])
def test_projection_round_trip(lam):
    rng = np.random.default_rng(1)
    s = GegenbauerSeries(lam, rng.uniform(-1, 1, 41))
    np.testing.assert_allclose(project(s, lam, 40).coefficients, s.coefficients, atol=1e-12)


def test_projection_of_smooth_function():
    f = ZonalFunction(np.exp)
    s = project(f, 1.0, 20)
    x = np.linspace(-1, 1, 31)
    np.testing.assert_allclose(s(x), np.exp(x), atol=1e-13)
    # Chebyshev coefficients of exp are 2 I_n(1) (and I_0(1) for n = 0)
    t = project(f, 0.0, 15)
    expected = 2 * sp.iv(np.arange(16), 1.0)
    expected[0] /= 2
    np.testing.assert_allclose(t.coefficients, expected, atol=1e-14)


def test_projection_rejects_bad_degree():
    with pytest.raises(DomainError):
        project(np.cos, 1.0, -1)
    with pytest.raises(DomainError):
        project(np.cos, -0.5, 3)


@pytest.mark.parametrize("side", ["plus", "minus"])
@pytest.mark.parametrize("exponent", [-0.4, 0.0, 0.5, 2.25])
def test_rl_integral_against_quadpack(side, exponent):
    x = 0.3
    # QUADPACK's algebraic-weight routine handles both endpoint singularities
    if side == "plus":
        ref = quad(lambda t: np.cos(3 * t), -1, x, weight="alg", wvar=(exponent, -0.5), epsabs=1e-14)[0]
    else:
        ref = quad(lambda t: np.cos(3 * t), x, 1, weight="alg", wvar=(-0.5, exponent), epsabs=1e-14)[0]
    assert rl_half_integral(lambda t: np.cos(3 * t), x, side, exponent) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("lam", [0.0, 0.5, 1.0, 2.5])
def test_half_integral_of_constant(lam):
    x = np.linspace(-1, 1, 21)
    got = halfweight_fractional_integral(lambda t: np.ones_like(t), x, "plus", lam)
    np.testing.assert_allclose(got, (1 + x) * beta(0.5, lam + 1), rtol=1e-13, atol=1e-15)
    assert got[0] == 0.0
    assert halfweight_fractional_integral(lambda t: np.ones_like(t), 1.0, "minus", lam) == 0.0


def test_half_integral_domain():
    with pytest.raises(DomainError):
        halfweight_fractional_integral(np.cos, 0.0, "plus", -0.5)
    with pytest.raises(DomainError):
        halfweight_fractional_integral(np.cos, 1.5, "plus", 1.0)
    with pytest.raises(ValueError):
        halfweight_fractional_integral(np.cos, 0.0, "left", 1.0)


def test_half_integral_thread_safe():
    x = np.linspace(-1, 1, 50)
    ref = halfweight_fractional_integral(np.exp, x, "minus", 1.5)
    results = [None] * 8

    def work(i):
        results[i] = halfweight_fractional_integral(np.exp, x, "minus", 1.5)

    threads = [threading.Thread(target=work, args=(i,)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    for r in results:
        np.testing.assert_array_equal(r, ref)
