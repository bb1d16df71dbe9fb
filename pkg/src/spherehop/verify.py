"""Named invariant checks behind ``spherehop verify``.

Each check returns its maximum residual; it passes when the residual is at
most its tolerance. Checks are grouped so the CLI can run a subset.
"""

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import gegenbauer as geg
from . import operators as ops
from .models import (
    CauchySphereModel,
    GmGammaModel,
    cauchy_closed_form_image,
    gm_image_closed_form,
    gram_check,
    ladder_walk,
    sample_sphere,
)
from .quadrature import gauss_jacobi, project, rl_half_integral
from .special import beta, gamma, hyp2f1_terminating, pfaff_transform_check

GROUPS = ("special", "basis", "quadrature", "multipliers", "operators", "models", "roundtrip")
LAMBDAS = (0.5, 1.0, 1.5, 2.5)
GRID = np.linspace(-1.0, 1.0, 21)


def thread_count():
    """Worker count from SPHEREHOP_THREADS (unset or 0 means one per CPU)."""
    raw = os.environ.get("SPHEREHOP_THREADS", "0").strip() or "0"
    n = int(raw)
    if n < 0:
        raise ValueError(f"SPHEREHOP_THREADS must be >= 0, got {raw}")
    return n or (os.cpu_count() or 1)


@dataclass(frozen=True)
class CheckResult:
    name: str
    group: str
    max_residual: float
    tolerance: float
    passed: bool
    seconds: float


def _scaled(err, ref):
    return float(np.max(np.abs(err)) / max(1.0, float(np.max(np.abs(ref)))))


# --- special ---------------------------------------------------------------


def _gamma_recurrence():
    xs = np.linspace(0.5, 49.0, 97)
    return max(abs(gamma(x + 1) / (x * gamma(x)) - 1) for x in xs)


def _beta_gamma():
    pairs = [(0.5, 1.0), (0.5, 1.5), (2.5, 3.5), (7.0, 0.25)]
    return max(abs(beta(p, q) * gamma(p + q) / (gamma(p) * gamma(q)) - 1) for p, q in pairs)


def _pfaff():
    worst = 0.0
    for n in range(21):
        for b, c in [(2.3, 1.5), (n + 2.1, 1.25), (0.7, 3.5)]:
            lhs, rhs = pfaff_transform_check(n, b, c, np.linspace(-0.5, 1.0, 7), exact=True)
            worst = max(worst, _scaled(lhs - rhs, lhs))
    return worst


def _hyp_power():
    z = np.linspace(-1.0, 1.0, 11)
    return max(_scaled(hyp2f1_terminating(n, 3.7, 3.7, z) - (1 - z) ** n, 1.0) for n in range(15))


# --- basis -----------------------------------------------------------------


def _basis_lams():
    return (0.25, 0.5, 1.0, 1.5, 2.5)


def _reflection():
    worst = 0.0
    for lam in _basis_lams():
        for n in range(21):
            lhs, rhs = geg.reflection_check(lam, n, GRID)
            worst = max(worst, _scaled(lhs - rhs, rhs))
    return worst


def _derivative_ladder():
    worst = 0.0
    h = 1e-6
    x = np.linspace(-0.9, 0.9, 19)
    for lam in _basis_lams():
        for n in range(1, 21):
            fd = (geg.gegenbauer_eval(lam, n, x + h) - geg.gegenbauer_eval(lam, n, x - h)) / (2 * h)
            exact = 2 * lam * geg.gegenbauer_eval(lam + 1, n - 1, x)
            worst = max(worst, _scaled(fd - exact, exact))
    return worst


def _one_pm_x():
    return max(
        _scaled(geg.derivative_identity_residual(lam, n, GRID, which), geg.gegenbauer_eval(lam, n, 1.0) * (n + 1))
        for lam in _basis_lams()
        for n in range(21)
        for which in ("plus", "minus")
    )


def _gegenbauer_identity():
    return max(
        _scaled(geg.gegenbauer_identity_residual(lam, n, GRID), geg.gegenbauer_eval(lam, n + 1, 1.0))
        for lam in (1.25, 1.5, 2.0, 2.5)
        for n in range(21)
    )


def _chebyshev_identity():
    return max(float(np.max(geg.chebyshev_identity_residual(n, GRID))) / (n + 2) for n in range(21))


# --- quadrature ------------------------------------------------------------


def _jacobi_moments():
    worst = 0.0
    for a, b in [(-0.5, 0.0), (-0.5, 1.5), (0.5, 0.5), (-0.5, -0.3), (0.0, 0.0)]:
        rule = gauss_jacobi(12, a, b)
        for k in range(0, 23):
            # integral of (1+x)^k against the weight, via the beta function
            exact = 2.0 ** (a + b + k + 1) * beta(a + 1, b + k + 1)
            worst = max(worst, abs(rule.integrate(lambda x: (1 + x) ** k) / exact - 1))
    return worst


def _projection_roundtrip():
    rng = np.random.default_rng(7)
    worst = 0.0
    for lam in (0.0,) + LAMBDAS:
        s = geg.GegenbauerSeries(lam, rng.uniform(-1, 1, 25))
        worst = max(worst, float(np.max(np.abs(project(s, lam, 24).coefficients - s.coefficients))))
    return worst


def _half_integral_constant():
    worst = 0.0
    for lam in (0.0,) + LAMBDAS:
        got = ops.apply_I_quadrature("plus", lam, lambda t: np.ones_like(t))(GRID)
        worst = max(worst, _scaled(got - (1 + GRID) * beta(0.5, lam + 1), got))
    return worst


# --- multipliers -----------------------------------------------------------


def _theorem_scalars():
    worst = 0.0
    for lam in LAMBDAS:
        k = math.sqrt(math.pi) * gamma(lam) / gamma(lam + 0.5)
        m = math.sqrt(math.pi) * gamma(lam + 0.5) / gamma(lam)
        for n in range(21):
            e = geg.GegenbauerSeries.basis_vector(lam + 0.5, n)
            plus = ops.apply_CI_spectral("plus", lam, e).coefficients[n]
            minus = ops.apply_CI_spectral("minus", lam, e).coefficients[n + 1]
            worst = max(worst, abs(plus / (k * (n + 2 * lam) / (n + lam + 0.5)) - 1))
            worst = max(worst, abs(minus / (k * (n + 1) / (n + lam + 0.5)) - 1))
            if n >= 1:
                d = geg.GegenbauerSeries.basis_vector(lam, n)
                dp = ops.apply_CD_spectral("plus", lam, d).coefficients[n - 1]
                dm = ops.apply_CD_spectral("minus", lam, d).coefficients[n]
                worst = max(worst, abs(dp / (m * 2 * (n + 2 * lam) / (n + lam)) - 1))
                worst = max(worst, abs(dm / (m * 2 * n / (n + lam)) - 1))
    return worst


def _multiplier_signs():
    worst = 0.0
    for lam in (0.0, 0.1) + LAMBDAS + (7.5,):
        for sign in ("plus", "minus"):
            for arr in (ops.ci_multipliers(sign, lam, 10_000), ops.cd_multipliers(sign, lam, 10_000)):
                worst = max(worst, float(-np.min(arr)))
    return worst


def _ci_action():
    worst = 0.0
    for lam in LAMBDAS:
        k = ops.ci_constant(lam)
        for n in range(21):
            f = geg.GegenbauerSeries.basis_vector(lam + 0.5, n)
            for sign, degree, scalar in (
                ("plus", n, k * (n + 2 * lam) / (n + lam + 0.5)),
                ("minus", n + 1, k * (n + 1) / (n + lam + 0.5)),
            ):
                got = ops.apply_CI_quadrature(sign, lam, f)(GRID)
                want = scalar * geg.gegenbauer_eval(lam, degree, GRID)
                worst = max(worst, float(np.max(np.abs(got - want)) / np.max(np.abs(want))))
    return worst


def _cd_projection():
    rng = np.random.default_rng(11)
    worst = 0.0
    for lam in LAMBDAS:
        s = geg.GegenbauerSeries(lam, rng.uniform(0, 1, 13))
        for sign in ("plus", "minus"):
            got = project(ops.apply_CD_quadrature(sign, lam, s), lam + 0.5, 14).coefficients
            want = ops.apply_CD_spectral(sign, lam, s).padded(14)
            worst = max(worst, float(np.max(np.abs(got - want))))
    return worst


# --- operators -------------------------------------------------------------


def _closed_form_images():
    worst = 0.0
    for lam in (0.0,) + LAMBDAS:
        for n in range(21):
            f = geg.GegenbauerSeries.basis_vector(lam + 0.5, n)
            for side in ("plus", "minus"):
                got = ops.apply_I_quadrature(side, lam, f)(GRID)
                want = ops.i_image_closed_form(side, lam, n, GRID)
                worst = max(worst, float(np.max(np.abs(got - want)) / np.max(np.abs(want))))
            if lam > 0 and n > 0:
                g = geg.GegenbauerSeries.basis_vector(lam, n)
                for side in ("plus", "minus"):
                    got = ops.apply_D_quadrature(side, lam, g)(GRID)
                    want = ops.d_image_closed_form(side, lam, n, GRID)
                    worst = max(worst, float(np.max(np.abs(got - want)) / np.max(np.abs(want))))
    return worst


def _bateman():
    worst = 0.0
    x = np.linspace(-1.0, 1.0, 11)
    for lam in (0.25,) + LAMBDAS:
        for n in range(0, 21, 4):
            for side in ("plus", "minus"):
                quad = rl_half_integral(lambda t: geg.gegenbauer_eval(lam + 0.5, n, t), x, side, lam) / gamma(lam)
                closed = ops.bateman_integral(lam, n, x, side)
                worst = max(worst, _scaled(quad - closed, closed))
                if lam >= 1:
                    quad = rl_half_integral(lambda t: geg.gegenbauer_eval(lam - 0.5, n + 1, t), x, side, lam - 1) / gamma(lam)
                    closed = ops.corollary_integral(lam, n, x, side)
                    worst = max(worst, _scaled(quad - closed, closed))
    return worst


def _q_lemma():
    x = np.linspace(-0.9, 0.9, 19)
    worst = 0.0
    for lam in (1.0, 1.5, 2.5):
        for n in range(11):
            res, scale = ops.q_lemma_residual(lam, n, x)
            worst = max(worst, float(np.max(np.abs(res)) / max(1.0, float(np.max(scale)))))
    return worst


def _cross_implementation():
    rng = np.random.default_rng(5)
    worst = 0.0
    x = GRID
    for lam in (0.0,) + LAMBDAS:
        upper = geg.GegenbauerSeries(lam + 0.5, rng.uniform(-1, 1, 13))
        lower = geg.GegenbauerSeries(lam, rng.uniform(-1, 1, 13))
        norm_u = 1 + np.sum(np.abs(upper.coefficients))
        norm_l = 1 + np.sum(np.abs(lower.coefficients))
        for kind in ops.OperatorKind:
            if kind in (ops.OperatorKind.TWO_STEP_I, ops.OperatorKind.TWO_STEP_D):
                continue
            spec = ops.OperatorSpec(kind, lam)
            value = upper if kind.lowers_dimension else lower
            norm = norm_u if kind.lowers_dimension else norm_l
            spectral = ops.apply_operator(spec, value)(x)
            quad = ops.apply_operator(ops.OperatorSpec(kind, lam, "quadrature"), value)(x)
            worst = max(worst, float(np.max(np.abs(spectral - quad))) / norm)
    return worst


# --- models ----------------------------------------------------------------


def _cauchy_image():
    x = np.linspace(-1 + 1e-6, 1 - 1e-6, 21)
    worst = abs(cauchy_closed_form_image(0.5, 1.0) - math.pi / math.sqrt(5))
    for lam in (0.5, 1.0, 2.0):
        got = ops.apply_I_quadrature("plus", lam, CauchySphereModel(2 * lam + 3))(x)
        want = cauchy_closed_form_image(lam, x)
        worst = max(worst, float(np.max(np.abs(got - want)) / np.max(np.abs(want))))
    return worst


def _gm_image():
    worst = 0.0
    for m, g in [(0, 1.2), (1, 3.0), (2, 3.6), (1, 2.5)]:
        got = ops.apply_I_quadrature("plus", g - m - 1.5, GmGammaModel(m, g))(GRID)
        want = gm_image_closed_form(m, g, GRID)
        worst = max(worst, float(np.max(np.abs(got - want)) / np.max(np.abs(want))))
    return worst


def _ladder_rungs():
    for beta_exp in (4.0, 5.0, 7.0):
        yield from ladder_walk(CauchySphereModel(beta_exp), 5, 3, points=50, seeds=(0, 1, 2))


def _ladder_coefficients():
    # how far the smallest coefficient dips below zero, relative to the largest
    return max(
        max(0.0, -r.report.min_coefficient / float(np.max(np.abs(r.series.coefficients)))) for r in _ladder_rungs()
    )


def _ladder_gram():
    return max(max(0.0, -r.report.gram_min_eigenvalue / r.report.gram_max_eigenvalue) for r in _ladder_rungs())


def _negative_control():
    # smallest Gram eigenvalue ratio for a series with a negative coefficient;
    # the check passes when it is clearly negative
    s = geg.GegenbauerSeries(0.5, [1.0, 1.0, -1.0])
    reports = [gram_check(s, sample_sphere(3, 50, seed)) for seed in range(3)]
    return min(r.gram_min_eigenvalue / r.gram_max_eigenvalue for r in reports)


# --- round trips -----------------------------------------------------------


def _two_step():
    rng = np.random.default_rng(3)
    worst = 0.0
    for lam in (0.0, 0.5, 1.0, 2.5):
        s = geg.GegenbauerSeries(lam, rng.uniform(-1, 1, 10))
        back = ops.two_step_I(ops.two_step_D(s))
        expect = s - geg.GegenbauerSeries(lam, [float(s(-1.0))])
        worst = max(worst, float(np.max(np.abs(back.coefficients - expect.padded(back.degree)))))
    return worst


def _composite_scalars():
    worst = 0.0
    for lam in LAMBDAS:
        for n in range(21):
            e = geg.GegenbauerSeries.basis_vector(lam + 0.5, n)
            a = ops.compose([ops.OperatorSpec("CIplus", lam), ops.OperatorSpec("CDminus", lam)], e).coefficients[n]
            b = ops.compose([ops.OperatorSpec("CIminus", lam), ops.OperatorSpec("CDplus", lam)], e).coefficients[n]
            want_a = math.pi * 2 * n * (n + 2 * lam) / ((n + lam + 0.5) * (n + lam))
            want_b = math.pi * 2 * (n + 1) * (n + 2 * lam + 1) / ((n + lam + 0.5) * (n + lam + 1))
            worst = max(worst, abs(a - want_a) / max(1.0, want_a), abs(b - want_b) / want_b)
    return worst


CHECKS = (
    ("gamma_recurrence", "special", _gamma_recurrence, 1e-13),
    ("beta_gamma", "special", _beta_gamma, 1e-13),
    ("pfaff_transform", "special", _pfaff, 1e-10),
    ("hyp2f1_power", "special", _hyp_power, 1e-12),
    ("reflection", "basis", _reflection, 1e-12),
    ("derivative_ladder", "basis", _derivative_ladder, 1e-5),
    ("one_pm_x_expansion", "basis", _one_pm_x, 1e-11),
    ("gegenbauer_identity", "basis", _gegenbauer_identity, 1e-11),
    ("chebyshev_identity", "basis", _chebyshev_identity, 1e-12),
    ("jacobi_moments", "quadrature", _jacobi_moments, 1e-11),
    ("projection_roundtrip", "quadrature", _projection_roundtrip, 1e-10),
    ("half_integral_constant", "quadrature", _half_integral_constant, 1e-12),
    ("theorem_scalars", "multipliers", _theorem_scalars, 1e-13),
    ("multiplier_signs", "multipliers", _multiplier_signs, 0.0),
    ("ci_action", "multipliers", _ci_action, 1e-8),
    ("cd_projection", "multipliers", _cd_projection, 1e-6),
    ("closed_form_images", "operators", _closed_form_images, 1e-9),
    ("bateman_corollary", "operators", _bateman, 1e-9),
    ("q_lemma", "operators", _q_lemma, 1e-5),
    ("cross_implementation", "operators", _cross_implementation, 1e-8),
    ("cauchy_image", "models", _cauchy_image, 1e-8),
    ("gm_image", "models", _gm_image, 1e-8),
    ("ladder_coefficients", "models", _ladder_coefficients, 1e-10),
    ("ladder_gram", "models", _ladder_gram, 1e-8),
    ("negative_control", "models", _negative_control, -1e-4),
    ("two_step_roundtrip", "roundtrip", _two_step, 1e-12),
    ("composite_scalars", "roundtrip", _composite_scalars, 1e-12),
)


def _run_one(check):
    name, group, fn, tol = check
    start = time.perf_counter()
    residual = float(fn())
    elapsed = time.perf_counter() - start
    return CheckResult(name, group, residual, tol, bool(residual <= tol), round(elapsed, 3))


def run_checks(only=None, threads=None):
    """Run every check whose group or name is in ``only`` (all when ``None``).

    Results come back in declaration order regardless of thread count.
    """
    selected = [c for c in CHECKS if only is None or c[1] in only or c[0] in only]
    if only is not None:
        unknown = set(only) - {c[0] for c in CHECKS} - set(GROUPS)
        if unknown:
            raise ValueError(f"unknown check or group: {', '.join(sorted(unknown))}")
    workers = threads or thread_count()
    with ThreadPoolExecutor(max_workers=max(1, min(workers, len(selected) or 1))) as pool:
        return list(pool.map(_run_one, selected))


def summary_dict(results):
    return {
        "passed": all(r.passed for r in results),
        "checks": [asdict(r) for r in results],
    }
