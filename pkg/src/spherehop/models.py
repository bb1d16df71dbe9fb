"""Zonal covariance models, positive-definiteness checks and the dimension ladder."""

import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np

from .errors import DomainError
from .gegenbauer import GegenbauerSeries
from .operators import apply_CD_spectral, apply_CI_spectral
from .quadrature import project
from .special import gamma
from .zonal import ZonalFunction, as_zonal

DEFAULT_COEFF_TOL = 1e-10
DEFAULT_GRAM_TOL = 1e-8
DEFAULT_LADDER_DEGREE = 32
MIN_SEPARATION = 1e-6

PD_CONSISTENT = "pd-consistent"
STRICT_PD_CONSISTENT = "strict-pd-consistent"
INCONSISTENT = "inconsistent"

__all__ = [
    "CauchySphereModel",
    "GmGammaModel",
    "cauchy_eval",
    "gm_eval",
    "cauchy_closed_form_image",
    "gm_image_closed_form",
    "PdReport",
    "check_pd_coefficients",
    "SpherePointSet",
    "sample_sphere",
    "gram_check",
    "combine_reports",
    "report_notes",
    "LadderRung",
    "ladder_walk",
]


def cauchy_eval(beta, tau):
    """``(3 - 2 tau)^(-beta / 2)``: the Cauchy model restricted to the sphere."""
    tau = np.asarray(tau, dtype=float)
    out = np.power(3.0 - 2.0 * tau, -0.5 * beta)
    return float(out) if out.ndim == 0 else out


def gm_eval(m, gamma_exp, x):
    """``(x + 1)^m (3 - 2x)^(-gamma_exp)``."""
    x = np.asarray(x, dtype=float)
    out = np.power(x + 1.0, m) * np.power(3.0 - 2.0 * x, -gamma_exp)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class CauchySphereModel:
    beta: float

    def __post_init__(self):
        if not self.beta > 0:
            raise DomainError(f"beta must be positive, got {self.beta}")

    def __call__(self, tau):
        return cauchy_eval(self.beta, tau)

    def derivative(self, tau):
        tau = np.asarray(tau, dtype=float)
        return self.beta * np.power(3.0 - 2.0 * tau, -0.5 * self.beta - 1.0)

    def as_zonal(self):
        return ZonalFunction(self.__call__, derivative=self.derivative, label=f"cauchy:{self.beta:g}")


@dataclass(frozen=True)
class GmGammaModel:
    m: int
    gamma_exp: float

    def __post_init__(self):
        if self.m < 0 or int(self.m) != self.m:
            raise DomainError(f"m must be a nonnegative integer, got {self.m}")
        if not self.gamma_exp > 0:
            raise DomainError(f"gamma_exp must be positive, got {self.gamma_exp}")
        object.__setattr__(self, "m", int(self.m))

    def __call__(self, x):
        return gm_eval(self.m, self.gamma_exp, x)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        m, g = self.m, self.gamma_exp
        tail = 2.0 * g * np.power(x + 1.0, m) * np.power(3.0 - 2.0 * x, -g - 1.0)
        if m == 0:
            return tail
        return m * np.power(x + 1.0, m - 1) * np.power(3.0 - 2.0 * x, -g) + tail

    def as_zonal(self):
        return ZonalFunction(self.__call__, derivative=self.derivative, label=f"gm:{self.m}:{self.gamma_exp:g}")


def cauchy_closed_form_image(lam, x):
    """Closed form of the plus-side half-step integral of order ``lam`` applied to the Cauchy model with beta = 2 lam + 3."""
    if lam < 0:
        raise DomainError(f"lam must be nonnegative, got {lam}")
    x = np.asarray(x, dtype=float)
    scale = math.sqrt(math.pi / 5) * gamma(lam + 1) / gamma(lam + 1.5)
    out = scale * (x + 1.0) * np.power(3.0 - 2.0 * x, -(lam + 1.0))
    return float(out) if out.ndim == 0 else out


def gm_image_closed_form(m, gamma_exp, x):
    """Closed form of the plus-side integral of order ``gamma_exp - m - 3/2`` applied to g_(m, gamma_exp).

    The order must exceed -1/2.
    """
    order = gamma_exp - m - 1.5
    if not order > -0.5:
        raise DomainError(f"integral order gamma_exp - m - 3/2 = {order} must exceed -1/2")
    x = np.asarray(x, dtype=float)
    scale = math.sqrt(math.pi / 5) * gamma(gamma_exp - 0.5) / gamma(gamma_exp)
    out = scale * np.power(x + 1.0, m + 1) * np.power(3.0 - 2.0 * x, -(gamma_exp - 0.5))
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class PdReport:
    """Outcome of the coefficient-sign test and/or the Gram-matrix test.

    The strict verdict uses a truncation window: it asks for a positive
    coefficient at some even and some odd index up to the truncation degree.
    Fields of a test that was not run are ``None``.
    """

    verdict: str
    sphere_dimension: int
    lam: Optional[float] = None
    truncation_degree: Optional[int] = None
    min_coefficient: Optional[float] = None
    negative_coefficient_indices: Tuple[int, ...] = ()
    has_positive_even_tail: Optional[bool] = None
    has_positive_odd_tail: Optional[bool] = None
    gram_min_eigenvalue: Optional[float] = None
    gram_max_eigenvalue: Optional[float] = None
    point_count: Optional[int] = None

    def to_dict(self):
        return {
            "lambda": self.lam,
            "truncationDegree": self.truncation_degree,
            "minCoefficient": self.min_coefficient,
            "negativeCoefficientIndices": list(self.negative_coefficient_indices),
            "hasPositiveEvenTail": self.has_positive_even_tail,
            "hasPositiveOddTail": self.has_positive_odd_tail,
            "gramMinEigenvalue": self.gram_min_eigenvalue,
            "gramMaxEigenvalue": self.gram_max_eigenvalue,
            "pointCount": self.point_count,
            "sphereDimension": self.sphere_dimension,
            "verdict": self.verdict,
        }

    @property
    def consistent(self):
        return self.verdict != INCONSISTENT


def _dimension_of(lam):
    return int(round(2 * lam + 2))


def check_pd_coefficients(s, tol=DEFAULT_COEFF_TOL):
    """Sign scan of the Gegenbauer coefficients of ``s``."""
    a = s.coefficients
    scale = float(np.max(np.abs(a)))
    threshold = tol * scale
    negative = tuple(int(i) for i in np.flatnonzero(a < -threshold))
    positive = a > threshold
    even = bool(np.any(positive[0::2]))
    odd = bool(np.any(positive[1::2]))
    dim = _dimension_of(s.lam)
    if negative:
        verdict = INCONSISTENT
    elif even and odd and dim != 2:
        verdict = STRICT_PD_CONSISTENT
    else:
        verdict = PD_CONSISTENT
    return PdReport(
        verdict=verdict,
        sphere_dimension=dim,
        lam=float(s.lam),
        truncation_degree=s.degree,
        min_coefficient=float(np.min(a)),
        negative_coefficient_indices=negative,
        has_positive_even_tail=even,
        has_positive_odd_tail=odd,
    )


@dataclass(frozen=True, eq=False)
class SpherePointSet:
    dimension: int
    points: np.ndarray

    @property
    def count(self):
        return self.points.shape[0]


def sample_sphere(d, n, seed, max_retries=100):
    """``n`` distinct uniform points on the unit sphere in R^d (normalised Gaussians).

    A draw closer than 1e-6 (geodesic) to an accepted point is redrawn, at
    most ``max_retries`` times per point.
    """
    if d < 2 or n < 2:
        raise DomainError(f"need d >= 2 and n >= 2, got d={d}, n={n}")
    rng = np.random.default_rng(seed)
    accepted = np.empty((n, d))
    for i in range(n):
        for _ in range(max_retries + 1):
            v = rng.standard_normal(d)
            norm = np.linalg.norm(v)
            if norm == 0:
                continue
            v = v / norm
            if i == 0:
                break
            chord = np.linalg.norm(accepted[:i] - v, axis=1)
            if np.min(2 * np.arcsin(np.minimum(chord / 2, 1.0))) > MIN_SEPARATION:
                break
        else:
            raise RuntimeError(f"could not place point {i} at separation {MIN_SEPARATION} after {max_retries} retries")
        accepted[i] = v
    accepted.flags.writeable = False
    return SpherePointSet(d, accepted)


def gram_check(f, pts, tol=DEFAULT_GRAM_TOL):
    """Extreme eigenvalues of the Gram matrix ``G_ij = f(x_i . x_j)``."""
    f = as_zonal(f)
    dots = np.clip(pts.points @ pts.points.T, -1.0, 1.0)
    np.fill_diagonal(dots, 1.0)
    gram = np.asarray(f(dots), dtype=float)
    bad = np.argwhere(~np.isfinite(gram))
    if bad.size:
        i, j = bad[0]
        raise ValueError(f"kernel value at point pair ({i}, {j}) is not finite: {gram[i, j]}")
    gram = 0.5 * (gram + gram.T)
    eig = np.linalg.eigvalsh(gram)
    lo, hi = float(eig[0]), float(eig[-1])
    verdict = INCONSISTENT if lo < -tol * abs(hi) else PD_CONSISTENT
    return PdReport(
        verdict=verdict,
        sphere_dimension=pts.dimension,
        gram_min_eigenvalue=lo,
        gram_max_eigenvalue=hi,
        point_count=pts.count,
    )


def _gram_ratio(report):
    return report.gram_min_eigenvalue / abs(report.gram_max_eigenvalue) if report.gram_max_eigenvalue else 0.0


def combine_reports(coefficient_report=None, gram_reports=()):
    """Merge a coefficient report with Gram reports; the worst Gram ratio is kept."""
    gram_reports = list(gram_reports)
    if coefficient_report is None and not gram_reports:
        raise ValueError("nothing to combine")
    worst = min(gram_reports, key=_gram_ratio) if gram_reports else None
    if coefficient_report is None:
        return worst
    if worst is None:
        return coefficient_report
    verdict = coefficient_report.verdict
    if worst.verdict == INCONSISTENT:
        verdict = INCONSISTENT
    return replace(
        coefficient_report,
        verdict=verdict,
        gram_min_eigenvalue=worst.gram_min_eigenvalue,
        gram_max_eigenvalue=worst.gram_max_eigenvalue,
        point_count=worst.point_count,
    )


def report_notes(report):
    """Human-readable caveats attached to a report."""
    notes = []
    if report.has_positive_even_tail is not None:
        notes.append("strict verdict is a truncation-window heuristic: positive coefficients at both parities up to the truncation degree")
    if report.sphere_dimension == 2:
        notes.append("d=2: the parity condition is necessary but not sufficient for strict PD; verdict capped at pd-consistent")
    return notes


# ---------------------------------------------------------------------------
# dimension ladder


@dataclass(frozen=True)
class LadderRung:
    dimension: int
    series: GegenbauerSeries
    report: PdReport = field(compare=False)


def _rung_report(series, dim, points, seeds, coeff_tol, gram_tol):
    coeff = check_pd_coefficients(series, coeff_tol)
    grams = []
    if points:
        for seed in seeds:
            grams.append(gram_check(series, sample_sphere(dim, points, seed), gram_tol))
    return combine_reports(coeff, grams)


def ladder_walk(
    model,
    start_dim,
    end_dim,
    degree=DEFAULT_LADDER_DEGREE,
    points=50,
    seeds=(0, 1, 2),
    coeff_tol=DEFAULT_COEFF_TOL,
    gram_tol=DEFAULT_GRAM_TOL,
    down_sign="plus",
    up_sign="minus",
) -> List[LadderRung]:
    """Walk a model from sphere dimension ``start_dim`` to ``end_dim`` one step at a time.

    The model is projected once at ``lam = (start_dim - 2) / 2`` (a series
    already at that parameter is used as is). A step down from ``d`` applies
    the combined half-step integral of order ``(d - 3) / 2``; a step up applies
    the combined half-step derivative of order ``(d - 2) / 2``. Each rung gets
    a coefficient report and, when ``points`` is nonzero, a Gram report over
    the given seeds.
    """
    if start_dim < 2 or end_dim < 2:
        raise DomainError(f"dimensions must be at least 2, got {start_dim} -> {end_dim}")
    lam0 = (start_dim - 2) / 2
    if isinstance(model, GegenbauerSeries):
        series = model
        if abs(series.lam - lam0) > 1e-12:
            raise DomainError(f"series at lam={series.lam} does not match dimension {start_dim}")
    else:
        series = project(model, lam0, degree)

    rungs = [LadderRung(start_dim, series, _rung_report(series, start_dim, points, seeds, coeff_tol, gram_tol))]
    d = start_dim
    step = 1 if end_dim > start_dim else -1
    while d != end_dim:
        if step < 0:
            series = apply_CI_spectral(down_sign, (d - 3) / 2, series)
        else:
            series = apply_CD_spectral(up_sign, (d - 2) / 2, series)
        d += step
        rungs.append(LadderRung(d, series, _rung_report(series, d, points, seeds, coeff_tol, gram_tol)))
    return rungs
