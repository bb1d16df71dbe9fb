"""Gauss-Jacobi rules, half-order Riemann-Liouville integrals and projection.

The half-order integrals are computed after mapping the integration range to
[0, 1]: with ``tau = -1 + (x + 1) s`` the kernel ``(x - tau)^(-1/2) (1 + tau)^nu``
becomes ``(x + 1)^(nu + 1/2) (1 - s)^(-1/2) s^nu``, a Jacobi weight. The
endpoint singularities are absorbed into a Gauss-Jacobi rule, which is exact
whenever the integrand is a polynomial of modest degree.
"""

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from .errors import DomainError
from .gegenbauer import N_MAX, GegenbauerSeries, basis_table, norm_h
from .special import beta as beta_fn
from .zonal import as_zonal

DEFAULT_HALF_ORDER = 64
PROJECTION_MARGIN = 16

__all__ = [
    "QuadratureRule",
    "gauss_jacobi",
    "gauss_legendre",
    "chebyshev_gauss",
    "project",
    "normalized_half_integral",
    "rl_half_integral",
    "halfweight_fractional_integral",
]


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes and weights for the weight ``(1 - x)^alpha (1 + x)^beta`` on [-1, 1]."""

    nodes: np.ndarray
    weights: np.ndarray
    alpha: float
    beta: float
    order: int

    def integrate(self, f):
        """Approximate the weighted integral of ``f`` over [-1, 1]."""
        return float(np.sum(self.weights * f(self.nodes)))


def _freeze(arr):
    arr = np.ascontiguousarray(arr, dtype=float)
    arr.flags.writeable = False
    return arr


def _jacobi_matrix(order, alpha, beta):
    ab = alpha + beta
    k = np.arange(order, dtype=float)
    diag = np.empty(order)
    diag[0] = (beta - alpha) / (ab + 2)
    if order > 1:
        kk = k[1:]
        diag[1:] = (beta**2 - alpha**2) / ((2 * kk + ab) * (2 * kk + ab + 2))
    off = np.empty(max(order - 1, 0))
    if order > 1:
        off[0] = 4 * (1 + alpha) * (1 + beta) / ((2 + ab) ** 2 * (3 + ab))
    if order > 2:
        kk = k[2:]
        two = 2 * kk + ab
        off[1:] = 4 * kk * (kk + alpha) * (kk + beta) * (kk + ab) / (two**2 * (two + 1) * (two - 1))
    return diag, np.sqrt(off)


@functools.lru_cache(maxsize=256)
def gauss_jacobi(order, alpha, beta):
    """Gauss-Jacobi rule by the Golub-Welsch eigenvalue method.

    Parameters
    ----------
    order : int
        Number of nodes; polynomials of degree ``2 * order - 1`` are integrated exactly.
    alpha, beta : float
        Exponents of ``(1 - x)`` and ``(1 + x)``; both must exceed -1.

    Returns
    -------
    QuadratureRule
    """
    order = int(order)
    if order < 1:
        raise DomainError(f"order must be positive, got {order}")
    if alpha <= -1 or beta <= -1:
        raise DomainError(f"Jacobi exponents must exceed -1, got alpha={alpha}, beta={beta}")
    mass = 2.0 ** (alpha + beta + 1) * beta_fn(alpha + 1, beta + 1)
    diag, off = _jacobi_matrix(order, alpha, beta)
    try:
        nodes, vectors = eigh_tridiagonal(diag, off)
    except LinAlgError as exc:
        raise RuntimeError(
            f"tridiagonal eigensolver failed for order={order}, alpha={alpha}, beta={beta}"
        ) from exc
    weights = mass * vectors[0, :] ** 2
    if order > 1 and not np.all(np.diff(nodes) > 0):
        raise RuntimeError(f"nodes not strictly increasing (order={order}, alpha={alpha}, beta={beta})")
    if np.any(np.abs(nodes) >= 1) or np.any(weights <= 0):
        raise RuntimeError(
            f"degenerate rule for order={order}, alpha={alpha}, beta={beta}: "
            f"node range [{nodes.min()}, {nodes.max()}], min weight {weights.min()}"
        )
    return QuadratureRule(_freeze(nodes), _freeze(weights), float(alpha), float(beta), order)


def gauss_legendre(order):
    return gauss_jacobi(order, 0.0, 0.0)


@functools.lru_cache(maxsize=64)
def chebyshev_gauss(order):
    """Closed-form Gauss rule for the weight (1 - x^2)^(-1/2)."""
    i = np.arange(order, 0, -1)
    nodes = np.cos((2 * i - 1) * math.pi / (2 * order))
    weights = np.full(order, math.pi / order)
    return QuadratureRule(_freeze(nodes), _freeze(weights), -0.5, -0.5, order)


def project(f, lam, degree, order=None):
    """Gegenbauer coefficients of ``f`` up to ``degree``.

    ``a_n = (1 / h_n) * integral of f C_n^lam (1 - t^2)^(lam - 1/2)``, evaluated
    with a Gauss-Jacobi rule of ``degree + 16`` nodes (doubled for functions
    flagged with ``endpoint_kink``). At ``lam == 0`` the T_n basis is used.
    """
    if lam < 0:
        raise DomainError(f"lam must be nonnegative, got {lam}")
    if degree < 0 or degree > N_MAX:
        raise DomainError(f"degree must lie in [0, {N_MAX}], got {degree}")
    f = as_zonal(f)
    if order is None:
        order = degree + PROJECTION_MARGIN
        if f.endpoint_kink:
            order *= 2
    if lam == 0:
        rule = chebyshev_gauss(order)
    else:
        rule = gauss_jacobi(order, lam - 0.5, lam - 0.5)
    values = f(rule.nodes)
    table = basis_table(lam, degree, rule.nodes)
    # fixed summation order per coefficient
    sums = np.sum(table * (rule.weights * values), axis=1)
    norms = np.array([norm_h(lam, n) for n in range(degree + 1)])
    return GegenbauerSeries(lam, sums / norms)


def _check_side(side):
    if side not in ("plus", "minus"):
        raise ValueError(f"side must be 'plus' or 'minus', got {side!r}")


def normalized_half_integral(f, x, side, exponent, order=DEFAULT_HALF_ORDER):
    """``integral_0^1 (1 - s)^(-1/2) s^exponent f(t(s)) ds``.

    ``t(s) = -1 + (x + 1) s`` on the plus side and ``1 - (1 - x) s`` on the
    minus side, so only values of ``f`` between the near endpoint and ``x``
    are used.
    """
    _check_side(side)
    if exponent <= -1:
        raise DomainError(f"weight exponent must exceed -1, got {exponent}")
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1 + 1e-12):
        raise DomainError("argument outside [-1, 1]")
    x = np.clip(x, -1.0, 1.0)
    rule = gauss_jacobi(order, -0.5, exponent)
    s = 0.5 * (1.0 + rule.nodes)
    if side == "plus":
        pts = (x[..., None] + 1.0) * s - 1.0
    else:
        pts = 1.0 - (1.0 - x[..., None]) * s
    values = as_zonal(f)(pts)
    return 2.0 ** (-exponent - 0.5) * np.sum(rule.weights * values, axis=-1)


def rl_half_integral(f, x, side, exponent, order=DEFAULT_HALF_ORDER):
    """Weighted half-order integral without normalisation.

    Plus side: ``integral_{-1}^x (x - t)^(-1/2) (1 + t)^exponent f(t) dt``;
    minus side: ``integral_x^1 (t - x)^(-1/2) (1 - t)^exponent f(t) dt``.
    """
    x = np.asarray(x, dtype=float)
    core = normalized_half_integral(f, x, side, exponent, order)
    gap = 1.0 + x if side == "plus" else 1.0 - x
    out = np.power(np.clip(gap, 0.0, 2.0), exponent + 0.5) * core
    return float(out) if out.ndim == 0 else out


def halfweight_fractional_integral(f, x, side, lam, order=DEFAULT_HALF_ORDER):
    """The half-order integral operator ``I^lam_+`` or ``I^lam_-`` applied to ``f`` at ``x``.

    ``I^lam_+ f(x) = (1 + x)^(1/2 - lam) integral_{-1}^x (x - t)^(-1/2) (1 + t)^lam f(t) dt``
    and symmetrically for the minus side. The value at the vanishing endpoint
    (x = -1 for plus, x = 1 for minus) is exactly 0.

    Negative ``lam`` is accepted down to (but excluding) -1/2.
    """
    if lam <= -0.5:
        raise DomainError(f"lam must exceed -1/2, got {lam}")
    x = np.asarray(x, dtype=float)
    core = normalized_half_integral(f, x, side, lam, order)
    gap = 1.0 + x if side == "plus" else 1.0 - x
    out = np.clip(gap, 0.0, 2.0) * core
    return float(out) if out.ndim == 0 else out
