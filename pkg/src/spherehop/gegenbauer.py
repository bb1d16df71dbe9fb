"""Gegenbauer (ultraspherical) polynomials and finite Gegenbauer series.

Convention: a series with ``lam == 0`` is expanded in Chebyshev polynomials of
the first kind ``T_n`` rather than in the degenerate ``C_n^0``. The aliases
``lam == 0.5`` (Legendre) and ``lam == 1`` (Chebyshev second kind) use the
general recurrence.
"""

import enum
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import BasisMismatchError, DomainError

N_MAX = 512
TRIM_RTOL = 1e-15
_X_SLACK = 1e-12

__all__ = [
    "N_MAX",
    "BasisKind",
    "basis_kind",
    "GegenbauerSeries",
    "gegenbauer_eval",
    "gegenbauer_table",
    "chebyshev_eval",
    "chebyshev_table",
    "basis_table",
    "series_eval",
    "derivative_series",
    "norm_h",
    "reflection_check",
    "derivative_identity_residual",
    "gegenbauer_identity_residual",
    "chebyshev_identity_residual",
]


class BasisKind(enum.Enum):
    GEGENBAUER = "gegenbauer"
    CHEBYSHEV_FIRST = "chebyshev-first"
    LEGENDRE = "legendre"
    CHEBYSHEV_SECOND = "chebyshev-second"


def basis_kind(lam):
    """Tag for the polynomial family used at parameter ``lam``."""
    if lam == 0:
        return BasisKind.CHEBYSHEV_FIRST
    if lam == 0.5:
        return BasisKind.LEGENDRE
    if lam == 1:
        return BasisKind.CHEBYSHEV_SECOND
    return BasisKind.GEGENBAUER


def _as_domain(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1 + _X_SLACK):
        raise DomainError("argument outside [-1, 1]")
    return np.clip(x, -1.0, 1.0)


def _scalar_or_array(values):
    return float(values) if np.ndim(values) == 0 else values


def gegenbauer_table(lam, degree, x):
    """Values of C_0^lam, ..., C_degree^lam at ``x``.

    Returns an array of shape ``(degree + 1,) + np.shape(x)``.
    """
    if lam <= 0:
        raise DomainError(f"gegenbauer_table needs lam > 0, got {lam}")
    x = _as_domain(x)
    out = np.empty((degree + 1,) + x.shape)
    out[0] = 1.0
    if degree >= 1:
        out[1] = 2.0 * lam * x
    for k in range(2, degree + 1):
        out[k] = (2.0 * (k + lam - 1) * x * out[k - 1] - (k + 2.0 * lam - 2) * out[k - 2]) / k
    return out


def gegenbauer_eval(lam, n, x):
    """C_n^lam(x) by the three-term recurrence.

    Parameters
    ----------
    lam : float
        Positive Gegenbauer parameter. Use :func:`chebyshev_eval` for lam = 0.
    n : int
        Degree, ``n >= 0``.
    x : float or array_like
        Points in [-1, 1].
    """
    if n < 0:
        raise DomainError(f"degree must be nonnegative, got {n}")
    return _scalar_or_array(gegenbauer_table(lam, n, x)[n])


def _geg(lam, n, x):
    # C_n^lam with C_{-1} = 0; used by identities that shift the degree
    if n < 0:
        return np.zeros(np.shape(x))
    return gegenbauer_table(lam, n, x)[n]


def chebyshev_table(kind, degree, x):
    """Values of T_0..T_degree (``kind="first"``) or U_0..U_degree (``"second"``)."""
    if kind not in ("first", "second"):
        raise ValueError(f"kind must be 'first' or 'second', got {kind!r}")
    x = _as_domain(x)
    out = np.empty((degree + 1,) + x.shape)
    out[0] = 1.0
    if degree >= 1:
        out[1] = x if kind == "first" else 2.0 * x
    for k in range(2, degree + 1):
        out[k] = 2.0 * x * out[k - 1] - out[k - 2]
    return out


def chebyshev_eval(kind, n, x):
    """T_n(x) or U_n(x) by recurrence."""
    if n < 0:
        raise DomainError(f"degree must be nonnegative, got {n}")
    return _scalar_or_array(chebyshev_table(kind, n, x)[n])


def basis_table(lam, degree, x):
    """Basis values for a series at parameter ``lam`` (T_n when lam == 0)."""
    if lam == 0:
        return chebyshev_table("first", degree, x)
    return gegenbauer_table(lam, degree, x)


def norm_h(lam, n):
    """Squared norm of the n-th basis polynomial under (1 - x^2)^(lam - 1/2).

    For ``lam > 0`` this is
    ``pi Gamma(2 lam + n) / (2^(2 lam - 1) n! (lam + n) Gamma(lam)^2)``;
    for ``lam == 0`` the T_n norms pi (n = 0) and pi / 2 are returned.
    """
    if lam < 0:
        raise DomainError(f"lam must be nonnegative, got {lam}")
    if lam == 0:
        return math.pi if n == 0 else math.pi / 2
    log_h = (
        math.log(math.pi)
        + math.lgamma(2 * lam + n)
        - (2 * lam - 1) * math.log(2.0)
        - math.lgamma(n + 1)
        - math.log(lam + n)
        - 2 * math.lgamma(lam)
    )
    return math.exp(log_h)


def series_eval(series, x):
    """Evaluate a :class:`GegenbauerSeries` by Clenshaw's backward recurrence."""
    x = _as_domain(x)
    a = series.coefficients
    lam = series.lam
    N = a.size - 1
    if N == 0:
        return _scalar_or_array(np.full(x.shape, a[0]))
    b1 = np.zeros(x.shape)
    b2 = np.zeros(x.shape)
    if lam == 0:
        for k in range(N, 0, -1):
            b1, b2 = a[k] + 2.0 * x * b1 - b2, b1
        return _scalar_or_array(a[0] + x * b1 - b2)
    # phi_{k+1} = alpha_k phi_k + beta_k phi_{k-1}
    for k in range(N, 0, -1):
        alpha = 2.0 * (k + lam) * x / (k + 1)
        beta_next = -(k + 2.0 * lam) / (k + 2)
        b1, b2 = a[k] + alpha * b1 + beta_next * b2, b1
    beta_1 = -(2.0 * lam) / 2.0
    return _scalar_or_array(a[0] + 2.0 * lam * x * b1 + beta_1 * b2)


@dataclass(frozen=True, eq=False)
class GegenbauerSeries:
    """Finite expansion ``sum_n a_n C_n^lam`` (``sum_n a_n T_n`` when lam == 0).

    Instances are immutable; the coefficient array is read-only.
    """

    lam: float
    coefficients: np.ndarray

    def __post_init__(self):
        lam = float(self.lam)
        if not lam >= 0:
            raise DomainError(f"lam must be nonnegative, got {self.lam}")
        a = np.array(self.coefficients, dtype=float).ravel()
        if a.size == 0:
            raise ValueError("coefficient vector must be nonempty")
        if a.size > N_MAX + 1:
            raise DomainError(f"degree {a.size - 1} exceeds N_MAX = {N_MAX}")
        if not np.all(np.isfinite(a)):
            raise ValueError("coefficients must be finite")
        a.flags.writeable = False
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "coefficients", a)

    @classmethod
    def basis_vector(cls, lam, n, scale=1.0):
        a = np.zeros(n + 1)
        a[n] = scale
        return cls(lam, a)

    @classmethod
    def zero(cls, lam):
        return cls(lam, [0.0])

    @property
    def degree(self):
        return self.coefficients.size - 1

    @property
    def basis(self):
        return "chebyshev" if self.lam == 0 else "gegenbauer"

    @property
    def kind(self):
        return basis_kind(self.lam)

    def __call__(self, x):
        return series_eval(self, x)

    def __repr__(self):
        return f"GegenbauerSeries(lam={self.lam!r}, coefficients={self.coefficients.tolist()!r})"

    def padded(self, degree):
        """Coefficient array zero-padded (or cut) to length ``degree + 1``."""
        out = np.zeros(degree + 1)
        m = min(degree + 1, self.coefficients.size)
        out[:m] = self.coefficients[:m]
        return out

    def trimmed(self, rtol=TRIM_RTOL):
        """Canonical form: trailing coefficients below ``rtol * max|a_n|`` dropped."""
        a = self.coefficients
        scale = np.max(np.abs(a))
        if scale == 0:
            return GegenbauerSeries(self.lam, [0.0])
        keep = np.nonzero(np.abs(a) > rtol * scale)[0][-1] + 1
        return GegenbauerSeries(self.lam, a[:keep])

    def _check_same_basis(self, other):
        if not isinstance(other, GegenbauerSeries):
            return NotImplemented
        if abs(self.lam - other.lam) > 1e-12:
            raise BasisMismatchError(f"cannot combine series at lam={self.lam} and lam={other.lam}")
        return None

    def __add__(self, other):
        if self._check_same_basis(other) is NotImplemented:
            return NotImplemented
        N = max(self.degree, other.degree)
        return GegenbauerSeries(self.lam, self.padded(N) + other.padded(N))

    def __sub__(self, other):
        if self._check_same_basis(other) is NotImplemented:
            return NotImplemented
        N = max(self.degree, other.degree)
        return GegenbauerSeries(self.lam, self.padded(N) - other.padded(N))

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return GegenbauerSeries(self.lam, float(scalar) * self.coefficients)

    __rmul__ = __mul__

    def __neg__(self):
        return GegenbauerSeries(self.lam, -self.coefficients)

    def to_dict(self):
        return {
            "lambda": self.lam,
            "basis": self.basis,
            "coefficients": self.coefficients.tolist(),
        }

    @classmethod
    def from_dict(cls, data):
        for key in ("lambda", "basis", "coefficients"):
            if key not in data:
                raise ValueError(f"series JSON is missing {key!r}")
        lam = float(data["lambda"])
        expected = "chebyshev" if lam == 0 else "gegenbauer"
        if data["basis"] != expected:
            raise ValueError(f"basis {data['basis']!r} does not match lambda={lam} (expected {expected!r})")
        return cls(lam, data["coefficients"])

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def derivative_series(series):
    """Exact derivative of a series.

    Uses ``d/dx C_n^lam = 2 lam C_{n-1}^{lam+1}`` for lam > 0 and
    ``d/dx T_n = n U_{n-1}`` for lam == 0; the result lives at ``lam + 1``.
    """
    a = series.coefficients
    n = np.arange(1, a.size)
    if series.lam == 0:
        b = n * a[1:]
    else:
        b = 2.0 * series.lam * a[1:]
    if b.size == 0:
        b = np.zeros(1)
    return GegenbauerSeries(series.lam + 1.0, b)


def reflection_check(lam, n, x):
    """Both sides of C_n(-x) = (-1)^n C_n(x), as ``(lhs, rhs)``."""
    x = _as_domain(x)
    lhs = gegenbauer_eval(lam, n, -x)
    rhs = (-1) ** n * gegenbauer_eval(lam, n, x)
    return lhs, rhs


def derivative_identity_residual(lam, n, x, which="plus"):
    """Residual of the expansion of d/dx {(1 +- x) C_n^lam(x)}.

    The left side is differentiated analytically; the right side is
    ``+-(n+1) C_n + 2 sum_{k<n} s_k (k + lam) C_k`` with ``s_k = 1`` for
    ``which="plus"`` and ``s_k = (-1)^(k+n+1)`` for ``which="minus"``.
    """
    if which not in ("plus", "minus"):
        raise ValueError(f"which must be 'plus' or 'minus', got {which!r}")
    x = _as_domain(x)
    sign = 1.0 if which == "plus" else -1.0
    table = gegenbauer_table(lam, n, x)
    lhs = sign * table[n] + (1 + sign * x) * 2.0 * lam * _geg(lam + 1, n - 1, x)
    rhs = sign * (n + 1) * table[n]
    for k in range(n):
        s_k = 1.0 if which == "plus" else (-1.0) ** (k + n + 1)
        rhs = rhs + 2.0 * s_k * (k + lam) * table[k]
    return _scalar_or_array(lhs - rhs)


def gegenbauer_identity_residual(lam, n, x):
    """|(n+2lam-1) C_{n+1}^{lam-1} - (n+2) C_{n+2}^{lam-1} - (2lam-2)(1-x)[C_{n+1}^lam + C_n^lam]|."""
    if lam <= 1:
        raise DomainError(f"identity needs lam > 1, got {lam}")
    x = _as_domain(x)
    low = gegenbauer_table(lam - 1, n + 2, x)
    high = gegenbauer_table(lam, n + 1, x)
    lhs = (n + 2 * lam - 1) * low[n + 1] - (n + 2) * low[n + 2]
    rhs = (2 * lam - 2) * (1 - x) * (high[n + 1] + high[n])
    return _scalar_or_array(np.abs(lhs - rhs))


def chebyshev_identity_residual(n, x):
    """|T_{n+1} - T_{n+2} - (1-x)(U_{n+1} + U_n)|."""
    x = _as_domain(x)
    T = chebyshev_table("first", n + 2, x)
    U = chebyshev_table("second", n + 1, x)
    return _scalar_or_array(np.abs(T[n + 1] - T[n + 2] - (1 - x) * (U[n + 1] + U[n])))
