"""Half-step dimension-hopping operators on zonal functions.

Each operator exists in two forms:

* quadrature: acts on any evaluable function through its integral definition;
* spectral: acts on a :class:`GegenbauerSeries` by an exact multiplier map.

Operator naming (``lam`` is the operator parameter):

========  =====================  ==================  ==================
kind      definition             consumes basis      emits basis
========  =====================  ==================  ==================
Iplus     I^lam_+                lam + 1/2           lam
Iminus    I^lam_-                lam + 1/2           lam
CIplus    I^lam_+ + I^lam_-      lam + 1/2           lam
CIminus   I^lam_+ - I^lam_-      lam + 1/2           lam
Dplus     D^lam_+                lam                 lam + 1/2
Dminus    D^lam_-                lam                 lam + 1/2
CDplus    D^lam_+ + D^lam_-      lam                 lam + 1/2
CDminus   D^lam_+ - D^lam_-      lam                 lam + 1/2
I2        antiderivative         lam + 1             lam
D2        derivative             lam                 lam + 1
========  =====================  ==================  ==================

At lam = 0 the lam-level basis is the Chebyshev basis T_n.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import BasisMismatchError, ChainError, DomainError
from .gegenbauer import GegenbauerSeries, derivative_series, gegenbauer_table, series_eval
from .quadrature import (
    DEFAULT_HALF_ORDER,
    gauss_legendre,
    halfweight_fractional_integral,
    normalized_half_integral,
)
from .special import gamma, hyp2f1_terminating, pochhammer
from .zonal import ZonalFunction, as_zonal

FD_STEP = 1e-5
_LAMBDA_TOL = 1e-12

__all__ = [
    "OperatorKind",
    "OperatorSpec",
    "parse_chain",
    "ci_constant",
    "cd_constant",
    "ci_multipliers",
    "cd_multipliers",
    "apply_CI_spectral",
    "apply_CD_spectral",
    "apply_I_spectral",
    "apply_D_spectral",
    "apply_I_quadrature",
    "apply_CI_quadrature",
    "apply_D_quadrature",
    "apply_CD_quadrature",
    "apply_operator",
    "compose",
    "two_step_D",
    "two_step_I",
    "i_image_closed_form",
    "d_image_closed_form",
    "bateman_integral",
    "corollary_integral",
    "q_polynomial",
    "q_lemma_residual",
]


class OperatorKind(str, enum.Enum):
    IPLUS = "Iplus"
    IMINUS = "Iminus"
    DPLUS = "Dplus"
    DMINUS = "Dminus"
    CIPLUS = "CIplus"
    CIMINUS = "CIminus"
    CDPLUS = "CDplus"
    CDMINUS = "CDminus"
    TWO_STEP_I = "I2"
    TWO_STEP_D = "D2"

    @classmethod
    def _missing_(cls, value):
        aliases = {"TwoStepI": cls.TWO_STEP_I, "TwoStepD": cls.TWO_STEP_D}
        return aliases.get(value)

    @property
    def lowers_dimension(self):
        return self in _I_KINDS or self is OperatorKind.TWO_STEP_I


_I_KINDS = {OperatorKind.IPLUS, OperatorKind.IMINUS, OperatorKind.CIPLUS, OperatorKind.CIMINUS}


@dataclass(frozen=True)
class OperatorSpec:
    """One operator in a chain: its kind, parameter and evaluation mode."""

    kind: OperatorKind
    lam: float
    mode: str = "spectral"

    def __post_init__(self):
        object.__setattr__(self, "kind", OperatorKind(self.kind))
        object.__setattr__(self, "lam", float(self.lam))
        if self.mode not in ("spectral", "quadrature"):
            raise ValueError(f"mode must be 'spectral' or 'quadrature', got {self.mode!r}")

    @property
    def source_lambda(self):
        if self.kind in _I_KINDS:
            return self.lam + 0.5
        if self.kind is OperatorKind.TWO_STEP_I:
            return self.lam + 1.0
        return self.lam

    @property
    def target_lambda(self):
        if self.kind in _I_KINDS or self.kind is OperatorKind.TWO_STEP_I:
            return self.lam
        if self.kind is OperatorKind.TWO_STEP_D:
            return self.lam + 1.0
        return self.lam + 0.5

    def __str__(self):
        return f"{self.kind.value}:{self.lam:g}"

    @classmethod
    def parse(cls, token, mode="spectral"):
        """Parse ``"Kind:lambda"``, e.g. ``"CIplus:0.5"``."""
        kind, sep, lam = token.strip().partition(":")
        if not sep:
            raise ValueError(f"operator token {token!r} is not of the form Kind:lambda")
        try:
            kind = OperatorKind(kind)
        except ValueError:
            raise ValueError(f"unknown operator kind {kind!r}") from None
        return cls(kind, float(lam), mode)


def parse_chain(text, mode="spectral"):
    """Parse ``"Kind:lam[,Kind:lam...]"``; an empty string gives an empty chain."""
    if text is None or not text.strip():
        return []
    return [OperatorSpec.parse(tok, mode) for tok in text.split(",")]


# ---------------------------------------------------------------------------
# spectral multipliers


def ci_constant(lam):
    """sqrt(pi) Gamma(lam) / Gamma(lam + 1/2), for lam > 0."""
    if lam <= 0:
        raise DomainError(f"ci_constant needs lam > 0, got {lam}")
    return math.exp(0.5 * math.log(math.pi) + math.lgamma(lam) - math.lgamma(lam + 0.5))


def cd_constant(lam):
    """sqrt(pi) Gamma(lam + 1/2) / Gamma(lam), for lam > 0."""
    if lam <= 0:
        raise DomainError(f"cd_constant needs lam > 0, got {lam}")
    return math.exp(0.5 * math.log(math.pi) + math.lgamma(lam + 0.5) - math.lgamma(lam))


def _check_sign(sign):
    if sign not in ("plus", "minus"):
        raise ValueError(f"sign must be 'plus' or 'minus', got {sign!r}")


def ci_multipliers(sign, lam, degree):
    """Multipliers m_0..m_degree of the combined half-step integral.

    ``CIplus`` sends ``C_n^(lam+1/2)`` to ``m_n C_n^lam``; ``CIminus`` sends it
    to ``m_n C_(n+1)^lam``. At lam = 0 both are ``2 / (n + 1/2)`` in the T basis.
    """
    _check_sign(sign)
    n = np.arange(degree + 1, dtype=float)
    if lam == 0:
        return 2.0 / (n + 0.5)
    k = ci_constant(lam)
    if sign == "plus":
        return k * (n + 2 * lam) / (n + lam + 0.5)
    return k * (n + 1) / (n + lam + 0.5)


def cd_multipliers(sign, lam, degree):
    """Multipliers of the combined half-step derivative.

    ``CDplus``: ``b_n = m_n a_(n+1)`` for n = 0..degree-1.
    ``CDminus``: ``c_n = m_n a_n`` for n = 0..degree.
    """
    _check_sign(sign)
    if sign == "plus":
        n = np.arange(max(degree, 0), dtype=float)
        if lam == 0:
            return (n + 1) * math.pi
        return cd_constant(lam) * 2 * (n + 2 * lam + 1) / (n + lam + 1)
    n = np.arange(degree + 1, dtype=float)
    if lam == 0:
        return n * math.pi
    return cd_constant(lam) * 2 * n / (n + lam)


def _check_basis(series, expected, what):
    if not isinstance(series, GegenbauerSeries):
        raise BasisMismatchError(f"{what} in spectral mode needs a GegenbauerSeries, got {type(series).__name__}")
    if abs(series.lam - expected) > _LAMBDA_TOL:
        raise BasisMismatchError(f"{what} expects a series at lam={expected}, got lam={series.lam}")


def _check_lam(lam):
    if lam < 0:
        raise DomainError(f"operator parameter must be nonnegative, got {lam}")


def apply_CI_spectral(sign, lam, s):
    """Combined half-step integral on a series at ``lam + 1/2``; result at ``lam``."""
    _check_sign(sign)
    _check_lam(lam)
    _check_basis(s, lam + 0.5, f"CI{sign}^{lam}")
    a = s.coefficients
    m = ci_multipliers(sign, lam, s.degree)
    if sign == "plus":
        return GegenbauerSeries(lam, m * a)
    return GegenbauerSeries(lam, np.concatenate(([0.0], m * a)))


def apply_CD_spectral(sign, lam, s):
    """Combined half-step derivative on a series at ``lam``; result at ``lam + 1/2``."""
    _check_sign(sign)
    _check_lam(lam)
    _check_basis(s, lam, f"CD{sign}^{lam}")
    a = s.coefficients
    if sign == "plus":
        if s.degree == 0:
            return GegenbauerSeries.zero(lam + 0.5)
        return GegenbauerSeries(lam + 0.5, cd_multipliers("plus", lam, s.degree) * a[1:])
    return GegenbauerSeries(lam + 0.5, cd_multipliers("minus", lam, s.degree) * a)


def apply_I_spectral(side, lam, s):
    """``I^lam_+ = (CI+ + CI-) / 2`` and ``I^lam_- = (CI+ - CI-) / 2`` on a series."""
    plus = apply_CI_spectral("plus", lam, s)
    minus = apply_CI_spectral("minus", lam, s)
    return 0.5 * (plus + minus) if side == "plus" else 0.5 * (plus - minus)


def apply_D_spectral(side, lam, s):
    """``D^lam_+ = (CD+ + CD-) / 2`` and ``D^lam_- = (CD+ - CD-) / 2`` on a series."""
    plus = apply_CD_spectral("plus", lam, s)
    minus = apply_CD_spectral("minus", lam, s)
    return 0.5 * (plus + minus) if side == "plus" else 0.5 * (plus - minus)


# ---------------------------------------------------------------------------
# quadrature forms


def apply_I_quadrature(side, lam, f, order=DEFAULT_HALF_ORDER):
    """``I^lam_+ f`` or ``I^lam_- f`` as an evaluable function."""
    f = as_zonal(f)
    if lam <= -0.5:
        raise DomainError(f"lam must exceed -1/2, got {lam}")
    return ZonalFunction(
        lambda x: halfweight_fractional_integral(f, x, side, lam, order),
        label=f"I{side}^{lam}({f.label})",
    )


def apply_CI_quadrature(sign, lam, f, order=DEFAULT_HALF_ORDER):
    _check_sign(sign)
    ip = apply_I_quadrature("plus", lam, f, order)
    im = apply_I_quadrature("minus", lam, f, order)
    s = 1.0 if sign == "plus" else -1.0
    return ZonalFunction(lambda x: ip(x) + s * im(x), label=f"CI{sign}^{lam}({as_zonal(f).label})")


def _fd_derivative(g, x, h):
    # central differences inside, second-order one-sided at the ends
    x = np.clip(np.asarray(x, dtype=float), -1.0, 1.0)
    out = np.empty(x.shape)
    left = x - h < -1.0
    right = x + h > 1.0
    mid = ~(left | right)
    if np.any(mid):
        xm = x[mid]
        out[mid] = (g(xm + h) - g(xm - h)) / (2 * h)
    if np.any(left):
        xl = x[left]
        out[left] = (-3 * g(xl) + 4 * g(xl + h) - g(xl + 2 * h)) / (2 * h)
    if np.any(right):
        xr = x[right]
        out[right] = (3 * g(xr) - 4 * g(xr - h) + g(xr - 2 * h)) / (2 * h)
    return out


def apply_D_quadrature(side, lam, f, order=DEFAULT_HALF_ORDER, h=FD_STEP):
    """``D^lam_+ f`` or ``D^lam_- f`` as an evaluable function.

    After the change of variables ``t = -1 + (x + 1) s`` (plus side) the bracket
    ``(1 + x)^(-lam) integral (x - t)^(-1/2) (1 + t)^(lam - 1/2) f(t) dt`` becomes
    ``G(x) = integral_0^1 (1 - s)^(-1/2) s^(lam - 1/2) f(-1 + (x + 1) s) ds``.
    When ``f`` carries an exact derivative, ``G'`` is integrated directly
    (differentiation under the integral sign); otherwise ``G'`` comes from
    finite differences with step ``h``.
    """
    if side not in ("plus", "minus"):
        raise ValueError(f"side must be 'plus' or 'minus', got {side!r}")
    _check_lam(lam)
    f = as_zonal(f)
    label = f"D{side}^{lam}({f.label})"

    if f.derivative is not None:
        fprime = as_zonal(f.derivative)

        def evaluate(x):
            x = np.asarray(x, dtype=float)
            gap = np.clip(1.0 + x if side == "plus" else 1.0 - x, 0.0, 2.0)
            return gap * normalized_half_integral(fprime, x, side, lam + 0.5, order)

        return ZonalFunction(evaluate, label=label)

    def bracket(x):
        return normalized_half_integral(f, x, side, lam - 0.5, order)

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        shape = x.shape
        x = x.ravel()
        if side == "plus":
            out = (1.0 + x) * _fd_derivative(bracket, x, h)
        else:
            out = (1.0 - x) * _fd_derivative(bracket, x, h)
        return out.reshape(shape)

    return ZonalFunction(evaluate, label=label)


def apply_CD_quadrature(sign, lam, f, order=DEFAULT_HALF_ORDER, h=FD_STEP):
    _check_sign(sign)
    dp = apply_D_quadrature("plus", lam, f, order, h)
    dm = apply_D_quadrature("minus", lam, f, order, h)
    s = 1.0 if sign == "plus" else -1.0
    return ZonalFunction(lambda x: dp(x) + s * dm(x), label=f"CD{sign}^{lam}({as_zonal(f).label})")


# ---------------------------------------------------------------------------
# classical two-step operators


def two_step_D(s):
    """Derivative of a series: ``C_n^lam -> 2 lam C_(n-1)^(lam+1)``, result at ``lam + 1``."""
    if not isinstance(s, GegenbauerSeries):
        raise BasisMismatchError("two_step_D needs a GegenbauerSeries")
    return derivative_series(s)


def two_step_I(s):
    """Antiderivative vanishing at x = -1; a series at ``lam >= 1`` maps to ``lam - 1``.

    Inverts the derivative ladder (``T_(n+1) / (n + 1)`` when the result is at
    lam = 0) and fixes the constant term so that the value at -1 is zero.
    """
    if not isinstance(s, GegenbauerSeries):
        raise BasisMismatchError("two_step_I needs a GegenbauerSeries")
    lam = s.lam
    if lam < 1:
        raise DomainError(f"two_step_I needs a series at lam >= 1, got lam={lam}")
    a = s.coefficients
    b = np.zeros(a.size + 1)
    if lam == 1:
        b[1:] = a / np.arange(1, a.size + 1)
    else:
        b[1:] = a / (2.0 * (lam - 1))
    out = GegenbauerSeries(lam - 1, b)
    b[0] = -series_eval(out, -1.0)
    return GegenbauerSeries(lam - 1, b)


def _two_step_quadrature(kind, f, order=DEFAULT_HALF_ORDER, h=FD_STEP):
    f = as_zonal(f)
    if kind is OperatorKind.TWO_STEP_D:
        if f.derivative is not None:
            return as_zonal(f.derivative)
        return ZonalFunction(lambda x: _fd_derivative(f, np.ravel(x), h).reshape(np.shape(x)), label=f"D2({f.label})")
    rule = gauss_legendre(order)

    def antiderivative(x):
        x = np.asarray(x, dtype=float)
        pts = -1.0 + (x[..., None] + 1.0) * 0.5 * (1.0 + rule.nodes)
        return 0.5 * (x + 1.0) * np.sum(rule.weights * f(pts), axis=-1)

    return ZonalFunction(antiderivative, derivative=f, label=f"I2({f.label})")


# ---------------------------------------------------------------------------
# dispatch and composition


def apply_operator(spec, value):
    """Apply one :class:`OperatorSpec` to a series (spectral) or function (quadrature)."""
    kind, lam = spec.kind, spec.lam
    if spec.mode == "spectral":
        _check_basis(value, spec.source_lambda, str(spec))
        if kind is OperatorKind.CIPLUS:
            return apply_CI_spectral("plus", lam, value)
        if kind is OperatorKind.CIMINUS:
            return apply_CI_spectral("minus", lam, value)
        if kind is OperatorKind.CDPLUS:
            return apply_CD_spectral("plus", lam, value)
        if kind is OperatorKind.CDMINUS:
            return apply_CD_spectral("minus", lam, value)
        if kind is OperatorKind.IPLUS:
            return apply_I_spectral("plus", lam, value)
        if kind is OperatorKind.IMINUS:
            return apply_I_spectral("minus", lam, value)
        if kind is OperatorKind.DPLUS:
            return apply_D_spectral("plus", lam, value)
        if kind is OperatorKind.DMINUS:
            return apply_D_spectral("minus", lam, value)
        if kind is OperatorKind.TWO_STEP_D:
            return two_step_D(value)
        return two_step_I(value)

    if kind is OperatorKind.CIPLUS:
        return apply_CI_quadrature("plus", lam, value)
    if kind is OperatorKind.CIMINUS:
        return apply_CI_quadrature("minus", lam, value)
    if kind is OperatorKind.CDPLUS:
        return apply_CD_quadrature("plus", lam, value)
    if kind is OperatorKind.CDMINUS:
        return apply_CD_quadrature("minus", lam, value)
    if kind is OperatorKind.IPLUS:
        return apply_I_quadrature("plus", lam, value)
    if kind is OperatorKind.IMINUS:
        return apply_I_quadrature("minus", lam, value)
    if kind is OperatorKind.DPLUS:
        return apply_D_quadrature("plus", lam, value)
    if kind is OperatorKind.DMINUS:
        return apply_D_quadrature("minus", lam, value)
    return _two_step_quadrature(kind, value)


def compose(specs, value):
    """Apply ``specs`` left to right.

    An empty chain returns ``value`` unchanged. Contract violations are
    re-raised as :class:`ChainError` carrying the index of the failing link.
    """
    for index, spec in enumerate(specs):
        try:
            value = apply_operator(spec, value)
        except (BasisMismatchError, DomainError) as exc:
            raise ChainError(index, f"{spec}: {exc}") from exc
    return value


# ---------------------------------------------------------------------------
# closed forms used as oracles


def i_image_closed_form(side, lam, n, x):
    """Hypergeometric form of ``I^lam_(side) C_n^(lam+1/2)(x)``, lam >= 0.

    The hypergeometric factor is summed exactly; in floating point it loses
    about as many digits as its largest term has above 1.
    """
    x = np.asarray(x, dtype=float)
    c = math.sqrt(math.pi) * pochhammer(2 * lam + 1, n) / math.factorial(n) * gamma(lam + 1) / gamma(lam + 1.5)
    z = (1 - x) / 2
    if side == "plus":
        poly = hyp2f1_terminating(n, n + 2 * lam + 1, lam + 0.5, z, exact=True)
        return c * (lam + 0.5) / (lam + n + 0.5) * (1 + x) * poly
    poly = hyp2f1_terminating(n, n + 2 * lam + 1, lam + 1.5, z, exact=True)
    return c * (1 - x) * poly


def d_image_closed_form(side, lam, n, x):
    """Hypergeometric form of ``D^lam_(side) C_n^lam(x)``, lam > 0."""
    x = np.asarray(x, dtype=float)
    if n == 0:
        return np.zeros(x.shape) if x.ndim else 0.0
    c = math.sqrt(math.pi) * pochhammer(2 * lam, n) / math.factorial(n) * gamma(lam + 0.5) / gamma(lam + 1)
    z = (1 - x) / 2
    if side == "plus":
        poly = hyp2f1_terminating(n - 1, n + 2 * lam + 1, lam + 1, z, exact=True)
        return c * n * (n + 2 * lam) / (n + lam) * (1 + x) / 2 * poly
    poly = hyp2f1_terminating(n - 1, n + 2 * lam + 1, lam + 2, z, exact=True)
    return c * n * (n + 2 * lam) / (lam + 1) * (1 - x) / 2 * poly


def _endpoint_power(gap, exponent, bracket):
    # gap**exponent * bracket, with the value 0 where gap == 0 (empty integration range)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(gap > 0, np.power(np.where(gap > 0, gap, 1.0), exponent) * bracket, 0.0)
    return float(out) if out.ndim == 0 else out


def bateman_integral(lam, n, x, side):
    """Closed form of ``(1/Gamma(lam)) integral (1 -+ t)^lam |t - x|^(-1/2) C_n^(lam+1/2)(t) dt``.

    The minus side integrates over [x, 1], the plus side over [-1, x].
    """
    if lam <= 0:
        raise DomainError(f"bateman_integral needs lam > 0, got {lam}")
    x = np.asarray(x, dtype=float)
    table = gegenbauer_table(lam, n + 1, x)
    scale = math.sqrt(math.pi) / (2 * gamma(lam + 0.5) * (n + lam + 0.5))
    if side == "minus":
        bracket = (n + 2 * lam) * table[n] - (n + 1) * table[n + 1]
        return _endpoint_power(1 - x, lam - 0.5, scale * bracket)
    if side == "plus":
        bracket = (n + 2 * lam) * table[n] + (n + 1) * table[n + 1]
        return _endpoint_power(1 + x, lam - 0.5, scale * bracket)
    raise ValueError(f"side must be 'plus' or 'minus', got {side!r}")


def corollary_integral(lam, n, x, side):
    """Closed form of ``(1/Gamma(lam)) integral (1 -+ t)^(lam-1) |t - x|^(-1/2) C_(n+1)^(lam-1/2)(t) dt``, lam >= 1."""
    if lam < 1:
        raise DomainError(f"corollary_integral needs lam >= 1, got {lam}")
    x = np.asarray(x, dtype=float)
    table = gegenbauer_table(lam, n + 1, x)
    scale = math.sqrt(math.pi) / (gamma(lam - 0.5) * (n + lam + 0.5))
    if side == "minus":
        return _endpoint_power(1 - x, lam - 0.5, scale * (table[n + 1] + table[n]))
    if side == "plus":
        return _endpoint_power(1 + x, lam - 0.5, scale * (table[n + 1] - table[n]))
    raise ValueError(f"side must be 'plus' or 'minus', got {side!r}")


def q_polynomial(lam, n, x):
    """``Q_(n+1)(x) = (1-x) C_n^(lam+1/2)(x) - (n+1)(2lam+n)/(2lam-1) C_(n+1)^(lam-1/2)(x)``, lam > 1/2."""
    if lam <= 0.5:
        raise DomainError(f"q_polynomial needs lam > 1/2, got {lam}")
    x = np.asarray(x, dtype=float)
    upper = gegenbauer_table(lam + 0.5, n, x)[n]
    lower = gegenbauer_table(lam - 0.5, n + 1, x)[n + 1]
    return (1 - x) * upper - (n + 1) * (2 * lam + n) / (2 * lam - 1) * lower


def q_lemma_residual(lam, n, x, h=FD_STEP):
    """Finite-difference derivative of ``(1+x)^(lam+1) (1-x)^lam C_n^(lam+1/2)`` minus
    ``(1+x)(1-x^2)^(lam-1) Q_(n+1)``.

    Returns ``(residual, scale)`` where ``scale`` is the size of the right side.
    """
    x = np.asarray(x, dtype=float)

    def g(t):
        return (1 + t) ** (lam + 1) * (1 - t) ** lam * gegenbauer_table(lam + 0.5, n, t)[n]

    fd = (g(x + h) - g(x - h)) / (2 * h)
    rhs = (1 + x) * (1 - x**2) ** (lam - 1) * q_polynomial(lam, n, x)
    return fd - rhs, np.abs(rhs)
