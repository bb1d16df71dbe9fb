"""Scalar special functions: gamma, beta, Pochhammer symbols and terminating 2F1."""

import math
from fractions import Fraction

import numpy as np

from .errors import DomainError

__all__ = [
    "gamma",
    "log_gamma",
    "gamma_ratio",
    "beta",
    "pochhammer",
    "hyp2f1_terminating",
    "pfaff_transform_check",
]


def _is_pole(x):
    return x <= 0 and float(x).is_integer()


def gamma(x):
    """Gamma function for real ``x`` away from the poles 0, -1, -2, ..."""
    if _is_pole(x):
        raise DomainError(f"gamma has a pole at {x}")
    return math.gamma(x)


def log_gamma(x):
    """log|Gamma(x)|."""
    if _is_pole(x):
        raise DomainError(f"gamma has a pole at {x}")
    return math.lgamma(x)


def gamma_ratio(a, b):
    """Gamma(a) / Gamma(b) for positive ``a`` and ``b``, overflow-safe."""
    if a <= 0 or b <= 0:
        raise DomainError(f"gamma_ratio needs positive arguments, got {a}, {b}")
    if a < 150 and b < 150:
        return math.gamma(a) / math.gamma(b)
    return math.exp(math.lgamma(a) - math.lgamma(b))


def beta(p, q):
    """Euler beta function B(p, q) = Gamma(p) Gamma(q) / Gamma(p + q)."""
    if p <= 0 or q <= 0:
        raise DomainError(f"beta needs positive arguments, got {p}, {q}")
    if p + q < 150:
        return math.gamma(p) * math.gamma(q) / math.gamma(p + q)
    return math.exp(math.lgamma(p) + math.lgamma(q) - math.lgamma(p + q))


def pochhammer(a, k):
    """Rising factorial (a)_k = a (a+1) ... (a+k-1), with (a)_0 = 1."""
    if k < 0 or int(k) != k:
        raise DomainError(f"Pochhammer length must be a nonnegative integer, got {k}")
    result = 1.0
    for j in range(int(k)):
        result *= a + j
    return result


def hyp2f1_terminating(n, b, c, z, exact=False):
    """Terminating Gauss series 2F1(-n, b; c; z).

    The sum has exactly ``n + 1`` terms and is accumulated in nested
    (Horner) form, innermost term first.

    Parameters
    ----------
    n : int
        Nonnegative integer; the first numerator parameter is ``-n``.
    b, c : float
        Remaining parameters. ``c + k`` must not vanish for ``k < n``.
    z : float or array_like
        Argument, evaluated elementwise.
    exact : bool
        Accumulate in rational arithmetic on the binary values of ``b``,
        ``c`` and ``z`` and round once at the end. The alternating terms
        cancel heavily for large ``n`` with ``z`` near 1, so the float
        accumulation can lose most of its digits there.

    Returns
    -------
    float or ndarray
    """
    if n < 0 or int(n) != n:
        raise DomainError(f"n must be a nonnegative integer, got {n}")
    n = int(n)
    for k in range(n):
        if c + k == 0:
            raise DomainError(f"2F1(-{n}, {b}; {c}; z) hits a pole at term {k + 1}")
    z = np.asarray(z, dtype=float)
    if exact:
        fb, fc = Fraction(b), Fraction(c)
        steps = [Fraction(k - n) * (fb + k) / ((fc + k) * (k + 1)) for k in range(n)]
        out = np.empty(z.shape)
        for idx, zi in np.ndenumerate(z):
            fz = Fraction(float(zi))
            acc = Fraction(1)
            for k in range(n - 1, -1, -1):
                acc = 1 + steps[k] * fz * acc
            out[idx] = float(acc)
        return out if out.ndim else float(out)
    acc = np.ones_like(z)
    for k in range(n - 1, -1, -1):
        acc = 1.0 + ((k - n) * (b + k) / ((c + k) * (k + 1))) * z * acc
    return acc if acc.ndim else float(acc)


def pfaff_transform_check(n, b, c, z, exact=False):
    """Both sides of Pfaff's transformation for a terminating series.

    Returns ``(lhs, rhs)`` with ``lhs = 2F1(-n, b; c; z)`` and
    ``rhs = (c-b)_n / (c)_n * 2F1(-n, b; b-c-n+1; 1-z)``. With ``exact`` both
    series are summed in rational arithmetic, which removes the cancellation
    that dominates the float residual at large ``n``.
    """
    lhs = hyp2f1_terminating(n, b, c, z, exact=exact)
    denominator = pochhammer(c, n)
    if denominator == 0:
        raise DomainError(f"(c)_n vanishes for c={c}, n={n}")
    z = np.asarray(z, dtype=float)
    rhs = pochhammer(c - b, n) / denominator * hyp2f1_terminating(n, b, b - c - n + 1, 1.0 - z, exact=exact)
    return lhs, rhs
