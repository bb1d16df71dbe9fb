"""Evaluable functions on [-1, 1] (zonal kernels written in x = cos(theta))."""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .gegenbauer import GegenbauerSeries, derivative_series


@dataclass(frozen=True)
class ZonalFunction:
    """A vectorised function of ``x`` in [-1, 1].

    Parameters
    ----------
    fn : callable
        Maps an ndarray of any shape to an ndarray of the same shape.
    derivative : callable, optional
        Exact derivative, used by the half-step derivative operators.
        When absent those operators fall back to finite differences.
    label : str
        Human-readable description.
    endpoint_kink : bool
        Marks algebraic endpoint behaviour; projections double their order.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    derivative: Optional[Callable[[np.ndarray], np.ndarray]] = None
    label: str = ""
    endpoint_kink: bool = False

    def __call__(self, x):
        values = self.fn(np.asarray(x, dtype=float))
        return float(values) if np.ndim(values) == 0 else np.asarray(values, dtype=float)

    @classmethod
    def from_series(cls, series: GegenbauerSeries):
        d = derivative_series(series)
        return cls(series, derivative=d, label=f"series(lam={series.lam}, degree={series.degree})")

    @classmethod
    def constant(cls, value):
        return cls(
            lambda x: np.full(np.shape(x), float(value)),
            derivative=lambda x: np.zeros(np.shape(x)),
            label=f"const({value})",
        )


def as_zonal(f):
    """Wrap a series or bare callable as a :class:`ZonalFunction`."""
    if isinstance(f, ZonalFunction):
        return f
    if isinstance(f, GegenbauerSeries):
        return ZonalFunction.from_series(f)
    to_zonal = getattr(f, "as_zonal", None)
    if to_zonal is not None:
        return to_zonal()
    if callable(f):
        return ZonalFunction(f, label=getattr(f, "__name__", "callable"))
    raise TypeError(f"cannot interpret {type(f).__name__} as a zonal function")
