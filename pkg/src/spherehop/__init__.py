"""Half-step dimension hopping for zonal positive definite functions on spheres."""

from .errors import BasisMismatchError, ChainError, DomainError
from .gegenbauer import GegenbauerSeries, gegenbauer_eval, series_eval
from .models import (
    CauchySphereModel,
    GmGammaModel,
    PdReport,
    check_pd_coefficients,
    gram_check,
    ladder_walk,
    sample_sphere,
)
from .operators import OperatorKind, OperatorSpec, compose, parse_chain
from .quadrature import gauss_jacobi, project
from .zonal import ZonalFunction, as_zonal

__version__ = "0.1.0"

__all__ = [
    "BasisMismatchError",
    "CauchySphereModel",
    "ChainError",
    "DomainError",
    "GegenbauerSeries",
    "GmGammaModel",
    "OperatorKind",
    "OperatorSpec",
    "PdReport",
    "ZonalFunction",
    "as_zonal",
    "check_pd_coefficients",
    "compose",
    "gauss_jacobi",
    "gegenbauer_eval",
    "gram_check",
    "ladder_walk",
    "parse_chain",
    "project",
    "sample_sphere",
    "series_eval",
]
