"""Classical kernel functions of smooth multiply connected planar domains.

Everything is computed from boundary values obtained by one dense
Kerzman-Stein solve: the Szego and Garabedian kernels, the Ahlfors map,
the Bergman and Lambda kernels, harmonic measures, the Dirichlet solver
and the Poisson kernel.
"""

from .errors import GeometryError, KernelError, NumericalError, OnBoundaryError, OutsideDomainError
from .geometry import BoundaryGrid, Circle, Domain, TrigCurve, build_grid, load_domain, save_domain
from .integral_eq import AccuracyWarning, KerzmanSteinOperator, cauchy_eval, solve_szego_boundary
from .szego import SzegoData, Tolerances, ahlfors_eval, assemble, garabedian_eval, szego_eval
from .bergman import BergmanData, bergman_eval, lambda_kernel_eval
from .harmonic import (
    PoissonData,
    dirichlet_solve,
    harmonic_measures,
    poisson_kernel,
    szego_projection_eval,
)
from .artifact import Bundle, build_bundle
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "AccuracyWarning",
    "BACKEND",
    "BergmanData",
    "BoundaryGrid",
    "Bundle",
    "Circle",
    "Domain",
    "GeometryError",
    "KernelError",
    "KerzmanSteinOperator",
    "NumericalError",
    "OnBoundaryError",
    "OutsideDomainError",
    "PoissonData",
    "SzegoData",
    "Tolerances",
    "TrigCurve",
    "ahlfors_eval",
    "assemble",
    "bergman_eval",
    "build_bundle",
    "build_grid",
    "cauchy_eval",
    "dirichlet_solve",
    "garabedian_eval",
    "harmonic_measures",
    "lambda_kernel_eval",
    "load_domain",
    "poisson_kernel",
    "save_domain",
    "solve_szego_boundary",
    "szego_eval",
    "szego_projection_eval",
]
