"""Lattices from codes through generalized reductions, with ensemble checks and alphabet-size planning."""

__version__ = "0.1.0"

from .galois import LinearCode, enumerate_codes, gaussian_binomial, sample_code
from .lattice import IntLattice, count_points, shortest_vector, successive_minima, theta_series
from .reduction import Reduction, kernel_lattice, lift_code, natural_reduction
from .ensemble import EnsembleSpec, average_sum_f, mh_search, theta_average

__all__ = [
    "__version__",
    "EnsembleSpec",
    "IntLattice",
    "LinearCode",
    "Reduction",
    "average_sum_f",
    "count_points",
    "enumerate_codes",
    "gaussian_binomial",
    "kernel_lattice",
    "lift_code",
    "mh_search",
    "natural_reduction",
    "sample_code",
    "shortest_vector",
    "successive_minima",
    "theta_average",
    "theta_series",
]
