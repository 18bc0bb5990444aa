"""Averaged zonal-potential Hamiltonians via Kaula recursions.

Builds the mean-elements Hamiltonian of an arbitrary-degree zonal field,
verifies the closed forms against independent numerical oracles, and
explores frozen orbits through eccentricity-vector phase maps.
"""

__version__ = "0.1.0"

from .gravity import GravityField, bundled_field, load_field, parse_field
from .kaula import (
    AveragedSeries,
    AveragedTerm,
    OrbitGeometry,
    averaged_vi,
    build_mean_series,
    eccentricity_function,
    inclination_function,
    index_set,
    osculating_vi,
)

__all__ = [
    "GravityField",
    "bundled_field",
    "load_field",
    "parse_field",
    "OrbitGeometry",
    "index_set",
    "inclination_function",
    "eccentricity_function",
    "osculating_vi",
    "averaged_vi",
    "build_mean_series",
    "AveragedSeries",
    "AveragedTerm",
    "__version__",
]
