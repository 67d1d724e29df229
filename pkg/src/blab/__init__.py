"""Random triangulations of the sphere and their scaling geometry.

Subpackages map onto the pieces of the laboratory:

* :mod:`blab.maps`     combinatorial maps, validation, canonical codes
* :mod:`blab.sampler`  exact enumeration and the edge-flip chain
* :mod:`blab.metric`   rescaled vertex metrics, ball growth, dimension
* :mod:`blab.gh`       Hausdorff and Gromov-Hausdorff distances
* :mod:`blab.gff`      Gaussian free field and Liouville area measure on S^2
* :mod:`blab.lab`      ensemble experiments and stability reports
* :mod:`blab.io`, :mod:`blab.cli`  file formats and the command line
"""
from .maps import (
    Triangulation,
    TriangulationClass,
    are_isomorphic,
    build_from_rotation,
    canonical_code,
    euler_characteristic,
)
from .metric import FiniteMetricSpace, diameter, rescaled_space
from .sampler import EnsembleSpec, enumerate_triangulations, flip_edge, mcmc_sample

__version__ = "0.1.0"

__all__ = [
    "EnsembleSpec",
    "FiniteMetricSpace",
    "Triangulation",
    "TriangulationClass",
    "are_isomorphic",
    "build_from_rotation",
    "canonical_code",
    "diameter",
    "enumerate_triangulations",
    "euler_characteristic",
    "flip_edge",
    "mcmc_sample",
    "rescaled_space",
]
