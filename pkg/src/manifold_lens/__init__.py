"""Local PCA estimation of tangent spaces and intrinsic dimension, with the
supporting linear algebra, exact optimal transport, synthetic manifold
samplers and sample-complexity bound formulas."""

from ._version import __version__
from .estimators import (EstimatorParams, batch_estimate, dimension_estimate, neighbors,
                         projector_estimate, tangent_estimate, thr)
from .geometry import (DensityModel, NoiseModel, PointCloud, clifford_torus_model, disk_model,
                       sample, sphere_model, torus3d_model)
from .linalg import Spectrum, Subspace, principal_angle, sym_eig
from .measures import DiscreteMeasure, covariance
from .transport import wasserstein

__all__ = [
    "__version__", "DensityModel", "DiscreteMeasure", "EstimatorParams", "NoiseModel", "PointCloud",
    "Spectrum", "Subspace", "batch_estimate", "clifford_torus_model", "covariance", "dimension_estimate",
    "disk_model", "neighbors", "principal_angle", "projector_estimate", "sample", "sphere_model",
    "sym_eig", "tangent_estimate", "thr", "torus3d_model", "wasserstein",
]
