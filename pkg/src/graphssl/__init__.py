"""Graph-based semi-supervised learning with sparse spectral regularization.

Classification propagates a handful of labels over a k-NN affinity graph.
Two regularizers are provided: the classical quadratic Laplacian penalty,
solved in closed form, and a weighted-L1 penalty over the coefficients of
the smallest Laplacian eigenvectors, solved with an accelerated
proximal-gradient method. The L1 route is robust to mislabeled points and
also powers a co-refinement pipeline for paired bag-of-words matrices.
"""

from .errors import ComputationError, ConvergenceError, IsolatedVertexError
from .linalg import (
    EigenPairs,
    SparseSymMatrix,
    identity_plus_scaled,
    smallest_eigenpairs,
    solve_spd,
    spmv,
)
from .graph import (
    GraphConfig,
    WeightMatrix,
    gaussian_knn_graph,
    gaussian_weights,
    knn_sparsify,
    linear_kernel,
    normalized_laplacian,
)
from .spectral import (
    SmoothnessReport,
    SpectralBasis,
    apply_b,
    build_basis,
    l1_smoothness,
    l2_smoothness,
    smoothness_report,
)
from .solver import (
    SolverOptions,
    SolverReport,
    fista_weighted_l1,
    kkt_residual,
    l2_ssl_solve,
    objective,
    soft_threshold,
)
from .ssl import (
    NoiseSpec,
    Solution,
    encode_labels,
    evaluate,
    inject_label_noise,
    l1_ssl_fit,
    l2_ssl_fit,
    select_labeled,
    two_moons,
)
from .bow import (
    TABLE2_TEXTUAL,
    TABLE2_VISUAL,
    RefineConfig,
    apply_error_sparsity,
    co_refine,
    refine,
)

__version__ = "0.1.0"

__all__ = [
    "ComputationError",
    "ConvergenceError",
    "IsolatedVertexError",
    "EigenPairs",
    "SparseSymMatrix",
    "identity_plus_scaled",
    "smallest_eigenpairs",
    "solve_spd",
    "spmv",
    "GraphConfig",
    "WeightMatrix",
    "gaussian_knn_graph",
    "gaussian_weights",
    "knn_sparsify",
    "linear_kernel",
    "normalized_laplacian",
    "SmoothnessReport",
    "SpectralBasis",
    "apply_b",
    "build_basis",
    "l1_smoothness",
    "l2_smoothness",
    "smoothness_report",
    "SolverOptions",
    "SolverReport",
    "fista_weighted_l1",
    "kkt_residual",
    "l2_ssl_solve",
    "objective",
    "soft_threshold",
    "NoiseSpec",
    "Solution",
    "encode_labels",
    "evaluate",
    "inject_label_noise",
    "l1_ssl_fit",
    "l2_ssl_fit",
    "select_labeled",
    "two_moons",
    "TABLE2_TEXTUAL",
    "TABLE2_VISUAL",
    "RefineConfig",
    "apply_error_sparsity",
    "co_refine",
    "refine",
]
