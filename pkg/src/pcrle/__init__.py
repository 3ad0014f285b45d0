"""Regression with Laplacian-eigenmap features on neighborhood graphs.

The package builds an epsilon-neighborhood graph over design points,
extracts the low-frequency eigenvectors of its Laplacian, and regresses
responses on them (PCR-LE).  It also ships the population-level spectral
series oracle, three baselines (kernel smoothing, uniform least squares,
Laplacian smoothing), the matching signal-detection tests, tuning rules,
spectral edge sparsification, and a Monte-Carlo harness for convergence
rate and cluster-adaptivity experiments.
"""

from .sampling import (
    Dataset,
    Design,
    RegressionFunction,
    constant,
    cube_basis_values,
    cube_eigenfunction,
    cube_eigenvalue,
    custom,
    eigenfunction_sum,
    make_responses,
    piecewise_cluster,
    sample_circle_manifold,
    sample_cluster_model,
    sample_uniform_cube,
    single_eigenfunction,
)
from .graph import (
    Kernel,
    NeighborhoodGraph,
    boxcar,
    build_graph,
    connected_components,
    kernel_by_name,
    laplacian_apply,
    sobolev_seminorm,
    triangular,
    truncated_quadratic,
)
from .spectra import (
    EigensolveError,
    LaplacianSpectrum,
    eigenvalue_scaling_check,
    smallest_eigenpairs,
)
from .regress import (
    FitResult,
    SolverError,
    TestResult,
    in_sample_mse,
    kernel_smoothing_fit,
    laplacian_smoothing_fit,
    pcr_le_fit,
    pcr_le_test,
    spectral_series_fit,
    spectral_series_test,
    uniform_least_squares_fit,
)
from .tune import EmptyBracketError, TuningRule, choose_K, choose_eps
from .sparsify import SparsifyReport, certify_sigma, sparsify_uniform
from .seeding import make_rng, replication_rng

__version__ = "0.1.0"
