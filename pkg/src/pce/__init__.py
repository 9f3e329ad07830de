"""Principal coefficients embedding: robust subspace learning with automatic
feature-dimension estimation, plus the synthetic-data and evaluation harness.
"""

from . import errors
from .data import (
    LabeledDataset,
    NoiseSpec,
    SubspaceSpec,
    add_gaussian_noise,
    add_pixel_corruption,
    generate_union_of_subspaces,
    load_matrix,
    save_matrix,
    split,
)
from .evaluation import (
    ExperimentConfig,
    PcaModel,
    Report,
    accuracy,
    nn_classify,
    pca_fit,
    pca_transform,
    run_experiment,
)
from .graph import AffinityGraph, LleConfig, embed, lle_graph, pce_graph
from .linalg import SvdFactors, generalized_top_eigs, skinny_svd
from .model import (
    CoefficientFactor,
    PceModel,
    estimate_dimension,
    fit,
    materialize_affinity,
    principal_coefficients,
    recover_clean,
    transform,
)

__version__ = "0.1.0"

__all__ = [
    "AffinityGraph",
    "CoefficientFactor",
    "ExperimentConfig",
    "LabeledDataset",
    "LleConfig",
    "NoiseSpec",
    "PcaModel",
    "PceModel",
    "Report",
    "SubspaceSpec",
    "SvdFactors",
    "accuracy",
    "add_gaussian_noise",
    "add_pixel_corruption",
    "embed",
    "estimate_dimension",
    "fit",
    "generalized_top_eigs",
    "generate_union_of_subspaces",
    "lle_graph",
    "load_matrix",
    "materialize_affinity",
    "nn_classify",
    "pca_fit",
    "pca_transform",
    "pce_graph",
    "principal_coefficients",
    "recover_clean",
    "run_experiment",
    "save_matrix",
    "skinny_svd",
    "split",
    "transform",
]
