"""Fixed spectrum of multi-channel LTI systems, decided by bordered-pencil
rank tests and cross-validated with matroid-theoretic generic-rank machinery
and randomized feedback sampling."""

from ._kernels import active_backend
from .fixed_modes import (
    FixedModeCertificate,
    FixedModeRecord,
    FixedSpectrumReport,
    MultiChannelSystem,
    analyze_system,
    find_blocking_subset,
    find_blocking_subset_via_grank,
    fixed_spectrum,
    fixed_spectrum_sampled,
    grank_closed_loop,
    pencil_rank_test,
)
from .grank import (
    JointIndependentSet,
    MatrixFamily,
    SubsetCertificate,
    VectorPairFamily,
    expand_matrix_family,
    grank_constant_plus_family,
    grank_matrix_minformula,
    grank_pairs_matroid,
    grank_pairs_minformula,
    grank_sampled,
    refine_min_subset,
    sampled_rank_with_constant,
)
from .linalg import (
    CapacityError,
    ConsistencyError,
    RankFactorization,
    RankTolerance,
    bordered_rank,
    eigenvalues,
    gain_equivalence_check,
    numeric_rank,
    rank_factorize,
    rank_restoring_gains,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "active_backend",
    "CapacityError",
    "ConsistencyError",
    "RankTolerance",
    "RankFactorization",
    "numeric_rank",
    "eigenvalues",
    "rank_factorize",
    "bordered_rank",
    "rank_restoring_gains",
    "gain_equivalence_check",
    "VectorPairFamily",
    "MatrixFamily",
    "JointIndependentSet",
    "SubsetCertificate",
    "grank_pairs_matroid",
    "grank_pairs_minformula",
    "grank_sampled",
    "expand_matrix_family",
    "grank_matrix_minformula",
    "refine_min_subset",
    "sampled_rank_with_constant",
    "grank_constant_plus_family",
    "MultiChannelSystem",
    "FixedModeCertificate",
    "FixedModeRecord",
    "FixedSpectrumReport",
    "pencil_rank_test",
    "find_blocking_subset",
    "find_blocking_subset_via_grank",
    "fixed_spectrum",
    "fixed_spectrum_sampled",
    "grank_closed_loop",
    "analyze_system",
]
