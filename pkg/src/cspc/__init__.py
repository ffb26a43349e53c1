"""Cycle and circulant decomposition toolkit.

Decomposes square matrices into wrapped-diagonal cycles via the Fourier
similarity transform B = W A W*, measures how few cycles dominate for
periodic and Toeplitz structure, approximates spectra from sparse cycle
subsets, and builds circulant-cycle preconditioners for conjugate
gradient solvers.
"""

__version__ = "0.1.0"

from .core import (
    ConfigError,
    CycleSelection,
    NumericalError,
    apply_cycle_mask,
    flip_matrix,
    fourier_matrix,
    frobenius_inner,
    full_cycle_matrix,
    materialize_cycle,
    relaxation_diagonal,
)
from .decomposition import (
    CirculantComponent,
    CycleDecomposition,
    DominanceReport,
    block_toeplitz_frequency_sets,
    circulant_decompose_recursive,
    circulant_decompose_via_transform,
    cycle_decompose,
    cycle_weights,
    dominance_relation,
    index_reflect,
    orthogonality_check,
    partial_energy,
    recompose,
    recompose_cycles,
    toeplitz_partial_energy,
    toeplitz_s0,
)
from .generators import StructuredMatrixSpec, SymbolSpec, generate
from .precond import (
    PcgReport,
    build_cycle_preconditioner,
    build_tchan_preconditioner,
    pcg_solve,
    precond_benchmark,
)
from .sparse import (
    BauerFikeBound,
    EigenApproxResult,
    PdCheckReport,
    SparseCycleMatrix,
    approx_eigenvalues,
    bauer_fike_bound,
    direct_sparsify,
    eigen_error_report,
    pd_sufficient_check,
    select_dominant_cycles,
    sparsify,
)
from .transform import (
    DftPlan,
    OpCounter,
    dft,
    extract_cycles,
    inverse_similarity_transform,
    similarity_transform,
)

__all__ = [
    "__version__",
    "ConfigError",
    "NumericalError",
    "CycleSelection",
    "full_cycle_matrix",
    "flip_matrix",
    "fourier_matrix",
    "relaxation_diagonal",
    "frobenius_inner",
    "apply_cycle_mask",
    "materialize_cycle",
    "DftPlan",
    "OpCounter",
    "dft",
    "similarity_transform",
    "inverse_similarity_transform",
    "extract_cycles",
    "CycleDecomposition",
    "CirculantComponent",
    "DominanceReport",
    "cycle_decompose",
    "recompose_cycles",
    "circulant_decompose_recursive",
    "circulant_decompose_via_transform",
    "recompose",
    "orthogonality_check",
    "cycle_weights",
    "partial_energy",
    "index_reflect",
    "dominance_relation",
    "toeplitz_s0",
    "toeplitz_partial_energy",
    "block_toeplitz_frequency_sets",
    "SparseCycleMatrix",
    "EigenApproxResult",
    "BauerFikeBound",
    "PdCheckReport",
    "select_dominant_cycles",
    "sparsify",
    "direct_sparsify",
    "approx_eigenvalues",
    "eigen_error_report",
    "bauer_fike_bound",
    "pd_sufficient_check",
    "PcgReport",
    "build_cycle_preconditioner",
    "build_tchan_preconditioner",
    "pcg_solve",
    "precond_benchmark",
    "StructuredMatrixSpec",
    "SymbolSpec",
    "generate",
]
