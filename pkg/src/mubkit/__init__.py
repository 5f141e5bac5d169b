"""Order-six complex Hadamard matrices, mutually unbiased bases and Schmidt rank."""

from .catalog import (
    ALPHA,
    OMEGA,
    H2Params,
    H3Params,
    KarlssonParams,
    bjorck,
    check_sr2,
    dita,
    fourier3,
    fourier6,
    fourier_family,
    h1,
    h2,
    h3,
    karlsson_matrix,
    karlsson_params_from_matrix,
    karlsson_validate,
    spectral,
    spectral_move,
    spectral_prime,
    sr3_example,
    sr4_example,
)
from .detectors import FilterReport, PatternHit, filter_trio_candidate
from .entanglement import DensityMatrix, build_lemma_state, certify_entangled_2x3, is_ppt
from .errors import (
    ConvergenceError,
    MubkitError,
    ParseError,
    PreconditionError,
    ShapeError,
    ValidationError,
)
from .linalg import (
    DEFAULT_SHAPE,
    DEFAULT_TOL,
    BipartiteShape,
    Tolerances,
    dagger,
    kron,
    numeric_rank,
    partial_transpose,
    singular_values,
)
from .mub import (
    EquivalenceMove,
    apply_equivalence,
    are_unbiased,
    dephase_matrix,
    dephase_vector,
    is_chm,
    is_mub_trio,
    is_unitary,
    product_columns,
)
from .musearch import (
    MuVectorSet,
    conjugate_solutions,
    find_mu_vectors,
    map_solutions,
    pairwise_min_overlap,
)
from .schmidt import (
    SchmidtData,
    conjugate_by_Q,
    min_schmidt_upper_bound,
    random_equivalence_rank_probe,
    realign,
    schmidt_decomposition,
    schmidt_rank,
)
from .sinkhorn import (
    SinkhornForm,
    is_doubly_quasistochastic,
    mu_vector_from_sinkhorn,
    sinkhorn_normalize,
)

__version__ = "0.1.0"
