"""boostybe: integrable nearest-neighbour spin chains on a two-dimensional
local Hilbert space.

Conserved-charge towers via the boost recursion, the exact cubic
integrability system in the Pauli coefficients, the fourteen solution
families with closed-form R-matrices for the six new classes, perturbative
Yang-Baxter solving, spectral diagnostics, and the graded C^{1|1} sector.
"""

from .analysis import (
    JordanProfile,
    eigenvalue_equivalence,
    jordan_profile,
    nilpotency_index,
)
from .catalog import (
    ALL_FAMILIES,
    ModelFamily,
    ParamVector,
    RMatrixFn,
    hamiltonian,
    list_families,
    rmatrix,
    sample_params,
)
from .charges import (
    ChargeTower,
    FormalLocalSum,
    TelescopingError,
    boost_step,
    charge_tower,
    q3_density,
    verify_commutation,
)
from .graded import (
    OddOperatorError,
    SignChoice,
    bijection_map,
    graded_kron,
    graded_transfer_commutation,
    graded_ybe_residual,
    sign_twist,
    supertrace,
)
from .reshetikhin import (
    EquationSystem,
    commutator_system,
    evaluate_system,
    full_class_system,
    numeric_search,
    symbolic_q3,
    verify_family_symbolically,
)
from .tensor_core import (
    LocalDensity,
    PauliCoeffs,
    compose_from_pauli,
    decompose_to_pauli,
    embed_density,
    kron,
    periodic_sum,
    permutation_op,
    shift_operator,
    structure_constants,
    transfer_matrix,
)
from .transforms import (
    BasisTransform,
    NormalFormTag,
    apply_local_basis,
    apply_local_basis_R,
    discrete_transform,
    equivalence_probe,
    normalize,
    spectral_fingerprint,
    type_reduction,
)
from .ybe_verify import (
    ChFit,
    SeriesSolution,
    YbeReport,
    braiding_unitarity_check,
    ch_fit,
    extract_hamiltonian,
    gauge_match,
    regularity_check,
    series_solve,
    series_to_rmatrix,
    ybe_residual,
)

__version__ = "0.1.0"
