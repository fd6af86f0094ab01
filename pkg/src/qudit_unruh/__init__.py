"""Qudit Unruh channel: closed-form blocks, brute-force oracle, Lie-algebra structure and capacities."""

from .fock import (
    ORDERING_TAG,
    MultiIndex,
    QuditState,
    SymmetricBasis,
    basis_position,
    enumerate_symmetric_basis,
    multirail_encode,
    raise_index,
    sector_dim,
)
from .infotheory import (
    CapacityResult,
    FiniteChannel,
    InvalidStateError,
    coherent_information,
    conditional_entropy,
    entropy_HA,
    entropy_HC,
    entropy_tail_bound,
    fidelity,
    mutual_information,
    partial_trace,
    private_quantum_capacity,
    purify,
    quantum_capacity,
    trace_distance,
    von_neumann_entropy,
    wiretap_rate_lower_bound,
)
from .liealg import (
    GeneratorKind,
    GeneratorLabel,
    RepMatrix,
    canonical_coefficients,
    covariance_residual,
    fundamental_generator,
    random_su,
    reconstruct_block,
    symmetric_generator,
    symmetric_power,
)
from .series import TruncationError
from .squeezer_oracle import (
    TruncatedPureState,
    apply_multirail_squeezer,
    disentangled_squeezer_state,
    partial_trace_A,
    partial_trace_C,
    squeezer_column,
)
from .unruh import (
    BlockState,
    ChannelSpec,
    OmegaZero,
    SectorOperator,
    assemble_output,
    complementary_block,
    conjugate_degrade,
    maximally_mixed_output,
    output_block,
)

__version__ = "0.1.0"
