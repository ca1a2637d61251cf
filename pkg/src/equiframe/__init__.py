"""Companion equiangular tight frames from power residue characters, DFT sign
eigenvector search, and an equiangular QKD simulator."""

__version__ = "0.1.0"

from .characters import (
    CharacterVector,
    character_vector,
    is_prime,
    legendre,
    primitive_root_of_order,
)
from .eigensearch import (
    SearchReport,
    conjugate_eigenvector_check,
    sign_eigenvector_search,
    uniqueness_report,
)
from .errors import (
    ConstructionInvalid,
    InvalidArgument,
    InvalidState,
    SearchBudgetExceeded,
    UndefinedEstimate,
)
from .frames import (
    CompanionPair,
    FrameSpec,
    Povm,
    companion_from_character,
    fourier_etf,
    is_companion,
    is_etf,
    is_funtf,
    povm_from_frame,
    renes_fixtures,
    tensor_two_distance_check,
)
from .linalg import apply_dft, dft_matrix, inner
from .qkd import (
    ProtocolParams,
    SessionStats,
    closed_form_stats,
    key_bit,
    measure_povm,
    mutual_information_estimate,
    simulate_round,
    simulate_session,
)
