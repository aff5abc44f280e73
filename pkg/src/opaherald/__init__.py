"""Heralded states from a post-selected optical parametric amplifier.

A coherent signal and a single idler photon enter a two-mode amplifier;
detecting one idler photon at the output leaves the signal in a state that
moves from a coherent state through a displaced single-photon state towards
a photon-added coherent state as the gain grows.
"""

from .amplifier import AmplifierParams, evolve_expm_oracle, evolve_factored, herald
from .errormodel import ErrorModel, OutcomeTable, fidelity_full, fidelity_lower_bound, outcome_state, outcome_table
from .errors import (
    DimensionMismatch,
    DimensionTooLarge,
    InvalidAmplitude,
    InvalidGain,
    InvalidModel,
    NonConvergent,
    NumericalError,
    OpaHeraldError,
    TruncationTooSmall,
    ZeroProbability,
)
from .fock import (
    StateVec,
    Truncation,
    TwoModeState,
    coherent_state,
    displaced_number_state,
    displacement_matrix,
    inner_product,
    ladder,
    number_state,
    overlap_sq,
    project_idler,
    tensor,
)
from .heralded import (
    HeraldedState,
    closed_output,
    gain_displaced_number,
    gain_orthogonal_photon_added,
    photon_added_state,
    q_zero_location,
    success_probability,
    vanishing_coefficient_index,
)
from .observables import (
    MomentReport,
    QGrid,
    locate_q_zero,
    photon_moments_closed,
    photon_moments_numeric,
    q_function,
    reference_projections,
)

__version__ = "0.1.0"

__all__ = [
    "AmplifierParams",
    "closed_output",
    "coherent_state",
    "DimensionMismatch",
    "DimensionTooLarge",
    "displaced_number_state",
    "displacement_matrix",
    "ErrorModel",
    "evolve_expm_oracle",
    "evolve_factored",
    "fidelity_full",
    "fidelity_lower_bound",
    "gain_displaced_number",
    "gain_orthogonal_photon_added",
    "herald",
    "HeraldedState",
    "inner_product",
    "InvalidAmplitude",
    "InvalidGain",
    "InvalidModel",
    "ladder",
    "locate_q_zero",
    "MomentReport",
    "NonConvergent",
    "number_state",
    "NumericalError",
    "OpaHeraldError",
    "outcome_state",
    "outcome_table",
    "OutcomeTable",
    "overlap_sq",
    "photon_added_state",
    "photon_moments_closed",
    "photon_moments_numeric",
    "project_idler",
    "q_function",
    "q_zero_location",
    "QGrid",
    "reference_projections",
    "StateVec",
    "success_probability",
    "tensor",
    "Truncation",
    "TruncationTooSmall",
    "TwoModeState",
    "vanishing_coefficient_index",
    "ZeroProbability",
]

