//! Scrambling quantifiers: OTOCs, Pauli-averaged OTOCs, mutual-information
//! measures and their bound, open-system OTOCs, two-point measurement
//! statistics, and the system/environment entropy decomposition.

mod decomposition;
mod information;
mod open_otoc;
mod otoc;
mod pauli_average;
mod wingflap;

pub use decomposition::{decomposition_series, entropy_decomposition, DecompositionRecord};
pub use information::{
    bound_residual, bound_series, mutual_information, operator_state, subsystem_entropy, tripartite_mutual_information,
    BoundSample, UNITARITY_TOL,
};
pub use open_otoc::{open_bipartite_otoc, open_bipartite_otoc_series, OPEN_OTOC_EXACT_QUBITS, UNITALITY_TOL};
pub use otoc::{otoc, otoc_series, squared_commutator, OtocSample};
pub use pauli_average::{
    open_pauli_averaged_otoc_series, pauli_averaged_otoc, pauli_averaged_otoc_series, Enumeration, PauliAverage,
    PauliAverageOptions, DEFAULT_PAIR_SAMPLES, EXACT_PAIR_LIMIT, OPEN_EXACT_LIMIT,
};
pub use wingflap::{
    dephase_in_eigenbasis, phase_operator, wingflap_distribution, WingflapDistribution, WingflapOutcome, OUTCOME_TOL,
};

/// Bound violations below this count as genuine.
pub const BOUND_TOL: f64 = 1e-9;
