//! Hilbert-space primitives: operators, states, Pauli strings, spectra and entropies.

pub mod dense;
pub mod entropy;
pub mod operator;
pub mod pauli;
pub mod spectrum;
pub mod state;

pub use dense::{Matrix, C64};
pub use entropy::{relative_entropy, von_neumann_entropy};
pub use operator::{tensor_product, Operator, MAX_QUBITS};
pub use pauli::{enumerate_pauli_group, pauli_matrix, pauli_string_on, pauli_strings_on, Pauli, PauliString};
pub use spectrum::{eig_hermitian, unitary_exp, Spectrum};
pub use state::{partial_trace, partial_trace_operator, DensityMatrix, SubsystemMask};
