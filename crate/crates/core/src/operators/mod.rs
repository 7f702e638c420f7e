//! Pauli algebra, density matrices and vectorization conventions.

mod basis;
mod density;
mod pauli;

pub use basis::{
    basis_change_matrix, binary_index, binary_labels, component_bit, devectorize,
    lowering_dissipator_on_component, superoperator_matrix, vectorize, vectorize_matrix,
    BasisConvention, Superoperator,
};
pub use density::{partial_trace, DensityMatrix};
pub use pauli::{commutes, pauli_multiply, pauli_to_matrix, Pauli, PauliString, Phase};
