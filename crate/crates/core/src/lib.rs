//! Continuous quantum error correction under Markovian, system-bath and
//! memory-kernel noise.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod codes;
pub mod error;
pub mod lindblad;
pub mod numerics;
pub mod operators;
pub mod pmme;
pub mod xxbath;

pub use analysis::{FidelityTrace, MeasureEstimate, ShortTimeFit};
pub use codes::{five_qubit_code, one_qubit_code, three_qubit_code, StabilizerCode};
pub use error::{CqecError, Result};
pub use lindblad::{Channel, MarkovModel, SystemState};
pub use numerics::{ComplexMatrix, ComplexVector, C64};
pub use operators::{BasisConvention, DensityMatrix, PauliString, Superoperator};
pub use pmme::{MemoryKernel, PmmeModel};
pub use xxbath::{Regime, XXModel};
