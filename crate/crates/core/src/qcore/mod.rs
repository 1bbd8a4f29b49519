//! Linear algebra and quantum-information primitives.

pub mod dims;
pub mod entropy;
pub mod linalg;
pub mod metrics;
pub mod purify;
pub mod random;
pub mod state;

pub use dims::DimsSpec;
pub use entropy::{
    conditional_entropy, conditional_mutual_information, conditional_mutual_information_with_tol, entropy_of,
    mutual_information, von_neumann_entropy,
};
pub use linalg::{ComplexMatrix, ComplexVector, C64};
pub use metrics::{
    binary_entropy, fidelity, fidelity_with_pure, operator_norm, relative_entropy, trace_distance, trace_norm,
};
pub use purify::{purify, uhlmann_isometry};
pub use state::{DensityOperator, Isometry, PureState, Tolerances};

/// Partial trace keeping `keep`, in the operator's own label order.
pub fn partial_trace(rho: &DensityOperator, keep: &[&str]) -> crate::Result<DensityOperator> {
    rho.partial_trace(keep)
}
