//! Numerical toolkit for classical-quantum Slepian-Wolf compression.
//!
//! A cq-source `ω^{XBR} = Σ_x p(x)|x⟩⟨x| ⊗ |ψ_x⟩⟨ψ_x|^{BR}` is analysed through its
//! entropic profile, the constrained quantity `I_δ`, the resulting rate regions in
//! the `(R_X, R_B)` plane, and explicit small block codes.

pub mod error;
pub mod qcore;
pub mod source;
pub mod idelta;
pub mod region;
pub mod codes;
pub mod suites;

pub use error::{Error, Result};
pub use qcore::{ComplexMatrix, ComplexVector, DensityOperator, DimsSpec, Isometry, PureState, Tolerances, C64};
