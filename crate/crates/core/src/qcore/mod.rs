//! Dense complex linear algebra for small quantum systems: labelled tensor
//! products, partial traces, Hermitian spectra and entropies in q-ary units.

mod density;
mod eigen;
mod matrix;
mod state;

pub use density::{
    mutual_information, partial_trace, tensor, von_neumann_entropy, DensityMatrix, EntropyReport,
    Subsystem, SubsystemLayout,
};
pub use eigen::{eig_hermitian, eigh, HermitianEigen};
pub use matrix::{CMatrix, C64};
pub use state::{mixture_entropy, StateVector};

use thiserror::Error;

/// Hermiticity and unit-trace tolerance.
pub const TAU_H: f64 = 1e-9;
/// Eigenvalue clamping threshold. Eigenvalues in `(-TAU_EIG, TAU_EIG)` count as zero.
pub const TAU_EIG: f64 = 1e-9;
/// Tolerance for every entropic equality.
pub const TAU: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("trace is {trace:.12}, expected 1")]
    NotUnitTrace { trace: f64 },
    #[error("eigenvalue {value:.3e} is below -{TAU_EIG:e}")]
    NegativeEigenvalue { value: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("label `{0}` appears in both operands")]
    LabelCollision(String),
    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),
    #[error("subsystem `{0}` appears in both parts")]
    OverlappingParts(String),
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
    #[error("state is not in the generalized Bell basis")]
    NotBellBasis,
}

/// `-sum p log_q p` over a spectrum or distribution, with `0 log 0 = 0`.
///
/// Values within `TAU_EIG` of zero are dropped; anything more negative is an error.
pub fn entropy_of_spectrum(values: &[f64], base: u32) -> Result<f64, QuantumError> {
    let ln_q = f64::from(base).ln();
    let mut h = 0.0;
    for &v in values {
        if v < -TAU_EIG {
            return Err(QuantumError::NegativeEigenvalue { value: v });
        }
        if v > TAU_EIG {
            h -= v * v.ln();
        }
    }
    Ok(h / ln_q)
}
