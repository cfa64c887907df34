//! Hybrid classical/quantum secret sharing over qudits.
//!
//! The crate builds secret-sharing schemes in which a quantum secret is split
//! into classical shares (q-ary digits) and quantum shares (qudits), and
//! certifies each scheme exactly: every qualified subset must satisfy
//! `I(R; T) = 2 H(R)` and every forbidden subset `I(R; T) = 0`, where `R` is a
//! reference system maximally entangled with the secret.
//!
//! * [`qcore`]: dense complex matrices, density matrices, entropies.
//! * [`gf`]: prime fields and classical sharing (Shamir, replication).
//! * [`access`]: access structures, feasibility, enumeration, text format.
//! * [`qprim`]: Pauli operators, one-time pad, superdense coding, threshold codes.
//! * [`schemes`]: scheme families, rates and rate regions.
//! * [`verify`]: state assembly and the entropic audit.
//! * [`cli`]: the `qss` command-line front end.

pub mod access;
pub mod cli;
pub mod gf;
pub mod qcore;
pub mod qprim;
pub mod schemes;
pub mod verify;

pub use access::{AccessError, AccessStructure, ShareKind, ShareLabel, ShareSet};
pub use gf::{FieldElement, FieldError};
pub use qcore::QuantumError;
pub use qprim::PrimitiveError;
pub use schemes::{Scheme, SchemeError};
pub use verify::{assemble, audit, AuditReport, CQState};
