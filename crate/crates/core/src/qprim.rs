//! Qudit building blocks over prime `q`: generalized Paulis, maximally
//! entangled pairs, the quantum one-time pad, superdense coding and the
//! polynomial ((K, 2K-1)) threshold code with optional truncation.

use std::f64::consts::PI;

use thiserror::Error;

use crate::gf::{is_prime, FieldElement};
use crate::qcore::{CMatrix, DensityMatrix, QuantumError, StateVector, SubsystemLayout, C64, TAU_H};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PrimitiveError {
    #[error("q = {0} is not prime")]
    NotPrime(u32),
    #[error("threshold code needs N/2 < K <= N (got K={k}, N={n})")]
    InvalidThreshold { k: usize, n: usize },
    #[error("threshold code with K={k} needs q >= {needed}, got {q}")]
    FieldTooSmall { k: usize, q: u32, needed: usize },
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

fn check_prime(q: u32) -> Result<(), PrimitiveError> {
    if is_prime(q) {
        Ok(())
    } else {
        Err(PrimitiveError::NotPrime(q))
    }
}

fn omega(q: u32, k: u64) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * (k % u64::from(q)) as f64 / f64::from(q))
}

/// Shift `X|j> = |j+1 mod q>`.
pub fn pauli_x(q: u32) -> Result<CMatrix, PrimitiveError> {
    check_prime(q)?;
    let d = q as usize;
    Ok(CMatrix::from_fn(d, d, |i, j| if i == (j + 1) % d { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }))
}

/// Clock `Z|j> = w^j |j>`, `w = exp(2 pi i / q)`.
pub fn pauli_z(q: u32) -> Result<CMatrix, PrimitiveError> {
    check_prime(q)?;
    let d = q as usize;
    Ok(CMatrix::from_fn(d, d, |i, j| if i == j { omega(q, i as u64) } else { C64::new(0.0, 0.0) }))
}

/// The gate `X^alpha Z^beta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliPower {
    pub alpha: FieldElement,
    pub beta: FieldElement,
}

impl PauliPower {
    pub fn new(alpha: FieldElement, beta: FieldElement) -> Result<Self, PrimitiveError> {
        if alpha.modulus() != beta.modulus() {
            return Err(PrimitiveError::NotPrime(beta.modulus()));
        }
        Ok(Self { alpha, beta })
    }

    pub fn from_values(alpha: u32, beta: u32, q: u32) -> Result<Self, PrimitiveError> {
        check_prime(q)?;
        Ok(Self { alpha: FieldElement::reduced(alpha.into(), q), beta: FieldElement::reduced(beta.into(), q) })
    }

    pub fn q(&self) -> u32 {
        self.alpha.modulus()
    }

    /// `X^alpha Z^beta` as a matrix: `|j> -> w^(beta j) |j + alpha>`.
    pub fn matrix(&self) -> CMatrix {
        let q = self.q();
        let d = q as usize;
        let (a, b) = (self.alpha.value() as usize, u64::from(self.beta.value()));
        CMatrix::from_fn(d, d, |i, j| if i == (j + a) % d { omega(q, b * j as u64) } else { C64::new(0.0, 0.0) })
    }

    /// `(X^alpha Z^beta)^dagger = Z^-beta X^-alpha`.
    pub fn inverse_matrix(&self) -> CMatrix {
        self.matrix().adjoint()
    }
}

/// `(1/sqrt q) sum_j |j j>` as a two-slot state vector.
pub fn bell_state(q: u32) -> Result<StateVector, PrimitiveError> {
    check_prime(q)?;
    let d = q as usize;
    let mut amps = vec![C64::new(0.0, 0.0); d * d];
    let a = 1.0 / f64::from(q).sqrt();
    for j in 0..d {
        amps[j * d + j] = C64::new(a, 0.0);
    }
    Ok(StateVector::new(vec![d, d], amps)?)
}

/// Bell pair density matrix on the subsystems `labels`.
pub fn bell_pair(q: u32, labels: [&str; 2]) -> Result<DensityMatrix, PrimitiveError> {
    let psi = bell_state(q)?;
    let layout = SubsystemLayout::qudits(q, labels)?;
    Ok(DensityMatrix::from_pure(layout, psi.amplitudes())?)
}

/// Conjugates the subsystem `target` by `X^alpha Z^beta`.
pub fn qotp_apply(rho: &DensityMatrix, target: &str, p: PauliPower) -> Result<DensityMatrix, PrimitiveError> {
    Ok(rho.conjugate_local(target, &p.matrix())?)
}

/// Undoes [`qotp_apply`] with the same key.
pub fn qotp_remove(rho: &DensityMatrix, target: &str, p: PauliPower) -> Result<DensityMatrix, PrimitiveError> {
    Ok(rho.conjugate_local(target, &p.inverse_matrix())?)
}

/// Superdense encoding of `msg` as a pure state on slots `(pi1, pi2)`:
/// `pi1` is the untouched half of a Bell pair and `pi2 = X^a Z^b pi0`.
pub fn superdense_state(msg: PauliPower) -> Result<StateVector, PrimitiveError> {
    let bell = bell_state(msg.q())?;
    Ok(bell.apply_local(1, &msg.matrix())?)
}

pub fn superdense_encode(msg: PauliPower) -> Result<DensityMatrix, PrimitiveError> {
    let psi = superdense_state(msg)?;
    let layout = SubsystemLayout::qudits(msg.q(), ["pi1", "pi2"])?;
    Ok(DensityMatrix::from_pure(layout, psi.amplitudes())?)
}

/// Measures a two-qudit state in the generalized Bell basis and returns the
/// message when the outcome is certain.
pub fn superdense_decode(state: &DensityMatrix) -> Result<(FieldElement, FieldElement), PrimitiveError> {
    let q = state.layout().base();
    let dims = state.layout().dims();
    if dims != [q as usize, q as usize] {
        return Err(QuantumError::DimensionMismatch { expected: (q * q) as usize, found: state.dim() }.into());
    }
    for a in 0..q {
        for b in 0..q {
            let key = PauliPower::from_values(a, b, q)?;
            let v = superdense_state(key)?;
            let rv = state.entries().matvec(v.amplitudes());
            let overlap: C64 = v.amplitudes().iter().zip(&rv).map(|(x, y)| x.conj() * y).sum();
            if (overlap.re - 1.0).abs() <= 1e-8 {
                return Ok((key.alpha, key.beta));
            }
        }
    }
    Err(QuantumError::NotBellBasis.into())
}

/// The polynomial ((K, 2K-1)) threshold code over `F_q`, truncated to `N` shares.
///
/// A secret digit `s` maps to the uniform superposition over polynomials
/// `f(x) = a_0 + ... + a_{K-2} x^{K-2} + s x^{K-1}` of the codeword
/// `|f(0), f(1), ..., f(2K-2)>`. The first `N` coordinates are shares; the
/// remaining `2K-1-N` are an environment that is never handed out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ThresholdCode {
    k: usize,
    n: usize,
    q: u32,
}

impl ThresholdCode {
    pub fn new(k: usize, n: usize, q: u32) -> Result<Self, PrimitiveError> {
        check_prime(q)?;
        if k == 0 || k > n || 2 * k <= n {
            return Err(PrimitiveError::InvalidThreshold { k, n });
        }
        if (q as usize) < 2 * k - 1 {
            return Err(PrimitiveError::FieldTooSmall { k, q, needed: 2 * k - 1 });
        }
        Ok(Self { k, n, q })
    }

    pub fn threshold(&self) -> usize {
        self.k
    }

    pub fn shares(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Length of the untruncated codeword, `2K - 1`.
    pub fn length(&self) -> usize {
        2 * self.k - 1
    }

    pub fn environment(&self) -> usize {
        self.length() - self.n
    }

    /// Encoding isometry, `q^(2K-1) x q`.
    pub fn isometry(&self) -> CMatrix {
        let q = self.q as usize;
        let len = self.length();
        let free = self.k - 1;
        let norm = 1.0 / (q as f64).powi(free as i32).sqrt();
        let rows = q.pow(len as u32);
        let mut v = CMatrix::zeros(rows, q);
        for s in 0..q {
            for idx in 0..q.pow(free as u32) {
                // Low coefficients a_0..a_{K-2} from the digits of idx.
                let mut coeffs = Vec::with_capacity(self.k);
                let mut rem = idx;
                for _ in 0..free {
                    coeffs.push(rem % q);
                    rem /= q;
                }
                coeffs.push(s);
                let mut row = 0;
                for x in 0..len {
                    let val = coeffs.iter().rev().fold(0usize, |acc, &c| (acc * x + c) % q);
                    row = row * q + val;
                }
                v[(row, s)] += C64::new(norm, 0.0);
            }
        }
        v
    }

    /// Replaces slot `slot` by `2K-1` slots (shares first, then environment).
    pub fn encode_state(&self, state: &StateVector, slot: usize) -> Result<StateVector, PrimitiveError> {
        let q = self.q as usize;
        if state.dims().get(slot) != Some(&q) {
            return Err(QuantumError::DimensionMismatch { expected: q, found: state.dims().get(slot).copied().unwrap_or(0) }.into());
        }
        let encoded = state.apply_local(slot, &self.isometry())?;
        Ok(encoded.split_slot(slot, &vec![q; self.length()])?)
    }

    /// Density-matrix form: `secret` is replaced (in place) by `share_labels`
    /// followed by environment subsystems named `<secret>.env<i>`.
    pub fn encode(&self, rho: &DensityMatrix, secret: &str, share_labels: &[&str]) -> Result<DensityMatrix, PrimitiveError> {
        if share_labels.len() != self.n {
            return Err(PrimitiveError::InvalidThreshold { k: self.k, n: share_labels.len() });
        }
        let layout = rho.layout();
        let pos = layout.position(secret).ok_or_else(|| QuantumError::UnknownLabel(secret.into()))?;
        let q = self.q as usize;
        if layout.dims()[pos] != q {
            return Err(QuantumError::DimensionMismatch { expected: q, found: layout.dims()[pos] }.into());
        }
        let mut full = CMatrix::identity(1);
        for (i, d) in layout.dims().into_iter().enumerate() {
            full = full.kron(&if i == pos { self.isometry() } else { CMatrix::identity(d) });
        }
        let entries = full.matmul(rho.entries()).matmul(&full.adjoint());
        let mut parts: Vec<(String, usize)> = Vec::new();
        for (i, p) in layout.parts().iter().enumerate() {
            if i == pos {
                parts.extend(share_labels.iter().map(|l| (l.to_string(), q)));
                parts.extend((1..=self.environment()).map(|e| (format!("{secret}.env{e}"), q)));
            } else {
                parts.push((p.label.clone(), p.dim));
            }
        }
        let out_layout = SubsystemLayout::new(layout.base(), parts)?;
        Ok(DensityMatrix::new(out_layout, entries)?)
    }
}

/// True when `u` is unitary within `TAU_H`.
pub fn is_unitary(u: &CMatrix) -> bool {
    u.is_unitary(TAU_H)
}
