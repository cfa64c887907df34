//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary, then applies an ordinary real Givens rotation. Pivots that are
//! exactly zero are skipped, so block-diagonal inputs (classical registers
//! embedded as diagonal blocks) only pay for their blocks.

use super::matrix::{CMatrix, C64};
use super::{QuantumError, TAU_H};

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Eigenvectors as columns, matching `values`.
    pub vectors: CMatrix,
}

/// Real eigenvalues of a Hermitian matrix, descending.
pub fn eig_hermitian(m: &CMatrix) -> Result<Vec<f64>, QuantumError> {
    check_hermitian(m)?;
    let mut values = Vec::with_capacity(m.rows());
    for block in decoupled_blocks(m) {
        let mut a = CMatrix::from_fn(block.len(), block.len(), |r, c| m[(block[r], block[c])]);
        jacobi_sweeps(&mut a, None);
        values.extend((0..a.rows()).map(|i| a[(i, i)].re));
    }
    values.sort_by(|x, y| y.total_cmp(x));
    Ok(values)
}

/// Index sets of the connected components of the coupling graph `|m_ij| > eps`.
///
/// Couplings below `eps = 1e-15 |m|_F` are dropped; the spectrum moves by at
/// most `n eps`, far below the clamping tolerance.
fn decoupled_blocks(m: &CMatrix) -> Vec<Vec<usize>> {
    let n = m.rows();
    let eps = 1e-15 * m.frobenius_norm();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if m[(i, j)].norm() > eps {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let r = root(&mut parent, i);
        blocks[r].push(i);
    }
    blocks.retain(|b| !b.is_empty());
    blocks
}

/// Eigenvalues and eigenvectors of a Hermitian matrix.
pub fn eigh(m: &CMatrix) -> Result<HermitianEigen, QuantumError> {
    check_hermitian(m)?;
    let n = m.rows();
    let mut a = m.clone();
    let mut v = CMatrix::identity(n);
    jacobi_sweeps(&mut a, Some(&mut v));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

fn check_hermitian(m: &CMatrix) -> Result<(), QuantumError> {
    if !m.is_square() {
        return Err(QuantumError::DimensionMismatch { expected: m.rows(), found: m.cols() });
    }
    let defect = m.hermitian_defect();
    if defect > TAU_H * m.max_abs().max(1.0) {
        return Err(QuantumError::NotHermitian { defect });
    }
    Ok(())
}

fn off_diagonal_sq(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            s += a[(i, j)].norm_sqr();
        }
    }
    2.0 * s
}

fn jacobi_sweeps(a: &mut CMatrix, mut v: Option<&mut CMatrix>) {
    let n = a.rows();
    if n < 2 {
        return;
    }
    // Symmetrise so the update below can treat the upper triangle as authoritative.
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return;
    }
    let target = (1e-15 * scale).powi(2);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_sq(a) <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 || mag < 1e-300 {
                    continue;
                }
                rotate(a, v.as_deref_mut(), p, q, apq, mag);
            }
        }
    }
}

fn rotate(a: &mut CMatrix, v: Option<&mut CMatrix>, p: usize, q: usize, apq: C64, mag: f64) {
    let n = a.rows();
    // Phase e^{-i phi} on column q makes the pivot real and positive.
    let phase = apq / mag;
    let phase_conj = phase.conj();
    for r in 0..n {
        if r == q {
            continue;
        }
        a[(r, q)] *= phase_conj;
        a[(q, r)] *= phase;
    }

    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for r in 0..n {
        if r == p || r == q {
            continue;
        }
        let arp = a[(r, p)];
        let arq = a[(r, q)];
        let new_rp = arp * c - arq * s;
        let new_rq = arp * s + arq * c;
        a[(r, p)] = new_rp;
        a[(r, q)] = new_rq;
        a[(p, r)] = new_rp.conj();
        a[(q, r)] = new_rq.conj();
    }
    a[(p, p)] = C64::new(app - t * mag, 0.0);
    a[(q, q)] = C64::new(aqq + t * mag, 0.0);
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);

    if let Some(v) = v {
        for r in 0..n {
            let vrp = v[(r, p)];
            let vrq = v[(r, q)] * phase_conj;
            v[(r, p)] = vrp * c - vrq * s;
            v[(r, q)] = vrp * s + vrq * c;
        }
    }
}
