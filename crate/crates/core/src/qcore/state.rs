use super::density::permutation_map;
use super::eigen::eig_hermitian;
use super::matrix::{CMatrix, C64};
use super::{entropy_of_spectrum, QuantumError};

/// Pure state over an ordered list of slots (tensor factors), first slot most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    dims: Vec<usize>,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(dims: Vec<usize>, amps: Vec<C64>) -> Result<Self, QuantumError> {
        let total: usize = dims.iter().product();
        if amps.len() != total {
            return Err(QuantumError::DimensionMismatch { expected: total, found: amps.len() });
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > super::TAU_H {
            return Err(QuantumError::NotUnitTrace { trace: norm });
        }
        Ok(Self { dims, amps })
    }

    /// Computational-basis product state `|digits[0] digits[1] ...>`.
    pub fn basis(dims: Vec<usize>, digits: &[usize]) -> Result<Self, QuantumError> {
        if digits.len() != dims.len() {
            return Err(QuantumError::DimensionMismatch { expected: dims.len(), found: digits.len() });
        }
        let mut index = 0;
        for (&d, &v) in dims.iter().zip(digits) {
            if v >= d {
                return Err(QuantumError::DimensionMismatch { expected: d, found: v });
            }
            index = index * d + v;
        }
        let mut amps = vec![C64::new(0.0, 0.0); dims.iter().product()];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { dims, amps })
    }

    /// The empty (one-dimensional) state.
    pub fn scalar() -> Self {
        Self { dims: Vec::new(), amps: vec![C64::new(1.0, 0.0)] }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn num_slots(&self) -> usize {
        self.dims.len()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend(&other.dims);
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Self { dims, amps }
    }

    /// Reorders slots; `perm[k]` is the current position of the new slot `k`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self, QuantumError> {
        let mut sorted = perm.to_vec();
        sorted.sort_unstable();
        if sorted != (0..self.dims.len()).collect::<Vec<_>>() {
            return Err(QuantumError::InvalidLayout(format!("{perm:?} is not a permutation")));
        }
        let map = permutation_map(&self.dims, perm);
        let dims = perm.iter().map(|&p| self.dims[p]).collect();
        let amps = map.iter().map(|&old| self.amps[old]).collect();
        Ok(Self { dims, amps })
    }

    /// Applies `op` (shape `out_dim x dims[slot]`) to one slot. With a
    /// non-square isometry the slot is replaced by one of dimension
    /// `out_dim`; use [`StateVector::split_slot`] to factor it afterwards.
    pub fn apply_local(&self, slot: usize, op: &CMatrix) -> Result<Self, QuantumError> {
        let d = *self.dims.get(slot).ok_or_else(|| QuantumError::UnknownLabel(format!("slot {slot}")))?;
        if op.cols() != d {
            return Err(QuantumError::DimensionMismatch { expected: d, found: op.cols() });
        }
        let outer: usize = self.dims[..slot].iter().product();
        let inner: usize = self.dims[slot + 1..].iter().product();
        let out_d = op.rows();
        let mut amps = vec![C64::new(0.0, 0.0); outer * out_d * inner];
        for o in 0..outer {
            for i in 0..inner {
                for r in 0..out_d {
                    let mut s = C64::new(0.0, 0.0);
                    for c in 0..d {
                        s += op[(r, c)] * self.amps[(o * d + c) * inner + i];
                    }
                    amps[(o * out_d + r) * inner + i] = s;
                }
            }
        }
        let mut dims = self.dims.clone();
        dims[slot] = out_d;
        Ok(Self { dims, amps })
    }

    /// Re-labels slot `slot` as the tensor product of `parts` (which must multiply to its dimension).
    pub fn split_slot(&self, slot: usize, parts: &[usize]) -> Result<Self, QuantumError> {
        let d = self.dims[slot];
        let prod: usize = parts.iter().product();
        if prod != d {
            return Err(QuantumError::DimensionMismatch { expected: d, found: prod });
        }
        let mut dims = self.dims[..slot].to_vec();
        dims.extend_from_slice(parts);
        dims.extend_from_slice(&self.dims[slot + 1..]);
        Ok(Self { dims, amps: self.amps.clone() })
    }

    /// Matrix `Psi[kept, rest]` with kept slots in ascending order.
    fn bipartition(&self, keep: &[usize]) -> Result<(usize, usize, Vec<C64>), QuantumError> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.iter().any(|&k| k >= self.dims.len()) {
            return Err(QuantumError::UnknownLabel(format!("slot in {keep:?}")));
        }
        let rest: Vec<usize> = (0..self.dims.len()).filter(|i| !keep.contains(i)).collect();
        let mut perm = keep.clone();
        perm.extend(&rest);
        let map = permutation_map(&self.dims, &perm);
        let dk: usize = keep.iter().map(|&i| self.dims[i]).product();
        let dr: usize = rest.iter().map(|&i| self.dims[i]).product();
        Ok((dk, dr, map.iter().map(|&o| self.amps[o]).collect()))
    }

    /// Reduced density matrix on `keep` (slots in ascending order).
    pub fn reduced(&self, keep: &[usize]) -> Result<CMatrix, QuantumError> {
        let (dk, dr, psi) = self.bipartition(keep)?;
        let mut out = CMatrix::zeros(dk, dk);
        for a in 0..dk {
            for b in a..dk {
                let s: C64 = (0..dr).map(|e| psi[a * dr + e] * psi[b * dr + e].conj()).sum();
                out[(a, b)] = s;
                out[(b, a)] = s.conj();
            }
        }
        Ok(out)
    }

    /// Entanglement entropy of the slots `keep`, in units of `log base`.
    pub fn entropy(&self, keep: &[usize], base: u32) -> Result<f64, QuantumError> {
        mixture_entropy(&[(1.0, self)], keep, base)
    }
}

/// Entropy of `sum_k w_k Tr_rest |psi_k><psi_k|` restricted to the slots `keep`.
///
/// The reduced mixture equals `M M^dagger` with `M = [sqrt(w_1) Psi_1 | sqrt(w_2) Psi_2 | ...]`,
/// where `Psi_k` is `psi_k` reshaped to `(kept, rest)`. Whichever of
/// `M M^dagger` and `M^dagger M` is smaller gets diagonalised; both share the
/// nonzero spectrum. Branch states are sparse, so the product is accumulated
/// from the nonzero amplitudes only.
pub fn mixture_entropy(items: &[(f64, &StateVector)], keep: &[usize], base: u32) -> Result<f64, QuantumError> {
    let Some((_, first)) = items.first() else {
        return Err(QuantumError::InvalidLayout("empty mixture".into()));
    };
    let mut blocks = Vec::with_capacity(items.len());
    let (mut dk, mut dr) = (0, 0);
    for (w, psi) in items {
        if psi.dims != first.dims {
            return Err(QuantumError::InvalidLayout("mixture components differ in layout".into()));
        }
        let (k, r, m) = psi.bipartition(keep)?;
        dk = k;
        dr = r;
        blocks.push((w.sqrt(), m));
    }
    if dk == 1 {
        return Ok(0.0);
    }
    let cols = dr * blocks.len();
    // Nonzero entries of M, grouped by row (kept index) or by column (block, rest index).
    let by_row = dk > cols;
    let lines = if by_row { dk } else { cols };
    let mut sparse: Vec<Vec<(usize, C64)>> = vec![Vec::new(); lines];
    for (b, (w, m)) in blocks.iter().enumerate() {
        for (idx, &amp) in m.iter().enumerate() {
            if amp == C64::new(0.0, 0.0) {
                continue;
            }
            let (a, c) = (idx / dr, b * dr + idx % dr);
            let v = amp * *w;
            if by_row {
                sparse[a].push((c, v.conj()));
            } else {
                sparse[c].push((a, v));
            }
        }
    }
    // Sum of outer products v v^dagger over the lines gives M M^dagger or M^dagger M.
    let size = if by_row { cols } else { dk };
    let mut gram = CMatrix::zeros(size, size);
    for line in &sparse {
        for &(i, vi) in line {
            for &(j, vj) in line {
                gram[(i, j)] += vi * vj.conj();
            }
        }
    }
    let vals = eig_hermitian(&gram)?;
    entropy_of_spectrum(&vals, base)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell(q: usize) -> StateVector {
        let mut amps = vec![C64::new(0.0, 0.0); q * q];
        for j in 0..q {
            amps[j * q + j] = C64::new(1.0 / (q as f64).sqrt(), 0.0);
        }
        StateVector::new(vec![q, q], amps).unwrap()
    }

    #[test]
    fn bell_entropies() {
        let b = bell(3);
        assert!((b.entropy(&[0], 3).unwrap() - 1.0).abs() < 1e-12);
        assert!(b.entropy(&[0, 1], 3).unwrap().abs() < 1e-12);
        assert_eq!(b.entropy(&[], 3).unwrap(), 0.0);
    }

    #[test]
    fn mixture_of_basis_states() {
        let s0 = StateVector::basis(vec![3], &[0]).unwrap();
        let s1 = StateVector::basis(vec![3], &[1]).unwrap();
        let h = mixture_entropy(&[(0.5, &s0), (0.5, &s1)], &[0], 3).unwrap();
        assert!((h - 2f64.ln() / 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn permute_and_reduce() {
        let a = StateVector::basis(vec![2, 3], &[1, 2]).unwrap();
        let swapped = a.permute(&[1, 0]).unwrap();
        assert_eq!(swapped, StateVector::basis(vec![3, 2], &[2, 1]).unwrap());
        let r = a.reduced(&[1]).unwrap();
        assert_eq!(r[(2, 2)], C64::new(1.0, 0.0));
    }

    #[test]
    fn apply_local_shift() {
        let x = CMatrix::from_fn(3, 3, |i, j| if i == (j + 1) % 3 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
        let s = StateVector::basis(vec![2, 3], &[1, 2]).unwrap();
        assert_eq!(s.apply_local(1, &x).unwrap(), StateVector::basis(vec![2, 3], &[1, 0]).unwrap());
    }
}
