use std::collections::BTreeSet;
use std::fmt;

use super::eigen::eig_hermitian;
use super::matrix::{CMatrix, C64};
use super::{entropy_of_spectrum, QuantumError, TAU_EIG, TAU_H};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subsystem {
    pub label: String,
    pub dim: usize,
}

/// Ordered list of labelled tensor factors plus the logarithm base `q`
/// used for every entropy computed on states over this layout.
///
/// The first part is the most significant index of the joint basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubsystemLayout {
    base: u32,
    parts: Vec<Subsystem>,
}

impl SubsystemLayout {
    pub fn new<S: Into<String>>(
        base: u32,
        parts: impl IntoIterator<Item = (S, usize)>,
    ) -> Result<Self, QuantumError> {
        if base < 2 {
            return Err(QuantumError::InvalidLayout(format!("logarithm base {base} < 2")));
        }
        let parts: Vec<Subsystem> =
            parts.into_iter().map(|(l, d)| Subsystem { label: l.into(), dim: d }).collect();
        let mut seen = BTreeSet::new();
        for p in &parts {
            if p.dim < 2 {
                return Err(QuantumError::InvalidLayout(format!(
                    "subsystem `{}` has dimension {}",
                    p.label, p.dim
                )));
            }
            if !seen.insert(p.label.as_str()) {
                return Err(QuantumError::InvalidLayout(format!("duplicate label `{}`", p.label)));
            }
        }
        Ok(Self { base, parts })
    }

    /// A layout of `n` qudits of dimension `q` each.
    pub fn qudits<S: Into<String>>(q: u32, labels: impl IntoIterator<Item = S>) -> Result<Self, QuantumError> {
        Self::new(q, labels.into_iter().map(|l| (l, q as usize)))
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn parts(&self) -> &[Subsystem] {
        &self.parts
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.parts.iter().map(|p| p.label.as_str())
    }

    pub fn dims(&self) -> Vec<usize> {
        self.parts.iter().map(|p| p.dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.parts.iter().map(|p| p.dim).product()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.parts.iter().position(|p| p.label == label)
    }

    fn require(&self, label: &str) -> Result<usize, QuantumError> {
        self.position(label).ok_or_else(|| QuantumError::UnknownLabel(label.to_string()))
    }

    fn restrict(&self, keep: &[usize]) -> Self {
        Self { base: self.base, parts: keep.iter().map(|&i| self.parts[i].clone()).collect() }
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix over a labelled layout.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    layout: SubsystemLayout,
    entries: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity and trace. Positivity is checked lazily by
    /// [`von_neumann_entropy`] and [`DensityMatrix::validate_spectrum`].
    pub fn new(layout: SubsystemLayout, entries: CMatrix) -> Result<Self, QuantumError> {
        let dim = layout.total_dim();
        if entries.rows() != dim || entries.cols() != dim {
            return Err(QuantumError::DimensionMismatch { expected: dim, found: entries.rows() });
        }
        let defect = entries.hermitian_defect();
        if defect > TAU_H {
            return Err(QuantumError::NotHermitian { defect });
        }
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > TAU_H || trace.im.abs() > TAU_H {
            return Err(QuantumError::NotUnitTrace { trace: trace.re });
        }
        Ok(Self { layout, entries })
    }

    pub fn from_pure(layout: SubsystemLayout, psi: &[C64]) -> Result<Self, QuantumError> {
        Self::new(layout, CMatrix::projector(psi))
    }

    /// The maximally mixed state `I/d` over `layout`.
    pub fn maximally_mixed(layout: SubsystemLayout) -> Self {
        let d = layout.total_dim();
        let entries = CMatrix::identity(d).scale(C64::new(1.0 / d as f64, 0.0));
        Self { layout, entries }
    }

    /// Computational-basis state `|index><index|`.
    pub fn basis(layout: SubsystemLayout, index: usize) -> Result<Self, QuantumError> {
        let d = layout.total_dim();
        if index >= d {
            return Err(QuantumError::DimensionMismatch { expected: d, found: index });
        }
        let mut entries = CMatrix::zeros(d, d);
        entries[(index, index)] = C64::new(1.0, 0.0);
        Ok(Self { layout, entries })
    }

    /// Convex combination `sum w_i rho_i` of states sharing one layout.
    pub fn mixture(items: &[(f64, &DensityMatrix)]) -> Result<Self, QuantumError> {
        let first = items.first().ok_or_else(|| QuantumError::InvalidLayout("empty mixture".into()))?;
        let layout = first.1.layout.clone();
        let d = layout.total_dim();
        let mut acc = CMatrix::zeros(d, d);
        for (w, rho) in items {
            if rho.layout != layout {
                return Err(QuantumError::InvalidLayout("mixture components differ in layout".into()));
            }
            acc.add_scaled_assign(&rho.entries, *w);
        }
        Self::new(layout, acc)
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.rows()
    }

    /// Conjugates by `u` acting on the subsystem `label` only.
    pub fn conjugate_local(&self, label: &str, u: &CMatrix) -> Result<Self, QuantumError> {
        let pos = self.layout.require(label)?;
        let dims = self.layout.dims();
        if u.rows() != dims[pos] || u.cols() != dims[pos] {
            return Err(QuantumError::DimensionMismatch { expected: dims[pos], found: u.rows() });
        }
        let mut full = CMatrix::identity(1);
        for (i, &d) in dims.iter().enumerate() {
            let factor = if i == pos { u.clone() } else { CMatrix::identity(d) };
            full = full.kron(&factor);
        }
        let entries = full.matmul(&self.entries).matmul(&full.adjoint());
        Ok(Self { layout: self.layout.clone(), entries })
    }

    /// Spectrum (descending) after checking no eigenvalue is below `-TAU_EIG`.
    pub fn validate_spectrum(&self) -> Result<Vec<f64>, QuantumError> {
        let vals = eig_hermitian(&self.entries)?;
        if let Some(&min) = vals.last() {
            if min < -TAU_EIG {
                return Err(QuantumError::NegativeEigenvalue { value: min });
            }
        }
        Ok(vals)
    }

    /// Reorders tensor factors to follow `order` (a permutation of the labels).
    pub fn permute(&self, order: &[&str]) -> Result<Self, QuantumError> {
        if order.len() != self.layout.parts.len() {
            return Err(QuantumError::InvalidLayout("permutation must name every subsystem".into()));
        }
        let perm: Vec<usize> = order.iter().map(|l| self.layout.require(l)).collect::<Result<_, _>>()?;
        let new_layout = self.layout.restrict(&perm);
        let old_dims = self.layout.dims();
        let d = self.dim();
        let map = permutation_map(&old_dims, &perm);
        let entries = CMatrix::from_fn(d, d, |i, j| self.entries[(map[i], map[j])]);
        Ok(Self { layout: new_layout, entries })
    }
}

/// `map[new_index] = old_index` when factors are reordered by `perm`
/// (`perm[k]` is the old position of new factor `k`).
pub(crate) fn permutation_map(old_dims: &[usize], perm: &[usize]) -> Vec<usize> {
    let new_dims: Vec<usize> = perm.iter().map(|&p| old_dims[p]).collect();
    let mut old_strides = vec![1usize; old_dims.len()];
    for i in (0..old_dims.len().saturating_sub(1)).rev() {
        old_strides[i] = old_strides[i + 1] * old_dims[i + 1];
    }
    let total: usize = old_dims.iter().product();
    let mut map = Vec::with_capacity(total);
    let mut digits = vec![0usize; new_dims.len()];
    for _ in 0..total {
        let old: usize = digits.iter().zip(perm).map(|(&dg, &p)| dg * old_strides[p]).sum();
        map.push(old);
        for k in (0..digits.len()).rev() {
            digits[k] += 1;
            if digits[k] < new_dims[k] {
                break;
            }
            digits[k] = 0;
        }
    }
    map
}

impl fmt::Display for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<&str> = self.layout.labels().collect();
        writeln!(f, "DensityMatrix[{}] dim={}", labels.join(","), self.dim())?;
        for i in 0..self.dim() {
            let row: Vec<String> =
                self.entries.row(i).iter().map(|z| format!("{:+.4}{:+.4}i", z.re, z.im)).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Entropy and mutual information with the reference system for one subset.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyReport {
    pub subset: BTreeSet<String>,
    pub entropy_h: f64,
    pub mutual_i_with_reference: f64,
}

pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> Result<DensityMatrix, QuantumError> {
    if a.layout.base != b.layout.base {
        return Err(QuantumError::InvalidLayout(format!(
            "logarithm bases differ ({} vs {})",
            a.layout.base, b.layout.base
        )));
    }
    for l in b.layout.labels() {
        if a.layout.position(l).is_some() {
            return Err(QuantumError::LabelCollision(l.to_string()));
        }
    }
    let mut parts = a.layout.parts.clone();
    parts.extend(b.layout.parts.iter().cloned());
    let layout = SubsystemLayout { base: a.layout.base, parts };
    Ok(DensityMatrix { layout, entries: a.entries.kron(&b.entries) })
}

/// Reduced state on `keep`; the surviving factors stay in their original order.
pub fn partial_trace<S: AsRef<str>>(rho: &DensityMatrix, keep: &[S]) -> Result<DensityMatrix, QuantumError> {
    let mut keep_pos = Vec::with_capacity(keep.len());
    for l in keep {
        keep_pos.push(rho.layout.require(l.as_ref())?);
    }
    keep_pos.sort_unstable();
    keep_pos.dedup();
    let n = rho.layout.parts.len();
    let traced: Vec<usize> = (0..n).filter(|i| !keep_pos.contains(i)).collect();

    let dims = rho.layout.dims();
    let mut perm = keep_pos.clone();
    perm.extend(&traced);
    let map = permutation_map(&dims, &perm);
    let d_keep: usize = keep_pos.iter().map(|&i| dims[i]).product();
    let d_tr: usize = traced.iter().map(|&i| dims[i]).product();

    let mut out = CMatrix::zeros(d_keep, d_keep);
    for a in 0..d_keep {
        for b in 0..d_keep {
            let mut s = C64::new(0.0, 0.0);
            for t in 0..d_tr {
                s += rho.entries[(map[a * d_tr + t], map[b * d_tr + t])];
            }
            out[(a, b)] = s;
        }
    }
    Ok(DensityMatrix { layout: rho.layout.restrict(&keep_pos), entries: out })
}

/// Von Neumann entropy in units of `log q`, `q` being the layout's base.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64, QuantumError> {
    let vals = rho.validate_spectrum()?;
    entropy_of_spectrum(&vals, rho.layout.base)
}

/// `I(A;B) = H(A) + H(B) - H(AB)`.
pub fn mutual_information<S: AsRef<str>>(
    rho: &DensityMatrix,
    part_a: &[S],
    part_b: &[S],
) -> Result<f64, QuantumError> {
    for a in part_a {
        if part_b.iter().any(|b| b.as_ref() == a.as_ref()) {
            return Err(QuantumError::OverlappingParts(a.as_ref().to_string()));
        }
    }
    let ab: Vec<&str> = part_a.iter().chain(part_b).map(|s| s.as_ref()).collect();
    let ha = von_neumann_entropy(&partial_trace(rho, part_a)?)?;
    let hb = von_neumann_entropy(&partial_trace(rho, part_b)?)?;
    let hab = von_neumann_entropy(&partial_trace(rho, &ab)?)?;
    Ok(ha + hb - hab)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell(q: u32) -> DensityMatrix {
        let d = q as usize;
        let mut psi = vec![C64::new(0.0, 0.0); d * d];
        for j in 0..d {
            psi[j * d + j] = C64::new(1.0 / (d as f64).sqrt(), 0.0);
        }
        DensityMatrix::from_pure(SubsystemLayout::qudits(q, ["A", "B"]).unwrap(), &psi).unwrap()
    }

    #[test]
    fn product_of_maximally_mixed() {
        let a = DensityMatrix::maximally_mixed(SubsystemLayout::qudits(3, ["A"]).unwrap());
        let b = DensityMatrix::maximally_mixed(SubsystemLayout::qudits(3, ["B"]).unwrap());
        let ab = tensor(&a, &b).unwrap();
        let expected = DensityMatrix::maximally_mixed(SubsystemLayout::qudits(3, ["A", "B"]).unwrap());
        assert!(ab.entries().max_abs_diff(expected.entries()) < 1e-15);
        assert_eq!(ab.layout().labels().collect::<Vec<_>>(), ["A", "B"]);
    }

    #[test]
    fn tensor_with_pure_zero_embeds_in_first_block() {
        let a = DensityMatrix::maximally_mixed(SubsystemLayout::qudits(2, ["A"]).unwrap());
        let z = DensityMatrix::basis(SubsystemLayout::new(2, [("B", 3)]).unwrap(), 0).unwrap();
        let ab = tensor(&a, &z).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let expect = if i == j && i % 3 == 0 { 0.5 } else { 0.0 };
                assert_eq!(ab.entries()[(i, j)].re, expect);
            }
        }
    }

    #[test]
    fn tensor_rejects_label_collision() {
        let a = DensityMatrix::maximally_mixed(SubsystemLayout::qudits(2, ["A"]).unwrap());
        assert_eq!(tensor(&a, &a), Err(QuantumError::LabelCollision("A".into())));
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let rho = bell(3);
        let a = partial_trace(&rho, &["A"]).unwrap();
        let mm = DensityMatrix::maximally_mixed(SubsystemLayout::qudits(3, ["A"]).unwrap());
        assert!(a.entries().max_abs_diff(mm.entries()) < 1e-15);
        assert!((mutual_information(&rho, &["A"], &["B"]).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn trace_keep_all_and_keep_none() {
        let rho = bell(2);
        let all = partial_trace(&rho, &["A", "B"]).unwrap();
        assert_eq!(all, rho);
        let none = partial_trace::<&str>(&rho, &[]).unwrap();
        assert_eq!(none.dim(), 1);
        assert!((none.entries()[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!(matches!(partial_trace(&rho, &["C"]), Err(QuantumError::UnknownLabel(_))));
    }

    #[test]
    fn entropy_examples() {
        let mm = DensityMatrix::maximally_mixed(SubsystemLayout::qudits(3, ["A"]).unwrap());
        assert!((von_neumann_entropy(&mm).unwrap() - 1.0).abs() < 1e-12);
        assert!(von_neumann_entropy(&bell(3)).unwrap().abs() < 1e-12);
        let half = DensityMatrix::new(
            SubsystemLayout::qudits(3, ["A"]).unwrap(),
            CMatrix::from_real_diagonal(&[0.5, 0.5, 0.0]),
        )
        .unwrap();
        let h = von_neumann_entropy(&half).unwrap();
        assert!((h - 2f64.ln() / 3f64.ln()).abs() < 1e-12);
        assert!((h - 0.6309).abs() < 1e-4);
    }

    #[test]
    fn permute_swaps_factors() {
        let a = DensityMatrix::basis(SubsystemLayout::qudits(2, ["A"]).unwrap(), 1).unwrap();
        let b = DensityMatrix::basis(SubsystemLayout::new(2, [("B", 3)]).unwrap(), 2).unwrap();
        let ab = tensor(&a, &b).unwrap();
        let ba = tensor(&b, &a).unwrap();
        assert_eq!(ab.permute(&["B", "A"]).unwrap(), ba);
    }

    #[test]
    fn overlapping_parts_rejected() {
        let rho = bell(2);
        assert!(matches!(
            mutual_information(&rho, &["A"], &["A", "B"]),
            Err(QuantumError::OverlappingParts(_))
        ));
    }

    #[test]
    fn invalid_construction() {
        let layout = SubsystemLayout::qudits(2, ["A"]).unwrap();
        let bad_trace = CMatrix::from_real_diagonal(&[1.0, 1.0]);
        assert!(matches!(DensityMatrix::new(layout.clone(), bad_trace), Err(QuantumError::NotUnitTrace { .. })));
        let negative = DensityMatrix::new(layout, CMatrix::from_real_diagonal(&[1.5, -0.5])).unwrap();
        assert!(matches!(von_neumann_entropy(&negative), Err(QuantumError::NegativeEigenvalue { .. })));
        assert!(SubsystemLayout::new(2, [("A", 2), ("A", 2)]).is_err());
        assert!(SubsystemLayout::new(2, [("A", 1)]).is_err());
    }
}
