//! Exact classical-quantum state assembly and the entropic audit.
//!
//! For a share subset `T` the audit computes `I(R;T) = H(R) + H(T) - H(RT)`
//! and compares it with `2 H(R)` when `T` is qualified and with `0` otherwise.
//! Entropies of mixed classical/quantum subsets use the decomposition
//! `H(CT) = H(P_C) + sum_y P_C(y) H(rho_T^y)`; [`embedded_entropy`] computes
//! the same quantity from the fully embedded density matrix and serves as a
//! cross-check on small schemes.
//!
//! Digits that a quantum share holds in computational-basis qudits are
//! classical: they enter the decomposition as part of `y`, so the pure branch
//! states only span the coherent qudits.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};

use crate::access::{AccessError, AccessStructure, ShareKind, ShareSet};
use crate::qcore::{
    mixture_entropy, partial_trace, tensor, von_neumann_entropy, CMatrix, DensityMatrix, StateVector, SubsystemLayout, TAU,
};
use crate::schemes::{QuantumPrep, Scheme, SchemeError, Slot};

pub type Probability = Ratio<u64>;

/// Upper bound on stored amplitudes across all distinct branch states.
pub const MAX_AMPLITUDES: usize = 1 << 25;

/// Upper bound on enumerated randomness assignments.
pub const MAX_BRANCHES: usize = 1 << 20;

/// One randomness assignment: classical digits per classical share, digits
/// held in basis-state qudits of quantum shares, and an index into the
/// distinct coherent branch states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CQBranch {
    pub classical: Vec<Vec<u32>>,
    /// Aligned with [`CQState::digit_slots`].
    pub digits: Vec<u32>,
    pub state: usize,
    pub probability: Probability,
}

/// The mixture over branches of `|y><y| (x) |psi_y><psi_y|`.
#[derive(Clone, Debug)]
pub struct CQState {
    q: u32,
    structure: AccessStructure,
    classical_sizes: Vec<usize>,
    slots: Vec<Slot>,
    digit_slots: Vec<Slot>,
    branches: Vec<CQBranch>,
    states: Vec<StateVector>,
}

/// Enumerates every randomness assignment of `scheme`.
pub fn assemble(scheme: &Scheme) -> Result<CQState, SchemeError> {
    let count = scheme.branch_count();
    if count > MAX_BRANCHES {
        return Err(SchemeError::TooLarge(format!("{count} randomness branches")));
    }
    let first = scheme.branch(&scheme.assignment(0))?.quantum.split_digits().1;
    let digit_slots: Vec<Slot> = first.iter().map(|&(s, _)| s).collect();
    match assemble_with(scheme, &digit_slots)? {
        Some(state) => Ok(state),
        None => Ok(assemble_with(scheme, &[])?.expect("no digit slots to disagree on")),
    }
}

/// Builds the state with `digit_slots` treated as classical; `None` if some
/// branch does not hold basis digits on exactly those slots.
fn assemble_with(scheme: &Scheme, digit_slots: &[Slot]) -> Result<Option<CQState>, SchemeError> {
    let count = scheme.branch_count();
    let slots: Vec<Slot> = scheme.slots().into_iter().filter(|s| !digit_slots.contains(s)).collect();
    let dim = (scheme.q() as f64).powi(slots.len() as i32);
    if dim > MAX_AMPLITUDES as f64 {
        return Err(SchemeError::TooLarge(format!("{} qudits of dimension {}", slots.len(), scheme.q())));
    }
    let probability = Probability::new(1, count as u64);
    let mut index: HashMap<QuantumPrep, usize> = HashMap::new();
    let mut states = Vec::new();
    let mut branches = Vec::with_capacity(count);
    for i in 0..count {
        let b = scheme.branch(&scheme.assignment(i))?;
        let (prep, digits) = if digit_slots.is_empty() {
            (b.quantum, Vec::new())
        } else {
            b.quantum.split_digits()
        };
        if digits.len() != digit_slots.len() || digits.iter().zip(digit_slots).any(|(a, s)| a.0 != *s) {
            return Ok(None);
        }
        let state = match index.get(&prep) {
            Some(&s) => s,
            None => {
                if (states.len() + 1) as f64 * dim > MAX_AMPLITUDES as f64 {
                    return Err(SchemeError::TooLarge(format!("more than {} distinct branch states", states.len())));
                }
                states.push(scheme.state_over(&prep, &slots)?);
                index.insert(prep, states.len() - 1);
                states.len() - 1
            }
        };
        let classical = b.classical.entries.iter().map(|(_, v)| v.iter().map(|x| x.value()).collect()).collect();
        let digits = digits.iter().map(|&(_, d)| d).collect();
        branches.push(CQBranch { classical, digits, state, probability });
    }
    Ok(Some(CQState {
        q: scheme.q(),
        structure: scheme.structure().clone(),
        classical_sizes: scheme.classical_sizes().to_vec(),
        slots,
        digit_slots: digit_slots.to_vec(),
        branches,
        states,
    }))
}

impl CQState {
    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn structure(&self) -> &AccessStructure {
        &self.structure
    }

    /// Coherent qudits spanned by the branch states.
    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    /// Quantum-share qudits that hold a basis-state digit in every branch.
    pub fn digit_slots(&self) -> &[Slot] {
        &self.digit_slots
    }

    pub fn branches(&self) -> &[CQBranch] {
        &self.branches
    }

    /// Distinct pure states referenced by [`CQBranch::state`].
    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn total_probability(&self) -> Probability {
        self.branches.iter().map(|b| b.probability).sum()
    }

    /// Layout of the coherent part: one qudit per slot, labelled `R`, `Q<j>.<k>`, `E<i>`.
    pub fn quantum_layout(&self) -> SubsystemLayout {
        SubsystemLayout::qudits(self.q, self.slots.iter().map(Slot::to_string)).expect("slot labels are distinct")
    }

    /// Quantum density matrix of branch `i`.
    pub fn branch_density(&self, i: usize) -> Result<DensityMatrix, SchemeError> {
        let psi = &self.states[self.branches[i].state];
        Ok(DensityMatrix::from_pure(self.quantum_layout(), psi.amplitudes())?)
    }

    /// Branch-averaged reduced state on the given slots.
    pub fn average_reduced(&self, keep: &[Slot]) -> Result<CMatrix, SchemeError> {
        let idx = self.slot_indices(keep)?;
        let d = (self.q as usize).pow(idx.len() as u32);
        let mut acc = CMatrix::zeros(d, d);
        for b in &self.branches {
            let p = b.probability.to_f64().unwrap_or(0.0);
            acc.add_scaled_assign(&self.states[b.state].reduced(&idx)?, p);
        }
        Ok(acc)
    }

    fn slot_indices(&self, keep: &[Slot]) -> Result<Vec<usize>, SchemeError> {
        keep.iter()
            .map(|s| self.slots.iter().position(|o| o == s).ok_or_else(|| SchemeError::Layout(format!("no slot {s}"))))
            .collect()
    }

    fn check_subset(&self, shares: ShareSet) -> Result<(), SchemeError> {
        match shares.iter().find(|l| !self.structure.all_shares().contains(*l)) {
            Some(l) => Err(AccessError::UnknownShare(l.to_string()).into()),
            None => Ok(()),
        }
    }

    /// Positions in `slots` belonging to the quantum shares in `shares`, plus `R` if requested.
    fn select(slots: &[Slot], shares: ShareSet, with_reference: bool) -> Vec<usize> {
        slots
            .iter()
            .enumerate()
            .filter(|(_, s)| match s {
                Slot::Reference => with_reference,
                Slot::Share { share, .. } => shares.iter().any(|l| l.kind == ShareKind::Quantum && l.index == *share),
                Slot::Environment(_) => false,
            })
            .map(|(i, _)| i)
            .collect()
    }

    fn kept_slots(&self, shares: ShareSet, with_reference: bool) -> Vec<usize> {
        Self::select(&self.slots, shares, with_reference)
    }

    fn kept_digits(&self, shares: ShareSet) -> Vec<usize> {
        Self::select(&self.digit_slots, shares, false)
    }

    fn classical_indices(shares: ShareSet) -> Vec<usize> {
        shares.iter().filter(|l| l.kind == ShareKind::Classical).map(|l| l.index - 1).collect()
    }
}

fn plogp(p: Probability, q: u32) -> f64 {
    let p = p.to_f64().unwrap_or(0.0);
    if p <= 0.0 {
        0.0
    } else {
        -p * p.log(q as f64)
    }
}

/// Entropy (base `q`) of the shares in `shares`, jointly with `R` when
/// `with_reference`, via the classical-quantum decomposition.
pub fn cq_entropy(state: &CQState, shares: ShareSet, with_reference: bool) -> Result<f64, SchemeError> {
    state.check_subset(shares)?;
    let keep = state.kept_slots(shares, with_reference);
    let cidx = CQState::classical_indices(shares);
    let didx = state.kept_digits(shares);

    let mut groups: BTreeMap<(Vec<&[u32]>, Vec<u32>), BTreeMap<usize, Probability>> = BTreeMap::new();
    for b in &state.branches {
        let key = (cidx.iter().map(|&i| b.classical[i].as_slice()).collect(), didx.iter().map(|&i| b.digits[i]).collect());
        *groups.entry(key).or_default().entry(b.state).or_insert_with(Probability::zero) += b.probability;
    }

    let mut cache: HashMap<Vec<(usize, Probability)>, f64> = HashMap::new();
    let mut total = 0.0;
    for weights in groups.values() {
        let py: Probability = weights.values().sum();
        total += plogp(py, state.q);
        if keep.is_empty() {
            continue;
        }
        let conditional: Vec<(usize, Probability)> = weights.iter().map(|(&s, &w)| (s, w / py)).collect();
        let h = match cache.get(&conditional) {
            Some(&h) => h,
            None => {
                let items: Vec<(f64, &StateVector)> = conditional
                    .iter()
                    .map(|(s, w)| (w.to_f64().unwrap_or(0.0), &state.states[*s]))
                    .collect();
                let h = mixture_entropy(&items, &keep, state.q)?;
                cache.insert(conditional, h);
                h
            }
        };
        total += py.to_f64().unwrap_or(0.0) * h;
    }
    Ok(total)
}

/// Same quantity as [`cq_entropy`], from the explicit density matrix with
/// classical digits embedded as diagonal registers `Y<i>` and digit qudits
/// restored as basis states.
pub fn embedded_entropy(state: &CQState, shares: ShareSet, with_reference: bool) -> Result<f64, SchemeError> {
    state.check_subset(shares)?;
    let keep: Vec<String> = state.kept_slots(shares, with_reference).iter().map(|&i| state.slots[i].to_string()).collect();
    let cidx = CQState::classical_indices(shares);
    let didx = state.kept_digits(shares);
    let q = state.q as usize;

    let mut terms = Vec::with_capacity(state.branches.len());
    for (i, b) in state.branches.iter().enumerate() {
        let mut registers = Vec::new();
        for &c in &cidx {
            let digits = &b.classical[c];
            let index = digits.iter().fold(0usize, |acc, &d| acc * q + d as usize);
            registers.push((format!("Y{}", c + 1), q.pow(state.classical_sizes[c] as u32), index));
        }
        for &d in &didx {
            registers.push((state.digit_slots[d].to_string(), q, b.digits[d] as usize));
        }
        let mut rho: Option<DensityMatrix> = None;
        for (label, dim, index) in registers {
            let reg = DensityMatrix::basis(SubsystemLayout::new(state.q, vec![(label, dim)])?, index)?;
            rho = Some(match rho {
                Some(r) => tensor(&r, &reg)?,
                None => reg,
            });
        }
        if !keep.is_empty() {
            let reduced = partial_trace(&state.branch_density(i)?, &keep)?;
            rho = Some(match rho {
                Some(r) => tensor(&r, &reduced)?,
                None => reduced,
            });
        }
        match rho {
            Some(r) => terms.push((b.probability.to_f64().unwrap_or(0.0), r)),
            None => return Ok(0.0),
        }
    }
    let refs: Vec<(f64, &DensityMatrix)> = terms.iter().map(|(p, r)| (*p, r)).collect();
    Ok(von_neumann_entropy(&DensityMatrix::mixture(&refs)?)?)
}

/// Audit outcome for one share subset.
#[derive(Clone, Debug, PartialEq)]
pub struct SubsetRecord {
    pub subset: ShareSet,
    pub qualified: bool,
    pub mutual_information: f64,
    pub target: f64,
    pub pass: bool,
}

/// Formats with 6 decimals, never printing a negative zero.
pub fn format_value(x: f64) -> String {
    let s = format!("{x:.6}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

impl fmt::Display for SubsetRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} qualified={} I={} target={} pass={}",
            self.subset,
            self.qualified,
            format_value(self.mutual_information),
            format_value(self.target),
            self.pass
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditReport {
    pub records: Vec<SubsetRecord>,
    pub reference_entropy: f64,
    pub overall: bool,
    pub tolerance: f64,
}

impl AuditReport {
    pub fn failures(&self) -> impl Iterator<Item = &SubsetRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    /// Per-subset lines, one per record.
    pub fn render(&self) -> String {
        self.records.iter().map(|r| format!("{r}\n")).collect()
    }

    /// Overall verdict with the tolerance echo.
    pub fn summary(&self) -> String {
        format!(
            "overall={} subsets={} failed={} H(R)={} tol={:e}",
            if self.overall { "pass" } else { "fail" },
            self.records.len(),
            self.failures().count(),
            format_value(self.reference_entropy),
            self.tolerance
        )
    }
}

/// Audits every nonempty share subset of an assembled state.
pub fn audit_state(state: &CQState) -> Result<AuditReport, SchemeError> {
    let h_r = cq_entropy(state, ShareSet::EMPTY, true)?;
    let mut records = Vec::new();
    for subset in state.structure.nonempty_subsets() {
        let qualified = state.structure.is_qualified(subset)?;
        let i = h_r + cq_entropy(state, subset, false)? - cq_entropy(state, subset, true)?;
        let target = if qualified { 2.0 * h_r } else { 0.0 };
        records.push(SubsetRecord { subset, qualified, mutual_information: i, target, pass: (i - target).abs() <= TAU });
    }
    let overall = records.iter().all(|r| r.pass);
    Ok(AuditReport { records, reference_entropy: h_r, overall, tolerance: TAU })
}

/// Assembles `scheme` and audits every nonempty share subset.
pub fn audit(scheme: &Scheme) -> Result<AuditReport, SchemeError> {
    let state = assemble(scheme)?;
    debug_assert!(state.total_probability().is_one());
    audit_state(&state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::access::set;
    use crate::schemes::{build_otp, build_t3, build_twin};

    #[test]
    fn otp_state_shape() {
        let st = assemble(&build_otp(2).unwrap()).unwrap();
        assert_eq!(st.branches().len(), 4);
        assert!(st.branches().iter().all(|b| b.probability == Probability::new(1, 4)));
        assert_eq!(st.quantum_layout().dims(), vec![2, 2]);
        assert_eq!(st.total_probability(), Probability::one());
        let avg = st.average_reduced(&[Slot::share(1, 0)]).unwrap();
        assert!(avg.max_abs_diff(&CMatrix::identity(2).scale(0.5.into())) < 1e-12);
    }

    #[test]
    fn otp_entropies() {
        let st = assemble(&build_otp(2).unwrap()).unwrap();
        assert!((cq_entropy(&st, ShareSet::EMPTY, true).unwrap() - 1.0).abs() < 1e-12);
        assert!((cq_entropy(&st, set(&["Y1"]), false).unwrap() - 2.0).abs() < 1e-12);
        for t in [set(&["Y1"]), set(&["Q1"]), set(&["Y1", "Q1"])] {
            for r in [false, true] {
                let a = cq_entropy(&st, t, r).unwrap();
                let b = embedded_entropy(&st, t, r).unwrap();
                assert!((a - b).abs() < 1e-9, "{t} {r}: {a} vs {b}");
            }
        }
        assert!(cq_entropy(&st, set(&["Q2"]), false).is_err());
    }

    #[test]
    fn otp_audit_lines() {
        let report = audit(&build_otp(2).unwrap()).unwrap();
        assert_eq!(
            report.render(),
            "{Y1} qualified=false I=0.000000 target=0.000000 pass=true\n\
             {Q1} qualified=false I=0.000000 target=0.000000 pass=true\n\
             {Y1,Q1} qualified=true I=2.000000 target=2.000000 pass=true\n"
        );
        assert!(report.overall);
    }

    #[test]
    fn twin_reduces_to_otp() {
        let a = assemble(&build_twin(1, 1, 1, 1, 2).unwrap()).unwrap();
        let b = assemble(&build_otp(2).unwrap()).unwrap();
        assert_eq!(a.branches(), b.branches());
        for (x, y) in a.states().iter().zip(b.states()) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn basis_digits_become_classical() {
        let scheme = build_t3(1, 3).unwrap();
        let st = assemble(&scheme).unwrap();
        assert_eq!(st.digit_slots(), &[Slot::share(2, 0), Slot::share(2, 1)]);
        assert_eq!(st.slots(), &[Slot::Reference, Slot::share(1, 0)]);
        assert_eq!(st.states().len(), 9);
        for t in scheme.structure().nonempty_subsets() {
            for r in [false, true] {
                let a = cq_entropy(&st, t, r).unwrap();
                let b = embedded_entropy(&st, t, r).unwrap();
                assert!((a - b).abs() < 1e-9, "{t} {r}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn t3_audits() {
        for e in [1, 2] {
            let report = audit(&build_t3(e, 3).unwrap()).unwrap();
            assert!(report.overall, "{}", report.render());
            assert_eq!(report.records.len(), 7);
        }
    }

    #[test]
    fn negative_zero_is_normalised() {
        assert_eq!(format_value(-1e-12), "0.000000");
        assert_eq!(format_value(-0.5), "-0.500000");
        assert_eq!(format_value(2.0), "2.000000");
    }
}
