//! Access structures over classical shares `Y1..YN1` and quantum shares `Q1..QN2`.
//!
//! Share sets are bitmasks: classical share `Yi` is bit `i - 1`, quantum share
//! `Qj` is bit `16 + j - 1`, so at most 16 shares of each kind.

mod enumerate;
mod parse;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use enumerate::{canonical_catalog, enumerate_all_structures, CatalogEntry};
pub use parse::parse_structure;

pub const MAX_PER_KIND: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AccessError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown share `{0}`")]
    UnknownShare(String),
    #[error("invalid access structure: {0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ShareKind {
    Classical,
    Quantum,
}

/// `Y<index>` or `Q<index>`, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShareLabel {
    pub kind: ShareKind,
    pub index: usize,
}

impl ShareLabel {
    pub fn classical(index: usize) -> Self {
        Self { kind: ShareKind::Classical, index }
    }

    pub fn quantum(index: usize) -> Self {
        Self { kind: ShareKind::Quantum, index }
    }

    pub fn is_quantum(self) -> bool {
        self.kind == ShareKind::Quantum
    }

    fn bit(self) -> u32 {
        match self.kind {
            ShareKind::Classical => (self.index - 1) as u32,
            ShareKind::Quantum => (MAX_PER_KIND + self.index - 1) as u32,
        }
    }
}

impl fmt::Display for ShareLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ShareKind::Classical => write!(f, "Y{}", self.index),
            ShareKind::Quantum => write!(f, "Q{}", self.index),
        }
    }
}

impl FromStr for ShareLabel {
    type Err = AccessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || AccessError::UnknownShare(s.to_string());
        let (kind, rest) = match s.split_at_checked(1) {
            Some(("Y", rest)) => (ShareKind::Classical, rest),
            Some(("Q", rest)) => (ShareKind::Quantum, rest),
            _ => return Err(bad()),
        };
        if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let index: usize = rest.parse().map_err(|_| bad())?;
        if index == 0 || index > MAX_PER_KIND {
            return Err(bad());
        }
        Ok(Self { kind, index })
    }
}

/// A set of shares, iterated classical-first then by index.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ShareSet(u32);

const CLASSICAL_MASK: u32 = (1 << MAX_PER_KIND) - 1;

impl ShareSet {
    pub const EMPTY: ShareSet = ShareSet(0);

    pub fn from_bits(bits: u32) -> Self {
        Self(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn all(n1: usize, n2: usize) -> Self {
        let c = if n1 == 0 { 0 } else { (1u32 << n1) - 1 };
        let q = if n2 == 0 { 0 } else { ((1u32 << n2) - 1) << MAX_PER_KIND };
        Self(c | q)
    }

    pub fn with(self, label: ShareLabel) -> Self {
        Self(self.0 | 1 << label.bit())
    }

    pub fn contains(self, label: ShareLabel) -> bool {
        self.0 & (1 << label.bit()) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        Self(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        Self(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        Self(self.0 & !other.0)
    }

    pub fn classical_part(self) -> Self {
        Self(self.0 & CLASSICAL_MASK)
    }

    pub fn quantum_part(self) -> Self {
        Self(self.0 & !CLASSICAL_MASK)
    }

    pub fn iter(self) -> impl Iterator<Item = ShareLabel> {
        (0..32u32).filter(move |b| self.0 & (1 << b) != 0).map(|b| {
            let b = b as usize;
            if b < MAX_PER_KIND {
                ShareLabel::classical(b + 1)
            } else {
                ShareLabel::quantum(b - MAX_PER_KIND + 1)
            }
        })
    }

    /// Positions in the share order `Y1..YN1, Q1..QN2`; used for lexicographic ordering.
    fn positions(self, n1: usize) -> Vec<usize> {
        self.iter()
            .map(|l| match l.kind {
                ShareKind::Classical => l.index - 1,
                ShareKind::Quantum => n1 + l.index - 1,
            })
            .collect()
    }
}

impl FromIterator<ShareLabel> for ShareSet {
    fn from_iter<I: IntoIterator<Item = ShareLabel>>(iter: I) -> Self {
        iter.into_iter().fold(ShareSet::EMPTY, ShareSet::with)
    }
}

impl fmt::Display for ShareSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.iter().map(|l| l.to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

/// A monotone access structure given by its minimal qualified sets.
///
/// Invariants: nonempty antichain of nonempty sets, every share appears in
/// some minimal set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AccessStructure {
    n1: usize,
    n2: usize,
    minimal: Vec<ShareSet>,
}

impl AccessStructure {
    pub fn new(n1: usize, n2: usize, minimal: impl IntoIterator<Item = ShareSet>) -> Result<Self, AccessError> {
        if n1 > MAX_PER_KIND || n2 > MAX_PER_KIND {
            return Err(AccessError::Invalid(format!("at most {MAX_PER_KIND} shares of each kind")));
        }
        let all = ShareSet::all(n1, n2);
        let mut minimal: Vec<ShareSet> = minimal.into_iter().collect();
        if minimal.is_empty() {
            return Err(AccessError::Invalid("no minimal qualified sets".into()));
        }
        for &m in &minimal {
            if m.is_empty() {
                return Err(AccessError::Invalid("empty minimal set".into()));
            }
            if !m.is_subset(all) {
                let stray = m.difference(all).iter().next().map(|l| l.to_string()).unwrap_or_default();
                return Err(AccessError::UnknownShare(stray));
            }
        }
        minimal.sort_by_key(|s| (s.len(), s.positions(n1)));
        minimal.dedup();
        for (i, &a) in minimal.iter().enumerate() {
            for &b in &minimal[i + 1..] {
                if a.is_subset(b) {
                    return Err(AccessError::Invalid(format!("{a} is contained in {b}; not an antichain")));
                }
            }
        }
        let covered = minimal.iter().fold(ShareSet::EMPTY, |acc, &m| acc.union(m));
        if covered != all {
            let missing = all.difference(covered).iter().next().map(|l| l.to_string()).unwrap_or_default();
            return Err(AccessError::Invalid(format!("share {missing} appears in no minimal set")));
        }
        Ok(Self { n1, n2, minimal })
    }

    pub fn num_classical(&self) -> usize {
        self.n1
    }

    pub fn num_quantum(&self) -> usize {
        self.n2
    }

    pub fn minimal_sets(&self) -> &[ShareSet] {
        &self.minimal
    }

    pub fn all_shares(&self) -> ShareSet {
        ShareSet::all(self.n1, self.n2)
    }

    /// Shares in canonical order `Y1..YN1, Q1..QN2`.
    pub fn shares(&self) -> impl Iterator<Item = ShareLabel> {
        (1..=self.n1).map(ShareLabel::classical).chain((1..=self.n2).map(ShareLabel::quantum))
    }

    fn check_subset(&self, subset: ShareSet) -> Result<(), AccessError> {
        match subset.difference(self.all_shares()).iter().next() {
            Some(l) => Err(AccessError::UnknownShare(l.to_string())),
            None => Ok(()),
        }
    }

    pub fn is_qualified(&self, subset: ShareSet) -> Result<bool, AccessError> {
        self.check_subset(subset)?;
        Ok(self.qualified(subset))
    }

    pub(crate) fn qualified(&self, subset: ShareSet) -> bool {
        self.minimal.iter().any(|m| m.is_subset(subset))
    }

    /// Every subset of the shares, ordered by size then lexicographically.
    pub fn all_subsets(&self) -> Vec<ShareSet> {
        let labels: Vec<ShareLabel> = self.shares().collect();
        let mut out: Vec<ShareSet> = (0u32..(1 << labels.len()))
            .map(|m| labels.iter().enumerate().filter(|(i, _)| m & (1 << i) != 0).map(|(_, &l)| l).collect())
            .collect();
        out.sort_by_key(|s: &ShareSet| (s.len(), s.positions(self.n1)));
        out
    }

    /// Nonempty subsets in report order.
    pub fn nonempty_subsets(&self) -> Vec<ShareSet> {
        self.all_subsets().into_iter().filter(|s| !s.is_empty()).collect()
    }

    /// Forbidden sets whose every strict superset is qualified, largest first.
    pub fn maximal_forbidden_sets(&self) -> Vec<ShareSet> {
        let labels: Vec<ShareLabel> = self.shares().collect();
        let mut out: Vec<ShareSet> = self
            .all_subsets()
            .into_iter()
            .filter(|&s| !self.qualified(s))
            .filter(|&s| labels.iter().filter(|&&l| !s.contains(l)).all(|&l| self.qualified(s.with(l))))
            .collect();
        out.sort_by_key(|s| (std::cmp::Reverse(s.len()), s.positions(self.n1)));
        out
    }

    /// `None` when every pair of minimal sets shares a quantum share,
    /// otherwise an offending pair (distinct pairs are reported first).
    pub fn infeasibility_witness(&self) -> Option<(ShareSet, ShareSet)> {
        let n = self.minimal.len();
        let distinct = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        let pairs = distinct.chain((0..n).map(|i| (i, i)));
        pairs
            .map(|(i, j)| (self.minimal[i], self.minimal[j]))
            .find(|(a, b)| a.intersection(*b).quantum_part().is_empty())
    }

    pub fn check_feasible(&self) -> bool {
        self.infeasibility_witness().is_none()
    }

    /// Minimal elements of `{ D ∩ Q : D qualified }`.
    pub fn quantum_restriction(&self) -> Vec<ShareSet> {
        let parts: Vec<ShareSet> = self.minimal.iter().map(|m| m.quantum_part()).collect();
        let mut out: Vec<ShareSet> = parts
            .iter()
            .copied()
            .filter(|&p| !parts.iter().any(|&o| o != p && o.is_subset(p)))
            .collect();
        out.sort_by_key(|s| (s.len(), s.positions(self.n1)));
        out.dedup();
        out
    }

    /// Qualified iff at least `k1` classical and `k2` quantum shares.
    pub fn twin(k1: usize, n1: usize, k2: usize, n2: usize) -> Result<Self, AccessError> {
        if k1 > n1 || k2 > n2 || k1 + k2 == 0 {
            return Err(AccessError::Invalid(format!("twin threshold K1={k1} N1={n1} K2={k2} N2={n2}")));
        }
        let ys = combinations(n1, k1);
        let qs = combinations(n2, k2);
        let mut minimal = Vec::new();
        for y in &ys {
            for qq in &qs {
                let set: ShareSet = y
                    .iter()
                    .map(|&i| ShareLabel::classical(i))
                    .chain(qq.iter().map(|&j| ShareLabel::quantum(j)))
                    .collect();
                minimal.push(set);
            }
        }
        Self::new(n1, n2, minimal)
    }

    /// `(K1, K2)` when this is the twin threshold structure with `K2 > N2/2`.
    pub fn twin_parameters(&self) -> Option<(usize, usize)> {
        for k1 in 0..=self.n1 {
            for k2 in (self.n2 / 2 + 1)..=self.n2 {
                if let Ok(t) = Self::twin(k1, self.n1, k2, self.n2) {
                    if t.minimal == self.minimal {
                        return Some((k1, k2));
                    }
                }
            }
        }
        None
    }

    /// Renders in the access-structure text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("N1={} N2={}\n", self.n1, self.n2);
        for m in &self.minimal {
            let toks: Vec<String> = m.iter().map(|l| l.to_string()).collect();
            out.push_str(&format!("minimal: {}\n", toks.join(" ")));
        }
        out
    }

    /// Applies index permutations within each kind (`perm[i]` is the new
    /// 1-based index of old index `i + 1`).
    pub fn relabel(&self, classical_perm: &[usize], quantum_perm: &[usize]) -> Result<Self, AccessError> {
        let map = |l: ShareLabel| match l.kind {
            ShareKind::Classical => ShareLabel::classical(classical_perm[l.index - 1]),
            ShareKind::Quantum => ShareLabel::quantum(quantum_perm[l.index - 1]),
        };
        Self::new(self.n1, self.n2, self.minimal.iter().map(|m| m.iter().map(map).collect::<ShareSet>()))
    }
}

impl fmt::Display for AccessStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sets: Vec<String> = self.minimal.iter().map(|m| m.to_string()).collect();
        write!(f, "{{{}}}", sets.join(", "))
    }
}

/// All `k`-subsets of `1..=n`, lexicographic.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, k, &mut Vec::new(), &mut out);
    out
}

/// Builds a set from tokens like `["Y1", "Q2"]`. Panics on malformed tokens; for literals in tests and catalogs.
pub fn set(tokens: &[&str]) -> ShareSet {
    tokens.iter().map(|t| t.parse::<ShareLabel>().expect("valid share token")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hybrid() -> AccessStructure {
        AccessStructure::new(1, 2, [set(&["Y1", "Q1"]), set(&["Q1", "Q2"])]).unwrap()
    }

    #[test]
    fn qualified_examples() {
        let s = hybrid();
        assert!(s.is_qualified(set(&["Y1", "Q1", "Q2"])).unwrap());
        assert!(!s.is_qualified(set(&["Y1", "Q2"])).unwrap());
        assert!(!s.is_qualified(ShareSet::EMPTY).unwrap());
        assert_eq!(s.is_qualified(set(&["Y2"])), Err(AccessError::UnknownShare("Y2".into())));
    }

    #[test]
    fn maximal_forbidden_examples() {
        assert_eq!(hybrid().maximal_forbidden_sets(), vec![set(&["Y1", "Q2"]), set(&["Q1"])]);
        let single = AccessStructure::new(0, 1, [set(&["Q1"])]).unwrap();
        assert_eq!(single.maximal_forbidden_sets(), vec![ShareSet::EMPTY]);
        let s4 = AccessStructure::new(2, 2, [set(&["Y1", "Q1"]), set(&["Y2", "Q1"]), set(&["Q1", "Q2"])]).unwrap();
        assert_eq!(s4.maximal_forbidden_sets(), vec![set(&["Y1", "Y2", "Q2"]), set(&["Q1"])]);
    }

    #[test]
    fn feasibility_examples() {
        assert!(hybrid().check_feasible());
        let bad = AccessStructure::new(1, 2, [set(&["Y1", "Q1"]), set(&["Y1", "Q2"])]).unwrap();
        assert!(!bad.check_feasible());
        assert_eq!(bad.infeasibility_witness(), Some((set(&["Y1", "Q1"]), set(&["Y1", "Q2"]))));
        let single = AccessStructure::new(1, 1, [set(&["Y1", "Q1"])]).unwrap();
        assert!(single.check_feasible());
        let classical_only = AccessStructure::new(1, 0, [set(&["Y1"])]).unwrap();
        assert!(!classical_only.check_feasible());
    }

    #[test]
    fn structure_invariants_enforced() {
        assert!(AccessStructure::new(1, 1, []).is_err());
        assert!(AccessStructure::new(1, 1, [set(&["Y1"]), set(&["Y1", "Q1"])]).is_err());
        assert!(AccessStructure::new(1, 2, [set(&["Y1", "Q1"])]).is_err());
        assert!(matches!(AccessStructure::new(1, 1, [set(&["Y1", "Q2"])]), Err(AccessError::UnknownShare(_))));
    }

    #[test]
    fn twin_and_quantum_restriction() {
        let t = AccessStructure::twin(1, 2, 2, 3).unwrap();
        assert_eq!(t.minimal_sets().len(), 6);
        assert_eq!(t.twin_parameters(), Some((1, 2)));
        assert_eq!(hybrid().twin_parameters(), None);
        assert_eq!(hybrid().quantum_restriction(), vec![set(&["Q1"])]);
        assert_eq!(t.quantum_restriction().len(), 3);
    }

    #[test]
    fn label_parsing_and_display() {
        assert_eq!("Q12".parse::<ShareLabel>().unwrap(), ShareLabel::quantum(12));
        for bad in ["Z1", "Y0", "Y", "Qx", "y1", "Y+1"] {
            assert!(bad.parse::<ShareLabel>().is_err(), "{bad}");
        }
        assert_eq!(set(&["Q2", "Y1"]).to_string(), "{Y1,Q2}");
        assert_eq!(hybrid().to_string(), "{{Y1,Q1}, {Q1,Q2}}");
    }

    #[test]
    fn subset_order_is_size_then_lexicographic() {
        let subs: Vec<String> = hybrid().nonempty_subsets().iter().map(|s| s.to_string()).collect();
        assert_eq!(subs, ["{Y1}", "{Q1}", "{Q2}", "{Y1,Q1}", "{Y1,Q2}", "{Q1,Q2}", "{Y1,Q1,Q2}"]);
    }
}
