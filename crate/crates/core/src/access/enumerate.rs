use super::{AccessStructure, ShareLabel, ShareSet};

/// Every valid access structure on `n1` classical and `n2` quantum shares,
/// with share labels fixed (no symmetry reduction).
pub fn enumerate_all_structures(n1: usize, n2: usize) -> Vec<AccessStructure> {
    let labels: Vec<ShareLabel> =
        (1..=n1).map(ShareLabel::classical).chain((1..=n2).map(ShareLabel::quantum)).collect();
    let n = labels.len();
    let subsets: Vec<ShareSet> = (1u32..(1 << n))
        .map(|m| labels.iter().enumerate().filter(|(i, _)| m & (1 << i) != 0).map(|(_, &l)| l).collect())
        .collect();

    let mut out = Vec::new();
    let mut chosen = Vec::new();
    antichains(&subsets, 0, &mut chosen, &mut |family: &[ShareSet]| {
        if let Ok(s) = AccessStructure::new(n1, n2, family.iter().copied()) {
            out.push(s);
        }
    });
    out.sort_by_key(|s| s.minimal_sets().iter().map(|m| m.bits()).collect::<Vec<_>>());
    out
}

fn antichains(
    subsets: &[ShareSet],
    start: usize,
    chosen: &mut Vec<ShareSet>,
    visit: &mut impl FnMut(&[ShareSet]),
) {
    if !chosen.is_empty() {
        visit(chosen);
    }
    for i in start..subsets.len() {
        let s = subsets[i];
        if chosen.iter().any(|&c| c.is_subset(s) || s.is_subset(c)) {
            continue;
        }
        chosen.push(s);
        antichains(subsets, i + 1, chosen, visit);
        chosen.pop();
    }
}

/// A canonical structure with the filter flags the enumerator computes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub structure: AccessStructure,
    pub feasible: bool,
    /// `(K1, K2)` when the structure is a twin threshold structure.
    pub twin: Option<(usize, usize)>,
}

impl CatalogEntry {
    /// Feasible and not of twin-threshold form.
    pub fn is_hybrid(&self) -> bool {
        self.feasible && self.twin.is_none()
    }
}

/// One representative per orbit under index permutations within each share
/// kind. Every share of each representative is used (no redundant shares).
pub fn canonical_catalog(n1: usize, n2: usize) -> Vec<CatalogEntry> {
    let cperms = permutations(n1);
    let qperms = permutations(n2);
    enumerate_all_structures(n1, n2)
        .into_iter()
        .filter(|s| {
            let own = key(s);
            cperms.iter().all(|cp| {
                qperms.iter().all(|qp| {
                    let r = s.relabel(cp, qp).expect("relabelling preserves validity");
                    key(&r) >= own
                })
            })
        })
        .map(|structure| CatalogEntry {
            feasible: structure.check_feasible(),
            twin: structure.twin_parameters(),
            structure,
        })
        .collect()
}

fn key(s: &AccessStructure) -> Vec<u32> {
    let mut k: Vec<u32> = s.minimal_sets().iter().map(|m| m.bits()).collect();
    k.sort_unstable();
    k
}

/// All permutations of `1..=n`.
pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i + 1);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}
