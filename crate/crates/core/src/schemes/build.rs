use std::sync::Arc;

use super::{Branch, Family, Piece, QuantumPrep, Scheme, SchemeError, SecretEncoding, Slot};
use crate::access::{set, AccessStructure, ShareLabel, ShareSet};
use crate::gf::{additive_2of3, is_prime, next_prime, replication_share, shamir_share, ClassicalShareVector, FieldElement, FieldError};

/// The five two-classical, two-quantum structures with a common rate region.
pub const T4_STRUCTURES: [&[&[&str]]; 5] = [
    &[&["Y1", "Y2", "Q1"], &["Q1", "Q2"]],
    &[&["Y1", "Q1"], &["Y2", "Q1", "Q2"]],
    &[&["Y1", "Y2", "Q1"], &["Y2", "Q1", "Q2"]],
    &[&["Y1", "Q1"], &["Y2", "Q1"], &["Q1", "Q2"]],
    &[&["Y1", "Y2", "Q1"], &["Y1", "Q1", "Q2"], &["Y2", "Q1", "Q2"]],
];

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn pair(a: FieldElement, b: FieldElement) -> (u32, u32) {
    (a.value(), b.value())
}

fn classical(values: Vec<Vec<FieldElement>>) -> ClassicalShareVector {
    ClassicalShareVector {
        entries: values.into_iter().enumerate().map(|(i, v)| (ShareLabel::classical(i + 1), v)).collect(),
    }
}

fn plain_secret(pad: (u32, u32), slot: Slot) -> Piece {
    Piece::Secret { pad, encoding: SecretEncoding::Plain(slot) }
}

fn digits(values: &[FieldElement], slots: Vec<Slot>) -> Piece {
    Piece::Digits { values: values.iter().map(|v| v.value()).collect(), slots }
}

fn require_prime(q: u32) -> Result<(), SchemeError> {
    if is_prime(q) {
        Ok(())
    } else {
        Err(FieldError::NotPrime(q).into())
    }
}

/// Quantum one-time pad: `Y1 = (a, b)`, `Q1 = X^a Z^b Q0`.
pub fn build_otp(q: u32) -> Result<Scheme, SchemeError> {
    require_prime(q)?;
    let structure = AccessStructure::new(1, 1, [set(&["Y1", "Q1"])])?;
    let rule = Arc::new(|r: &[FieldElement]| {
        Ok(Branch {
            classical: classical(vec![vec![r[0], r[1]]]),
            quantum: QuantumPrep { pieces: vec![plain_secret(pair(r[0], r[1]), Slot::share(1, 0))] },
        })
    });
    Scheme::custom(Family::Otp, structure, q, names(&["alpha", "beta"]), vec![2], vec![1], 0, rule)
}

/// Smallest prime admissible for `build_twin` with these parameters.
pub fn default_twin_field(n1: usize, k2: usize) -> u32 {
    let lower = (2 * k2).saturating_sub(1).max(n1 + 1).max(2);
    next_prime(lower as u32)
}

fn check_twin(k1: usize, n1: usize, k2: usize, n2: usize, q: u32) -> Result<(), SchemeError> {
    let bad = |m: String| Err(SchemeError::InvalidParameters(m));
    if n1 == 0 || n2 == 0 {
        return bad("twin structures need N1 >= 1 and N2 >= 1".into());
    }
    if k1 == 0 || k1 > n1 {
        return bad(format!("need 1 <= K1 <= N1, got K1={k1}, N1={n1}"));
    }
    if k2 > n2 || 2 * k2 <= n2 {
        return bad(format!("need N2/2 < K2 <= N2, got K2={k2}, N2={n2}"));
    }
    require_prime(q)?;
    if (q as usize) < 2 * k2 - 1 {
        return bad(format!("need q >= 2*K2-1 = {}, got q={q}", 2 * k2 - 1));
    }
    if (q as usize) <= n1 {
        return bad(format!("need q > N1 = {n1}, got q={q}"));
    }
    Ok(())
}

/// Threshold encoding of the padded secret over the given share slots,
/// with environment slots appended for truncated codes.
fn threshold_secret(pad: (u32, u32), k: usize, shares: Vec<Slot>) -> Piece {
    if shares.len() == 1 && k == 1 {
        return plain_secret(pad, shares[0]);
    }
    let n = shares.len();
    let slots = shares.into_iter().chain((0..2 * k - 1 - n).map(Slot::Environment)).collect();
    Piece::Secret { pad, encoding: SecretEncoding::Threshold { k, shares: n, slots } }
}

/// Twin threshold scheme: Shamir `(K1, N1)` on `(a, b)` and the polynomial
/// `((K2, N2))` code on `X^a Z^b Q0`.
pub fn build_twin(k1: usize, n1: usize, k2: usize, n2: usize, q: u32) -> Result<Scheme, SchemeError> {
    check_twin(k1, n1, k2, n2, q)?;
    let structure = AccessStructure::twin(k1, n1, k2, n2)?;
    let mut vars = names(&["alpha", "beta"]);
    for d in ["alpha", "beta"] {
        vars.extend((1..k1).map(|i| format!("c_{d}_{i}")));
    }
    let env = 2 * k2 - 1 - n2;
    let rule = Arc::new(move |r: &[FieldElement]| {
        let shares = shamir_share(&r[..2], k1, n1, q, &r[2..])?;
        let slots = (1..=n2).map(|j| Slot::share(j, 0)).collect();
        Ok(Branch {
            classical: classical(shares),
            quantum: QuantumPrep { pieces: vec![threshold_secret(pair(r[0], r[1]), k2, slots)] },
        })
    });
    Scheme::custom(Family::Twin { k1, n1, k2, n2 }, structure, q, vars, vec![2; n1], vec![1; n2], env, rule)
}

/// The two extreme-point schemes for `{{Y1,Q1},{Q1,Q2}}`.
pub fn build_t3(extreme: u8, q: u32) -> Result<Scheme, SchemeError> {
    require_prime(q)?;
    let structure = AccessStructure::new(1, 2, [set(&["Y1", "Q1"]), set(&["Q1", "Q2"])])?;
    let quantum_sizes = match extreme {
        1 => vec![1, 2],
        2 => vec![2, 1],
        _ => return Err(SchemeError::InvalidParameters(format!("extreme must be 1 or 2, got {extreme}"))),
    };
    let rule = Arc::new(move |r: &[FieldElement]| {
        let key = pair(r[0], r[1]);
        let pieces = if extreme == 1 {
            vec![plain_secret(key, Slot::share(1, 0)), digits(&r[..2], vec![Slot::share(2, 0), Slot::share(2, 1)])]
        } else {
            vec![
                plain_secret(key, Slot::share(1, 0)),
                Piece::Superdense { message: key, pi1: Slot::share(1, 1), pi2: Slot::share(2, 0) },
            ]
        };
        Ok(Branch { classical: classical(vec![r[..2].to_vec()]), quantum: QuantumPrep { pieces } })
    });
    Scheme::custom(Family::T3 { extreme }, structure, q, names(&["alpha", "beta"]), vec![2], quantum_sizes, 0, rule)
}

/// Extreme-point schemes for the five structures in [`T4_STRUCTURES`] over `F_3`.
pub fn build_t4(index: u8, extreme: u8) -> Result<Scheme, SchemeError> {
    const Q: u32 = 3;
    if !(1..=5).contains(&index) {
        return Err(SchemeError::InvalidParameters(format!("structure index must be 1..5, got {index}")));
    }
    let quantum_sizes = match extreme {
        1 => vec![1, 2],
        2 => vec![2, 1],
        _ => return Err(SchemeError::InvalidParameters(format!("extreme must be 1 or 2, got {extreme}"))),
    };
    let minimal: Vec<ShareSet> = T4_STRUCTURES[index as usize - 1].iter().map(|m| set(m)).collect();
    let structure = AccessStructure::new(2, 2, minimal)?;
    let rule = Arc::new(move |r: &[FieldElement]| {
        let secret = [r[0], r[1]];
        let [s1, s2, s3] = additive_2of3((r[0], r[1]), (r[2], r[3]))?.map(|(a, b)| [a, b]);
        let (y1, y2, m) = match index {
            1 => (s1, s2, secret),
            2 => (secret, s2, s1),
            3 => (s1, s2, s1),
            4 => (secret, secret, secret),
            _ => (s1, s2, s3),
        };
        let key = pair(r[0], r[1]);
        let mut pieces = vec![plain_secret(key, Slot::share(1, 0))];
        if extreme == 1 {
            pieces.push(digits(&m, vec![Slot::share(2, 0), Slot::share(2, 1)]));
        } else {
            pieces.push(Piece::Superdense { message: pair(m[0], m[1]), pi1: Slot::share(1, 1), pi2: Slot::share(2, 0) });
        }
        Ok(Branch { classical: classical(vec![y1.to_vec(), y2.to_vec()]), quantum: QuantumPrep { pieces } })
    });
    Scheme::custom(
        Family::T4 { structure: index, extreme },
        structure,
        Q,
        names(&["alpha", "beta", "gamma1", "gamma2"]),
        vec![2, 2],
        quantum_sizes,
        0,
        rule,
    )
}

/// Generic construction for any feasible structure whose quantum restriction
/// is a threshold family: replication sharing of the key `(a, b)` over all
/// shares (digits on quantum shares stored as basis qudits) plus a threshold
/// code of `X^a Z^b Q0` over the quantum shares that appear in the restriction.
pub fn build_general(structure: &AccessStructure, q: u32) -> Result<Scheme, SchemeError> {
    require_prime(q)?;
    if let Some((a, b)) = structure.infeasibility_witness() {
        return Err(SchemeError::Infeasible(a, b));
    }
    let restriction = structure.quantum_restriction();
    let support = restriction.iter().fold(ShareSet::EMPTY, |acc, s| acc.union(*s));
    let k = restriction[0].len();
    let n = support.len();
    let members: Vec<usize> = support.iter().map(|l| l.index).collect();
    let is_threshold = restriction.iter().all(|s| s.len() == k)
        && restriction.len() == crate::access::combinations(n, k).len()
        && 2 * k > n;
    if !is_threshold {
        let shown: Vec<String> = restriction.iter().map(|s| s.to_string()).collect();
        return Err(SchemeError::UnsupportedQuantumSubstructure(format!(
            "quantum restriction {{{}}} is not a threshold family",
            shown.join(", ")
        )));
    }
    if (q as usize) < 2 * k - 1 {
        return Err(SchemeError::InvalidParameters(format!("need q >= {} for the quantum layer, got {q}", 2 * k - 1)));
    }

    let forbidden = structure.maximal_forbidden_sets();
    let pieces_per_share: Vec<(ShareLabel, usize)> = structure
        .shares()
        .map(|l| (l, forbidden.iter().filter(|f| !f.contains(l)).count() * 2))
        .collect();
    let n1 = structure.num_classical();
    let classical_sizes: Vec<usize> = pieces_per_share[..n1].iter().map(|p| p.1).collect();
    let digit_counts: Vec<usize> = pieces_per_share[n1..].iter().map(|p| p.1).collect();
    let quantum_sizes: Vec<usize> = digit_counts
        .iter()
        .enumerate()
        .map(|(j, &d)| d + usize::from(members.contains(&(j + 1))))
        .collect();

    let mut vars = names(&["alpha", "beta"]);
    for j in 1..forbidden.len() {
        vars.push(format!("r{j}_alpha"));
        vars.push(format!("r{j}_beta"));
    }
    let s = structure.clone();
    let env = 2 * k - 1 - n;
    let rule = Arc::new(move |r: &[FieldElement]| {
        let randomness: Vec<Vec<FieldElement>> = r[2..].chunks(2).map(<[FieldElement]>::to_vec).collect();
        let shared = replication_share(&r[..2], &s, &randomness)?;
        let mut classical_part = ClassicalShareVector::default();
        let mut values = Vec::new();
        let mut slots = Vec::new();
        for (label, held) in shared.entries {
            if label.is_quantum() {
                slots.extend((0..held.len()).map(|o| Slot::share(label.index, o)));
                values.extend(held.iter().map(|v| v.value()));
            } else {
                classical_part.entries.push((label, held));
            }
        }
        let secret_slots = members.iter().map(|&j| Slot::share(j, digit_counts[j - 1])).collect();
        let mut pieces = vec![threshold_secret(pair(r[0], r[1]), k, secret_slots)];
        if !values.is_empty() {
            pieces.push(Piece::Digits { values, slots });
        }
        Ok(Branch { classical: classical_part, quantum: QuantumPrep { pieces } })
    });
    Scheme::custom(Family::General, structure.clone(), q, vars, classical_sizes, quantum_sizes, env, rule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::Rational;

    fn rates(s: &Scheme) -> Vec<Rational> {
        s.rates().coordinates()
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from_integer(x)).collect()
    }

    #[test]
    fn otp_layout() {
        let s = build_otp(2).unwrap();
        assert_eq!(rates(&s), ints(&[2, 1]));
        assert_eq!(s.branch_count(), 4);
        let b = s.branch(&s.assignment(0)).unwrap();
        assert_eq!(b.quantum.pieces, vec![plain_secret((0, 0), Slot::share(1, 0))]);
    }

    #[test]
    fn twin_parameter_checks() {
        assert!(build_twin(2, 2, 2, 3, 5).is_ok());
        assert!(matches!(build_twin(1, 2, 1, 2, 3), Err(SchemeError::InvalidParameters(_))));
        assert!(matches!(build_twin(3, 2, 2, 3, 5), Err(SchemeError::InvalidParameters(_))));
        assert!(matches!(build_twin(1, 3, 2, 3, 3), Err(SchemeError::InvalidParameters(_))));
        assert!(matches!(build_twin(1, 1, 3, 4, 3), Err(SchemeError::InvalidParameters(_))));
        assert!(build_twin(1, 1, 3, 4, 5).unwrap().environment() == 1);
        assert_eq!(default_twin_field(2, 2), 3);
        assert_eq!(default_twin_field(1, 1), 2);
        assert_eq!(default_twin_field(4, 2), 5);
    }

    #[test]
    fn twin_rates_and_randomness() {
        let s = build_twin(2, 2, 2, 3, 5).unwrap();
        assert_eq!(rates(&s), ints(&[2, 2, 1, 1, 1]));
        assert_eq!(s.randomness(), &["alpha", "beta", "c_alpha_1", "c_beta_1"]);
        assert_eq!(s.branch_count(), 625);
    }

    #[test]
    fn t3_and_t4_rates() {
        assert_eq!(rates(&build_t3(1, 3).unwrap()), ints(&[2, 1, 2]));
        assert_eq!(rates(&build_t3(2, 3).unwrap()), ints(&[2, 2, 1]));
        for i in 1..=5 {
            assert_eq!(rates(&build_t4(i, 1).unwrap()), ints(&[2, 2, 1, 2]));
            assert_eq!(rates(&build_t4(i, 2).unwrap()), ints(&[2, 2, 2, 1]));
        }
        assert!(build_t4(6, 1).is_err());
        assert!(build_t3(3, 3).is_err());
    }

    #[test]
    fn t4_item_assignments() {
        let s = build_t4(5, 1).unwrap();
        let r: Vec<FieldElement> = [1, 2, 1, 1].iter().map(|&v| FieldElement::new(v, 3).unwrap()).collect();
        let b = s.branch(&r).unwrap();
        let y: Vec<Vec<u32>> = b.classical.entries.iter().map(|(_, v)| v.iter().map(|x| x.value()).collect()).collect();
        assert_eq!(y, vec![vec![1, 1], vec![2, 0]]);
        assert_eq!(b.quantum.pieces[1], Piece::Digits { values: vec![0, 1], slots: vec![Slot::share(2, 0), Slot::share(2, 1)] });

        let s = build_t4(4, 1).unwrap();
        let b = s.branch(&r).unwrap();
        let y: Vec<Vec<u32>> = b.classical.entries.iter().map(|(_, v)| v.iter().map(|x| x.value()).collect()).collect();
        assert_eq!(y, vec![vec![1, 2], vec![1, 2]]);
    }

    #[test]
    fn general_construction() {
        let hybrid = AccessStructure::new(1, 2, [set(&["Y1", "Q1"]), set(&["Q1", "Q2"])]).unwrap();
        let s = build_general(&hybrid, 3).unwrap();
        assert_eq!(rates(&s), ints(&[2, 3, 2]));

        let single = AccessStructure::new(0, 1, [set(&["Q1"])]).unwrap();
        let s = build_general(&single, 2).unwrap();
        assert_eq!(rates(&s), ints(&[3]));

        let bad = AccessStructure::new(1, 2, [set(&["Y1", "Q1"]), set(&["Y1", "Q2"])]).unwrap();
        assert!(matches!(build_general(&bad, 3), Err(SchemeError::Infeasible(..))));

        let twin = AccessStructure::twin(1, 1, 2, 3).unwrap();
        assert!(build_general(&twin, 3).is_ok());
    }
}
