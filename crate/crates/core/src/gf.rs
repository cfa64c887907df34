//! Prime-field arithmetic and the classical secret-sharing layers that the
//! hybrid schemes compose: Shamir threshold sharing, the replication scheme
//! over maximal forbidden sets, and the additive 2-out-of-3 sharing over F_3.
//!
//! Randomness is always passed in explicitly so callers can enumerate every
//! branch of a scheme exactly.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::access::{AccessStructure, ShareLabel};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(u32),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("field F_{q} too small for {n} evaluation points (need q > n)")]
    FieldTooSmall { q: u32, n: usize },
    #[error("invalid threshold: K={k}, N={n}")]
    InvalidThreshold { k: usize, n: usize },
    #[error("expected {expected} randomness values, got {found}")]
    RandomnessLength { expected: usize, found: usize },
    #[error("duplicate evaluation point {0}")]
    DuplicatePoint(u32),
    #[error("need at least {needed} shares, got {found}")]
    TooFewShares { needed: usize, found: usize },
    #[error("access structure has no minimal qualified sets")]
    EmptyStructure,
}

pub fn is_prime(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Smallest prime that is at least `lower`.
pub fn next_prime(lower: u32) -> u32 {
    let mut q = lower.max(2);
    while !is_prime(q) {
        q += 1;
    }
    q
}

/// Element of the prime field `F_q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    value: u32,
    modulus: u32,
}

impl FieldElement {
    pub fn new(value: u64, modulus: u32) -> Result<Self, FieldError> {
        if !is_prime(modulus) {
            return Err(FieldError::NotPrime(modulus));
        }
        Ok(Self::reduced(value, modulus))
    }

    /// Caller guarantees `modulus` is prime.
    pub(crate) fn reduced(value: u64, modulus: u32) -> Self {
        Self { value: (value % u64::from(modulus)) as u32, modulus }
    }

    pub fn zero(modulus: u32) -> Self {
        Self { value: 0, modulus }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn same_field(self, other: Self) -> Result<u32, FieldError> {
        if self.modulus == other.modulus {
            Ok(self.modulus)
        } else {
            Err(FieldError::ModulusMismatch(self.modulus, other.modulus))
        }
    }

    pub fn checked_add(self, other: Self) -> Result<Self, FieldError> {
        let q = self.same_field(other)?;
        Ok(Self::reduced(u64::from(self.value) + u64::from(other.value), q))
    }

    pub fn checked_sub(self, other: Self) -> Result<Self, FieldError> {
        let q = self.same_field(other)?;
        Ok(Self::reduced(u64::from(self.value) + u64::from(q - other.value), q))
    }

    pub fn checked_mul(self, other: Self) -> Result<Self, FieldError> {
        let q = self.same_field(other)?;
        Ok(Self::reduced(u64::from(self.value) * u64::from(other.value), q))
    }

    pub fn pow(self, mut e: u64) -> Self {
        let q = u64::from(self.modulus);
        let mut base = u64::from(self.value);
        let mut acc = 1u64 % q;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % q;
            }
            base = base * base % q;
            e >>= 1;
        }
        Self::reduced(acc, self.modulus)
    }

    /// Inverse via Fermat's little theorem.
    pub fn inv(self) -> Result<Self, FieldError> {
        if self.value == 0 {
            return Err(FieldError::ZeroInverse);
        }
        Ok(self.pow(u64::from(self.modulus) - 2))
    }
}

// Operator forms panic on mixed moduli; use the `checked_*` methods when the
// moduli are not known to agree.
impl Add for FieldElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.checked_add(rhs).expect("field modulus mismatch")
    }
}

impl Sub for FieldElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.checked_sub(rhs).expect("field modulus mismatch")
    }
}

impl Mul for FieldElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(rhs).expect("field modulus mismatch")
    }
}

impl Neg for FieldElement {
    type Output = Self;
    fn neg(self) -> Self {
        Self::reduced(u64::from(self.modulus - self.value), self.modulus)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Classical digits held by each share.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ClassicalShareVector {
    pub entries: Vec<(ShareLabel, Vec<FieldElement>)>,
}

impl ClassicalShareVector {
    pub fn get(&self, label: ShareLabel) -> Option<&[FieldElement]> {
        self.entries.iter().find(|(l, _)| *l == label).map(|(_, v)| v.as_slice())
    }
}

fn check_modulus(values: &[FieldElement], q: u32) -> Result<(), FieldError> {
    match values.iter().find(|v| v.modulus != q) {
        Some(v) => Err(FieldError::ModulusMismatch(q, v.modulus)),
        None => Ok(()),
    }
}

/// Shamir `(K, N)` sharing, one polynomial per secret digit.
///
/// Digit `d` uses `f_d(x) = secret[d] + sum_{i=1}^{K-1} c_{d,i} x^i` with
/// `c_{d,i} = randomness[d * (K-1) + i - 1]`; share `j` (1-based) is
/// `(f_0(j), f_1(j), ...)`.
pub fn shamir_share(
    secret: &[FieldElement],
    k: usize,
    n: usize,
    q: u32,
    randomness: &[FieldElement],
) -> Result<Vec<Vec<FieldElement>>, FieldError> {
    if !is_prime(q) {
        return Err(FieldError::NotPrime(q));
    }
    if k == 0 || k > n {
        return Err(FieldError::InvalidThreshold { k, n });
    }
    if (q as usize) <= n {
        return Err(FieldError::FieldTooSmall { q, n });
    }
    let expected = secret.len() * (k - 1);
    if randomness.len() != expected {
        return Err(FieldError::RandomnessLength { expected, found: randomness.len() });
    }
    check_modulus(secret, q)?;
    check_modulus(randomness, q)?;

    let shares = (1..=n)
        .map(|x| {
            let x = FieldElement::reduced(x as u64, q);
            secret
                .iter()
                .enumerate()
                .map(|(d, &s)| {
                    let coeffs = &randomness[d * (k - 1)..(d + 1) * (k - 1)];
                    // Horner from the top coefficient down to the secret.
                    coeffs.iter().rev().fold(FieldElement::zero(q), |acc, &c| acc * x + c) * x + s
                })
                .collect()
        })
        .collect();
    Ok(shares)
}

/// Lagrange interpolation at zero from `(point, digits)` pairs.
///
/// All supplied points must be distinct; the first `k` are used.
pub fn shamir_reconstruct(
    shares: &[(FieldElement, Vec<FieldElement>)],
    k: usize,
    q: u32,
) -> Result<Vec<FieldElement>, FieldError> {
    if !is_prime(q) {
        return Err(FieldError::NotPrime(q));
    }
    if k == 0 {
        return Err(FieldError::InvalidThreshold { k, n: shares.len() });
    }
    if shares.len() < k {
        return Err(FieldError::TooFewShares { needed: k, found: shares.len() });
    }
    for (i, (p, v)) in shares.iter().enumerate() {
        check_modulus(std::slice::from_ref(p), q)?;
        check_modulus(v, q)?;
        if shares[..i].iter().any(|(o, _)| o == p) {
            return Err(FieldError::DuplicatePoint(p.value));
        }
    }
    let used = &shares[..k];
    let width = used[0].1.len();
    let mut secret = vec![FieldElement::zero(q); width];
    for (i, (xi, yi)) in used.iter().enumerate() {
        if yi.len() != width {
            return Err(FieldError::RandomnessLength { expected: width, found: yi.len() });
        }
        // l_i(0) = prod_{j != i} x_j / (x_j - x_i)
        let mut basis = FieldElement::reduced(1, q);
        for (j, (xj, _)) in used.iter().enumerate() {
            if i != j {
                basis = basis * *xj * (*xj - *xi).inv()?;
            }
        }
        for (s, &y) in secret.iter_mut().zip(yi) {
            *s = *s + y * basis;
        }
    }
    Ok(secret)
}

/// Replication sharing over the maximal forbidden sets `F_1..F_m` of `structure`.
///
/// `randomness` holds `r_1..r_{m-1}` (each a tuple of `secret.len()` digits);
/// `r_m = secret - sum r_j`. Share `s` receives, in order of `j`, every `r_j`
/// with `s` outside `F_j`.
pub fn replication_share(
    secret: &[FieldElement],
    structure: &AccessStructure,
    randomness: &[Vec<FieldElement>],
) -> Result<ClassicalShareVector, FieldError> {
    if structure.minimal_sets().is_empty() {
        return Err(FieldError::EmptyStructure);
    }
    let q = match secret.first() {
        Some(s) => s.modulus,
        None => return Ok(ClassicalShareVector::default()),
    };
    check_modulus(secret, q)?;
    let forbidden = structure.maximal_forbidden_sets();
    let m = forbidden.len();
    if randomness.len() != m - 1 {
        return Err(FieldError::RandomnessLength { expected: m - 1, found: randomness.len() });
    }
    for r in randomness {
        if r.len() != secret.len() {
            return Err(FieldError::RandomnessLength { expected: secret.len(), found: r.len() });
        }
        check_modulus(r, q)?;
    }
    let mut pieces: Vec<Vec<FieldElement>> = randomness.to_vec();
    let last = secret
        .iter()
        .enumerate()
        .map(|(d, &s)| pieces.iter().fold(s, |acc, r| acc - r[d]))
        .collect();
    pieces.push(last);

    let entries = structure
        .shares()
        .map(|label| {
            let held = forbidden
                .iter()
                .zip(&pieces)
                .filter(|(f, _)| !f.contains(label))
                .flat_map(|(_, r)| r.iter().copied())
                .collect();
            (label, held)
        })
        .collect();
    Ok(ClassicalShareVector { entries })
}

/// Number of digits each share receives from [`replication_share`] for a secret of `width` digits.
pub fn replication_sizes(structure: &AccessStructure, width: usize) -> Vec<(ShareLabel, usize)> {
    let forbidden = structure.maximal_forbidden_sets();
    structure
        .shares()
        .map(|label| (label, width * forbidden.iter().filter(|f| !f.contains(label)).count()))
        .collect()
}

/// `(g1, g2), (a + g1, b + g2), (a + 2 g1, b + 2 g2)` over F_3.
pub fn additive_2of3(
    secret: (FieldElement, FieldElement),
    randomness: (FieldElement, FieldElement),
) -> Result<[(FieldElement, FieldElement); 3], FieldError> {
    let (a, b) = secret;
    let (g1, g2) = randomness;
    for v in [a, b, g1, g2] {
        if v.modulus != 3 {
            return Err(FieldError::ModulusMismatch(3, v.modulus));
        }
    }
    let two = FieldElement::reduced(2, 3);
    Ok([(g1, g2), (a + g1, b + g2), (a + two * g1, b + two * g2)])
}
