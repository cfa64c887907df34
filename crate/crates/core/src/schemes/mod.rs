//! Scheme construction for every family of hybrid classical/quantum secret
//! sharing, plus achieved rates and the optimal rate regions.
//!
//! A [`Scheme`] maps each assignment of its uniform classical randomness to a
//! [`Branch`]: the digits held by every classical share and a [`QuantumPrep`]
//! describing the pure state over the reference `R`, the quantum shares and
//! any discarded environment qudits.

mod build;
mod region;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::access::{AccessError, AccessStructure, ShareLabel, ShareSet};
use crate::gf::{is_prime, ClassicalShareVector, FieldElement, FieldError};
use crate::qcore::{QuantumError, StateVector};
use crate::qprim::{bell_state, superdense_state, PauliPower, PrimitiveError, ThresholdCode};

pub use build::{build_general, build_otp, build_t3, build_t4, build_twin, default_twin_field, T4_STRUCTURES};
pub use region::{in_region, parse_rate, parse_tuple, region_of, Inequality, Membership, RateRegion, RegionFamily};

pub type Rational = num_rational::Ratio<i64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchemeError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("access structure is infeasible: {0} and {1} share no quantum share")]
    Infeasible(ShareSet, ShareSet),
    #[error("unsupported quantum substructure: {0}")]
    UnsupportedQuantumSubstructure(String),
    #[error("inconsistent branch: {0}")]
    Layout(String),
    #[error("state space too large: {0}")]
    TooLarge(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Primitive(#[from] PrimitiveError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Access(#[from] AccessError),
}

/// One qudit position in the quantum part of a scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Reference,
    /// Qudit `offset` (0-based) of quantum share `Q<share>`.
    Share { share: usize, offset: usize },
    /// Discarded coordinate of a truncated threshold code.
    Environment(usize),
}

impl Slot {
    pub fn share(share: usize, offset: usize) -> Self {
        Slot::Share { share, offset }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Reference => write!(f, "R"),
            Slot::Share { share, offset } => write!(f, "Q{share}.{offset}"),
            Slot::Environment(i) => write!(f, "E{i}"),
        }
    }
}

/// Where the padded secret qudit `X^a Z^b Q0` goes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SecretEncoding {
    Plain(Slot),
    /// Threshold code with the given `K`; `slots` lists all `2K - 1`
    /// codeword coordinates (shares first, then environment).
    Threshold { k: usize, shares: usize, slots: Vec<Slot> },
}

/// An independent tensor factor of a branch's quantum state.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Piece {
    /// `R` maximally entangled with `Q0`; `Q0` is padded by `X^a Z^b` and then encoded.
    Secret { pad: (u32, u32), encoding: SecretEncoding },
    /// Superdense coding of `message` into `(pi1, pi2)`.
    Superdense { message: (u32, u32), pi1: Slot, pi2: Slot },
    /// Classical digits stored as computational-basis qudits.
    Digits { values: Vec<u32>, slots: Vec<Slot> },
}

impl Piece {
    fn slots(&self) -> Vec<Slot> {
        match self {
            Piece::Secret { encoding: SecretEncoding::Plain(s), .. } => vec![Slot::Reference, *s],
            Piece::Secret { encoding: SecretEncoding::Threshold { slots, .. }, .. } => {
                std::iter::once(Slot::Reference).chain(slots.iter().copied()).collect()
            }
            Piece::Superdense { pi1, pi2, .. } => vec![*pi1, *pi2],
            Piece::Digits { slots, .. } => slots.clone(),
        }
    }

    fn state(&self, q: u32) -> Result<StateVector, SchemeError> {
        let d = q as usize;
        match self {
            Piece::Secret { pad, encoding } => {
                let key = PauliPower::from_values(pad.0, pad.1, q)?;
                let padded = bell_state(q)?.apply_local(1, &key.matrix())?;
                match encoding {
                    SecretEncoding::Plain(_) => Ok(padded),
                    SecretEncoding::Threshold { k, shares, .. } => {
                        Ok(ThresholdCode::new(*k, *shares, q)?.encode_state(&padded, 1)?)
                    }
                }
            }
            Piece::Superdense { message, .. } => Ok(superdense_state(PauliPower::from_values(message.0, message.1, q)?)?),
            Piece::Digits { values, slots } => {
                if values.len() != slots.len() {
                    return Err(SchemeError::Layout(format!("{} digits for {} qudits", values.len(), slots.len())));
                }
                let digits: Vec<usize> = values.iter().map(|&v| v as usize).collect();
                Ok(StateVector::basis(vec![d; digits.len()], &digits)?)
            }
        }
    }
}

/// Recipe for the pure state of one branch; equal recipes give equal states.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuantumPrep {
    pub pieces: Vec<Piece>,
}

impl QuantumPrep {
    /// Separates computational-basis digits from the coherent pieces.
    pub fn split_digits(&self) -> (QuantumPrep, Vec<(Slot, u32)>) {
        let mut coherent = Vec::new();
        let mut digits = Vec::new();
        for piece in &self.pieces {
            match piece {
                Piece::Digits { values, slots } if values.len() == slots.len() => {
                    digits.extend(slots.iter().copied().zip(values.iter().copied()));
                }
                other => coherent.push(other.clone()),
            }
        }
        digits.sort_unstable();
        (QuantumPrep { pieces: coherent }, digits)
    }
}

/// Share contents for one assignment of the classical randomness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub classical: ClassicalShareVector,
    pub quantum: QuantumPrep,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Otp,
    Twin { k1: usize, n1: usize, k2: usize, n2: usize },
    T3 { extreme: u8 },
    T4 { structure: u8, extreme: u8 },
    General,
}

impl Family {
    /// The rate region this family is certified against, when one is known.
    pub fn region(&self) -> Option<RegionFamily> {
        match *self {
            Family::Otp => Some(RegionFamily::Twin { n1: 1, n2: 1 }),
            Family::Twin { n1, n2, .. } => Some(RegionFamily::Twin { n1, n2 }),
            Family::T3 { .. } => Some(RegionFamily::T3),
            Family::T4 { .. } => Some(RegionFamily::T4),
            Family::General => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Otp => write!(f, "otp"),
            Family::Twin { k1, n1, k2, n2 } => write!(f, "twin(K1={k1},N1={n1},K2={k2},N2={n2})"),
            Family::T3 { extreme } => write!(f, "t3(extreme={extreme})"),
            Family::T4 { structure, extreme } => write!(f, "t4(structure={structure},extreme={extreme})"),
            Family::General => write!(f, "general"),
        }
    }
}

pub type BranchRule = Arc<dyn Fn(&[FieldElement]) -> Result<Branch, SchemeError> + Send + Sync>;

/// A secret-sharing scheme for one secret qudit (`lambda_0 = 1`).
#[derive(Clone)]
pub struct Scheme {
    family: Family,
    structure: AccessStructure,
    q: u32,
    randomness: Vec<String>,
    classical_sizes: Vec<usize>,
    quantum_sizes: Vec<usize>,
    environment: usize,
    rule: BranchRule,
}

impl fmt::Debug for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Scheme")
            .field("family", &self.family)
            .field("structure", &self.structure.to_string())
            .field("q", &self.q)
            .field("randomness", &self.randomness)
            .field("classical_sizes", &self.classical_sizes)
            .field("quantum_sizes", &self.quantum_sizes)
            .field("environment", &self.environment)
            .finish()
    }
}

impl Scheme {
    /// Builds a scheme from an explicit branch rule. Each randomness variable
    /// ranges over `F_q`; `classical_sizes` / `quantum_sizes` are the declared
    /// share sizes in q-ary digits / qudits.
    #[allow(clippy::too_many_arguments)]
    pub fn custom(
        family: Family,
        structure: AccessStructure,
        q: u32,
        randomness: Vec<String>,
        classical_sizes: Vec<usize>,
        quantum_sizes: Vec<usize>,
        environment: usize,
        rule: BranchRule,
    ) -> Result<Self, SchemeError> {
        if !is_prime(q) {
            return Err(SchemeError::Field(FieldError::NotPrime(q)));
        }
        if classical_sizes.len() != structure.num_classical() || quantum_sizes.len() != structure.num_quantum() {
            return Err(SchemeError::InvalidParameters("share size list does not match the structure".into()));
        }
        Ok(Self { family, structure, q, randomness, classical_sizes, quantum_sizes, environment, rule })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn structure(&self) -> &AccessStructure {
        &self.structure
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Secret size in qudits; always 1 for constructed schemes.
    pub fn lambda0(&self) -> usize {
        1
    }

    pub fn randomness(&self) -> &[String] {
        &self.randomness
    }

    pub fn classical_sizes(&self) -> &[usize] {
        &self.classical_sizes
    }

    pub fn quantum_sizes(&self) -> &[usize] {
        &self.quantum_sizes
    }

    pub fn environment(&self) -> usize {
        self.environment
    }

    pub fn branch_count(&self) -> usize {
        (self.q as usize).pow(self.randomness.len() as u32)
    }

    /// Canonical slot order: `R`, then each quantum share's qudits, then the environment.
    pub fn slots(&self) -> Vec<Slot> {
        let mut out = vec![Slot::Reference];
        for (j, &size) in self.quantum_sizes.iter().enumerate() {
            out.extend((0..size).map(|o| Slot::share(j + 1, o)));
        }
        out.extend((0..self.environment).map(Slot::Environment));
        out
    }

    /// The `index`-th randomness assignment in mixed-radix order (last variable fastest).
    pub fn assignment(&self, mut index: usize) -> Vec<FieldElement> {
        let q = self.q as usize;
        let mut out = vec![FieldElement::zero(self.q); self.randomness.len()];
        for v in out.iter_mut().rev() {
            *v = FieldElement::reduced((index % q) as u64, self.q);
            index /= q;
        }
        out
    }

    /// Evaluates the branch rule and checks the result against the declared sizes.
    pub fn branch(&self, assignment: &[FieldElement]) -> Result<Branch, SchemeError> {
        if assignment.len() != self.randomness.len() {
            return Err(SchemeError::Field(FieldError::RandomnessLength {
                expected: self.randomness.len(),
                found: assignment.len(),
            }));
        }
        let b = (self.rule)(assignment)?;
        let expected: Vec<ShareLabel> = (1..=self.structure.num_classical()).map(ShareLabel::classical).collect();
        let labels: Vec<ShareLabel> = b.classical.entries.iter().map(|(l, _)| *l).collect();
        if labels != expected {
            return Err(SchemeError::Layout("classical shares out of order or missing".into()));
        }
        for ((label, digits), &size) in b.classical.entries.iter().zip(&self.classical_sizes) {
            if digits.len() != size {
                return Err(SchemeError::Layout(format!("{label} holds {} digits, declared {size}", digits.len())));
            }
        }
        let mut covered: Vec<Slot> = b.quantum.pieces.iter().flat_map(Piece::slots).collect();
        covered.sort();
        let mut want = self.slots();
        want.sort();
        if covered != want {
            return Err(SchemeError::Layout("quantum pieces do not cover the declared qudits exactly once".into()));
        }
        Ok(b)
    }

    /// Pure state of a branch over [`Scheme::slots`].
    pub fn quantum_state(&self, prep: &QuantumPrep) -> Result<StateVector, SchemeError> {
        self.state_over(prep, &self.slots())
    }

    /// Pure state of the pieces in `prep`, which must cover exactly `slots`, in that order.
    pub fn state_over(&self, prep: &QuantumPrep, slots: &[Slot]) -> Result<StateVector, SchemeError> {
        let mut state = StateVector::scalar();
        let mut order = Vec::new();
        for piece in &prep.pieces {
            state = state.tensor(&piece.state(self.q)?);
            order.extend(piece.slots());
        }
        if order.len() != slots.len() {
            return Err(SchemeError::Layout(format!("{} qudits prepared for {} slots", order.len(), slots.len())));
        }
        let perm: Vec<usize> = slots
            .iter()
            .map(|s| order.iter().position(|o| o == s).ok_or_else(|| SchemeError::Layout(format!("slot {s} not prepared"))))
            .collect::<Result<_, _>>()?;
        Ok(state.permute(&perm)?)
    }

    pub fn rates(&self) -> RateTuple {
        rates_of(self)
    }
}

/// Achieved share rates `lambda / lambda_0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RateTuple {
    pub classical: Vec<Rational>,
    pub quantum: Vec<Rational>,
}

impl RateTuple {
    pub fn coordinates(&self) -> Vec<Rational> {
        self.classical.iter().chain(&self.quantum).copied().collect()
    }
}

impl fmt::Display for RateTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.coordinates().iter().map(|r| r.to_string()).collect();
        write!(f, "({})", items.join(","))
    }
}

pub fn rates_of(scheme: &Scheme) -> RateTuple {
    let l0 = scheme.lambda0() as i64;
    let conv = |v: &[usize]| v.iter().map(|&x| Rational::new(x as i64, l0)).collect();
    RateTuple { classical: conv(&scheme.classical_sizes), quantum: conv(&scheme.quantum_sizes) }
}
