use std::fmt;

use super::{RateTuple, Rational, SchemeError};

/// Families with a known optimal rate region.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionFamily {
    Twin { n1: usize, n2: usize },
    /// One classical and two quantum shares, `{{Y1,Q1},{Q1,Q2}}`.
    T3,
    /// Two classical and two quantum shares, any of the five listed structures.
    T4,
}

/// `sum_i coefficients[i] * R_i >= constant`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inequality {
    pub coefficients: Vec<Rational>,
    pub constant: Rational,
}

impl Inequality {
    fn lhs(&self, point: &[Rational]) -> Rational {
        self.coefficients.iter().zip(point).map(|(c, x)| c * x).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RateRegion {
    pub coordinates: Vec<String>,
    pub inequalities: Vec<Inequality>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Outside,
    Interior,
    /// Inside with `tight` inequalities holding with equality.
    Boundary { tight: usize },
}

impl Membership {
    pub fn is_inside(self) -> bool {
        self != Membership::Outside
    }
}

impl fmt::Display for Membership {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Membership::Outside => write!(f, "out"),
            Membership::Interior => write!(f, "in"),
            Membership::Boundary { .. } => write!(f, "in (boundary)"),
        }
    }
}

impl RateRegion {
    fn bounds(coordinates: Vec<String>, lower: &[(usize, i64)]) -> Self {
        let n = coordinates.len();
        let inequalities = lower
            .iter()
            .map(|&(i, c)| {
                let mut coefficients = vec![Rational::from_integer(0); n];
                coefficients[i] = Rational::from_integer(1);
                Inequality { coefficients, constant: Rational::from_integer(c) }
            })
            .collect();
        Self { coordinates, inequalities }
    }

    pub fn render(&self, ineq: &Inequality) -> String {
        let terms: Vec<String> = ineq
            .coefficients
            .iter()
            .zip(&self.coordinates)
            .filter(|(c, _)| **c != Rational::from_integer(0))
            .map(|(c, name)| if *c == Rational::from_integer(1) { name.clone() } else { format!("{c}*{name}") })
            .collect();
        format!("{} >= {}", terms.join(" + "), ineq.constant)
    }
}

impl fmt::Display for RateRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ineq in &self.inequalities {
            writeln!(f, "{}", self.render(ineq))?;
        }
        Ok(())
    }
}

fn coordinate_names(n1: usize, n2: usize) -> Vec<String> {
    (1..=n1).map(|i| format!("RY{i}")).chain((1..=n2).map(|j| format!("RQ{j}"))).collect()
}

pub fn region_of(family: RegionFamily) -> RateRegion {
    let (n1, n2) = match family {
        RegionFamily::Twin { n1, n2 } => (n1, n2),
        RegionFamily::T3 => (1, 2),
        RegionFamily::T4 => (2, 2),
    };
    let lower: Vec<(usize, i64)> = (0..n1).map(|i| (i, 2)).chain((n1..n1 + n2).map(|j| (j, 1))).collect();
    let mut region = RateRegion::bounds(coordinate_names(n1, n2), &lower);
    if family != (RegionFamily::Twin { n1, n2 }) {
        let mut coefficients = vec![Rational::from_integer(0); n1 + n2];
        coefficients[n1] = Rational::from_integer(1);
        coefficients[n1 + 1] = Rational::from_integer(1);
        region.inequalities.push(Inequality { coefficients, constant: Rational::from_integer(3) });
    }
    region
}

/// Exact membership test; errors when the tuple has the wrong length.
pub fn in_region(region: &RateRegion, point: &[Rational]) -> Result<Membership, SchemeError> {
    if point.len() != region.coordinates.len() {
        return Err(SchemeError::InvalidParameters(format!(
            "rate tuple has {} coordinates, region has {}",
            point.len(),
            region.coordinates.len()
        )));
    }
    let mut tight = 0;
    for ineq in &region.inequalities {
        let lhs = ineq.lhs(point);
        if lhs < ineq.constant {
            return Ok(Membership::Outside);
        }
        if lhs == ineq.constant {
            tight += 1;
        }
    }
    Ok(if tight == 0 { Membership::Interior } else { Membership::Boundary { tight } })
}

impl RateTuple {
    pub fn membership(&self, region: &RateRegion) -> Result<Membership, SchemeError> {
        in_region(region, &self.coordinates())
    }
}

/// Parses `3`, `-1`, `1.5` or `3/2` exactly.
pub fn parse_rate(text: &str) -> Result<Rational, SchemeError> {
    let bad = || SchemeError::InvalidParameters(format!("malformed rate `{text}`"));
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let all_digits = |s: &str| s.chars().all(|c| c.is_ascii_digit());
    if (int.is_empty() && frac.is_empty()) || !all_digits(int) || !all_digits(frac) || frac.len() > 18 {
        return Err(bad());
    }
    let scale = 10i64.pow(frac.len() as u32);
    let whole: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
    let part: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    let value = whole.checked_mul(scale).and_then(|w| w.checked_add(part)).ok_or_else(bad)?;
    let r = Rational::new(value, scale);
    Ok(if neg { -r } else { r })
}

/// Comma-separated rates, e.g. `2,1.5,3/2`.
pub fn parse_tuple(text: &str) -> Result<Vec<Rational>, SchemeError> {
    text.split(',').map(parse_rate).collect()
}
