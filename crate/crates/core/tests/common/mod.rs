#![allow(dead_code)]

use std::io::Write;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use qss_core::access::{AccessStructure, ShareSet};
use qss_core::qcore::{CMatrix, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> CMatrix {
    let a = random_complex_matrix(rng, n, n);
    a.add(&a.adjoint()).scale(C64::new(0.5, 0.0))
}

/// Random full-rank density matrix `A A^dagger / tr`.
pub fn random_density(rng: &mut impl Rng, n: usize) -> CMatrix {
    let a = random_complex_matrix(rng, n, n);
    let rho = a.matmul(&a.adjoint());
    let t = rho.trace();
    rho.scale(C64::new(1.0, 0.0) / t)
}

/// Characteristic polynomial coefficients `c_0..c_n` (monic, `c_n = 1`) by
/// the Faddeev-LeVerrier recursion.
pub fn characteristic_polynomial(a: &CMatrix) -> Vec<Complex64> {
    let n = a.rows();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[n] = Complex64::new(1.0, 0.0);
    let mut m = CMatrix::zeros(n, n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = a.matmul(&m);
        for i in 0..n {
            next[(i, i)] += coeffs[n - k + 1];
        }
        m = next;
        let am = a.matmul(&m);
        coeffs[n - k] = -am.trace() / k as f64;
    }
    coeffs
}

fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All roots of a monic polynomial by Durand-Kerner, polished with Newton steps.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let radius = 1.0 + coeffs[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * radius).collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let (p, _) = horner(coeffs, z[i]);
            let denom = (0..n).filter(|&j| j != i).fold(Complex64::new(1.0, 0.0), |acc, j| acc * (z[i] - z[j]));
            let step = p / denom;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    for r in z.iter_mut() {
        for _ in 0..5 {
            let (p, dp) = horner(coeffs, *r);
            if dp.norm() > 0.0 {
                *r -= p / dp;
            }
        }
    }
    z
}

/// Eigenvalues of a Hermitian matrix via its characteristic polynomial, descending.
pub fn charpoly_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = polynomial_roots(&characteristic_polynomial(a)).iter().map(|z| z.re).collect();
    v.sort_by(|x, y| y.partial_cmp(x).unwrap());
    v
}

/// Feasibility by checking every pair of qualified (not only minimal) sets.
pub fn brute_force_feasible(s: &AccessStructure) -> bool {
    let qualified: Vec<ShareSet> =
        s.all_subsets().into_iter().filter(|&t| s.is_qualified(t).unwrap()).collect();
    qualified.iter().all(|a| qualified.iter().all(|b| !a.intersection(*b).quantum_part().is_empty()))
}

/// Collects named checks for one acceptance criterion and prints one line.
pub struct Criterion {
    id: u32,
    title: &'static str,
    started: Instant,
    failures: Vec<String>,
    checks: usize,
}

impl Criterion {
    pub fn new(id: u32, title: &'static str) -> Self {
        Self { id, title, started: Instant::now(), failures: Vec::new(), checks: 0 }
    }

    pub fn check(&mut self, ok: bool, what: impl Into<String>) {
        self.checks += 1;
        if !ok {
            self.failures.push(what.into());
        }
    }

    pub fn elapsed(&self) -> Duration {
        self.started.elapsed()
    }

    pub fn within(&mut self, limit: Duration) {
        let t = self.elapsed();
        self.check(t < limit, format!("runtime {t:.2?} exceeds {limit:?}"));
    }

    /// Prints the verdict line (bypassing test output capture) and panics on failure.
    pub fn finish(self) {
        let verdict = if self.failures.is_empty() { "PASS" } else { "FAIL" };
        let line = format!(
            "acceptance criterion {}: {verdict} [{} checks, {:.2?}] {}\n",
            self.id,
            self.checks,
            self.elapsed(),
            self.title
        );
        let _ = std::io::stderr().write_all(line.as_bytes());
        for f in &self.failures {
            let _ = std::io::stderr().write_all(format!("    failed: {f}\n").as_bytes());
        }
        assert!(self.failures.is_empty(), "criterion {} failed: {:?}", self.id, self.failures);
    }
}
