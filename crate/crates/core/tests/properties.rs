mod common;

use common::{charpoly_eigenvalues, random_complex_matrix, random_density, random_hermitian, rng};
use proptest::prelude::*;
use qss_core::access::{enumerate_all_structures, ShareSet};
use qss_core::gf::next_prime;
use qss_core::qcore::{
    eig_hermitian, partial_trace, tensor, von_neumann_entropy, CMatrix, DensityMatrix, StateVector, SubsystemLayout, C64,
    TAU, TAU_EIG, TAU_H,
};
use qss_core::qprim::{pauli_x, pauli_z, ThresholdCode};
use qss_core::schemes::{build_general, build_otp, build_t3, build_t4, build_twin, in_region, region_of, Scheme, SchemeError};
use qss_core::verify::{assemble, audit, cq_entropy, embedded_entropy};

fn density(labels: &[(&str, usize)], entries: CMatrix) -> DensityMatrix {
    DensityMatrix::new(SubsystemLayout::new(2, labels.iter().map(|&(l, d)| (l, d))).unwrap(), entries).unwrap()
}

/// Qudit Fourier matrix.
fn fourier(q: usize) -> CMatrix {
    let norm = 1.0 / (q as f64).sqrt();
    CMatrix::from_fn(q, q, |j, k| C64::from_polar(norm, 2.0 * std::f64::consts::PI * (j * k) as f64 / q as f64))
}

/// Unitary from a word in X, Z and the Fourier gate on one qudit, tensored over factors.
fn pauli_word_unitary(q: u32, factors: usize, word: &[u8]) -> CMatrix {
    let x = pauli_x(q).unwrap();
    let z = pauli_z(q).unwrap();
    let f = fourier(q as usize);
    let mut u = CMatrix::identity(1);
    for k in 0..factors {
        let mut local = CMatrix::identity(q as usize);
        for &g in word.iter().skip(k).step_by(factors) {
            local = match g % 3 {
                0 => x.matmul(&local),
                1 => z.matmul(&local),
                _ => f.matmul(&local),
            };
        }
        u = u.kron(&local);
    }
    u
}

fn seed() -> impl Strategy<Value = u64> {
    any::<u64>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn entropy_is_unitarily_invariant(s in seed(), word in proptest::collection::vec(0u8..3, 1..12), q in prop_oneof![Just(2u32), Just(3)]) {
        let mut r = rng(s);
        let d = (q * q) as usize;
        let rho = DensityMatrix::new(SubsystemLayout::qudits(q, ["A", "B"]).unwrap(), random_density(&mut r, d)).unwrap();
        let u = pauli_word_unitary(q, 2, &word);
        prop_assert!(u.is_unitary(TAU_H));
        let rotated = DensityMatrix::new(rho.layout().clone(), u.matmul(rho.entries()).matmul(&u.adjoint())).unwrap();
        let a = von_neumann_entropy(&rho).unwrap();
        let b = von_neumann_entropy(&rotated).unwrap();
        prop_assert!((a - b).abs() <= TAU, "{} vs {}", a, b);
    }

    #[test]
    fn subadditivity_and_araki_lieb(s in seed(), da in 2usize..4, db in 2usize..4) {
        let mut r = rng(s);
        let rho = density(&[("A", da), ("B", db)], random_density(&mut r, da * db));
        let hab = von_neumann_entropy(&rho).unwrap();
        let ha = von_neumann_entropy(&partial_trace(&rho, &["A"]).unwrap()).unwrap();
        let hb = von_neumann_entropy(&partial_trace(&rho, &["B"]).unwrap()).unwrap();
        prop_assert!(hab <= ha + hb + TAU);
        prop_assert!(hab >= (ha - hb).abs() - TAU);
    }

    #[test]
    fn partial_trace_composes(s in seed()) {
        let mut r = rng(s);
        let rho = density(&[("A", 2), ("B", 3), ("C", 2)], random_density(&mut r, 12));
        let direct = partial_trace(&rho, &["A"]).unwrap();
        let staged = partial_trace(&partial_trace(&rho, &["A", "B"]).unwrap(), &["A"]).unwrap();
        prop_assert!(direct.entries().max_abs_diff(staged.entries()) <= TAU_H);
        let ac = partial_trace(&rho, &["A", "C"]).unwrap();
        prop_assert_eq!(ac.layout().labels().collect::<Vec<_>>(), vec!["A", "C"]);
    }

    #[test]
    fn eigenvalues_sum_to_trace(s in seed(), n in 1usize..10) {
        let mut r = rng(s);
        let h = random_hermitian(&mut r, n);
        let values = eig_hermitian(&h).unwrap();
        let sum: f64 = values.iter().sum();
        prop_assert!((sum - h.trace().re).abs() <= TAU_EIG * n as f64);
        prop_assert!(values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn eigenvalues_match_characteristic_polynomial(s in seed(), n in 2usize..7) {
        let mut r = rng(s);
        let h = random_hermitian(&mut r, n);
        let jacobi = eig_hermitian(&h).unwrap();
        let oracle = charpoly_eigenvalues(&h);
        for (a, b) in jacobi.iter().zip(&oracle) {
            prop_assert!((a - b).abs() < 1e-8, "{:?} vs {:?}", jacobi, oracle);
        }
    }

    #[test]
    fn pure_state_reduction_matches_density_path(s in seed()) {
        let mut r = rng(s);
        let raw = random_complex_matrix(&mut r, 12, 1);
        let norm = raw.frobenius_norm();
        let amps: Vec<C64> = raw.as_slice().iter().map(|a| a / norm).collect();
        let psi = StateVector::new(vec![2, 3, 2], amps.clone()).unwrap();
        let rho = DensityMatrix::from_pure(SubsystemLayout::new(2, [("A", 2), ("B", 3), ("C", 2)]).unwrap(), &amps).unwrap();
        let reduced = partial_trace(&rho, &["A", "C"]).unwrap();
        prop_assert!(psi.reduced(&[0, 2]).unwrap().max_abs_diff(reduced.entries()) <= TAU_H);
        let h = psi.entropy(&[1], 2).unwrap();
        prop_assert!((h - von_neumann_entropy(&partial_trace(&rho, &["B"]).unwrap()).unwrap()).abs() <= TAU);
    }

    #[test]
    fn tensor_entropy_is_additive(s in seed()) {
        let mut r = rng(s);
        let a = density(&[("A", 2)], random_density(&mut r, 2));
        let b = density(&[("B", 3)], random_density(&mut r, 3));
        let ab = tensor(&a, &b).unwrap();
        let sum = von_neumann_entropy(&a).unwrap() + von_neumann_entropy(&b).unwrap();
        prop_assert!((von_neumann_entropy(&ab).unwrap() - sum).abs() <= TAU);
    }
}

fn catalog() -> Vec<(String, Scheme)> {
    let mut out = vec![
        ("otp q=2".to_string(), build_otp(2).unwrap()),
        ("otp q=3".to_string(), build_otp(3).unwrap()),
        ("twin 1,1,1,1 q=2".to_string(), build_twin(1, 1, 1, 1, 2).unwrap()),
        ("twin 1,2,2,3 q=5".to_string(), build_twin(1, 2, 2, 3, 5).unwrap()),
        ("twin 2,3,2,2 q=5".to_string(), build_twin(2, 3, 2, 2, 5).unwrap()),
        ("twin 1,1,3,4 q=5".to_string(), build_twin(1, 1, 3, 4, 5).unwrap()),
        ("t3 extreme 1 q=2".to_string(), build_t3(1, 2).unwrap()),
    ];
    for e in [1, 2] {
        out.push((format!("t3 extreme {e}"), build_t3(e, 3).unwrap()));
        for i in 1..=5 {
            out.push((format!("t4 structure {i} extreme {e}"), build_t4(i, e).unwrap()));
        }
    }
    out
}

#[test]
fn catalog_rates_lie_in_their_regions() {
    for (name, scheme) in catalog() {
        let region = region_of(scheme.family().region().unwrap());
        let m = in_region(&region, &scheme.rates().coordinates()).unwrap();
        assert!(m.is_inside(), "{name}");
    }
}

#[test]
fn extreme_points_are_tight() {
    for (name, scheme) in catalog().into_iter().filter(|(n, _)| n.starts_with('t')) {
        let region = region_of(scheme.family().region().unwrap());
        let coords = scheme.rates().coordinates();
        match in_region(&region, &coords).unwrap() {
            qss_core::schemes::Membership::Boundary { tight } => assert!(tight >= coords.len(), "{name}: {tight}"),
            other => panic!("{name}: {other:?}"),
        }
    }
}

#[test]
fn catalog_audits_are_sane_and_monotone() {
    for (name, scheme) in catalog() {
        let report = audit(&scheme).unwrap();
        assert!(report.overall, "{name}\n{}", report.render());
        let h = report.reference_entropy;
        assert!((h - 1.0).abs() <= TAU, "{name}: H(R) = {h}");
        let value = |t: ShareSet| report.records.iter().find(|r| r.subset == t).map_or(0.0, |r| r.mutual_information);
        for r in &report.records {
            assert!(r.mutual_information >= -TAU && r.mutual_information <= 2.0 * h + TAU, "{name}: {r}");
            for other in &report.records {
                if r.subset.is_subset(other.subset) {
                    assert!(value(r.subset) <= value(other.subset) + TAU, "{name}: {} vs {}", r.subset, other.subset);
                }
            }
        }
    }
}

#[test]
fn decomposition_matches_embedding_on_small_twin() {
    let scheme = build_twin(1, 2, 2, 2, 3).unwrap();
    let state = assemble(&scheme).unwrap();
    for t in scheme.structure().nonempty_subsets() {
        for with_r in [false, true] {
            let a = cq_entropy(&state, t, with_r).unwrap();
            let b = embedded_entropy(&state, t, with_r).unwrap();
            assert!((a - b).abs() <= TAU, "{t} {with_r}: {a} vs {b}");
        }
    }
}

#[test]
fn general_construction_on_every_small_feasible_structure() {
    let mut built = 0;
    for n in 1..=4 {
        for n1 in 0..n {
            for s in enumerate_all_structures(n1, n - n1).into_iter().filter(|s| s.check_feasible()) {
                let k = s.quantum_restriction()[0].len() as u32;
                let q = next_prime((2 * k).saturating_sub(1).max(2));
                match build_general(&s, q) {
                    Ok(scheme) if scheme.branch_count() > 60_000 => {}
                    Ok(scheme) => {
                        let report = audit(&scheme).unwrap();
                        assert!(report.overall, "{s}\n{}", report.render());
                        built += 1;
                    }
                    Err(SchemeError::UnsupportedQuantumSubstructure(_)) => {}
                    Err(e) => panic!("{s}: {e}"),
                }
            }
        }
    }
    assert!(built >= 50, "{built}");
}

#[test]
fn threshold_code_certification_includes_three_of_three() {
    for (k, n, q) in [(1usize, 1usize, 2u32), (2, 2, 3), (2, 3, 3), (3, 3, 5), (3, 4, 5), (3, 5, 5)] {
        let code = ThresholdCode::new(k, n, q).unwrap();
        let psi = code.encode_state(&qss_core::qprim::bell_state(q).unwrap(), 1).unwrap();
        let h_r = psi.entropy(&[0], q).unwrap();
        for mask in 1u32..(1 << n) {
            let t: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).collect();
            let rt: Vec<usize> = std::iter::once(0).chain(t.iter().copied()).collect();
            let i = h_r + psi.entropy(&t, q).unwrap() - psi.entropy(&rt, q).unwrap();
            let target = if t.len() >= k { 2.0 } else { 0.0 };
            assert!((i - target).abs() <= TAU, "({k},{n},{q}) {t:?}: {i}");
        }
    }
}

#[test]
fn general_construction_covers_the_two_by_two_hybrids() {
    for minimal in qss_core::schemes::T4_STRUCTURES {
        let s = qss_core::AccessStructure::new(2, 2, minimal.iter().map(|m| qss_core::access::set(m))).unwrap();
        let report = audit(&build_general(&s, 3).unwrap()).unwrap();
        assert!(report.overall, "{s}\n{}", report.render());
        assert_eq!(report.records.len(), 15);
    }
}
