mod common;

use common::*;
use meanfield_core::fock::*;
use meanfield_core::linalg::{max_abs_diff, rel_diff, spectral_norm, CVec, C64};
use proptest::prelude::*;

fn op(rng: &mut rand_chacha::ChaCha8Rng, m: usize, p: usize) -> SectorOperator {
    let d = sector_dim(m, p);
    SectorOperator::new(m, p, random_matrix(rng, d, d)).unwrap()
}

#[test]
fn quantize_matches_ladder_construction() {
    let mut r = rng(11);
    for m in 1..=3 {
        for p in 1..=3 {
            for n in 0..=5 {
                let a = op(&mut r, m, p);
                let big_n = 2.5 + n as f64;
                let n = n.max(1);
                let q = QuantizationParams::new(big_n, n).unwrap();
                let ours = quantize(&a, q).unwrap();
                let oracle = ladder_quantize(&a, big_n, n);
                assert!(max_abs_diff(ours.matrix(), &oracle) < 1e-12, "m={m} p={p} n={n}");
            }
        }
    }
}

#[test]
fn contraction_matches_dense_projectors() {
    let mut r = rng(12);
    for m in 1..=3 {
        for p in 1..=2 {
            for q in 1..=2 {
                for k in 0..=p.min(q) {
                    let a = op(&mut r, m, p);
                    let b = op(&mut r, m, q);
                    let ours = contract(&a, &b, k).unwrap();
                    assert!(max_abs_diff(ours.matrix(), &dense_contract(&a, &b, k)) < 1e-12);
                }
            }
        }
    }
    // a rectangular-heavy case
    let a = op(&mut r, 2, 3);
    let b = op(&mut r, 2, 2);
    for k in 0..=2 {
        let ours = contract(&a, &b, k).unwrap();
        assert!(max_abs_diff(ours.matrix(), &dense_contract(&a, &b, k)) < 1e-12);
    }
}

#[test]
fn hamiltonian_matches_ladder_form() {
    // sum h_xy a*_x a_y + 1/(2N) sum w_xy a*_x a*_y a_y a_x
    let mut r = rng(13);
    let m = 3;
    let h = random_hermitian(&mut r, m);
    let w = [0.7, -0.2, 0.4, -0.2, 1.0, 0.1, 0.4, 0.1, -0.5];
    let ms = ModeSpace::with_pair_table(h.clone(), &w, None).unwrap();
    let big_n = 3.0;
    for n in 1..=4 {
        let q = QuantizationParams::new(big_n, n).unwrap();
        let ours = build_hamiltonian(&ms, q).unwrap();
        let one = ladder_quantize(&SectorOperator::new(m, 1, h.clone()).unwrap(), 1.0, n);
        let w_op = SectorOperator::new(m, 2, ms.w().clone()).unwrap();
        let two = ladder_quantize(&w_op, 1.0, n);
        let oracle = one + two / C64::from(2.0 * big_n);
        assert!(max_abs_diff(ours.matrix(), &oracle) < 1e-12);
    }
}

#[test]
fn marginal_matches_partial_trace() {
    let mut r = rng(14);
    for (m, n) in [(2, 3), (3, 3), (2, 4)] {
        let d = sector_dim(m, n);
        let v = random_matrix(&mut r, d, 1);
        let v = &v / C64::from(v.norm());
        let st = SectorState::new(m, n, CVec::from_column_slice(v.as_slice())).unwrap();
        for p in 1..=n {
            let g = marginal(&st, p).unwrap();
            let oracle = dense_marginal(m, n, v.as_slice(), p);
            assert!(max_abs_diff(g.matrix(), &oracle) < 1e-12);
            assert!((g.trace().re - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn marginal_trace_identity() {
    // tr(A_N(a) Gamma_N) = (p!/N^p) binom(N, p) tr(a Gamma^{(p)})
    let mut r = rng(15);
    let (m, n) = (3, 4);
    let d = sector_dim(m, n);
    let v = random_matrix(&mut r, d, 1);
    let v = &v / C64::from(v.norm());
    let st = SectorState::new(m, n, CVec::from_column_slice(v.as_slice())).unwrap();
    for p in 1..=3 {
        let a = op(&mut r, m, p);
        let q = QuantizationParams::new(n as f64, n).unwrap();
        let lhs = st.expectation(&quantize(&a, q).unwrap()).unwrap();
        let rhs = marginal(&st, p).unwrap().expectation(&a).unwrap() * quantization_prefactor(p, q);
        assert!((lhs - rhs).norm() < 1e-12);
    }
}

#[test]
fn product_expectation_matches_tensor_contraction() {
    let mut r = rng(16);
    for p in 1..=3 {
        let a = op(&mut r, 3, p);
        let psi = random_unit(&mut r, 3);
        let ours = product_expectation(&a, &psi).unwrap();
        assert!((ours - dense_classical(&full_operator(&a), &psi, p, p)).norm() < 1e-12);
    }
}

#[test]
fn quantization_error_large_n() {
    let mut r = rng(17);
    let h = random_hermitian(&mut r, 3);
    let a2 = SectorOperator::new(2, 2, h).unwrap();
    let a2 = a2.scale(C64::from(1.0 / spectral_norm(a2.matrix())));
    let psi = random_unit(&mut r, 2);
    let q = QuantizationParams::new(1000.0, 1000).unwrap();
    let e = quantization_error(&a2, &psi, q).unwrap();
    assert!((e.measured - e.closed_form).abs() < 1e-12);
    assert!(e.measured <= e.bound);
}

#[test]
fn budget_guard() {
    let a = SectorOperator::identity(3, 1);
    let q = QuantizationParams::new(100.0, 100).unwrap();
    assert!(matches!(quantize(&a, q), Err(meanfield_core::Error::Budget { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_formula_holds(seed in 0u64..10_000, m in 1usize..=3, p in 1usize..=2, q in 1usize..=2,
                             n in 1usize..=5, big_n in 1.0f64..8.0) {
        let mut r = rng(seed);
        let a = op(&mut r, m, p);
        let b = op(&mut r, m, q);
        let qp = QuantizationParams::new(big_n, n).unwrap();
        prop_assert!(quantized_product_check(&a, &b, qp).unwrap() < 1e-10);
    }

    #[test]
    fn quantize_respects_adjoint_and_norm(seed in 0u64..10_000, m in 1usize..=3, p in 1usize..=2, n in 1usize..=6) {
        let mut r = rng(seed);
        let a = op(&mut r, m, p);
        let qp = QuantizationParams::new(n as f64 + 0.5, n).unwrap();
        let qa = quantize(&a, qp).unwrap();
        let qad = quantize(&a.adjoint(), qp).unwrap();
        prop_assert!(max_abs_diff(&qa.matrix().adjoint(), qad.matrix()) < 1e-12);
        let bound = (n as f64 / qp.big_n()).powi(p as i32) * spectral_norm(a.matrix());
        prop_assert!(spectral_norm(qa.matrix()) <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn commutator_formula_holds(seed in 0u64..10_000, m in 1usize..=3, p in 1usize..=2, q in 1usize..=2, n in 1usize..=5) {
        let mut r = rng(seed);
        let a = op(&mut r, m, p);
        let b = op(&mut r, m, q);
        let qp = QuantizationParams::new(3.0, n).unwrap();
        let lhs = quantize(&a, qp).unwrap();
        let rhs = quantize(&b, qp).unwrap();
        let comm = lhs.mul(&rhs).unwrap().sub(&rhs.mul(&lhs).unwrap()).unwrap();
        let exp = quantized_commutator_expansion(&a, &b, qp).unwrap();
        prop_assert!(rel_diff(comm.matrix(), exp.matrix()) < 1e-10);
        // the zeroth contracted commutator vanishes
        let c0 = contracted_commutator(&a, &b, 0).unwrap();
        prop_assert!(c0.matrix().iter().all(|z| z.norm() < 1e-12));
    }
}
