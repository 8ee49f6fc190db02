use nalgebra::{Complex, DMatrix};
use proptest::prelude::*;
use sanovlab_core::blocks::*;
use sanovlab_core::quantum::linalg::{hermiticity_defect, CMatrix};
use sanovlab_core::quantum::{tensor_power, von_neumann_entropy, DensityOperator};
use sanovlab_core::separation::eta_l;

fn bloch() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-0.57f64..0.57)
}

fn random_matrix(dim: usize, entries: &[f64]) -> CMatrix<f64> {
    DMatrix::from_fn(dim, dim, |i, j| Complex::new(entries[2 * (i * dim + j)], entries[2 * (i * dim + j) + 1]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pinching_is_a_conditional_expectation(r in bloch(), entries in prop::collection::vec(-1.0f64..1.0, 128)) {
        let phi = DensityOperator::from_bloch(r).unwrap();
        let s = build_spectral_blocks(&phi, 3, 1e-9, 4096).unwrap();
        let a = random_matrix(8, &entries);
        let once = pinch(&a, &s).unwrap();
        let twice = pinch(&once, &s).unwrap();
        prop_assert!((&once - &twice).norm() < 1e-10);
        prop_assert!((once.trace() - a.trace()).norm() < 1e-10);
        let phi3 = tensor_power(&phi, 3, 4096).unwrap();
        let m = phi3.matrix();
        prop_assert!((&once * m - m * &once).norm() < 1e-10);
        let h = &a + a.adjoint();
        prop_assert!(hermiticity_defect(&pinch(&h, &s).unwrap()) < 1e-12);
    }

    #[test]
    fn refined_algebra_resolves_identity(r1 in bloch(), r2 in bloch(), l in 1usize..4) {
        let psi = DensityOperator::from_bloch(r1).unwrap();
        let phi = DensityOperator::from_bloch(r2).unwrap();
        let s = build_spectral_blocks(&phi, l, 1e-9, 4096).unwrap();
        let d = build_d_l_psi(&psi, &s, 1e-9, 4096).unwrap();
        prop_assert!(identity_defect(&d) < 1e-9);
        let b = refine_maximal_abelian(&d);
        prop_assert!(b.is_maximal());
        prop_assert_eq!(b.len(), 1 << l);
        prop_assert!(identity_defect(&b) < 1e-9);
        let p = restrict_product_state(&psi, &s, &b).unwrap();
        let dense = restrict_state(&tensor_power(&psi, l, 4096).unwrap(), &b).unwrap();
        prop_assert!(p.l1_distance(&dense).unwrap() < 1e-10);
    }

    #[test]
    fn pinch_gain_is_bounded(r1 in bloch(), r2 in bloch(), l in 1usize..4) {
        let psi = DensityOperator::from_bloch(r1).unwrap();
        let phi = DensityOperator::from_bloch(r2).unwrap();
        let t = hiai_petz_decomposition(&psi, &phi, l, 1e-9, 4096).unwrap();
        prop_assert!(t.gain_within_bound());
        prop_assert!(t.residual.unwrap() < 1e-8);
    }
}

#[test]
fn degenerate_reference_has_one_block() {
    let phi = DensityOperator::<f64>::maximally_mixed(2);
    let s = build_spectral_blocks(&phi, 3, 1e-9, 4096).unwrap();
    assert_eq!(s.len(), 1);
    assert_eq!(s.ranks(), vec![8]);
}

#[test]
fn block_ranks_are_multinomial() {
    let phi = DensityOperator::<f64>::diagonal(&[0.5, 0.3, 0.2]).unwrap();
    let s = build_spectral_blocks(&phi, 3, 1e-9, 4096).unwrap();
    assert_eq!(s.len(), 10);
    let mut ranks = s.ranks();
    ranks.sort();
    assert_eq!(ranks, vec![1, 1, 1, 3, 3, 3, 3, 3, 3, 6]);
    let phi3 = tensor_power(&phi, 3, 4096).unwrap();
    assert!((s.reconstruct() - phi3.matrix()).norm() < 1e-12);
}

#[test]
fn restricted_rate_approaches_entropy() {
    // S(psi^l|B, phi^l|B)/l rises toward S(psi, phi) within eta_l.
    let psi = DensityOperator::from_bloch([0.5, 0.2, -0.3]).unwrap();
    let phi = DensityOperator::from_bloch([0.0, 0.1, 0.6]).unwrap();
    let s = sanovlab_core::quantum::quantum_rel_entropy(&psi, &phi).unwrap();
    let mut gaps = Vec::new();
    for l in 1..=4 {
        let t = hiai_petz_decomposition(&psi, &phi, l, 1e-9, 4096).unwrap();
        let rate = t.restricted_term / l as f64;
        assert!(rate <= s + 1e-9);
        assert!(s - rate <= eta_l::<f64>(2, l) + 1e-9);
        gaps.push(s - rate);
    }
    assert!(gaps[3] < gaps[0]);
    let psi4 = tensor_power(&psi, 4, 4096).unwrap();
    assert!((von_neumann_entropy(&psi4) - 4.0 * von_neumann_entropy(&psi)).abs() < 1e-9);
}
