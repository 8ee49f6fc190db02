use nalgebra::{Complex, DMatrix, DVector};
use proptest::prelude::*;
use sanovlab_core::classical::{rel_entropy, Distribution};
use sanovlab_core::quantum::{
    expectation, linalg::CMatrix, quantum_rel_entropy, spectral_decomposition, tensor_power, von_neumann_entropy,
    DensityOperator, Projection,
};

fn state_from(dim: usize, entries: &[f64], floor: f64) -> DensityOperator<f64> {
    let g = DMatrix::from_fn(dim, dim, |i, j| Complex::new(entries[2 * (i * dim + j)], entries[2 * (i * dim + j) + 1]));
    let mut m = &g * g.adjoint() + DMatrix::identity(dim, dim) * Complex::new(floor, 0.0);
    let tr: f64 = (0..dim).map(|i| m[(i, i)].re).sum();
    m /= Complex::new(tr, 0.0);
    DensityOperator::new(m).unwrap()
}

fn unitary_from(dim: usize, entries: &[f64]) -> CMatrix<f64> {
    let g = DMatrix::from_fn(dim, dim, |i, j| Complex::new(entries[2 * (i * dim + j)], entries[2 * (i * dim + j) + 1]));
    g.qr().q()
}

fn entries(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 2 * dim * dim)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rel_entropy_nonnegative(a in entries(3), b in entries(3)) {
        let psi = state_from(3, &a, 0.01);
        let phi = state_from(3, &b, 0.01);
        let s = quantum_rel_entropy(&psi, &phi).unwrap();
        prop_assert!(s >= 0.0);
        let dist = (psi.matrix() - phi.matrix()).norm();
        if dist > 1e-9 {
            prop_assert!(s > 0.0);
        }
        prop_assert!(quantum_rel_entropy(&psi, &psi).unwrap() < 1e-9);
    }

    #[test]
    fn commutative_reduction(p in prop::collection::vec(0.01f64..1.0, 3), q in prop::collection::vec(0.01f64..1.0, 3)) {
        let ps: f64 = p.iter().sum();
        let qs: f64 = q.iter().sum();
        let p: Vec<f64> = p.iter().map(|x| x / ps).collect();
        let q: Vec<f64> = q.iter().map(|x| x / qs).collect();
        let psi = DensityOperator::diagonal(&p).unwrap();
        let phi = DensityOperator::diagonal(&q).unwrap();
        let classical = rel_entropy(&Distribution::new(p).unwrap(), &Distribution::new(q).unwrap()).unwrap();
        prop_assert!((quantum_rel_entropy(&psi, &phi).unwrap() - classical).abs() < 1e-10);
    }

    #[test]
    fn additivity(a in entries(2), b in entries(2), n in 1usize..=4) {
        let psi = state_from(2, &a, 0.02);
        let phi = state_from(2, &b, 0.02);
        let s1 = quantum_rel_entropy(&psi, &phi).unwrap();
        let sn = quantum_rel_entropy(&tensor_power(&psi, n, 4096).unwrap(), &tensor_power(&phi, n, 4096).unwrap()).unwrap();
        prop_assert!((sn - n as f64 * s1).abs() < 1e-8);
        let en = von_neumann_entropy(&tensor_power(&psi, n, 4096).unwrap());
        prop_assert!((en - n as f64 * von_neumann_entropy(&psi)).abs() < 1e-9);
    }

    #[test]
    fn unitary_invariance(a in entries(3), b in entries(3), u in entries(3)) {
        let psi = state_from(3, &a, 0.01);
        let phi = state_from(3, &b, 0.01);
        let u = unitary_from(3, &u);
        let s = quantum_rel_entropy(&psi, &phi).unwrap();
        let t = quantum_rel_entropy(&psi.conjugate(&u), &phi.conjugate(&u)).unwrap();
        prop_assert!((s - t).abs() < 1e-8);
    }

    #[test]
    fn spectral_reconstruction(a in entries(4)) {
        let d = state_from(4, &a, 0.0);
        let s = spectral_decomposition(&d, 1e-9).unwrap();
        prop_assert!((s.reconstruct() - d.matrix()).norm() <= 1e-9);
        let mut total = DMatrix::zeros(4, 4);
        for p in s.projectors() {
            total += p.matrix();
        }
        prop_assert!((total - DMatrix::<Complex<f64>>::identity(4, 4)).norm() <= 1e-9);
    }

    #[test]
    fn expectation_monotone(a in entries(4), v in prop::collection::vec(-1.0f64..1.0, 24)) {
        let d = state_from(4, &a, 0.0);
        let cols: Vec<DVector<Complex<f64>>> = (0..3)
            .map(|k| DVector::from_fn(4, |i, _| Complex::new(v[8 * k + 2 * i], v[8 * k + 2 * i + 1])))
            .collect();
        let mut prev = 0.0;
        for r in 1..=3 {
            let p = Projection::span(&DMatrix::from_columns(&cols[..r]), 1e-10);
            let e = expectation(&d, &p).unwrap();
            prop_assert!(e + 1e-12 >= prev);
            prev = e;
        }
    }
}

#[test]
fn pure_tensor_pure_is_pure() {
    let psi = DensityOperator::<f64>::from_bloch([0.6, 0.0, 0.8]).unwrap();
    let t = tensor_power(&psi, 3, 4096).unwrap();
    assert!(von_neumann_entropy(&t).abs() < 1e-10);
}

#[test]
fn single_precision_entropy() {
    let d = DensityOperator::<f32>::diagonal(&[0.75, 0.25]).unwrap();
    assert!((von_neumann_entropy(&d) - 0.811_278).abs() < 1e-5);
}
