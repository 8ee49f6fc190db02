use super::density::DensityOperator;
use super::linalg::{hermitian_eigen, CMatrix};
use super::projection::Projection;
use crate::error::{Error, Result};
use crate::scalar::{cplx, Real};

/// Default absolute tolerance for merging nearly equal eigenvalues.
pub const DEFAULT_GROUPING_TOL: f64 = 1e-9;

/// Spectral decomposition into distinct eigenvalues and eigenprojections.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition<T: Real> {
    eigenvalues: Vec<T>,
    projectors: Vec<Projection<T>>,
    grouping_tol: T,
}

impl<T: Real> SpectralDecomposition<T> {
    /// Distinct eigenvalues, descending.
    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[Projection<T>] {
        &self.projectors
    }

    pub fn grouping_tol(&self) -> T {
        self.grouping_tol
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.projectors.iter().map(Projection::rank).collect()
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `sum_i lambda_i e_i`.
    pub fn reconstruct(&self) -> CMatrix<T> {
        let dim = self.projectors.first().map_or(0, Projection::ambient_dim);
        let mut acc = CMatrix::zeros(dim, dim);
        for (l, p) in self.eigenvalues.iter().zip(&self.projectors) {
            acc += p.matrix() * cplx(*l);
        }
        acc
    }
}

/// Groups the eigenvalues of a Hermitian matrix. An eigenvalue joins the
/// current group when it lies within `grouping_tol` of the group's largest
/// member. Group eigenvalues are the means of their members, and a group
/// whose mean is within `grouping_tol` of zero is snapped to exactly zero.
pub fn hermitian_spectral_decomposition<T: Real>(m: &CMatrix<T>, grouping_tol: T) -> Result<SpectralDecomposition<T>> {
    if !(grouping_tol > T::zero()) {
        return Err(Error::InvalidParameter("grouping tolerance must be positive".into()));
    }
    let e = hermitian_eigen(m);
    let n = e.values.len();
    let mut eigenvalues = Vec::new();
    let mut projectors = Vec::new();
    let mut start = 0;
    while start < n {
        let lead = e.values[start];
        let mut end = start + 1;
        while end < n && lead - e.values[end] <= grouping_tol {
            end += 1;
        }
        let mean = e.values[start..end].iter().fold(T::zero(), |a, &b| a + b) / T::from_count(end - start);
        eigenvalues.push(if mean.abs() <= grouping_tol { T::zero() } else { mean });
        let basis = e.vectors.columns(start, end - start).into_owned();
        projectors.push(Projection::from_orthonormal_unchecked(basis));
        start = end;
    }
    Ok(SpectralDecomposition { eigenvalues, projectors, grouping_tol })
}

pub fn spectral_decomposition<T: Real>(d: &DensityOperator<T>, grouping_tol: T) -> Result<SpectralDecomposition<T>> {
    hermitian_spectral_decomposition(d.matrix(), grouping_tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maximally_mixed_has_one_group() {
        let d = DensityOperator::<f64>::maximally_mixed(2);
        let s = spectral_decomposition(&d, 1e-9).unwrap();
        assert_eq!(s.eigenvalues(), &[0.5]);
        assert_eq!(s.multiplicities(), vec![2]);
    }

    #[test]
    fn diagonal_state_axis_projectors() {
        let d = DensityOperator::<f64>::diagonal(&[0.25, 0.75]).unwrap();
        let s = spectral_decomposition(&d, 1e-9).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s.eigenvalues()[0] - 0.75).abs() < 1e-15);
        let b = s.projectors()[0].basis();
        assert!((b[(1, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((s.reconstruct() - d.matrix()).norm() < 1e-14);
    }

    #[test]
    fn pure_state_zero_snapped() {
        let d = DensityOperator::<f64>::from_bloch([0.6, 0.0, 0.8]).unwrap();
        let s = spectral_decomposition(&d, 1e-9).unwrap();
        assert_eq!(s.eigenvalues()[1], 0.0);
        assert!(hermitian_spectral_decomposition(d.matrix(), 0.0).is_err());
    }
}
