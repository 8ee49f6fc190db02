use super::linalg::{cabs, kron, orthonormalize, CMatrix, CVector};
use crate::error::{Error, Result};
use crate::scalar::Real;
use nalgebra::Complex;

/// Orthogonal projection stored as an orthonormal basis of its range.
#[derive(Debug, Clone)]
pub struct Projection<T: Real> {
    basis: CMatrix<T>,
}

impl<T: Real> Projection<T> {
    /// Wraps a basis whose columns must be orthonormal within `1e-10`.
    pub fn from_orthonormal(basis: CMatrix<T>) -> Result<Self> {
        let r = basis.ncols();
        let gram = basis.adjoint() * &basis;
        let defect = (gram - CMatrix::identity(r, r)).iter().fold(T::zero(), |m, &c| m.max(cabs(c)));
        let tol = T::tol(1e-10, 1e3);
        if defect > tol {
            return Err(Error::InvalidProjection(format!(
                "range basis is not orthonormal (Gram defect {defect})"
            )));
        }
        Ok(Self { basis })
    }

    pub(crate) fn from_orthonormal_unchecked(basis: CMatrix<T>) -> Self {
        Self { basis }
    }

    /// Projection onto the span of arbitrary columns (rank-revealing at `tol`).
    pub fn span(vectors: &CMatrix<T>, tol: T) -> Self {
        Self { basis: orthonormalize(vectors, tol) }
    }

    pub fn zero(dim: usize) -> Self {
        Self { basis: CMatrix::zeros(dim, 0) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { basis: CMatrix::identity(dim, dim) }
    }

    /// Rank-one projection onto `v / |v|`.
    pub fn onto_vector(v: &CVector<T>) -> Result<Self> {
        let norm = v.norm();
        if !(norm > T::zero()) {
            return Err(Error::InvalidProjection("zero vector has no direction".into()));
        }
        let col = v / Complex::new(norm, T::zero());
        Ok(Self { basis: CMatrix::from_columns(&[col]) })
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &CMatrix<T> {
        &self.basis
    }

    /// Dense projector `B B^dagger`.
    pub fn matrix(&self) -> CMatrix<T> {
        &self.basis * self.basis.adjoint()
    }

    /// Projection onto the orthogonal complement of the range.
    pub fn complement(&self) -> Self {
        let dim = self.ambient_dim();
        let mut all = CMatrix::zeros(dim, self.rank() + dim);
        all.columns_mut(0, self.rank()).copy_from(&self.basis);
        all.columns_mut(self.rank(), dim).copy_from(&CMatrix::identity(dim, dim));
        let full = orthonormalize(&all, T::tol(1e-10, 1e3));
        let r = self.rank();
        Self { basis: full.columns(r, full.ncols() - r).into_owned() }
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Self {
        Self { basis: kron(&self.basis, &other.basis) }
    }

    /// Applies a unitary: range `U · range(self)`.
    pub fn transform(&self, unitary: &CMatrix<T>) -> Self {
        Self { basis: unitary * &self.basis }
    }

    /// Operator norm of `(1 - self) other`: zero iff `range(other) ⊆ range(self)`.
    pub fn excess_of(&self, other: &Self) -> T {
        let outside = other.basis() - &self.basis * (self.basis.adjoint() * other.basis());
        super::linalg::operator_norm(&outside)
    }

    /// Join (supremum) with another projection.
    pub fn join(&self, other: &Self, tol: T) -> Self {
        let mut all = CMatrix::zeros(self.ambient_dim(), self.rank() + other.rank());
        all.columns_mut(0, self.rank()).copy_from(&self.basis);
        all.columns_mut(self.rank(), other.rank()).copy_from(&other.basis);
        Self::span(&all, tol)
    }
}

/// Projection onto the eigenvectors of a Hermitian matrix with eigenvalue
/// strictly above `tol`.
pub fn positive_part_projection<T: Real>(m: &CMatrix<T>, tol: T) -> Projection<T> {
    let e = super::linalg::hermitian_eigen(m);
    let k = e.values.iter().take_while(|&&x| x > tol).count();
    Projection::from_orthonormal_unchecked(e.vectors.columns(0, k).into_owned())
}
