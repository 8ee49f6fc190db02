use super::linalg::{cabs, hermitian_eigen, hermiticity_defect, kron, trace_re, CMatrix, CVector};
use super::projection::Projection;
use crate::error::{Error, Result};
use crate::scalar::{cplx, Real};
use nalgebra::Complex;

/// Default ceiling on the Hilbert-space dimension of tensor powers.
pub const DEFAULT_DIM_CAP: usize = 4096;

/// A density operator: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone)]
pub struct DensityOperator<T: Real> {
    matrix: CMatrix<T>,
}

impl<T: Real> DensityOperator<T> {
    /// Validates Hermiticity, positivity and trace, each to `1e-10`
    /// (relaxed to the resolution of `T`). The stored matrix is symmetrized.
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        let n = matrix.nrows();
        if n == 0 || matrix.ncols() != n {
            return Err(Error::InvalidDensity(format!(
                "matrix must be square and nonempty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidDensity("matrix has non-finite entries".into()));
        }
        let tol = T::tol(1e-10, 64.0 * n as f64);
        let defect = hermiticity_defect(&matrix);
        if defect > tol {
            return Err(Error::InvalidDensity(format!("not Hermitian (defect {defect:e})")));
        }
        let tr = trace_re(&matrix);
        if (tr - T::one()).abs() > tol {
            return Err(Error::InvalidDensity(format!("trace is {tr}, expected 1")));
        }
        let sym = (&matrix + matrix.adjoint()) * cplx(T::lit(0.5));
        let lowest = hermitian_eigen(&sym).values.last().copied().unwrap_or_else(T::zero);
        if lowest < -tol {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {lowest:e}")));
        }
        Ok(Self { matrix: sym })
    }

    /// Builds from row-major real and imaginary parts.
    pub fn from_parts(dim: usize, re: &[T], im: &[T]) -> Result<Self> {
        if re.len() != dim * dim || im.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, actual: re.len().max(im.len()) });
        }
        let m = CMatrix::from_fn(dim, dim, |i, j| Complex::new(re[i * dim + j], im[i * dim + j]));
        Self::new(m)
    }

    /// Qubit state `(1 + x X + y Y + z Z) / 2` with `|(x,y,z)| <= 1`.
    pub fn from_bloch(r: [T; 3]) -> Result<Self> {
        let [x, y, z] = r;
        let norm = (x * x + y * y + z * z).sqrt();
        if !(norm <= T::one() + T::tol(1e-12, 16.0)) {
            return Err(Error::InvalidDensity(format!("Bloch vector has length {norm} > 1")));
        }
        let h = T::lit(0.5);
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex::new(h * (T::one() + z), T::zero()),
                Complex::new(h * x, -h * y),
                Complex::new(h * x, h * y),
                Complex::new(h * (T::one() - z), T::zero()),
            ],
        );
        Self::new(m)
    }

    /// Pure state `|v><v| / <v,v>`.
    pub fn pure(v: &CVector<T>) -> Result<Self> {
        let norm = v.norm();
        if !(norm > T::zero()) {
            return Err(Error::InvalidDensity("zero vector".into()));
        }
        let u = v / cplx(norm);
        Ok(Self { matrix: &u * u.adjoint() })
    }

    /// Diagonal state with the given probabilities.
    pub fn diagonal(probs: &[T]) -> Result<Self> {
        let m = CMatrix::from_diagonal(&CVector::from_iterator(probs.len(), probs.iter().map(|&p| cplx(p))));
        Self::new(m)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let w = cplx(T::one() / T::from_count(dim));
        Self { matrix: CMatrix::identity(dim, dim) * w }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<T> {
        hermitian_eigen(&self.matrix).values
    }

    /// `U D U^dagger`.
    pub fn conjugate(&self, unitary: &CMatrix<T>) -> Self {
        Self { matrix: unitary * &self.matrix * unitary.adjoint() }
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Self {
        Self { matrix: kron(&self.matrix, &other.matrix) }
    }

    /// Whether the matrix is diagonal up to `tol` entrywise.
    pub fn is_diagonal(&self, tol: T) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || cabs(self.matrix[(i, j)]) <= tol))
    }

    /// Diagonal entries as real numbers.
    pub fn diagonal_entries(&self) -> Vec<T> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }
}

/// `d^{⊗n}`; errors when `dim^n` exceeds `cap`.
pub fn tensor_power<T: Real>(d: &DensityOperator<T>, n: usize, cap: usize) -> Result<DensityOperator<T>> {
    check_cap(d.dim(), n, cap)?;
    if n == 0 {
        return Ok(DensityOperator { matrix: CMatrix::identity(1, 1) });
    }
    let mut acc = d.matrix.clone();
    for _ in 1..n {
        acc = kron(&acc, &d.matrix);
    }
    Ok(DensityOperator { matrix: acc })
}

/// `dim^n`, or `CapExceeded` if it overflows or exceeds `cap`.
pub fn check_cap(dim: usize, n: usize, cap: usize) -> Result<usize> {
    let required = u32::try_from(n)
        .ok()
        .and_then(|n| dim.checked_pow(n))
        .unwrap_or(usize::MAX);
    if required > cap {
        return Err(Error::CapExceeded { required, cap });
    }
    Ok(required)
}

/// `tr(D p)` as the sum of `<b, D b>` over the range basis, clamped to `[0, 1]`.
pub fn expectation<T: Real>(d: &DensityOperator<T>, p: &Projection<T>) -> Result<T> {
    if p.ambient_dim() != d.dim() {
        return Err(Error::DimensionMismatch { expected: d.dim(), actual: p.ambient_dim() });
    }
    Ok(clamp_unit(raw_expectation(&d.matrix, p.basis())))
}

fn raw_expectation<T: Real>(m: &CMatrix<T>, basis: &CMatrix<T>) -> T {
    if basis.ncols() == 0 {
        return T::zero();
    }
    let mb = m * basis;
    let mut acc = T::zero();
    for j in 0..basis.ncols() {
        acc += basis.column(j).dotc(&mb.column(j)).re;
    }
    acc
}

pub(crate) fn clamp_unit<T: Real>(x: T) -> T {
    x.max(T::zero()).min(T::one())
}
