//! Small dense helpers over `DMatrix<Complex<T>>`.

use crate::scalar::{cplx, Real};
use nalgebra::{Complex, DMatrix, DVector};

pub type CMatrix<T> = DMatrix<Complex<T>>;
pub type CVector<T> = DVector<Complex<T>>;

/// Eigenpairs of a Hermitian matrix, eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T: Real> {
    pub values: Vec<T>,
    pub vectors: CMatrix<T>,
}

/// Hermitian eigendecomposition. The input is symmetrized first; eigenvector
/// phases are fixed so the first coordinate of modulus above `1e-8` is real
/// and positive.
pub fn hermitian_eigen<T: Real>(m: &CMatrix<T>) -> HermitianEigen<T> {
    let n = m.nrows();
    if n == 0 {
        return HermitianEigen { values: vec![], vectors: CMatrix::zeros(0, 0) };
    }
    let sym = (m + m.adjoint()) * cplx(T::lit(0.5));
    // Real symmetric input is several times cheaper in real arithmetic.
    let (eigenvalues, eigenvectors) = if sym.iter().all(|c| c.im == T::zero()) {
        let eig = nalgebra::linalg::SymmetricEigen::new(sym.map(|c| c.re));
        (eig.eigenvalues.iter().copied().collect::<Vec<_>>(), eig.eigenvectors.map(cplx))
    } else {
        let eig = nalgebra::linalg::SymmetricEigen::new(sym);
        (eig.eigenvalues.iter().copied().collect::<Vec<_>>(), eig.eigenvectors)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eigenvalues[b]
            .partial_cmp(&eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut vectors = CMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (j, &k) in order.iter().enumerate() {
        values.push(eigenvalues[k]);
        let mut col = eigenvectors.column(k).into_owned();
        normalize_phase(&mut col);
        vectors.set_column(j, &col);
    }
    HermitianEigen { values, vectors }
}

/// Rotates the phase so the first coordinate with modulus above `1e-8` is
/// real positive.
pub fn normalize_phase<T: Real>(v: &mut CVector<T>) {
    let cutoff = T::lit(1e-8);
    if let Some(c) = v.iter().find(|c| cabs(**c) > cutoff).copied() {
        let phase = c.conj() / Complex::new(cabs(c), T::zero());
        *v *= phase;
    }
}

/// Modulus of a complex scalar.
pub fn cabs<T: Real>(c: Complex<T>) -> T {
    c.re.hypot(c.im)
}

pub fn kron<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    a.kronecker(b)
}

/// Largest entrywise modulus of `m - m^dagger`.
pub fn hermiticity_defect<T: Real>(m: &CMatrix<T>) -> T {
    let mut worst = T::zero();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let d = cabs(m[(i, j)] - m[(j, i)].conj());
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

pub fn trace_re<T: Real>(m: &CMatrix<T>) -> T {
    (0..m.nrows()).fold(T::zero(), |acc, i| acc + m[(i, i)].re)
}

/// `Re <v, M v>`.
pub fn quadratic_form<T: Real>(m: &CMatrix<T>, v: &CVector<T>) -> T {
    v.dotc(&(m * v)).re
}

/// Spectral norm of a (possibly rectangular) matrix.
pub fn operator_norm<T: Real>(m: &CMatrix<T>) -> T {
    if m.nrows() == 0 || m.ncols() == 0 {
        return T::zero();
    }
    let gram = m.adjoint() * m;
    let top = hermitian_eigen(&gram).values.first().copied().unwrap_or_else(T::zero);
    top.max(T::zero()).sqrt()
}

/// Orthonormal basis of the span of the columns of `vectors`, by modified
/// Gram-Schmidt with one reorthogonalization pass. Columns whose residual
/// norm falls below `tol` are dropped.
pub fn orthonormalize<T: Real>(vectors: &CMatrix<T>, tol: T) -> CMatrix<T> {
    let dim = vectors.nrows();
    let mut basis: Vec<CVector<T>> = Vec::new();
    for j in 0..vectors.ncols() {
        let mut v = vectors.column(j).into_owned();
        for _ in 0..2 {
            for b in &basis {
                let c = b.dotc(&v);
                v -= b * c;
            }
        }
        let norm = v.norm();
        if norm > tol {
            basis.push(v / cplx(norm));
        }
    }
    if basis.is_empty() {
        return CMatrix::zeros(dim, 0);
    }
    CMatrix::from_columns(&basis)
}

/// Identity as complex matrix.
pub fn identity<T: Real>(n: usize) -> CMatrix<T> {
    CMatrix::identity(n, n)
}

/// Mode-wise application of a local operator to every factor of a tensor
/// with `sites` equal factors of dimension `local`: computes
/// `(A ⊗ A ⊗ ... ⊗ A) v` without forming the Kronecker power.
pub fn apply_product<T: Real>(local_ops: &[&CMatrix<T>], v: &CVector<T>) -> CVector<T> {
    let dims: Vec<usize> = local_ops.iter().map(|a| a.ncols()).collect();
    let total: usize = dims.iter().product();
    assert_eq!(total, v.len(), "vector length must match the product dimension");
    let mut cur = v.clone_owned();
    let mut stride_after = total;
    for (site, op) in local_ops.iter().enumerate() {
        let d = dims[site];
        stride_after /= d;
        let outer = total / (d * stride_after);
        let mut next = CVector::zeros(total);
        for o in 0..outer {
            for i in 0..d {
                for k in 0..d {
                    let a = op[(i, k)];
                    if a == Complex::new(T::zero(), T::zero()) {
                        continue;
                    }
                    let src = (o * d + k) * stride_after;
                    let dst = (o * d + i) * stride_after;
                    for s in 0..stride_after {
                        next[dst + s] += a * cur[src + s];
                    }
                }
            }
        }
        cur = next;
    }
    cur
}
