use super::density::DensityOperator;
use super::linalg::hermitian_eigen;
use super::projection::{positive_part_projection, Projection};
use crate::error::{Error, Result};
use crate::scalar::{eta, Real};

/// Eigenvalue cutoff defining supports.
pub const SUPPORT_TOL: f64 = 1e-10;
/// Operator-norm threshold of `(1 - P_phi) P_psi` for support inclusion.
pub const INCLUSION_TOL: f64 = 1e-8;

fn support_tol<T: Real>() -> T {
    T::tol(SUPPORT_TOL, 64.0)
}

/// Projection onto the eigenvectors with eigenvalue above `tol`.
pub fn support_projection<T: Real>(d: &DensityOperator<T>, tol: T) -> Projection<T> {
    positive_part_projection(d.matrix(), tol)
}

/// `supp(psi) <= supp(phi)` in the sense of [`INCLUSION_TOL`].
pub fn support_contained<T: Real>(psi: &DensityOperator<T>, phi: &DensityOperator<T>) -> bool {
    let tol = support_tol::<T>();
    let pp = support_projection(psi, tol);
    let pf = support_projection(phi, tol);
    pf.excess_of(&pp) <= T::tol(INCLUSION_TOL, 1e4)
}

/// `-sum lambda log2 lambda` in bits.
pub fn von_neumann_entropy<T: Real>(d: &DensityOperator<T>) -> T {
    d.eigenvalues().into_iter().fold(T::zero(), |acc, l| acc + eta(l.max(T::zero()))).max(T::zero())
}

/// `S(psi, phi) = tr D_psi (log2 D_psi - log2 D_phi)`, or `+inf` when the
/// support of `psi` is not contained in that of `phi`. The logarithm of
/// `D_phi` is taken on its support only.
pub fn quantum_rel_entropy<T: Real>(psi: &DensityOperator<T>, phi: &DensityOperator<T>) -> Result<T> {
    if psi.dim() != phi.dim() {
        return Err(Error::DimensionMismatch { expected: phi.dim(), actual: psi.dim() });
    }
    if !support_contained(psi, phi) {
        return Ok(T::infinity());
    }
    let tol = support_tol::<T>();
    let ep = hermitian_eigen(psi.matrix());
    let ef = hermitian_eigen(phi.matrix());
    let neg_entropy = ep.values.iter().fold(T::zero(), |acc, &l| acc - eta(l.max(T::zero())));
    // tr D_psi log D_phi = sum_j log mu_j <b_j, D_psi b_j>
    let mut cross = T::zero();
    for (j, &mu) in ef.values.iter().enumerate() {
        if mu <= tol {
            continue;
        }
        let b = ef.vectors.column(j);
        let w = b.dotc(&(psi.matrix() * b)).re.max(T::zero());
        cross += w * mu.log2();
    }
    Ok((neg_entropy - cross).max(T::zero()))
}

/// Minimum of [`quantum_rel_entropy`] over a finite set, with the index of
/// the first minimizer.
pub fn quantum_rel_entropy_distance<T: Real>(set: &[DensityOperator<T>], phi: &DensityOperator<T>) -> Result<(T, usize)> {
    if set.is_empty() {
        return Err(Error::EmptySet("state set"));
    }
    let mut best = (T::infinity(), 0);
    for (i, psi) in set.iter().enumerate() {
        let s = quantum_rel_entropy(psi, phi)?;
        if s < best.0 {
            best = (s, i);
        }
    }
    Ok(best)
}
