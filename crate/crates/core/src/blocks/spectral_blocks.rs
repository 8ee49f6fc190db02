use crate::classical::{enumerate_types, TypeVector};
use crate::error::{Error, Result};
use crate::quantum::linalg::{kron, CMatrix};
use crate::quantum::{check_cap, spectral_decomposition, DensityOperator, Projection, SpectralDecomposition};
use crate::scalar::{cplx, Real};

/// One spectral subspace of `D_phi^{⊗l}`: the span of all products of local
/// eigenprojections whose eigenvalue indices have the given type.
#[derive(Debug, Clone)]
pub struct SpectralBlock<T: Real> {
    pub signature: TypeVector,
    /// `prod_i lambda_i^{l_i}`.
    pub eigenvalue: T,
    pub projection: Projection<T>,
}

impl<T: Real> SpectralBlock<T> {
    pub fn rank(&self) -> usize {
        self.projection.rank()
    }

    /// Orthonormal basis of the block, product vectors in lexicographic
    /// order of their eigenvalue-index words.
    pub fn basis(&self) -> &CMatrix<T> {
        self.projection.basis()
    }
}

/// Spectral blocks of `D_phi^{⊗l}`, ordered like [`enumerate_types`].
#[derive(Debug, Clone)]
pub struct SpectralBlockStructure<T: Real> {
    l: usize,
    local_dim: usize,
    local: SpectralDecomposition<T>,
    blocks: Vec<SpectralBlock<T>>,
}

impl<T: Real> SpectralBlockStructure<T> {
    pub fn l(&self) -> usize {
        self.l
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn ambient_dim(&self) -> usize {
        self.local_dim.pow(self.l as u32)
    }

    pub fn local_spectrum(&self) -> &SpectralDecomposition<T> {
        &self.local
    }

    pub fn blocks(&self) -> &[SpectralBlock<T>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.blocks.iter().map(SpectralBlock::rank).collect()
    }

    /// `sum_b mu_b e_b`.
    pub fn reconstruct(&self) -> CMatrix<T> {
        let n = self.ambient_dim();
        let mut acc = CMatrix::zeros(n, n);
        for b in &self.blocks {
            acc += b.projection.matrix() * cplx(b.eigenvalue);
        }
        acc
    }
}

/// Decomposes `D_phi^{⊗l}` into spectral blocks indexed by types over the
/// distinct eigenvalues of `phi` (grouped at `grouping_tol`).
pub fn build_spectral_blocks<T: Real>(
    phi: &DensityOperator<T>,
    l: usize,
    grouping_tol: T,
    cap: usize,
) -> Result<SpectralBlockStructure<T>> {
    if l == 0 {
        return Err(Error::InvalidParameter("block length must be positive".into()));
    }
    let dim = check_cap(phi.dim(), l, cap)?;
    let local = spectral_decomposition(phi, grouping_tol)?;
    let k = local.len();
    let mut blocks = Vec::new();
    for signature in enumerate_types(l, k) {
        let eigenvalue = signature
            .counts()
            .iter()
            .zip(local.eigenvalues())
            .fold(T::one(), |acc, (&c, &lam)| acc * lam.powi(c as i32));
        let mut columns: Vec<CMatrix<T>> = Vec::new();
        for word in words_of_type(&signature) {
            let mut prod = local.projectors()[word[0]].basis().clone();
            for &i in &word[1..] {
                prod = kron(&prod, local.projectors()[i].basis());
            }
            columns.push(prod);
        }
        let rank: usize = columns.iter().map(|c| c.ncols()).sum();
        let mut basis = CMatrix::zeros(dim, rank);
        let mut at = 0;
        for c in columns {
            basis.columns_mut(at, c.ncols()).copy_from(&c);
            at += c.ncols();
        }
        blocks.push(SpectralBlock { signature, eigenvalue, projection: Projection::from_orthonormal_unchecked(basis) });
    }
    Ok(SpectralBlockStructure { l, local_dim: phi.dim(), local, blocks })
}

/// All words over `0..k` with the given type, in lexicographic order.
fn words_of_type(t: &TypeVector) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut remaining = t.counts().to_vec();
    let mut word = Vec::with_capacity(t.n());
    fill_words(&mut remaining, &mut word, t.n(), &mut out);
    out
}

fn fill_words(remaining: &mut [usize], word: &mut Vec<usize>, len: usize, out: &mut Vec<Vec<usize>>) {
    if word.len() == len {
        out.push(word.clone());
        return;
    }
    for i in 0..remaining.len() {
        if remaining[i] > 0 {
            remaining[i] -= 1;
            word.push(i);
            fill_words(remaining, word, len, out);
            word.pop();
            remaining[i] += 1;
        }
    }
}

/// Conditional expectation `E_l(a) = sum_b e_b a e_b`.
pub fn pinch<T: Real>(a: &CMatrix<T>, s: &SpectralBlockStructure<T>) -> Result<CMatrix<T>> {
    let n = s.ambient_dim();
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: a.nrows() });
    }
    let mut out = CMatrix::zeros(n, n);
    for b in s.blocks() {
        let e = b.basis();
        out += e * (e.adjoint() * a * e) * e.adjoint();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::DEFAULT_DIM_CAP;

    #[test]
    fn qubit_blocks_for_pairs() {
        let phi = DensityOperator::<f64>::diagonal(&[0.7, 0.3]).unwrap();
        let s = build_spectral_blocks(&phi, 2, 1e-9, DEFAULT_DIM_CAP).unwrap();
        assert_eq!(s.ranks(), vec![1, 2, 1]);
        let direct = crate::quantum::tensor_power(&phi, 2, 16).unwrap();
        assert!((s.reconstruct() - direct.matrix()).norm() < 1e-14);
        assert!((s.blocks()[1].eigenvalue - 0.21).abs() < 1e-15);
    }

    #[test]
    fn maximally_mixed_single_block() {
        let phi = DensityOperator::<f64>::maximally_mixed(3);
        let s = build_spectral_blocks(&phi, 3, 1e-9, DEFAULT_DIM_CAP).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.ranks(), vec![27]);
    }

    #[test]
    fn block_count_and_cap() {
        let phi = DensityOperator::<f64>::diagonal(&[0.5, 0.3, 0.2]).unwrap();
        let s = build_spectral_blocks(&phi, 3, 1e-9, DEFAULT_DIM_CAP).unwrap();
        assert_eq!(s.len(), 10);
        assert!(s.len() <= 4usize.pow(3));
        assert_eq!(s.ranks().iter().sum::<usize>(), 27);
        assert!(matches!(build_spectral_blocks(&phi, 8, 1e-9, DEFAULT_DIM_CAP), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn pinching_is_idempotent() {
        let phi = DensityOperator::<f64>::diagonal(&[0.6, 0.4]).unwrap();
        let s = build_spectral_blocks(&phi, 2, 1e-9, 16).unwrap();
        let a = CMatrix::from_fn(4, 4, |i, j| nalgebra::Complex::new((i * 4 + j) as f64, (i as f64) - (j as f64)));
        let once = pinch(&a, &s).unwrap();
        let twice = pinch(&once, &s).unwrap();
        assert!((once.clone() - twice).norm() < 1e-12);
        let tr = |m: &CMatrix<f64>| (0..4).map(|i| m[(i, i)].re).sum::<f64>();
        assert!((tr(&a) - tr(&once)).abs() < 1e-12);
    }
}
