use super::spectral_blocks::SpectralBlockStructure;
use crate::classical::{rel_entropy, Distribution};
use crate::error::{Error, Result};
use crate::quantum::linalg::{apply_product, cabs, hermitian_eigen, normalize_phase, CMatrix, CVector};
use crate::quantum::{check_cap, DensityOperator, Projection};
use crate::scalar::{cplx, eta, Real};

/// Provenance of a minimal projection: its spectral block, its eigenvalue
/// group inside the block, and its position inside the group (always 0
/// before refinement).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementLabel {
    pub block: usize,
    pub group: usize,
    pub index: usize,
}

/// One minimal projection, stored in the coordinates of its spectral block.
#[derive(Debug, Clone)]
pub struct AlgebraElement<T: Real> {
    pub label: ElementLabel,
    /// Orthonormal columns in block coordinates (`rank(block) x rank`).
    pub coords: CMatrix<T>,
    /// Eigenvalue of the compressed state on this element.
    pub weight: T,
}

/// Abelian subalgebra spanned by mutually orthogonal projections, each
/// contained in one spectral block.
#[derive(Debug, Clone)]
pub struct AbelianAlgebra<T: Real> {
    ambient_dim: usize,
    block_bases: Vec<CMatrix<T>>,
    block_values: Vec<T>,
    elements: Vec<AlgebraElement<T>>,
}

impl<T: Real> AbelianAlgebra<T> {
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn elements(&self) -> &[AlgebraElement<T>] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn labels(&self) -> Vec<ElementLabel> {
        self.elements.iter().map(|e| e.label).collect()
    }

    /// Whether every minimal projection has rank one.
    pub fn is_maximal(&self) -> bool {
        self.elements.iter().all(|e| e.coords.ncols() == 1)
    }

    pub fn block_count(&self) -> usize {
        self.block_bases.len()
    }

    /// Basis of spectral block `b` in ambient coordinates.
    pub fn block_basis(&self, b: usize) -> &CMatrix<T> {
        &self.block_bases[b]
    }

    /// Eigenvalue of the reference tensor power on block `b`.
    pub fn block_value(&self, b: usize) -> T {
        self.block_values[b]
    }

    /// Indices of the elements inside block `b`, in label order.
    pub fn elements_in_block(&self, b: usize) -> Vec<usize> {
        (0..self.elements.len()).filter(|&i| self.elements[i].label.block == b).collect()
    }

    /// Ambient-coordinate projection of element `i`.
    pub fn projection(&self, i: usize) -> Projection<T> {
        let e = &self.elements[i];
        Projection::from_orthonormal_unchecked(&self.block_bases[e.label.block] * &e.coords)
    }

    pub fn projections(&self) -> Vec<Projection<T>> {
        (0..self.len()).map(|i| self.projection(i)).collect()
    }

    /// Rank-one elements of block `b` as columns in block coordinates.
    /// Only meaningful for maximal algebras.
    pub fn block_frame(&self, b: usize) -> CMatrix<T> {
        let cols: Vec<CVector<T>> = self
            .elements_in_block(b)
            .into_iter()
            .flat_map(|i| {
                let c = &self.elements[i].coords;
                (0..c.ncols()).map(move |j| c.column(j).into_owned())
            })
            .collect();
        let r = self.block_bases[b].ncols();
        if cols.is_empty() {
            return CMatrix::zeros(r, 0);
        }
        CMatrix::from_columns(&cols)
    }
}

/// Compressions `E_b^dagger D_psi^{⊗l} E_b`, one per spectral block, without
/// forming the tensor power.
pub fn compressed_blocks<T: Real>(psi: &DensityOperator<T>, s: &SpectralBlockStructure<T>) -> Result<Vec<CMatrix<T>>> {
    if psi.dim() != s.local_dim() {
        return Err(Error::DimensionMismatch { expected: s.local_dim(), actual: psi.dim() });
    }
    let ops: Vec<&CMatrix<T>> = vec![psi.matrix(); s.l()];
    Ok(s.blocks()
        .iter()
        .map(|b| {
            let e = b.basis();
            let mut de = CMatrix::zeros(e.nrows(), e.ncols());
            for j in 0..e.ncols() {
                de.set_column(j, &apply_product(&ops, &e.column(j).into_owned()));
            }
            e.adjoint() * de
        })
        .collect())
}

/// `D_{l,psi}`: inside each spectral block, the eigenprojections of the
/// compressed `D_psi^{⊗l}`, eigenvalues grouped at `grouping_tol`. Groups
/// with zero weight are kept so the projections resolve the identity.
pub fn build_d_l_psi<T: Real>(
    psi: &DensityOperator<T>,
    s: &SpectralBlockStructure<T>,
    grouping_tol: T,
    cap: usize,
) -> Result<AbelianAlgebra<T>> {
    check_cap(s.local_dim(), s.l(), cap)?;
    let compressed = compressed_blocks(psi, s)?;
    let mut elements = Vec::new();
    for (b, c) in compressed.iter().enumerate() {
        let eig = hermitian_eigen(c);
        let r = eig.values.len();
        let mut start = 0;
        let mut group = 0;
        while start < r {
            let lead = eig.values[start];
            let mut end = start + 1;
            while end < r && lead - eig.values[end] <= grouping_tol {
                end += 1;
            }
            let weight = eig.values[start..end].iter().fold(T::zero(), |a, &x| a + x) / T::from_count(end - start);
            elements.push(AlgebraElement {
                label: ElementLabel { block: b, group, index: 0 },
                coords: eig.vectors.columns(start, end - start).into_owned(),
                weight: weight.max(T::zero()),
            });
            group += 1;
            start = end;
        }
    }
    Ok(AbelianAlgebra {
        ambient_dim: s.ambient_dim(),
        block_bases: s.blocks().iter().map(|b| b.basis().clone()).collect(),
        block_values: s.blocks().iter().map(|b| b.eigenvalue).collect(),
        elements,
    })
}

/// Splits every minimal projection into rank-one projections. The basis of
/// each range is canonical: block coordinate vectors are projected onto the
/// range and orthonormalized greedily, always taking the largest remaining
/// residual (earliest index on ties), then phase-normalized.
pub fn refine_maximal_abelian<T: Real>(alg: &AbelianAlgebra<T>) -> AbelianAlgebra<T> {
    let mut elements = Vec::with_capacity(alg.ambient_dim);
    for e in &alg.elements {
        if e.coords.ncols() == 1 {
            elements.push(e.clone());
            continue;
        }
        for (index, col) in canonical_basis(&e.coords).into_iter().enumerate() {
            elements.push(AlgebraElement {
                label: ElementLabel { index, ..e.label },
                coords: CMatrix::from_columns(&[col]),
                weight: e.weight,
            });
        }
    }
    AbelianAlgebra {
        ambient_dim: alg.ambient_dim,
        block_bases: alg.block_bases.clone(),
        block_values: alg.block_values.clone(),
        elements,
    }
}

fn canonical_basis<T: Real>(range: &CMatrix<T>) -> Vec<CVector<T>> {
    let r = range.nrows();
    let m = range.ncols();
    let tie = T::tol(1e-12, 1e3);
    // Residuals of the projected coordinate vectors P e_j.
    let mut residuals: Vec<CVector<T>> = (0..r).map(|j| range * range.row(j).adjoint()).collect();
    let mut out: Vec<CVector<T>> = Vec::with_capacity(m);
    for _ in 0..m {
        let mut best = 0;
        let mut best_norm = T::neg_infinity();
        for (j, v) in residuals.iter().enumerate() {
            let nv = v.norm();
            if nv > best_norm + tie {
                best = j;
                best_norm = nv;
            }
        }
        let mut u = &residuals[best] / cplx(best_norm);
        normalize_phase(&mut u);
        for v in residuals.iter_mut() {
            let c = u.dotc(v);
            *v -= &u * c;
        }
        out.push(u);
    }
    out
}

/// `probs(i) = tr(D g_i)` for a state on the ambient space.
pub fn restrict_state<T: Real>(d: &DensityOperator<T>, alg: &AbelianAlgebra<T>) -> Result<Distribution<T>> {
    if d.dim() != alg.ambient_dim {
        return Err(Error::DimensionMismatch { expected: alg.ambient_dim, actual: d.dim() });
    }
    let weights = (0..alg.len())
        .map(|i| {
            let p = alg.projection(i);
            let dp = d.matrix() * p.basis();
            (0..p.rank()).fold(T::zero(), |acc, j| acc + p.basis().column(j).dotc(&dp.column(j)).re)
        })
        .collect();
    finish_restriction(weights)
}

/// Restriction of `psi^{⊗l}`, computed blockwise from the compressions.
pub fn restrict_product_state<T: Real>(
    psi: &DensityOperator<T>,
    s: &SpectralBlockStructure<T>,
    alg: &AbelianAlgebra<T>,
) -> Result<Distribution<T>> {
    let compressed = compressed_blocks(psi, s)?;
    let weights = alg
        .elements
        .iter()
        .map(|e| {
            let c = &compressed[e.label.block];
            let ce = c * &e.coords;
            (0..e.coords.ncols()).fold(T::zero(), |acc, j| acc + e.coords.column(j).dotc(&ce.column(j)).re)
        })
        .collect();
    finish_restriction(weights)
}

/// Restriction of `phi^{⊗l}`: element `g` in block `b` gets `mu_b rank(g)`.
pub fn restrict_reference<T: Real>(alg: &AbelianAlgebra<T>) -> Result<Distribution<T>> {
    let weights = alg
        .elements
        .iter()
        .map(|e| alg.block_values[e.label.block] * T::from_count(e.coords.ncols()))
        .collect();
    finish_restriction(weights)
}

fn finish_restriction<T: Real>(weights: Vec<T>) -> Result<Distribution<T>> {
    let cleaned: Vec<T> = weights
        .into_iter()
        .map(|w| if w < T::tol(1e-14, 16.0) { T::zero() } else { w })
        .collect();
    Distribution::from_weights(cleaned)
}

/// Status of the Hiai-Petz identity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdentityStatus {
    Checked,
    /// `supp(psi) ⊄ supp(phi)`: the left side is infinite and the identity is
    /// not evaluated.
    SupportViolation,
}

/// The three terms of `S(psi^l, phi^l) = S(psi^l|D, phi^l|D) + S(psi^l o E_l) - S(psi^l)`.
#[derive(Debug, Clone)]
pub struct HiaiPetzTerms<T> {
    pub l: usize,
    pub lhs: T,
    pub restricted_term: T,
    pub pinch_gain: T,
    pub residual: Option<T>,
    pub status: IdentityStatus,
    /// `d log2(l+1)`.
    pub gain_bound: T,
}

impl<T: Real> HiaiPetzTerms<T> {
    pub fn gain_within_bound(&self) -> bool {
        let tol = T::tol(1e-9, 1e4);
        self.pinch_gain >= -tol && self.pinch_gain <= self.gain_bound + tol
    }
}

/// Evaluates both sides of the Hiai-Petz identity at block length `l`.
/// The left side uses dense tensor powers; the right side is assembled from
/// the block compressions.
pub fn hiai_petz_decomposition<T: Real>(
    psi: &DensityOperator<T>,
    phi: &DensityOperator<T>,
    l: usize,
    grouping_tol: T,
    cap: usize,
) -> Result<HiaiPetzTerms<T>> {
    let s = super::build_spectral_blocks(phi, l, grouping_tol, cap)?;
    let d_alg = build_d_l_psi(psi, &s, grouping_tol, cap)?;
    let psi_l = crate::quantum::tensor_power(psi, l, cap)?;
    let phi_l = crate::quantum::tensor_power(phi, l, cap)?;
    let lhs = crate::quantum::quantum_rel_entropy(&psi_l, &phi_l)?;
    let p = restrict_product_state(psi, &s, &d_alg)?;
    let q = restrict_reference(&d_alg)?;
    let restricted_term = rel_entropy(&p, &q)?;
    let pinched_entropy = d_alg
        .elements
        .iter()
        .fold(T::zero(), |acc, e| acc + T::from_count(e.coords.ncols()) * eta(e.weight));
    let pinch_gain = pinched_entropy - crate::quantum::von_neumann_entropy(&psi_l);
    let gain_bound = T::from_count(psi.dim()) * T::from_count(l + 1).log2();
    let (residual, status) = if lhs.is_finite() {
        (Some((lhs - (restricted_term + pinch_gain)).abs()), IdentityStatus::Checked)
    } else {
        (None, IdentityStatus::SupportViolation)
    };
    Ok(HiaiPetzTerms { l, lhs, restricted_term, pinch_gain, residual, status, gain_bound })
}

/// Resolution-of-identity defect `|| sum_i g_i - 1 ||_F`.
pub fn identity_defect<T: Real>(alg: &AbelianAlgebra<T>) -> T {
    let n = alg.ambient_dim;
    let mut acc = CMatrix::<T>::zeros(n, n);
    for p in alg.projections() {
        acc += p.matrix();
    }
    let diff = acc - CMatrix::identity(n, n);
    diff.iter().fold(T::zero(), |a, &c| a + cabs(c) * cabs(c)).sqrt()
}
