use super::classicalize::Classicalization;
use crate::blocks::AbelianAlgebra;
use crate::classical::{log2_measure_of_typical_set, Distribution, TypeVector, TypicalSetSpec};
use crate::error::{Error, Result};
use crate::quantum::linalg::{apply_product, kron, orthonormalize, CMatrix, CVector};
use crate::quantum::{check_cap, Projection};
use crate::scalar::{log2_sum_exp2, Real};
use std::collections::BTreeMap;

/// The projection `p_{nl}`: the sum of `g_{a_1} ⊗ ... ⊗ g_{a_n}` over the
/// words `a` of the typical set, `g` the rank-one anchor projections.
#[derive(Debug, Clone)]
pub struct LiftedTypicalProjection<T: Real> {
    pub n: usize,
    spec: TypicalSetSpec<T>,
}

impl<T: Real> LiftedTypicalProjection<T> {
    pub fn spec(&self) -> &TypicalSetSpec<T> {
        &self.spec
    }

    pub fn alphabet_size(&self) -> usize {
        self.spec.alphabet_size()
    }

    pub fn contains_word(&self, word: &[usize]) -> bool {
        self.spec.contains(&TypeVector::of_word(word, self.alphabet_size()))
    }

    /// `log2 tr p_{nl}`.
    pub fn log2_rank(&self) -> T {
        self.spec.log2_word_count()
    }

    /// `log2 P^n(M_n)`, which is the expectation of `p_{nl}` in any state whose
    /// restriction to the anchor algebra is `p`.
    pub fn log2_expectation(&self, p: &Distribution<T>) -> Result<T> {
        log2_measure_of_typical_set(p, &self.spec)
    }

    /// Member words in lexicographic order. Errors when the word count
    /// `alphabet^n` exceeds `cap`.
    pub fn words(&self, cap: usize) -> Result<Vec<Vec<usize>>> {
        let d = self.alphabet_size();
        let total = check_cap(d, self.n, cap)?;
        let mut out = Vec::new();
        let mut word = vec![0usize; self.n];
        for code in 0..total {
            let mut c = code;
            for j in (0..self.n).rev() {
                word[j] = c % d;
                c /= d;
            }
            if self.contains_word(&word) {
                out.push(word.clone());
            }
        }
        Ok(out)
    }

    /// Dense range basis, for small instances.
    pub fn to_dense(&self, anchor: &AbelianAlgebra<T>, cap: usize) -> Result<Projection<T>> {
        let local: Vec<CVector<T>> = anchor
            .projections()
            .iter()
            .map(|p| p.basis().column(0).into_owned())
            .collect();
        let dim = check_cap(anchor.ambient_dim(), self.n, cap)?;
        let words = self.words(cap)?;
        let mut basis = CMatrix::zeros(dim, words.len());
        for (j, w) in words.iter().enumerate() {
            let refs: Vec<&CVector<T>> = w.iter().map(|&a| &local[a]).collect();
            basis.set_column(j, &kron_vectors(&refs));
        }
        Ok(Projection::from_orthonormal_unchecked(basis))
    }
}

/// Lifts a typical set over the anchor alphabet to a projection.
pub fn lift_typical_set<T: Real>(
    spec: TypicalSetSpec<T>,
    anchor: &AbelianAlgebra<T>,
    n: usize,
) -> Result<LiftedTypicalProjection<T>> {
    if spec.alphabet_size() != anchor.len() || !anchor.is_maximal() {
        return Err(Error::DimensionMismatch { expected: anchor.len(), actual: spec.alphabet_size() });
    }
    if spec.n() != n {
        return Err(Error::InvalidParameter(format!("typical set has length {}, expected {n}", spec.n())));
    }
    Ok(LiftedTypicalProjection { n, spec })
}

pub(crate) fn kron_vectors<T: Real>(parts: &[&CVector<T>]) -> CVector<T> {
    let mut acc = CMatrix::from_columns(&[parts[0].clone()]);
    for p in &parts[1..] {
        acc = kron(&acc, &CMatrix::from_columns(&[(*p).clone()]));
    }
    acc.column(0).into_owned()
}

/// Range of the join inside one sector `e_{b_1} ⊗ ... ⊗ e_{b_n}`, in the
/// product of block coordinates.
#[derive(Debug, Clone)]
pub struct SectorRange<T: Real> {
    pub blocks: Vec<usize>,
    pub basis: CMatrix<T>,
    /// Number of typical words in the sector (the rank of `p_{nl}` there).
    pub lifted_rank: usize,
}

/// The join of the transported lifted projections over the intertwiners.
#[derive(Debug, Clone)]
pub struct JoinedProjection<T: Real> {
    pub n: usize,
    pub l: usize,
    /// `log2 tr p̄`.
    pub log2_rank: T,
    /// `log2 phi^{⊗nl}(p̄)`.
    pub log2_reference: T,
    /// `psi^{⊗nl}(p̄)` per member.
    pub state_expectations: Vec<T>,
    /// `None` when every intertwiner is the identity, in which case the join
    /// is `p_{nl}` itself and everything above comes from type sums.
    pub sectors: Option<Vec<SectorRange<T>>>,
}

impl<T: Real> JoinedProjection<T> {
    /// Dense range basis on `(C^dim)^{⊗nl}`.
    pub fn to_dense(
        &self,
        lifted: &LiftedTypicalProjection<T>,
        cl: &Classicalization<T>,
        cap: usize,
    ) -> Result<Projection<T>> {
        let Some(sectors) = &self.sectors else {
            return lifted.to_dense(cl.anchor(), cap);
        };
        let dim = check_cap(cl.blocks.ambient_dim(), self.n, cap)?;
        let mut cols = Vec::new();
        for s in sectors {
            let mut e = cl.blocks.blocks()[s.blocks[0]].basis().clone();
            for &b in &s.blocks[1..] {
                e = kron(&e, cl.blocks.blocks()[b].basis());
            }
            let range = e * &s.basis;
            cols.extend(range.column_iter().map(|c| c.into_owned()));
        }
        if cols.is_empty() {
            return Ok(Projection::zero(dim));
        }
        Ok(Projection::from_orthonormal_unchecked(CMatrix::from_columns(&cols)))
    }

    /// Joins with another projection built on the same sectors.
    pub fn join_with(&self, other: &Self, tol: T) -> Result<Self> {
        let (Some(a), Some(b)) = (&self.sectors, &other.sectors) else {
            return Err(Error::InvalidParameter("sector form required on both sides".into()));
        };
        let mut merged: BTreeMap<Vec<usize>, (Vec<CVector<T>>, usize)> = BTreeMap::new();
        for s in a.iter().chain(b) {
            let entry = merged.entry(s.blocks.clone()).or_insert((Vec::new(), 0));
            entry.0.extend(s.basis.column_iter().map(|c| c.into_owned()));
            entry.1 = entry.1.max(s.lifted_rank);
        }
        let sectors: Vec<SectorRange<T>> = merged
            .into_iter()
            .map(|(blocks, (cols, lifted_rank))| SectorRange {
                basis: orthonormalize(&CMatrix::from_columns(&cols), tol),
                blocks,
                lifted_rank,
            })
            .collect();
        Ok(Self { sectors: Some(sectors), ..self.clone() })
    }

    pub fn sector_ranks(&self) -> Option<Vec<usize>> {
        self.sectors.as_ref().map(|s| s.iter().map(|r| r.basis.ncols()).collect())
    }
}

/// `p̄ = ∨_U U^{*⊗n} p U^{⊗n}` over the intertwiners of `cl`. Every
/// intertwiner preserves the spectral sectors, so the join is assembled
/// sector by sector in block coordinates (rank-revealing Gram-Schmidt at
/// `tol`).
pub fn symmetrize_join<T: Real>(
    lifted: &LiftedTypicalProjection<T>,
    cl: &Classicalization<T>,
    tol: T,
    cap: usize,
) -> Result<JoinedProjection<T>> {
    let n = lifted.n;
    let l = cl.l;
    let trivial_tol = T::tol(1e-12, 1e3);
    if cl.intertwiners.iter().all(|u| u.distance_to_identity() <= trivial_tol) {
        let state_expectations = cl
            .omega
            .iter()
            .map(|p| lifted.log2_expectation(p).map(|x| x.exp2()))
            .collect::<Result<Vec<_>>>()?;
        return Ok(JoinedProjection {
            n,
            l,
            log2_rank: lifted.log2_rank(),
            log2_reference: lifted.log2_expectation(&cl.q)?,
            state_expectations,
            sectors: None,
        });
    }
    check_cap(cl.blocks.local_dim(), n * l, cap)?;
    let letters = cl.letter_positions();
    let words = lifted.words(cap)?;
    let mut grouped: BTreeMap<Vec<usize>, (Vec<CVector<T>>, usize)> = BTreeMap::new();
    for w in &words {
        let key: Vec<usize> = w.iter().map(|&a| letters[a].0).collect();
        let entry = grouped.entry(key).or_insert((Vec::new(), 0));
        entry.1 += 1;
        for frames in &cl.frames {
            let cols: Vec<CVector<T>> = w
                .iter()
                .map(|&a| {
                    let (b, k) = letters[a];
                    frames[b].column(k).into_owned()
                })
                .collect();
            let refs: Vec<&CVector<T>> = cols.iter().collect();
            entry.0.push(kron_vectors(&refs));
        }
    }
    let sectors: Vec<SectorRange<T>> = grouped
        .into_iter()
        .map(|(blocks, (cols, lifted_rank))| SectorRange {
            basis: orthonormalize(&CMatrix::from_columns(&cols), tol),
            blocks,
            lifted_rank,
        })
        .collect();

    let block_logs: Vec<T> = cl.blocks.blocks().iter().map(|b| b.eigenvalue.log2()).collect();
    let log2_reference = log2_sum_exp2(sectors.iter().filter(|s| s.basis.ncols() > 0).map(|s| {
        T::from_count(s.basis.ncols()).log2() + s.blocks.iter().fold(T::zero(), |acc, &b| acc + block_logs[b])
    }));
    let log2_rank = log2_sum_exp2(
        sectors
            .iter()
            .filter(|s| s.basis.ncols() > 0)
            .map(|s| T::from_count(s.basis.ncols()).log2()),
    );
    let state_expectations = cl
        .compressions
        .iter()
        .map(|comp| {
            let mut acc = T::zero();
            for s in &sectors {
                let ops: Vec<&CMatrix<T>> = s.blocks.iter().map(|&b| &comp[b]).collect();
                for q in s.basis.column_iter() {
                    let q = q.into_owned();
                    acc += q.dotc(&apply_product(&ops, &q)).re;
                }
            }
            crate::quantum::clamp_unit(acc)
        })
        .collect();
    Ok(JoinedProjection { n, l, log2_rank, log2_reference, state_expectations, sectors: Some(sectors) })
}

/// `p ⊗ 1` on `r` further sites of dimension `local_dim`.
pub fn pad_projection<T: Real>(p: &Projection<T>, local_dim: usize, r: usize, cap: usize) -> Result<Projection<T>> {
    let extra = check_cap(local_dim, r, usize::MAX)?;
    let total = p.ambient_dim().saturating_mul(extra);
    if total > cap {
        return Err(Error::CapExceeded { required: total, cap });
    }
    Ok(p.tensor(&Projection::identity(extra)))
}
