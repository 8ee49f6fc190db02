use crate::blocks::{
    build_d_l_psi, build_spectral_blocks, compressed_blocks, refine_maximal_abelian, restrict_reference, AbelianAlgebra,
    SpectralBlockStructure,
};
use crate::classical::{rel_entropy, Distribution};
use crate::error::{Error, Result};
use crate::quantum::linalg::{cabs, CMatrix};
use crate::quantum::DensityOperator;
use crate::scalar::Real;

/// Unitary on `(C^dim)^{⊗l}` carrying the rank-one refinement of one state
/// onto the anchor's, block by block. Stored as one `rank(b) x rank(b)` map
/// per spectral block, in block coordinates.
#[derive(Debug, Clone)]
pub struct UnitaryIntertwiner<T: Real> {
    pub l: usize,
    pub source: usize,
    pub anchor: usize,
    block_maps: Vec<CMatrix<T>>,
    block_bases: Vec<CMatrix<T>>,
}

impl<T: Real> UnitaryIntertwiner<T> {
    pub fn block_maps(&self) -> &[CMatrix<T>] {
        &self.block_maps
    }

    /// Dense ambient matrix `sum_b E_b W_b E_b^dagger`.
    pub fn matrix(&self) -> CMatrix<T> {
        let n = self.block_bases.first().map_or(0, |e| e.nrows());
        let mut u = CMatrix::zeros(n, n);
        for (e, w) in self.block_bases.iter().zip(&self.block_maps) {
            u += e * w * e.adjoint();
        }
        u
    }

    /// Largest entrywise deviation of the block maps from the identity.
    pub fn distance_to_identity(&self) -> T {
        self.block_maps.iter().fold(T::zero(), |acc, w| {
            let r = w.nrows();
            (w - CMatrix::identity(r, r)).iter().fold(acc, |a, &c| a.max(cabs(c)))
        })
    }

    /// Largest entrywise deviation between the block maps of two intertwiners.
    pub fn distance_to(&self, other: &Self) -> T {
        self.block_maps.iter().zip(&other.block_maps).fold(T::zero(), |acc, (a, b)| {
            (a - b).iter().fold(acc, |m, &c| m.max(cabs(c)))
        })
    }
}

/// The classical picture of a finite state family at block length `l`.
#[derive(Debug, Clone)]
pub struct Classicalization<T: Real> {
    pub l: usize,
    pub blocks: SpectralBlockStructure<T>,
    /// `B_{l,psi}` for every member, in input order; the anchor is index 0.
    pub algebras: Vec<AbelianAlgebra<T>>,
    pub intertwiners: Vec<UnitaryIntertwiner<T>>,
    /// Restrictions of the transported states to the anchor algebra.
    pub omega: Vec<Distribution<T>>,
    /// Restriction of `phi^{⊗l}` to the anchor algebra.
    pub q: Distribution<T>,
    /// `S(psi^{⊗l}|B_{l,psi}, phi^{⊗l}|B_{l,psi})` per member, computed in
    /// each member's own algebra.
    pub restricted_entropies: Vec<T>,
    /// Rank-one frames per member and block (block coordinates).
    pub(crate) frames: Vec<Vec<CMatrix<T>>>,
    /// `E_b^dagger D_psi^{⊗l} E_b` per member and block.
    pub(crate) compressions: Vec<Vec<CMatrix<T>>>,
}

impl<T: Real> Classicalization<T> {
    pub fn anchor(&self) -> &AbelianAlgebra<T> {
        &self.algebras[0]
    }

    /// Anchor letters: spectral block and position inside the block.
    pub fn letter_positions(&self) -> Vec<(usize, usize)> {
        letter_positions(self.anchor())
    }

    pub fn members(&self) -> usize {
        self.omega.len()
    }

    /// `H(omega_l(psi), q)` per member.
    pub fn transported_entropies(&self) -> Result<Vec<T>> {
        self.omega.iter().map(|p| rel_entropy(p, &self.q)).collect()
    }
}

fn letter_positions<T: Real>(anchor: &AbelianAlgebra<T>) -> Vec<(usize, usize)> {
    let mut seen = vec![0usize; anchor.block_count()];
    anchor
        .elements()
        .iter()
        .map(|e| {
            let b = e.label.block;
            seen[b] += 1;
            (b, seen[b] - 1)
        })
        .collect()
}

/// Classicalizes `psi_set` against `phi` at block length `l`, anchored at the
/// first member.
pub fn classicalize<T: Real>(
    psi_set: &[DensityOperator<T>],
    phi: &DensityOperator<T>,
    l: usize,
    grouping_tol: T,
    cap: usize,
) -> Result<Classicalization<T>> {
    if psi_set.is_empty() {
        return Err(Error::EmptySet("state family"));
    }
    let blocks = build_spectral_blocks(phi, l, grouping_tol, cap)?;
    let nb = blocks.len();
    let mut algebras = Vec::with_capacity(psi_set.len());
    let mut frames = Vec::with_capacity(psi_set.len());
    let mut compressions = Vec::with_capacity(psi_set.len());
    for psi in psi_set {
        let b = refine_maximal_abelian(&build_d_l_psi(psi, &blocks, grouping_tol, cap)?);
        frames.push((0..nb).map(|k| b.block_frame(k)).collect::<Vec<_>>());
        compressions.push(compressed_blocks(psi, &blocks)?);
        algebras.push(b);
    }
    let block_bases: Vec<CMatrix<T>> = blocks.blocks().iter().map(|b| b.basis().clone()).collect();
    let mut intertwiners = Vec::with_capacity(psi_set.len());
    for (i, f) in frames.iter().enumerate() {
        let mut maps = Vec::with_capacity(nb);
        for (k, fk) in f.iter().enumerate() {
            let f0 = &frames[0][k];
            assert_eq!(f0.ncols(), fk.ncols(), "refinements must have block-rank many elements");
            maps.push(f0 * fk.adjoint());
        }
        intertwiners.push(UnitaryIntertwiner { l, source: i, anchor: 0, block_maps: maps, block_bases: block_bases.clone() });
    }
    let q = restrict_reference(&algebras[0])?;
    let letters = letter_positions(&algebras[0]);
    let mut omega = Vec::with_capacity(psi_set.len());
    let mut restricted_entropies = Vec::with_capacity(psi_set.len());
    for i in 0..psi_set.len() {
        // Transported letter (b, k) carries <g_{psi,b,k}, D g_{psi,b,k}>.
        let weights: Vec<T> = letters
            .iter()
            .map(|&(b, k)| {
                let g = frames[i][b].column(k);
                let w = g.dotc(&(&compressions[i][b] * g)).re;
                if w < T::tol(1e-14, 16.0) {
                    T::zero()
                } else {
                    w
                }
            })
            .collect();
        let p = Distribution::from_weights(weights)?;
        let own_p = crate::blocks::restrict_product_state(&psi_set[i], &blocks, &algebras[i])?;
        let own_q = restrict_reference(&algebras[i])?;
        restricted_entropies.push(rel_entropy(&own_p, &own_q)?);
        omega.push(p);
    }
    Ok(Classicalization { l, blocks, algebras, intertwiners, omega, q, restricted_entropies, frames, compressions })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qubit(r: [f64; 3]) -> DensityOperator<f64> {
        DensityOperator::from_bloch(r).unwrap()
    }

    #[test]
    fn single_member_has_identity_intertwiner() {
        let psi = qubit([0.4, 0.1, -0.3]);
        let phi = qubit([0.0, 0.2, 0.5]);
        let c = classicalize(&[psi], &phi, 2, 1e-9, 64).unwrap();
        assert!(c.intertwiners[0].distance_to_identity() < 1e-12);
        let h = c.transported_entropies().unwrap();
        assert!((h[0] - c.restricted_entropies[0]).abs() < 1e-12);
    }

    #[test]
    fn intertwiners_are_block_diagonal_unitaries() {
        let set = [qubit([0.4, 0.1, -0.3]), qubit([-0.5, 0.3, 0.2]), qubit([0.0, 0.6, 0.6])];
        let phi = qubit([0.1, 0.0, 0.5]);
        let c = classicalize(&set, &phi, 2, 1e-9, 64).unwrap();
        for u in &c.intertwiners {
            let m = u.matrix();
            assert!((m.adjoint() * &m - CMatrix::<f64>::identity(4, 4)).norm() < 1e-9);
            for b in c.blocks.blocks() {
                let e = b.projection.matrix();
                assert!((&m * &e - &e * &m).norm() < 1e-9);
            }
        }
        let h = c.transported_entropies().unwrap();
        for (a, b) in h.iter().zip(&c.restricted_entropies) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn commuting_family_reproduces_diagonals() {
        let set = [
            DensityOperator::<f64>::diagonal(&[0.8, 0.2]).unwrap(),
            DensityOperator::<f64>::diagonal(&[0.35, 0.65]).unwrap(),
        ];
        let phi = DensityOperator::<f64>::diagonal(&[0.4, 0.6]).unwrap();
        let c = classicalize(&set, &phi, 1, 1e-9, 64).unwrap();
        // phi's eigenvalues are ordered descending, so letter 0 is the 0.6 axis.
        assert!((c.q.probs()[0] - 0.6).abs() < 1e-15);
        assert!((c.omega[0].probs()[0] - 0.2).abs() < 1e-15);
        assert!((c.omega[1].probs()[1] - 0.35).abs() < 1e-15);
    }
}
