//! Pinching and abelian subalgebras built from the spectral blocks of a
//! reference tensor power.

mod algebra;
mod spectral_blocks;

pub use algebra::{
    build_d_l_psi, compressed_blocks, hiai_petz_decomposition, identity_defect, refine_maximal_abelian,
    restrict_product_state, restrict_reference, restrict_state, AbelianAlgebra, AlgebraElement, ElementLabel,
    HiaiPetzTerms, IdentityStatus,
};
pub use spectral_blocks::{build_spectral_blocks, pinch, SpectralBlock, SpectralBlockStructure};
