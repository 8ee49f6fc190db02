//! Finite-dimensional density operators: spectra, supports, entropies,
//! tensor powers and expectations of projections. Entropies are in bits.

mod density;
mod entropy;
pub mod linalg;
mod projection;
mod spectral;

pub use density::{check_cap, expectation, tensor_power, DensityOperator, DEFAULT_DIM_CAP};
pub(crate) use density::clamp_unit;
pub use entropy::{
    quantum_rel_entropy, quantum_rel_entropy_distance, support_contained, support_projection, von_neumann_entropy,
    INCLUSION_TOL, SUPPORT_TOL,
};
pub use projection::{positive_part_projection, Projection};
pub use spectral::{hermitian_spectral_decomposition, spectral_decomposition, SpectralDecomposition, DEFAULT_GROUPING_TOL};
