//! Separating projections for a finite family of product states: the
//! classical reduction through abelian subalgebras, lifted typical
//! projections and their symmetrized join, and a Neyman-Pearson bracket for
//! the optimal single-state exponent.

mod classicalize;
mod lifted;
mod neyman_pearson;
mod theorem2;

pub use classicalize::{classicalize, Classicalization, UnitaryIntertwiner};
pub use lifted::{
    lift_typical_set, pad_projection, symmetrize_join, JoinedProjection, LiftedTypicalProjection, SectorRange,
};
pub use neyman_pearson::{neyman_pearson_bracket, NPBracket, NPMethod};
pub use theorem2::{eta_l, theorem2_experiment, Theorem2Options, Theorem2Point, Theorem2Report};
