//! Finite-alphabet large deviations by the method of types.
//!
//! Everything here is exact up to floating-point rounding: probabilities of
//! typical sets are sums over type classes evaluated in log space, never
//! sums over words.

mod distribution;
mod experiment;
mod schedule;
mod types;
mod typical;

pub use distribution::{
    min_rel_entropy_in_l1_ball, nearest_member, rel_entropy, rel_entropy_distance, Distribution,
};
pub use experiment::{
    classical_rate_point, classical_sanov_experiment, rate_lower_bound, slack, ClassicalReport, RatePoint,
};
pub use schedule::{validate_n_list, EpsSchedule};
pub use types::{
    enumerate_types, log_prob_of_type_class, log_type_class_size, type_count, LogFactorials, TypeVector,
};
pub use typical::{
    build_typical_sets, log2_complement_measure, log2_measure_of_typical_set, measure_of_typical_set,
    TypicalSetSpec,
};

/// Pinsker constant in bits: `H(P1,P2) >= b ||P1 - P2||_1^2`.
pub fn pinsker_constant<T: crate::Real>() -> T {
    T::one() / (T::lit(2.0) * T::ln_2())
}
