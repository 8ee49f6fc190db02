use super::classicalize::{classicalize, Classicalization};
use super::lifted::{lift_typical_set, symmetrize_join};
use crate::classical::{classical_rate_point, Distribution, rel_entropy_distance, slack, validate_n_list, EpsSchedule};
use crate::error::Result;
use crate::quantum::{quantum_rel_entropy_distance, DensityOperator};
use crate::scalar::Real;
use rayon::prelude::*;

/// Numerical settings of the separating-projection experiment.
#[derive(Debug, Clone, Copy)]
pub struct Theorem2Options<T> {
    pub grouping_tol: T,
    pub join_tol: T,
    pub cap: usize,
}

impl<T: Real> Default for Theorem2Options<T> {
    fn default() -> Self {
        Self {
            grouping_tol: T::lit(crate::quantum::DEFAULT_GROUPING_TOL),
            join_tol: T::tol(1e-10, 1e3),
            cap: crate::quantum::DEFAULT_DIM_CAP,
        }
    }
}

/// One block count `n` of the experiment (length `nl`).
#[derive(Debug, Clone)]
pub struct Theorem2Point<T> {
    pub n: usize,
    pub eps: T,
    /// `psi^{⊗nl}(p̄)` per member.
    pub joined_expectations: Vec<T>,
    /// `psi^{⊗nl}(U_psi^{*⊗n} p U_psi^{⊗n}) = P_psi^n(M_n)` per member.
    pub transported_expectations: Vec<T>,
    /// `phi^{⊗nl}(U_psi^{*⊗n} p U_psi^{⊗n})` per member, from the reference
    /// restricted to each member's own algebra.
    pub transported_reference: Vec<T>,
    pub log2_reference_joined: T,
    pub log2_reference_lifted: T,
    pub log2_rank_joined: T,
    pub log2_rank_lifted: T,
    /// `I_n(l)`.
    pub i_n: T,
    pub delta_n: T,
    /// `(1/nl) log2 phi^{⊗nl}(p̄)`.
    pub exponent: T,
    /// `(1/nl) log2((n+1)^{d^{2l}} phi^{⊗nl}(p_{nl}))`.
    pub symmetrized_bound: T,
    /// `(d^{2l}+d^l) log2(n+1)/(nl) - S + eta_l + Delta_n/l`.
    pub final_bound: T,
    pub chain_holds: bool,
    pub psi_estimate_holds: bool,
    pub invariance_holds: bool,
    pub trace_bound_holds: bool,
    pub classical_bound_holds: bool,
}

impl<T: Real> Theorem2Point<T> {
    pub fn all_hold(&self) -> bool {
        self.chain_holds
            && self.psi_estimate_holds
            && self.invariance_holds
            && self.trace_bound_holds
            && self.classical_bound_holds
    }
}

#[derive(Debug, Clone)]
pub struct Theorem2Report<T: Real> {
    pub l: usize,
    pub dim: usize,
    /// `S(Psi, phi)`.
    pub s_psi: T,
    /// `S_l`: the smallest restricted relative entropy over the members.
    pub s_l: T,
    /// `H(Omega_l, Q)`.
    pub h_omega_l: T,
    pub eta_l: T,
    pub delta: T,
    /// `H(Omega_l, Q) >= S_l >= l (S(Psi,phi) - eta_l)`.
    pub lower_bound_h_holds: bool,
    pub classicalization: Classicalization<T>,
    pub points: Vec<Theorem2Point<T>>,
}

impl<T: Real> Theorem2Report<T> {
    pub fn all_hold(&self) -> bool {
        self.lower_bound_h_holds && self.points.iter().all(Theorem2Point::all_hold)
    }

    /// Whether `eta_l < delta`, i.e. `l` is long enough for the target.
    pub fn eta_below_delta(&self) -> bool {
        self.eta_l < self.delta
    }
}

fn tolerance<T: Real>() -> T {
    T::tol(1e-9, 1e4)
}

/// `d log2(l+1) / l`.
pub fn eta_l<T: Real>(d: usize, l: usize) -> T {
    T::from_count(d) * T::from_count(l + 1).log2() / T::from_count(l)
}

/// Runs the separating-projection construction for every `n` in `n_list`.
pub fn theorem2_experiment<T: Real>(
    psi_set: &[DensityOperator<T>],
    phi: &DensityOperator<T>,
    l: usize,
    n_list: &[usize],
    schedule: &EpsSchedule<T>,
    delta: T,
    options: &Theorem2Options<T>,
) -> Result<Theorem2Report<T>> {
    validate_n_list(n_list)?;
    let cl = classicalize(psi_set, phi, l, options.grouping_tol, options.cap)?;
    let dim = phi.dim();
    let (s_psi, _) = quantum_rel_entropy_distance(psi_set, phi)?;
    let s_l = cl.restricted_entropies.iter().copied().fold(T::infinity(), |a, b| a.min(b));
    let h_omega_l = rel_entropy_distance(&cl.omega, &cl.q)?;
    let eta = eta_l::<T>(dim, l);
    let tol = tolerance::<T>();
    let lf = T::from_count(l);
    let lower_bound_h_holds = if s_psi.is_finite() {
        h_omega_l + tol >= s_l && s_l + tol >= lf * (s_psi - eta)
    } else {
        h_omega_l.is_pos_infinite() && s_l.is_pos_infinite()
    };
    let d_l = dim.pow(l as u32);
    // phi^{⊗l} evaluated on every member's rank-one elements, in anchor
    // letter order; equal to q exactly when phi is blockwise scalar.
    let phi_blocks = crate::blocks::compressed_blocks(phi, &cl.blocks)?;
    let letters = cl.letter_positions();
    let transported_reference_letters = cl
        .frames
        .iter()
        .map(|frames| {
            let w = letters
                .iter()
                .map(|&(b, k)| {
                    let g = frames[b].column(k);
                    g.dotc(&(&phi_blocks[b] * g)).re.max(T::zero())
                })
                .collect();
            Distribution::from_weights(w)
        })
        .collect::<Result<Vec<_>>>()?;
    let d_2l = T::from_count(d_l) * T::from_count(d_l);

    let points = n_list
        .par_iter()
        .map(|&n| -> Result<Theorem2Point<T>> {
            let eps = schedule.eps(n);
            let (spec, rate) = classical_rate_point(&cl.omega, &cl.q, n, eps, h_omega_l)?;
            let lifted = lift_typical_set(spec, cl.anchor(), n)?;
            let joined = symmetrize_join(&lifted, &cl, options.join_tol, options.cap)?;
            let nl = T::from_count(n * l);
            let log_n1 = T::from_count(n + 1).log2();

            let transported_reference = transported_reference_letters
                .iter()
                .map(|p| lifted.log2_expectation(p).map(|x| x.exp2()))
                .collect::<Result<Vec<_>>>()?;
            let q_measure = rate.log2_q_measure.exp2();
            let invariance_holds = transported_reference.iter().all(|&x| (x - q_measure).abs() <= tol);

            let exponent = joined.log2_reference / nl;
            let symmetrized_bound = (d_2l * log_n1 + rate.log2_q_measure) / nl;
            let delta_n = slack(d_l, eps, &cl.q);
            let final_bound = if s_psi.is_finite() {
                (d_2l + T::from_count(d_l)) * log_n1 / nl - s_psi + eta + delta_n / lf
            } else {
                T::neg_infinity()
            };
            let le = |a: T, b: T| a <= b + tol || (a.is_neg_infinite() && b.is_neg_infinite());
            let chain_holds = le(exponent, symmetrized_bound) && le(symmetrized_bound, final_bound);
            let psi_estimate_holds = joined
                .state_expectations
                .iter()
                .zip(&rate.p_measures)
                .all(|(&j, &t)| j + tol >= t);
            let trace_bound_holds = joined.log2_rank <= d_2l * log_n1 + lifted.log2_rank() + tol;
            Ok(Theorem2Point {
                n,
                eps,
                joined_expectations: joined.state_expectations.clone(),
                transported_expectations: rate.p_measures.clone(),
                transported_reference,
                log2_reference_joined: joined.log2_reference,
                log2_reference_lifted: rate.log2_q_measure,
                log2_rank_joined: joined.log2_rank,
                log2_rank_lifted: lifted.log2_rank(),
                i_n: rate.i_n,
                delta_n,
                exponent,
                symmetrized_bound,
                final_bound,
                chain_holds,
                psi_estimate_holds,
                invariance_holds,
                trace_bound_holds,
                classical_bound_holds: rate.q_bound_holds,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(Theorem2Report {
        l,
        dim,
        s_psi,
        s_l,
        h_omega_l,
        eta_l: eta,
        delta,
        lower_bound_h_holds,
        classicalization: cl,
        points,
    })
}
