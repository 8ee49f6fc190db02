//! Runs a validated experiment and collects its rows.

use crate::config::{Experiment, Validated};
use crate::report::{Check, Report, Row, REPORT_SCHEMA_ID};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sanovlab_core::blocks::{hiai_petz_decomposition, IdentityStatus};
use sanovlab_core::classical::classical_sanov_experiment;
use sanovlab_core::counterexamples::*;
use sanovlab_core::quantum::{expectation, quantum_rel_entropy, tensor_power, Projection};
use sanovlab_core::separation::{neyman_pearson_bracket, theorem2_experiment, Theorem2Options};
use sanovlab_core::Result;
use serde_json::{json, Map, Value};

const TOL: f64 = 1e-9;
const DENSE_TOL: f64 = 1e-10;
const IDENTITY_TOL: f64 = 1e-8;

pub fn run(v: &Validated) -> Result<Report> {
    let mut summary = Map::new();
    let rows = match &v.experiment {
        Experiment::Classical { omega, q, n_list, schedule } => {
            let r = classical_sanov_experiment(omega, q, n_list, schedule)?;
            summary.insert("h_omega".into(), json!(r.h_omega));
            summary.insert("i_n_monotone".into(), json!(r.i_n_monotone));
            summary.insert("concentration_threshold".into(), json!(r.concentration_threshold));
            if let Some(last) = r.points.last() {
                summary.insert("final_rate".into(), json!(-last.exponent()));
                summary.insert("final_gap".into(), json!((-last.exponent() - r.h_omega).abs()));
            }
            r.points
                .iter()
                .map(|p| {
                    let nf = p.n as f64;
                    let mut checks = vec![Check::le("type_counting_bound", p.log2_q_measure, p.log2_q_bound, TOL)];
                    if p.slack_holds.is_some() && r.h_omega.is_finite() {
                        checks.push(Check::le("in_slack", r.h_omega - p.i_n, p.delta_n, TOL));
                        checks.push(Check::ge("in_below_h", r.h_omega - p.i_n, 0.0, TOL));
                    }
                    Row::new(p.n, p.q_measure(), p.exponent(), p.log2_q_bound / nf, checks)
                        .with("eps", p.eps)
                        .with("i_n", p.i_n)
                        .with("delta_n", p.delta_n)
                        .with("p_measures", &p.p_measures)
                })
                .collect()
        }
        Experiment::Quantum { psi_set, phi, l, n_list, schedule, target } => {
            let options = Theorem2Options { grouping_tol: v.grouping_tol, cap: v.cap, ..Theorem2Options::default() };
            let r = theorem2_experiment(psi_set, phi, *l, n_list, schedule, *target, &options)?;
            summary.insert("s_psi".into(), json!(r.s_psi));
            summary.insert("s_l".into(), json!(r.s_l));
            summary.insert("h_omega_l".into(), json!(r.h_omega_l));
            summary.insert("eta_l".into(), json!(r.eta_l));
            summary.insert("eta_below_target".into(), json!(r.eta_below_delta()));
            summary.insert("lower_bound_h_holds".into(), json!(r.lower_bound_h_holds));
            let signatures: Vec<_> =
                r.classicalization.blocks.blocks().iter().map(|b| b.signature.counts().to_vec()).collect();
            summary.insert("block_signatures".into(), json!(signatures));
            summary.insert(
                "intertwiner_distances".into(),
                json!(r.classicalization.intertwiners.iter().map(|u| u.distance_to_identity()).collect::<Vec<_>>()),
            );
            let d_l = (phi.dim() as f64).powi(*l as i32);
            r.points
                .iter()
                .map(|p| {
                    let mut checks = vec![
                        Check::le("exponent_vs_symmetrized", p.exponent, p.symmetrized_bound, TOL),
                        Check::le("symmetrized_vs_final", p.symmetrized_bound, p.final_bound, TOL),
                        Check::le(
                            "rank_bound",
                            p.log2_rank_joined,
                            d_l * d_l * ((p.n + 1) as f64).log2() + p.log2_rank_lifted,
                            TOL,
                        ),
                        Check::le(
                            "type_counting_bound",
                            p.log2_reference_lifted,
                            d_l * ((p.n + 1) as f64).log2() - p.n as f64 * p.i_n,
                            TOL,
                        ),
                    ];
                    for (i, (&j, &t)) in p.joined_expectations.iter().zip(&p.transported_expectations).enumerate() {
                        checks.push(Check::ge(format!("psi_estimate[{i}]"), j, t, TOL));
                    }
                    let q = p.log2_reference_lifted.exp2();
                    for (i, &x) in p.transported_reference.iter().enumerate() {
                        checks.push(Check::le(format!("invariance[{i}]"), (x - q).abs(), 0.0, TOL));
                    }
                    Row::new(p.n, p.log2_reference_joined.exp2(), p.exponent, p.final_bound, checks)
                        .with("eps", p.eps)
                        .with("joined_expectations", &p.joined_expectations)
                        .with("transported_expectations", &p.transported_expectations)
                        .with("log2_rank_joined", p.log2_rank_joined)
                        .with("log2_rank_lifted", p.log2_rank_lifted)
                })
                .collect()
        }
        Experiment::NeymanPearson { psi, phi, n_list, epsilon } => {
            let s = quantum_rel_entropy(psi, phi)?;
            summary.insert("s".into(), json!(s));
            summary.insert("epsilon".into(), json!(epsilon));
            let brackets = n_list
                .par_iter()
                .map(|&n| neyman_pearson_bracket(psi, phi, n, *epsilon, v.cap))
                .collect::<Result<Vec<_>>>()?;
            let gaps: Vec<f64> = brackets.iter().map(|b| (b.upper / b.n as f64 + s).abs()).collect();
            summary.insert("gaps_to_minus_s".into(), json!(gaps));
            brackets
                .iter()
                .map(|b| {
                    let nf = b.n as f64;
                    let checks = vec![
                        Check::le("lower_le_upper", b.lower, b.upper, TOL),
                        Check::ge("upper_feasible", b.upper_psi, 1.0 - epsilon, 1e-12),
                    ];
                    Row::new(b.n, b.upper.exp2(), b.upper / nf, b.lower / nf, checks)
                        .with("method", format!("{:?}", b.method))
                        .with("upper_rank", b.upper_rank)
                })
                .collect()
        }
        Experiment::Example1 { v: vv, w, delta, n_list } => {
            let (psi, phi) = example1_states(vv, w, *delta)?;
            let overlap_sq = vv.dotc(w).norm_sqr();
            summary.insert("overlap_sq".into(), json!(overlap_sq));
            summary.insert("s".into(), json!(quantum_rel_entropy(&psi, &phi)?));
            summary.insert("ceiling".into(), json!(-overlap_sq.log2()));
            let mut rows = Vec::new();
            for &n in n_list {
                let r = example1_empirical_rate(overlap_sq, *delta, n)?;
                let mut checks = vec![Check::le("rate_ceiling", r.rate, r.ceiling, 1e-12)];
                if (vv.len() as f64).powi(n as i32) <= v.cap as f64 {
                    let mut wn = w.clone();
                    for _ in 1..n {
                        wn = wn.kronecker(w);
                    }
                    let dense = expectation(&tensor_power(&phi, n, v.cap)?, &Projection::onto_vector(&wn)?)?;
                    checks.push(Check::le("dense_deviation", (dense - r.value).abs(), 0.0, DENSE_TOL));
                }
                let o = example1_orthocomplement(vv, w, n)?;
                rows.push(
                    Row::new(n, r.value, -r.rate, -r.ceiling, checks)
                        .with("orthocomplement_psi", o.psi_val)
                        .with("orthocomplement_phi", o.phi_val),
                );
            }
            rows
        }
        Experiment::Example2 { angle, n_list, candidates } => {
            let c = vandermonde_decay_constant::<f64>();
            summary.insert("decay_constant".into(), json!(-c));
            summary.insert("floor_rate_limit".into(), json!(example2_floor_rate(*angle)));
            if n_list.len() >= 2 {
                let slope = vandermonde_log_slope::<f64>(n_list)?;
                summary.insert("slope".into(), json!(slope));
                summary.insert("slope_relative_deviation".into(), json!((slope + c).abs() / c));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(v.config.seed);
            let mut rows = Vec::new();
            for &n in n_list {
                let s = vandermonde_sigma_min::<f64>(n)?;
                let floor = example2_certified_floor(n, *angle)?;
                let mut smallest = f64::INFINITY;
                for _ in 0..*candidates {
                    let x: Vec<f64> = (0..=n).map(|_| rng.random_range(-1.0..1.0)).collect();
                    let norm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
                    let x: Vec<f64> = x.iter().map(|a| a / norm).collect();
                    smallest = smallest.min(example2_uniform_overlap_floor(n, *angle, &x)?.max_overlap);
                }
                let mut checks = vec![Check::gt("floor_positive", floor, 0.0)];
                if *candidates > 0 {
                    checks.push(Check::ge("candidate_overlap", smallest, floor, 0.0));
                }
                rows.push(
                    Row::new(n, s.sigma_min, s.per_n_log_nat, floor.ln() / n as f64, checks)
                        .with("certified_floor", floor),
                );
            }
            rows
        }
        Experiment::HiaiPetz { pairs, l_list } => {
            let mut rows = Vec::new();
            for &l in l_list {
                let terms = pairs
                    .par_iter()
                    .map(|(psi, phi)| hiai_petz_decomposition(psi, phi, l, v.grouping_tol, v.cap))
                    .collect::<Result<Vec<_>>>()?;
                let mut checks = Vec::new();
                let mut worst = 0.0f64;
                let mut max_gain = f64::NEG_INFINITY;
                for (i, t) in terms.iter().enumerate() {
                    if let (IdentityStatus::Checked, Some(r)) = (t.status, t.residual) {
                        checks.push(Check::le(format!("residual[{i}]"), r, IDENTITY_TOL, 0.0));
                        worst = worst.max(r);
                    }
                    checks.push(Check::ge(format!("gain_nonnegative[{i}]"), t.pinch_gain, 0.0, TOL));
                    checks.push(Check::le(format!("gain_bound[{i}]"), t.pinch_gain, t.gain_bound, TOL));
                    max_gain = max_gain.max(t.pinch_gain);
                }
                let bound = terms.first().map(|t| t.gain_bound).unwrap_or(0.0);
                rows.push(Row::new(l, worst, max_gain, bound, checks).with("pairs", terms.len()));
            }
            rows
        }
    };
    let all_pass = rows.iter().all(|r: &Row| r.pass);
    summary.insert("rows_failed".into(), Value::from(rows.iter().filter(|r| !r.pass).count()));
    Ok(Report {
        schema: REPORT_SCHEMA_ID,
        kind: v.config.kind.name(),
        seed: v.config.seed,
        cap: v.cap,
        config: v.config.clone(),
        rows,
        summary,
        all_pass,
    })
}
