use super::schedule::{validate_n_list, EpsSchedule};
use super::typical::{build_typical_sets, log2_complement_measure, log2_measure_of_typical_set};
use super::{min_rel_entropy_in_l1_ball, rel_entropy_distance, Distribution, TypicalSetSpec};
use crate::error::Result;
use crate::scalar::Real;
use rayon::prelude::*;

/// Per-`n` record of the classical typical-set experiment. All logarithms in bits.
#[derive(Debug, Clone)]
pub struct RatePoint<T> {
    pub n: usize,
    pub eps: T,
    /// `log2 Q^n(M_n)`.
    pub log2_q_measure: T,
    /// `P^n(M_n)` for each member of the family, in input order.
    pub p_measures: Vec<T>,
    /// `I_n = H(Omega_n, Q)`.
    pub i_n: T,
    /// `log2(#A) eps - eps log2 eps - eps log2 Q_min`.
    pub delta_n: T,
    /// `#A log2(n+1) - n I_n`: the log of the type-counting bound on `Q^n(M_n)`.
    pub log2_q_bound: T,
    pub q_bound_holds: bool,
    /// `Some(0 <= H - I_n <= delta_n)` when `eps <= 1/2`, where the slack bound applies.
    pub slack_holds: Option<bool>,
    /// `log2 (1 - P^n(M_n))` per member.
    pub log2_p_miss: Vec<T>,
    /// `#A log2(n+1) - n b eps^2` with `b = 1 / (2 ln 2)`.
    pub log2_concentration_bound: T,
}

impl<T: Real> RatePoint<T> {
    /// `(1/n) log2 Q^n(M_n)`, nonpositive.
    pub fn exponent(&self) -> T {
        self.log2_q_measure / T::from_count(self.n)
    }

    pub fn q_measure(&self) -> T {
        self.log2_q_measure.exp2()
    }

    /// Whether the concentration bound holds for member `i` at this `n`.
    pub fn concentration_holds(&self, i: usize) -> bool {
        self.log2_p_miss[i] <= self.log2_concentration_bound + tolerance::<T>()
    }
}

#[derive(Debug, Clone)]
pub struct ClassicalReport<T> {
    /// `H(Omega, Q)`.
    pub h_omega: T,
    pub points: Vec<RatePoint<T>>,
    /// `I_n` nondecreasing along the run.
    pub i_n_monotone: bool,
    /// Empirical `N(P)`: first listed `n` from which the concentration bound
    /// holds for every later listed `n`.
    pub concentration_threshold: Vec<Option<usize>>,
}

impl<T: Real> ClassicalReport<T> {
    pub fn all_bounds_hold(&self) -> bool {
        self.i_n_monotone
            && self
                .points
                .iter()
                .all(|p| p.q_bound_holds && p.slack_holds != Some(false))
    }
}

fn tolerance<T: Real>() -> T {
    T::tol(1e-9, 1e4)
}

/// The inner minimum of `I_n`: `min_{P in Omega_1} min_{||R-P||_1 <= eps} H(R,Q)`.
pub fn rate_lower_bound<T: Real>(omega: &[Distribution<T>], q: &Distribution<T>, eps: T) -> Result<T> {
    let mut best = T::infinity();
    for p in omega {
        best = best.min(min_rel_entropy_in_l1_ball(p, q, eps)?);
    }
    Ok(best)
}

/// `log2(#A) eps - eps log2 eps - eps log2 Q_min` with `Q_min` over `supp(Q)`.
pub fn slack<T: Real>(alphabet_size: usize, eps: T, q: &Distribution<T>) -> T {
    let q_min = q
        .probs()
        .iter()
        .copied()
        .filter(|&x| x > T::zero())
        .fold(T::one(), |m, x| m.min(x));
    eps * T::from_count(alphabet_size).log2() - eps * eps.log2() - eps * q_min.log2()
}

/// Evaluates one block length.
pub fn classical_rate_point<T: Real>(
    omega: &[Distribution<T>],
    q: &Distribution<T>,
    n: usize,
    eps: T,
    h_omega: T,
) -> Result<(TypicalSetSpec<T>, RatePoint<T>)> {
    let spec = build_typical_sets(omega, q, n, eps)?;
    let d = q.alphabet_size();
    let nf = T::from_count(n);
    let log2_q_measure = log2_measure_of_typical_set(q, &spec)?;
    let p_measures = omega
        .iter()
        .map(|p| log2_measure_of_typical_set(p, &spec).map(|x| x.exp2()))
        .collect::<Result<Vec<_>>>()?;
    let log2_p_miss = omega
        .iter()
        .map(|p| log2_complement_measure(p, &spec))
        .collect::<Result<Vec<_>>>()?;
    let i_n = rate_lower_bound(omega, q, eps)?;
    let delta_n = slack(d, eps, q);
    let log_poly = T::from_count(d) * T::from_count(n + 1).log2();
    let log2_q_bound = log_poly - nf * i_n;
    let tol = tolerance::<T>();
    let q_bound_holds = log2_q_measure <= log2_q_bound + tol;
    let slack_holds = if eps <= T::lit(0.5) && h_omega.is_finite() {
        let gap = h_omega - i_n;
        Some(gap >= -tol && gap <= delta_n + tol)
    } else if eps <= T::lit(0.5) {
        // H = inf: M_n = M_{2,n}, I_n = inf as well.
        Some(i_n.is_pos_infinite())
    } else {
        None
    };
    let b = T::one() / (T::lit(2.0) * T::ln_2());
    let log2_concentration_bound = log_poly - nf * b * eps * eps;
    Ok((
        spec,
        RatePoint {
            n,
            eps,
            log2_q_measure,
            p_measures,
            i_n,
            delta_n,
            log2_q_bound,
            q_bound_holds,
            slack_holds,
            log2_p_miss,
            log2_concentration_bound,
        },
    ))
}

/// Runs the explicit typical-set construction over `n_list` and checks the
/// type-counting bound, the `I_n` slack bound and the concentration bound.
/// Points are computed in parallel; the report is ordered by `n`.
pub fn classical_sanov_experiment<T: Real>(
    omega: &[Distribution<T>],
    q: &Distribution<T>,
    n_list: &[usize],
    schedule: &EpsSchedule<T>,
) -> Result<ClassicalReport<T>> {
    validate_n_list(n_list)?;
    let h_omega = rel_entropy_distance(omega, q)?;
    let points = n_list
        .par_iter()
        .map(|&n| classical_rate_point(omega, q, n, schedule.eps(n), h_omega).map(|(_, p)| p))
        .collect::<Result<Vec<_>>>()?;
    let tol = tolerance::<T>();
    let i_n_monotone = points.windows(2).all(|w| {
        w[1].i_n >= w[0].i_n - tol || (w[0].i_n.is_pos_infinite() && w[1].i_n.is_pos_infinite())
    });
    let concentration_threshold = (0..omega.len())
        .map(|i| {
            let mut threshold = None;
            for p in points.iter().rev() {
                if p.concentration_holds(i) {
                    threshold = Some(p.n);
                } else {
                    break;
                }
            }
            threshold
        })
        .collect();
    Ok(ClassicalReport { h_omega, points, i_n_monotone, concentration_threshold })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_family_has_zero_rate() {
        let q = Distribution::new(vec![0.3, 0.7]).unwrap();
        let report = classical_sanov_experiment(
            std::slice::from_ref(&q),
            &q,
            &[1, 5, 20, 100, 400],
            &EpsSchedule::cube_root(),
        )
        .unwrap();
        assert_eq!(report.h_omega, 0.0);
        for p in &report.points {
            assert_eq!(p.i_n, 0.0);
            assert!(p.q_bound_holds);
        }
        let last = report.points.last().unwrap();
        assert!(last.exponent() > -0.01);
        assert!(report.all_bounds_hold());
    }

    #[test]
    fn bernoulli_grid_rate_at_n_2000() {
        let q = Distribution::bernoulli(0.5).unwrap();
        let omega: Vec<_> = (0..=20)
            .map(|i| Distribution::bernoulli(0.6 + 0.01 * i as f64).unwrap())
            .collect();
        let report =
            classical_sanov_experiment(&omega, &q, &[10, 100, 2000], &EpsSchedule::cube_root()).unwrap();
        assert!((report.h_omega - 0.029_049_405_545_331_39).abs() < 1e-12);
        let last = report.points.last().unwrap();
        assert!((-last.exponent() - report.h_omega).abs() < 0.02);
        assert!(report.all_bounds_hold());
        assert!(report.concentration_threshold.iter().all(|t| t.is_some()));
    }

    #[test]
    fn singular_family_is_separated_perfectly() {
        let q = Distribution::new(vec![0.0, 1.0]).unwrap();
        let p = Distribution::new(vec![1.0, 0.0]).unwrap();
        let report = classical_sanov_experiment(&[p], &q, &[1, 2, 8], &EpsSchedule::cube_root()).unwrap();
        assert!(report.h_omega.is_pos_infinite());
        for pt in &report.points {
            assert!(pt.log2_q_measure.is_neg_infinite());
            assert_eq!(pt.p_measures[0], 1.0);
            assert!(pt.q_bound_holds);
        }
        assert!(report.all_bounds_hold());
    }

    #[test]
    fn invalid_n_list_is_rejected() {
        let q = Distribution::bernoulli(0.5).unwrap();
        assert!(classical_sanov_experiment(std::slice::from_ref(&q), &q, &[5, 2], &EpsSchedule::cube_root()).is_err());
    }
}
