use crate::classical::{enumerate_types, LogFactorials};
use crate::error::{Error, Result};
use crate::quantum::linalg::{cabs, hermitian_eigen, CMatrix};
use crate::quantum::{tensor_power, DensityOperator};
use crate::scalar::{cplx, Real};

/// How the upper end of the bracket was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NPMethod {
    /// Commuting pair: exact optimum over diagonal tests (branch and bound).
    ExactCommuting,
    /// Commuting pair, but the search hit its node budget; the value is the
    /// best test found.
    CommutingBudgetExceeded,
    /// Nested eigenprojections of `D_psi^{⊗n} - t D_phi^{⊗n}` over a grid of `t`.
    Threshold,
}

/// Bracket `lower <= log2 beta_{eps,n} <= upper`.
#[derive(Debug, Clone)]
pub struct NPBracket<T> {
    pub n: usize,
    pub epsilon: T,
    pub upper: T,
    pub lower: T,
    /// `psi^{⊗n}` expectation of the projection achieving `upper`.
    pub upper_psi: T,
    pub upper_rank: usize,
    /// Threshold `t` of the projection achieving `upper`, when applicable.
    pub threshold: Option<T>,
    pub method: NPMethod,
}

impl<T: Real> NPBracket<T> {
    pub fn is_consistent(&self) -> bool {
        self.lower <= self.upper + T::tol(1e-9, 1e4)
    }
}

const GRID_POINTS: usize = 97;
const REFINE_STEPS: usize = 30;
const NODE_BUDGET: usize = 20_000_000;

fn feasibility_slack<T: Real>() -> T {
    T::tol(1e-12, 64.0)
}

/// Brackets `log2 min { phi^{⊗n}(q) : psi^{⊗n}(q) >= 1 - eps }` over
/// projections `q`.
pub fn neyman_pearson_bracket<T: Real>(
    psi: &DensityOperator<T>,
    phi: &DensityOperator<T>,
    n: usize,
    epsilon: T,
    cap: usize,
) -> Result<NPBracket<T>> {
    if psi.dim() != phi.dim() {
        return Err(Error::DimensionMismatch { expected: phi.dim(), actual: psi.dim() });
    }
    if !(epsilon > T::zero() && epsilon < T::one()) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in (0,1), got {epsilon}")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    if let Some((p, q)) = joint_diagonal(psi, phi) {
        return Ok(commuting_bracket(&p, &q, n, epsilon));
    }
    threshold_bracket(psi, phi, n, epsilon, cap)
}

/// Diagonals in a common eigenbasis, if the two operators commute.
fn joint_diagonal<T: Real>(psi: &DensityOperator<T>, phi: &DensityOperator<T>) -> Option<(Vec<T>, Vec<T>)> {
    let a = psi.matrix();
    let b = phi.matrix();
    let comm = a * b - b * a;
    let tol = T::tol(1e-12, 1e3);
    if comm.iter().any(|&c| cabs(c) > tol) {
        return None;
    }
    let mix = a + b * cplx(T::lit(std::f64::consts::SQRT_2));
    let v = hermitian_eigen(&mix).vectors;
    let da = v.adjoint() * a * &v;
    let db = v.adjoint() * b * &v;
    let d = a.nrows();
    let off_tol = T::tol(1e-10, 1e4);
    for i in 0..d {
        for j in 0..d {
            if i != j && (cabs(da[(i, j)]) > off_tol || cabs(db[(i, j)]) > off_tol) {
                return None;
            }
        }
    }
    let clean = |x: T| if x < off_tol { T::zero() } else { x };
    Some(((0..d).map(|i| clean(da[(i, i)].re)).collect(), (0..d).map(|i| clean(db[(i, i)].re)).collect()))
}

struct Item<T> {
    count: f64,
    p: T,
    q: T,
}

fn commuting_bracket<T: Real>(p: &[T], q: &[T], n: usize, epsilon: T) -> NPBracket<T> {
    let d = p.len();
    let table = LogFactorials::<T>::new(n);
    let mut items = Vec::new();
    for t in enumerate_types(n, d) {
        let mut pw = T::one();
        let mut qw = T::one();
        for (a, &c) in t.counts().iter().enumerate() {
            pw *= p[a].powi(c as i32);
            qw *= q[a].powi(c as i32);
        }
        let count = table.log2_multinomial(&t).as_f64().exp2().round();
        items.push(Item { count, p: pw, q: qw });
    }
    let target = T::one() - epsilon - feasibility_slack::<T>();

    // Free letters first, then by likelihood ratio, best first.
    let mut free_mass = T::zero();
    let mut free_rank = 0.0;
    let mut useful: Vec<Item<T>> = Vec::new();
    for it in items {
        if it.p <= T::zero() {
            continue;
        }
        if it.q <= T::zero() {
            free_mass += T::lit(it.count) * it.p;
            free_rank += it.count;
        } else {
            useful.push(it);
        }
    }
    useful.sort_by(|a, b| (b.p / b.q).partial_cmp(&(a.p / a.q)).unwrap_or(std::cmp::Ordering::Equal));
    let need = target - free_mass;
    let mut search = Search {
        items: &useful,
        best_cost: T::infinity(),
        best_choice: Vec::new(),
        choice: vec![0.0; useful.len()],
        nodes: 0,
    };
    if need <= T::zero() {
        search.best_cost = T::zero();
        search.best_choice = vec![0.0; useful.len()];
    } else {
        search.dfs(0, need, T::zero());
    }
    let method = if search.nodes > NODE_BUDGET { NPMethod::CommutingBudgetExceeded } else { NPMethod::ExactCommuting };
    let (upper, upper_psi, upper_rank) = if search.best_cost.is_finite() {
        let psi_mass = useful
            .iter()
            .zip(&search.best_choice)
            .fold(free_mass, |acc, (it, &k)| acc + T::lit(k) * it.p);
        let rank = free_rank + search.best_choice.iter().sum::<f64>();
        (search.best_cost.log2(), psi_mass.min(T::one()), rank as usize)
    } else {
        // Unreachable in exact arithmetic: the full space has mass 1.
        (T::zero(), T::one(), d.pow(n as u32))
    };

    // Lagrangian lower bound at the likelihood-ratio breakpoints.
    let mut lower = T::neg_infinity();
    let mut ts: Vec<T> = useful.iter().map(|it| it.p / it.q).collect();
    ts.dedup_by(|a, b| (*a - *b).abs() <= T::tol(1e-15, 4.0) * *b);
    for t in ts {
        let pos = useful.iter().fold(free_mass, |acc, it| {
            let diff = it.p - t * it.q;
            if diff > T::zero() {
                acc + T::lit(it.count) * diff
            } else {
                acc
            }
        });
        let arg = T::one() - epsilon - pos;
        if arg > T::zero() {
            lower = lower.max((arg / t).log2());
        }
    }
    NPBracket { n, epsilon, upper, lower, upper_psi, upper_rank, threshold: None, method }
}

struct Search<'a, T> {
    items: &'a [Item<T>],
    best_cost: T,
    best_choice: Vec<f64>,
    choice: Vec<f64>,
    nodes: usize,
}

impl<T: Real> Search<'_, T> {
    /// Fractional-knapsack cost of covering `need` with items `i..`.
    fn relaxation(&self, i: usize, mut need: T) -> T {
        let mut cost = T::zero();
        for it in &self.items[i..] {
            if need <= T::zero() {
                return cost;
            }
            let mass = T::lit(it.count) * it.p;
            if mass >= need {
                return cost + need / it.p * it.q;
            }
            cost += T::lit(it.count) * it.q;
            need -= mass;
        }
        if need <= T::zero() {
            cost
        } else {
            T::infinity()
        }
    }

    fn dfs(&mut self, i: usize, need: T, cost: T) {
        self.nodes += 1;
        if need <= T::zero() {
            if cost < self.best_cost {
                self.best_cost = cost;
                self.best_choice = self.choice.clone();
            }
            return;
        }
        if i == self.items.len() || self.nodes > NODE_BUDGET {
            return;
        }
        if cost + self.relaxation(i, need) >= self.best_cost {
            return;
        }
        let it = &self.items[i];
        let k_max = (need / it.p).ceil().as_f64().min(it.count).max(0.0);
        let mut k = k_max;
        loop {
            self.choice[i] = k;
            let kt = T::lit(k);
            self.dfs(i + 1, need - kt * it.p, cost + kt * it.q);
            if k == 0.0 || self.nodes > NODE_BUDGET {
                break;
            }
            // Stop once even the relaxation with fewer copies cannot win.
            let next = k - 1.0;
            let rest = self.relaxation(i + 1, need - T::lit(next) * it.p);
            if cost + T::lit(next) * it.q + rest >= self.best_cost {
                break;
            }
            k = next;
        }
        self.choice[i] = 0.0;
    }
}

struct ThresholdEval<T> {
    upper: T,
    psi: T,
    rank: usize,
    lower: T,
}

fn threshold_bracket<T: Real>(
    psi: &DensityOperator<T>,
    phi: &DensityOperator<T>,
    n: usize,
    epsilon: T,
    cap: usize,
) -> Result<NPBracket<T>> {
    let a = tensor_power(psi, n, cap)?;
    let b = tensor_power(phi, n, cap)?;
    let target = T::one() - epsilon - feasibility_slack::<T>();
    let eval = |log_t: T| -> ThresholdEval<T> {
        let t = log_t.exp2();
        let m: CMatrix<T> = a.matrix() - b.matrix() * cplx(t);
        let e = hermitian_eigen(&m);
        let av = a.matrix() * &e.vectors;
        let bv = b.matrix() * &e.vectors;
        let mut cum_a = T::zero();
        let mut cum_b = T::zero();
        let mut found = None;
        for k in 0..e.values.len() {
            let v = e.vectors.column(k);
            cum_a += v.dotc(&av.column(k)).re.max(T::zero());
            cum_b += v.dotc(&bv.column(k)).re.max(T::zero());
            if cum_a >= target {
                found = Some((cum_b, cum_a, k + 1));
                break;
            }
        }
        let (up, ps, rank) = found.unwrap_or((T::one(), T::one(), e.values.len()));
        let pos = e.values.iter().fold(T::zero(), |acc, &x| if x > T::zero() { acc + x } else { acc });
        let arg = T::one() - epsilon - pos;
        let lower = if arg > T::zero() { arg.log2() - log_t } else { T::neg_infinity() };
        ThresholdEval { upper: up.log2(), psi: ps.min(T::one()), rank, lower }
    };
    let nf = T::from_count(n);
    let lo = T::lit(-8.0);
    let hi = T::lit(4.0) * nf + T::lit(8.0);
    let step = (hi - lo) / T::from_count(GRID_POINTS - 1);
    let mut best_upper: Option<(T, ThresholdEval<T>)> = None;
    let mut best_lower: (T, T) = (T::neg_infinity(), lo);
    for j in 0..GRID_POINTS {
        let s = lo + step * T::from_count(j);
        let ev = eval(s);
        if ev.lower > best_lower.0 {
            best_lower = (ev.lower, s);
        }
        if best_upper.as_ref().is_none_or(|(_, b)| ev.upper < b.upper) {
            best_upper = Some((s, ev));
        }
    }
    // Golden-section refinement around the best grid points.
    let refine = |centre: T, pick: &dyn Fn(&ThresholdEval<T>) -> T| -> (T, T) {
        let phi_g = T::lit(0.618_033_988_749_894_9);
        let (mut x0, mut x1) = (centre - step, centre + step);
        let mut best = (pick(&eval(centre)), centre);
        for _ in 0..REFINE_STEPS {
            let c = x1 - (x1 - x0) * phi_g;
            let d = x0 + (x1 - x0) * phi_g;
            let (fc, fd) = (pick(&eval(c)), pick(&eval(d)));
            if fc < best.0 {
                best = (fc, c);
            }
            if fd < best.0 {
                best = (fd, d);
            }
            if fc < fd {
                x1 = d;
            } else {
                x0 = c;
            }
        }
        best
    };
    let (s_up, ev_up) = best_upper.expect("grid is nonempty");
    let (_, s_refined) = refine(s_up, &|e| e.upper);
    let ev_refined = eval(s_refined);
    let (s_best, ev_best) = if ev_refined.upper < ev_up.upper { (s_refined, ev_refined) } else { (s_up, ev_up) };
    let (neg_lower, _) = refine(best_lower.1, &|e| -e.lower);
    let lower = best_lower.0.max(-neg_lower);
    Ok(NPBracket {
        n,
        epsilon,
        upper: ev_best.upper,
        lower,
        upper_psi: ev_best.psi,
        upper_rank: ev_best.rank,
        threshold: Some(s_best.exp2()),
        method: NPMethod::Threshold,
    })
}
