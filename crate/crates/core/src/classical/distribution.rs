use crate::error::{Error, Result};
use crate::scalar::Real;

/// Probability vector over the alphabet `0..d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<T> {
    probs: Vec<T>,
}

impl<T: Real> Distribution<T> {
    /// Validates nonnegativity and normalization (sum within `1e-12`, or the
    /// type's resolution if coarser).
    pub fn new(probs: Vec<T>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty probability vector".into()));
        }
        for (i, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < T::zero() {
                return Err(Error::InvalidDistribution(format!(
                    "entry {i} is {p}, must be a finite nonnegative number"
                )));
            }
        }
        let sum = probs.iter().fold(T::zero(), |a, &b| a + b);
        let tol = T::tol(1e-12, 64.0 * probs.len() as f64);
        if (sum - T::one()).abs() > tol {
            return Err(Error::InvalidDistribution(format!(
                "entries sum to {sum}, expected 1"
            )));
        }
        Ok(Self { probs })
    }

    /// Normalizes nonnegative weights.
    pub fn from_weights(weights: Vec<T>) -> Result<Self> {
        let sum = weights.iter().fold(T::zero(), |a, &b| a + b);
        if sum <= T::zero() {
            return Err(Error::InvalidDistribution("weights sum to zero".into()));
        }
        Self::new(weights.into_iter().map(|w| w / sum).collect())
    }

    /// `(1 - p, p)`: letter 1 has probability `p`.
    pub fn bernoulli(p: T) -> Result<Self> {
        Self::new(vec![T::one() - p, p])
    }

    pub fn uniform(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDistribution("empty alphabet".into()));
        }
        Self::new(vec![T::one() / T::from_count(d); d])
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn prob(&self, letter: usize) -> T {
        self.probs[letter]
    }

    /// Letters with strictly positive mass.
    pub fn support(&self) -> Vec<bool> {
        self.probs.iter().map(|&p| p > T::zero()).collect()
    }

    pub fn l1_distance(&self, other: &Self) -> Result<T> {
        self.check_same_alphabet(other)?;
        Ok(self
            .probs
            .iter()
            .zip(&other.probs)
            .fold(T::zero(), |acc, (&a, &b)| acc + (a - b).abs()))
    }

    /// True iff every letter charged by `self` is charged by `other`.
    pub fn absolutely_continuous_wrt(&self, other: &Self) -> bool {
        self.probs
            .iter()
            .zip(&other.probs)
            .all(|(&p, &q)| p <= T::zero() || q > T::zero())
    }

    pub(crate) fn check_same_alphabet(&self, other: &Self) -> Result<()> {
        if self.probs.len() != other.probs.len() {
            return Err(Error::DimensionMismatch {
                expected: self.probs.len(),
                actual: other.probs.len(),
            });
        }
        Ok(())
    }
}

/// Relative entropy `H(P,Q)` in bits, `+inf` when `P` is not absolutely
/// continuous with respect to `Q`.
pub fn rel_entropy<T: Real>(p: &Distribution<T>, q: &Distribution<T>) -> Result<T> {
    p.check_same_alphabet(q)?;
    let mut acc = T::zero();
    for (&pa, &qa) in p.probs.iter().zip(&q.probs) {
        if pa <= T::zero() {
            continue;
        }
        if qa <= T::zero() {
            return Ok(T::infinity());
        }
        acc += pa * (pa.log2() - qa.log2());
    }
    // Cancellation can leave a tiny negative residue for P close to Q.
    Ok(acc.max(T::zero()))
}

/// `H(Omega, Q)`: the minimum over a finite family.
pub fn rel_entropy_distance<T: Real>(omega: &[Distribution<T>], q: &Distribution<T>) -> Result<T> {
    nearest_member(omega, q).map(|(_, h)| h)
}

/// Index of the first minimizer of `H(P, Q)` over `omega`, with the minimum.
pub fn nearest_member<T: Real>(omega: &[Distribution<T>], q: &Distribution<T>) -> Result<(usize, T)> {
    if omega.is_empty() {
        return Err(Error::EmptySet("distribution family"));
    }
    let mut best = (0, T::infinity());
    for (i, p) in omega.iter().enumerate() {
        let h = rel_entropy(p, q)?;
        if h < best.1 {
            best = (i, h);
        }
    }
    Ok(best)
}

/// `min { H(R,Q) : R on supp(Q), ||R - P||_1 <= radius }` for `P << Q`.
///
/// The minimizer moves mass `radius / 2` from the letters with the largest
/// likelihood ratio `P/Q` to those with the smallest, flattening the ratio at
/// two water levels `c_lo < 1 < c_hi`. Returns `+inf` if `P` is not
/// absolutely continuous with respect to `Q`.
pub fn min_rel_entropy_in_l1_ball<T: Real>(
    p: &Distribution<T>,
    q: &Distribution<T>,
    radius: T,
) -> Result<T> {
    p.check_same_alphabet(q)?;
    if !p.absolutely_continuous_wrt(q) {
        return Ok(T::infinity());
    }
    if p.l1_distance(q)? <= radius {
        return Ok(T::zero());
    }
    let budget = radius / T::lit(2.0);
    // Letters of supp(Q) with their likelihood ratios.
    let mut letters: Vec<(usize, T)> = (0..q.alphabet_size())
        .filter(|&a| q.prob(a) > T::zero())
        .map(|a| (a, p.prob(a) / q.prob(a)))
        .collect();

    letters.sort_by(|x, y| y.1.partial_cmp(&x.1).expect("finite ratios"));
    let c_hi = water_level(&letters, p, q, budget, true);
    letters.reverse();
    let c_lo = water_level(&letters, p, q, budget, false);

    let mut r = vec![T::zero(); p.alphabet_size()];
    for &(a, ratio) in &letters {
        r[a] = if ratio > c_hi {
            c_hi * q.prob(a)
        } else if ratio < c_lo {
            c_lo * q.prob(a)
        } else {
            p.prob(a)
        };
    }
    let sum = r.iter().fold(T::zero(), |acc, &x| acc + x);
    let r = Distribution { probs: r.into_iter().map(|x| x / sum).collect() };
    rel_entropy(&r, q)
}

/// Solves the piecewise-linear mass balance for one side of the water-filling.
/// `sorted` is ordered so that the letters touched first come first.
fn water_level<T: Real>(
    sorted: &[(usize, T)],
    p: &Distribution<T>,
    q: &Distribution<T>,
    budget: T,
    lowering: bool,
) -> T {
    let mut sum_p = T::zero();
    let mut sum_q = T::zero();
    for (k, &(a, _)) in sorted.iter().enumerate() {
        sum_p += p.prob(a);
        sum_q += q.prob(a);
        let level = if lowering {
            (sum_p - budget) / sum_q
        } else {
            (sum_p + budget) / sum_q
        };
        let next = sorted.get(k + 1).map(|&(_, r)| r);
        let fits = match next {
            None => true,
            Some(r_next) if lowering => level >= r_next,
            Some(r_next) => level <= r_next,
        };
        if fits {
            return level;
        }
    }
    T::one()
}
