use super::Distribution;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Letter counts of a word of length `n`: the word's type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypeVector {
    counts: Vec<usize>,
    n: usize,
}

impl TypeVector {
    pub fn new(counts: Vec<usize>) -> Self {
        let n = counts.iter().sum();
        Self { counts, n }
    }

    /// Type of an explicit word over `0..d`.
    pub fn of_word(word: &[usize], d: usize) -> Self {
        let mut counts = vec![0; d];
        for &a in word {
            counts[a] += 1;
        }
        Self::new(counts)
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alphabet_size(&self) -> usize {
        self.counts.len()
    }

    /// Empirical distribution `counts / n`; `None` for the empty word.
    pub fn empirical<T: Real>(&self) -> Option<Distribution<T>> {
        if self.n == 0 {
            return None;
        }
        let n = T::from_count(self.n);
        let probs = self.counts.iter().map(|&c| T::from_count(c) / n).collect();
        Distribution::new(probs).ok()
    }

    /// `||P_type - P||_1`.
    pub fn l1_distance_to<T: Real>(&self, p: &Distribution<T>) -> T {
        let n = T::from_count(self.n.max(1));
        self.counts
            .iter()
            .zip(p.probs())
            .fold(T::zero(), |acc, (&c, &pa)| acc + (T::from_count(c) / n - pa).abs())
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(a, _)| a)
    }
}

/// Colexicographic: shorter words first, then counts compared from the last
/// letter backwards.
impl Ord for TypeVector {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.counts.iter().rev().cmp(other.counts.iter().rev()))
    }
}

impl PartialOrd for TypeVector {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// All compositions of `n` into `d` nonnegative parts, in colexicographic
/// order of the count vectors (the last coordinate varies slowest).
///
/// The count is `C(n + d - 1, d - 1)`.
pub fn enumerate_types(n: usize, d: usize) -> Vec<TypeVector> {
    assert!(d >= 1, "alphabet must be nonempty");
    let mut out = Vec::new();
    let mut counts = vec![0; d];
    fill_colex(n, d - 1, &mut counts, &mut out);
    out
}

fn fill_colex(remaining: usize, pos: usize, counts: &mut Vec<usize>, out: &mut Vec<TypeVector>) {
    if pos == 0 {
        counts[0] = remaining;
        out.push(TypeVector::new(counts.clone()));
        return;
    }
    for c in 0..=remaining {
        counts[pos] = c;
        fill_colex(remaining - c, pos - 1, counts, out);
    }
    counts[pos] = 0;
}

/// Number of types of length `n` over `d` letters, `C(n + d - 1, d - 1)`.
pub fn type_count(n: usize, d: usize) -> u128 {
    let k = (d - 1) as u128;
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc * (n as u128 + i) / i;
    }
    acc
}

/// Table of `log2 k!` for `k = 0..=max`, built by cumulative summation.
#[derive(Debug, Clone)]
pub struct LogFactorials<T> {
    table: Vec<T>,
}

impl<T: Real> LogFactorials<T> {
    pub fn new(max: usize) -> Self {
        let mut table = Vec::with_capacity(max + 1);
        let mut acc = T::zero();
        table.push(acc);
        for k in 1..=max {
            acc += T::from_count(k).log2();
            table.push(acc);
        }
        Self { table }
    }

    pub fn log2_factorial(&self, k: usize) -> T {
        self.table[k]
    }

    /// `log2( n! / (l_1! ... l_d!) )`.
    pub fn log2_multinomial(&self, t: &TypeVector) -> T {
        t.counts
            .iter()
            .fold(self.table[t.n], |acc, &c| acc - self.table[c])
    }

    /// `log2 P^n(T)` for the type class `T`; `-inf` on a support violation.
    pub fn log2_prob_of_type_class(&self, p: &Distribution<T>, t: &TypeVector) -> Result<T> {
        if p.alphabet_size() != t.alphabet_size() {
            return Err(Error::DimensionMismatch {
                expected: p.alphabet_size(),
                actual: t.alphabet_size(),
            });
        }
        let mut acc = self.log2_multinomial(t);
        for (&c, &pa) in t.counts.iter().zip(p.probs()) {
            if c == 0 {
                continue;
            }
            if pa <= T::zero() {
                return Ok(T::neg_infinity());
            }
            acc += T::from_count(c) * pa.log2();
        }
        Ok(acc)
    }
}

/// `log2` of the number of words with type `t`.
pub fn log_type_class_size<T: Real>(t: &TypeVector) -> T {
    LogFactorials::new(t.n).log2_multinomial(t)
}

/// `log2 P^n(type class of t)`; `-inf` when `t` charges a `P`-null letter.
pub fn log_prob_of_type_class<T: Real>(p: &Distribution<T>, t: &TypeVector) -> Result<T> {
    LogFactorials::new(t.n).log2_prob_of_type_class(p, t)
}
