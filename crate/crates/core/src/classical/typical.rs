use super::types::{enumerate_types, LogFactorials, TypeVector};
use super::{rel_entropy, Distribution};
use crate::error::{Error, Result};
use crate::scalar::{log2_sum_exp2, Real};

/// Explicit typical set `M_n = M_{1,n} ∪ M_{2,n}` described by its types.
///
/// * `M_{1,n}`: words over `A_+ = supp(Q)` whose empirical distribution is
///   within l1 distance `eps` of some `P ∈ Omega` with `H(P,Q) < inf`.
/// * `M_{2,n}`: words that hit a `Q`-null letter while staying inside the
///   support of some `P ∈ Omega` with `H(P,Q) = inf`.
#[derive(Debug, Clone)]
pub struct TypicalSetSpec<T> {
    n: usize,
    eps: T,
    support_plus: Vec<bool>,
    members: Vec<TypeVector>,
    null_component: Vec<TypeVector>,
    finite_members: Vec<usize>,
    infinite_members: Vec<usize>,
}

impl<T: Real> TypicalSetSpec<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eps(&self) -> T {
        self.eps
    }

    pub fn alphabet_size(&self) -> usize {
        self.support_plus.len()
    }

    /// `A_+` as a membership mask.
    pub fn support_plus(&self) -> &[bool] {
        &self.support_plus
    }

    /// Types of `M_{1,n}`.
    pub fn member_types(&self) -> &[TypeVector] {
        &self.members
    }

    /// Types of `M_{2,n}`.
    pub fn null_types(&self) -> &[TypeVector] {
        &self.null_component
    }

    /// Indices into the input family of the members with finite `H(P,Q)`.
    pub fn finite_members(&self) -> &[usize] {
        &self.finite_members
    }

    pub fn infinite_members(&self) -> &[usize] {
        &self.infinite_members
    }

    pub fn all_types(&self) -> impl Iterator<Item = &TypeVector> {
        self.members.iter().chain(self.null_component.iter())
    }

    pub fn contains(&self, t: &TypeVector) -> bool {
        self.members.binary_search(t).is_ok() || self.null_component.binary_search(t).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty() && self.null_component.is_empty()
    }

    /// `log2 |M_n|`, the number of words (the rank of the lifted projection).
    pub fn log2_word_count(&self) -> T {
        let table = LogFactorials::<T>::new(self.n);
        log2_sum_exp2(self.all_types().map(|t| table.log2_multinomial(t)))
    }
}

/// Builds `M_n` for the finite family `omega` against the reference `q`.
pub fn build_typical_sets<T: Real>(
    omega: &[Distribution<T>],
    q: &Distribution<T>,
    n: usize,
    eps: T,
) -> Result<TypicalSetSpec<T>> {
    if omega.is_empty() {
        return Err(Error::EmptySet("distribution family"));
    }
    if !(eps > T::zero()) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    let d = q.alphabet_size();
    let mut finite_members = Vec::new();
    let mut infinite_members = Vec::new();
    for (i, p) in omega.iter().enumerate() {
        if rel_entropy(p, q)?.is_finite() {
            finite_members.push(i);
        } else {
            infinite_members.push(i);
        }
    }
    let support_plus = q.support();
    // Boundary types (exactly at distance eps) count as members; the slack
    // only absorbs rounding in the grid values.
    let slack = T::tol(1e-12, 64.0);

    let mut members = Vec::new();
    let mut null_component = Vec::new();
    for t in enumerate_types(n, d) {
        let inside_plus = t.support().all(|a| support_plus[a]);
        if inside_plus {
            let close = finite_members
                .iter()
                .any(|&i| t.l1_distance_to(&omega[i]) <= eps + slack);
            if close {
                members.push(t);
            }
        } else {
            let covered = infinite_members.iter().any(|&i| {
                let p = &omega[i];
                t.support().all(|a| p.prob(a) > T::zero())
            });
            if covered {
                null_component.push(t);
            }
        }
    }
    members.sort();
    null_component.sort();
    Ok(TypicalSetSpec {
        n,
        eps,
        support_plus,
        members,
        null_component,
        finite_members,
        infinite_members,
    })
}

/// `log2 P^n(M_n)`, exact over the types of `M_n` (`-inf` for a null set).
pub fn log2_measure_of_typical_set<T: Real>(p: &Distribution<T>, spec: &TypicalSetSpec<T>) -> Result<T> {
    if p.alphabet_size() != spec.alphabet_size() {
        return Err(Error::DimensionMismatch {
            expected: spec.alphabet_size(),
            actual: p.alphabet_size(),
        });
    }
    let table = LogFactorials::new(spec.n);
    let terms = spec
        .all_types()
        .map(|t| table.log2_prob_of_type_class(p, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(log2_sum_exp2(terms).min(T::zero()))
}

/// `P^n(M_n)` in `[0, 1]`.
pub fn measure_of_typical_set<T: Real>(p: &Distribution<T>, spec: &TypicalSetSpec<T>) -> Result<T> {
    Ok(log2_measure_of_typical_set(p, spec)?.exp2())
}

/// `log2 P^n(A^n \ M_n)`, summed directly over the complement types so small
/// complements do not cancel against 1.
pub fn log2_complement_measure<T: Real>(p: &Distribution<T>, spec: &TypicalSetSpec<T>) -> Result<T> {
    if p.alphabet_size() != spec.alphabet_size() {
        return Err(Error::DimensionMismatch {
            expected: spec.alphabet_size(),
            actual: p.alphabet_size(),
        });
    }
    let table = LogFactorials::new(spec.n);
    let terms = enumerate_types(spec.n, spec.alphabet_size())
        .into_iter()
        .filter(|t| !spec.contains(t))
        .map(|t| table.log2_prob_of_type_class(p, &t))
        .collect::<Result<Vec<_>>>()?;
    Ok(log2_sum_exp2(terms).min(T::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(v: &[f64]) -> Distribution<f64> {
        Distribution::new(v.to_vec()).unwrap()
    }

    fn binom(n: u64, k: u64) -> f64 {
        (1..=k).fold(1.0, |acc, i| acc * (n - k + i) as f64 / i as f64)
    }

    #[test]
    fn reference_in_family_contains_its_central_type() {
        let q = d(&[0.25, 0.75]);
        let spec = build_typical_sets(std::slice::from_ref(&q), &q, 8, 0.01).unwrap();
        assert!(spec.contains(&TypeVector::new(vec![2, 6])));
        let central = super::super::log_prob_of_type_class(&q, &TypeVector::new(vec![2, 6])).unwrap();
        assert!(measure_of_typical_set(&q, &spec).unwrap() >= central.exp2() - 1e-15);
    }

    #[test]
    fn singular_family_uses_null_component_only() {
        let spec = build_typical_sets(&[d(&[1.0, 0.0])], &d(&[0.0, 1.0]), 3, 0.5).unwrap();
        assert!(spec.member_types().is_empty());
        let null: Vec<_> = spec.null_types().iter().map(|t| t.counts().to_vec()).collect();
        assert_eq!(null, vec![vec![3, 0]]);
        assert_eq!(measure_of_typical_set(&d(&[0.0, 1.0]), &spec).unwrap(), 0.0);
        assert_eq!(measure_of_typical_set(&d(&[1.0, 0.0]), &spec).unwrap(), 1.0);
    }

    #[test]
    fn null_component_with_full_support_member() {
        // Omega_2 member charges everything; every word touching letter 2 is in M_2.
        let q = d(&[0.5, 0.5, 0.0]);
        let spec = build_typical_sets(&[d(&[0.2, 0.3, 0.5])], &q, 3, 0.1).unwrap();
        assert!(spec.member_types().is_empty());
        assert!(spec.null_types().iter().all(|t| t.counts()[2] > 0));
        assert_eq!(spec.null_types().len(), 10 - 4);
        assert_eq!(measure_of_typical_set(&q, &spec).unwrap(), 0.0);
        let p = d(&[0.2, 0.3, 0.5]);
        let got = measure_of_typical_set(&p, &spec).unwrap();
        assert!((got - (1.0 - 0.5f64.powi(3))).abs() < 1e-14);
    }

    #[test]
    fn bernoulli_l1_ball() {
        // ||(1-k/8, k/8) - (0.25, 0.75)||_1 = 2|k/8 - 0.75| <= 0.25  <=>  k in {5, 6, 7}
        let p = Distribution::bernoulli(0.75).unwrap();
        let spec = build_typical_sets(std::slice::from_ref(&p), &d(&[0.5, 0.5]), 8, 0.25).unwrap();
        let ks: Vec<_> = spec.member_types().iter().map(|t| t.counts()[1]).collect();
        assert_eq!(ks, vec![5, 6, 7]);
        let expected: f64 = (5..=7)
            .map(|k| binom(8, k) * 0.75f64.powi(k as i32) * 0.25f64.powi(8 - k as i32))
            .sum();
        assert!((measure_of_typical_set(&p, &spec).unwrap() - expected).abs() < 1e-14);
        let log_c = log2_complement_measure(&p, &spec).unwrap();
        assert!((log_c.exp2() - (1.0 - expected)).abs() < 1e-14);
    }

    #[test]
    fn large_eps_covers_everything() {
        let q = d(&[0.3, 0.7]);
        let spec = build_typical_sets(std::slice::from_ref(&q), &q, 12, 2.0).unwrap();
        assert_eq!(spec.member_types().len(), 13);
        assert!((measure_of_typical_set(&q, &spec).unwrap() - 1.0).abs() < 1e-14);
        assert!((spec.log2_word_count() - 12.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let q = d(&[0.5, 0.5]);
        assert!(build_typical_sets(std::slice::from_ref(&q), &q, 4, 0.0).is_err());
        assert!(build_typical_sets::<f64>(&[], &q, 4, 0.1).is_err());
        let spec = build_typical_sets(std::slice::from_ref(&q), &q, 4, 0.1).unwrap();
        assert!(measure_of_typical_set(&d(&[0.2, 0.3, 0.5]), &spec).is_err());
    }
}
