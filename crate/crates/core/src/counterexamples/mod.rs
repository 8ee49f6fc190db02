//! The two counterexamples: empirical-state typical projections have a
//! bounded rate even at infinite relative entropy, and no separating
//! projection works uniformly over a continuum of pure reference states.

use crate::error::{Error, Result};
use crate::quantum::linalg::{cabs, CVector};
use crate::quantum::DensityOperator;
use crate::scalar::{cplx, Real};
use nalgebra::DMatrix;

/// `phi_delta^{⊗n}(p_w^{⊗n})` and the rate it allows.
#[derive(Debug, Clone, Copy)]
pub struct EmpiricalRate<T> {
    /// `(delta + (1 - delta) |<v,w>|^2)^n`.
    pub value: T,
    /// `-(1/n) log2 value`.
    pub rate: T,
    /// `-log2 |<v,w>|^2`.
    pub ceiling: T,
}

pub fn example1_empirical_rate<T: Real>(overlap_sq: T, delta: T, n: usize) -> Result<EmpiricalRate<T>> {
    if !(overlap_sq > T::zero() && overlap_sq < T::one()) {
        return Err(Error::InvalidParameter(format!("squared overlap must lie in (0,1), got {overlap_sq}")));
    }
    if !(delta >= T::zero() && delta <= T::one()) {
        return Err(Error::InvalidParameter(format!("delta must lie in [0,1], got {delta}")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    let base = delta + (T::one() - delta) * overlap_sq;
    let value = base.powi(n as i32);
    Ok(EmpiricalRate { value, rate: -base.log2(), ceiling: -overlap_sq.log2() })
}

/// `psi = |w><w|` and `phi_delta = (1 - delta)|v><v| + delta |w><w|`.
pub fn example1_states<T: Real>(
    v: &CVector<T>,
    w: &CVector<T>,
    delta: T,
) -> Result<(DensityOperator<T>, DensityOperator<T>)> {
    check_unit(v)?;
    check_unit(w)?;
    let pv = v * v.adjoint();
    let pw = w * w.adjoint();
    let phi = DensityOperator::new(pv * cplx(T::one() - delta) + &pw * cplx(delta))?;
    Ok((DensityOperator::new(pw)?, phi))
}

fn check_unit<T: Real>(v: &CVector<T>) -> Result<()> {
    let norm = v.norm();
    if (norm - T::one()).abs() > T::tol(1e-12, 64.0) {
        return Err(Error::InvalidParameter(format!("expected a unit vector, norm is {norm}")));
    }
    Ok(())
}

/// Expectations of the projection onto the orthocomplement of `v^{⊗n}`.
#[derive(Debug, Clone, Copy)]
pub struct Orthocomplement<T> {
    /// `phi^{⊗n}` for `phi = |v><v|`: always zero.
    pub phi_val: T,
    /// `psi^{⊗n}` for `psi = |w><w|`: `1 - |<v,w>|^{2n}`.
    pub psi_val: T,
}

pub fn example1_orthocomplement<T: Real>(v: &CVector<T>, w: &CVector<T>, n: usize) -> Result<Orthocomplement<T>> {
    check_unit(v)?;
    check_unit(w)?;
    if v.len() != w.len() {
        return Err(Error::DimensionMismatch { expected: v.len(), actual: w.len() });
    }
    let overlap_sq = cabs(v.dotc(w)).powi(2);
    Ok(Orthocomplement { phi_val: T::zero(), psi_val: T::one() - overlap_sq.powi(n as i32) })
}

/// Coordinates of `v_t^{⊗n}`, `v_t = cos t v + sin t w`, in the orthonormal
/// basis of the symmetric subspace indexed by the number of `w` factors.
#[derive(Debug, Clone)]
pub struct SymBasisCoeffs<T> {
    pub n: usize,
    pub t: T,
    pub coeffs: Vec<T>,
}

pub fn sym_basis_coeffs<T: Real>(n: usize, t: T) -> Result<SymBasisCoeffs<T>> {
    if !(t.abs() < T::frac_pi_2()) {
        return Err(Error::InvalidParameter(format!("angle must satisfy |t| < pi/2, got {t}")));
    }
    let (s, c) = (t.sin(), t.cos());
    let coeffs = (0..=n)
        .map(|k| binomial::<T>(n, k).sqrt() * s.powi(k as i32) * c.powi((n - k) as i32))
        .collect();
    Ok(SymBasisCoeffs { n, t, coeffs })
}

fn binomial<T: Real>(n: usize, k: usize) -> T {
    let k = k.min(n - k);
    (0..k).fold(T::one(), |acc, i| acc * T::from_count(n - i) / T::from_count(i + 1))
}

/// Smallest singular value of the Vandermonde matrix on the nodes `1 - 2m/n`.
#[derive(Debug, Clone, Copy)]
pub struct VandermondeSigma<T> {
    pub n: usize,
    pub sigma_min: T,
    /// `ln(sigma_min) / n`, in nats.
    pub per_n_log_nat: T,
}

/// Largest `n` accepted by [`vandermonde_sigma_min`].
pub const MAX_VANDERMONDE_N: usize = 25;

/// Asymptotic decay constant `pi/4 + ln(2)/2` of the least singular value,
/// in nats.
pub fn vandermonde_decay_constant<T: Real>() -> T {
    T::frac_pi_4() + T::ln_2() / T::lit(2.0)
}

pub fn vandermonde_matrix<T: Real>(n: usize) -> DMatrix<T> {
    let nf = T::from_count(n);
    DMatrix::from_fn(n + 1, n + 1, |m, k| {
        let x = T::one() - T::lit(2.0) * T::from_count(m) / nf;
        x.powi(k as i32)
    })
}

pub fn vandermonde_sigma_min<T: Real>(n: usize) -> Result<VandermondeSigma<T>> {
    if n.is_multiple_of(2) || n > MAX_VANDERMONDE_N {
        return Err(Error::InvalidParameter(format!("n must be odd in [1, {MAX_VANDERMONDE_N}], got {n}")));
    }
    let svd = vandermonde_matrix::<T>(n).svd(false, false);
    let sigma_min = svd.singular_values.iter().copied().fold(T::infinity(), |a, b| a.min(b));
    Ok(VandermondeSigma { n, sigma_min, per_n_log_nat: sigma_min.ln() / T::from_count(n) })
}

/// Least-squares slope of `ln sigma_min(V_n)` against `n`.
pub fn vandermonde_log_slope<T: Real>(ns: &[usize]) -> Result<T> {
    if ns.len() < 2 {
        return Err(Error::InvalidParameter("need at least two sizes for a slope".into()));
    }
    let points = ns
        .iter()
        .map(|&n| vandermonde_sigma_min::<T>(n).map(|s| (T::from_count(n), s.sigma_min.ln())))
        .collect::<Result<Vec<_>>>()?;
    Ok(least_squares_slope(&points))
}

pub(crate) fn least_squares_slope<T: Real>(points: &[(T, T)]) -> T {
    let m = T::from_count(points.len());
    let (sx, sy) = points.iter().fold((T::zero(), T::zero()), |(a, b), &(x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (num, den) = points
        .iter()
        .fold((T::zero(), T::zero()), |(a, b), &(x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    num / den
}

/// Overlap of a candidate vector in the symmetric subspace with the
/// reference directions `t_m = arctan((1 - 2m/n) tan T)`.
#[derive(Debug, Clone, Copy)]
pub struct OverlapFloor<T> {
    /// `max_m |<x, coeffs(t_m)>|`.
    pub max_overlap: T,
    /// `(cos T)^n min_k(sqrt(C(n,k)) tan^k T) sigma_min(V_n) / sqrt(n+1)`,
    /// a lower bound on `max_overlap` valid for every unit `x`.
    pub certified_floor: T,
}

/// The directions `t_m`, `m = 0..n`.
pub fn example2_angles<T: Real>(n: usize, big_t: T) -> Vec<T> {
    let nf = T::from_count(n);
    (0..=n)
        .map(|m| ((T::one() - T::lit(2.0) * T::from_count(m) / nf) * big_t.tan()).atan())
        .collect()
}

/// The certified floor alone; it does not depend on `x`.
pub fn example2_certified_floor<T: Real>(n: usize, big_t: T) -> Result<T> {
    if !(big_t > T::zero() && big_t < T::frac_pi_2()) {
        return Err(Error::InvalidParameter(format!("T must lie in (0, pi/2), got {big_t}")));
    }
    let sigma = vandermonde_sigma_min::<T>(n)?.sigma_min;
    let tan = big_t.tan();
    let rescale = (0..=n)
        .map(|k| binomial::<T>(n, k).sqrt() * tan.powi(k as i32))
        .fold(T::infinity(), |a, b| a.min(b));
    Ok(big_t.cos().powi(n as i32) * rescale * sigma / T::from_count(n + 1).sqrt())
}

pub fn example2_uniform_overlap_floor<T: Real>(n: usize, big_t: T, x: &[T]) -> Result<OverlapFloor<T>> {
    if x.len() != n + 1 {
        return Err(Error::DimensionMismatch { expected: n + 1, actual: x.len() });
    }
    let norm = x.iter().fold(T::zero(), |a, &b| a + b * b).sqrt();
    if (norm - T::one()).abs() > T::tol(1e-12, 64.0) {
        return Err(Error::InvalidParameter(format!("x must be a unit vector, norm is {norm}")));
    }
    let certified_floor = example2_certified_floor(n, big_t)?;
    let mut max_overlap = T::zero();
    for t in example2_angles(n, big_t) {
        let c = sym_basis_coeffs(n, t)?;
        let ip = c.coeffs.iter().zip(x).fold(T::zero(), |a, (&u, &v)| a + u * v).abs();
        max_overlap = max_overlap.max(ip);
    }
    Ok(OverlapFloor { max_overlap, certified_floor })
}

/// Large-`n` limit of `ln(floor)/n`: `ln cos T + min(0, ln tan T) - (pi/4 + ln(2)/2)`.
pub fn example2_floor_rate<T: Real>(big_t: T) -> T {
    big_t.cos().ln() + big_t.tan().ln().min(T::zero()) - vandermonde_decay_constant::<T>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empirical_rate_closed_form() {
        let r = example1_empirical_rate(0.5f64, 0.0, 10).unwrap();
        assert!((r.value - 2f64.powi(-10)).abs() < 1e-18);
        assert!((r.ceiling - 1.0).abs() < 1e-15);
        let one = example1_empirical_rate(0.3f64, 1.0, 7).unwrap();
        assert_eq!(one.value, 1.0);
        assert_eq!(one.rate, 0.0);
    }

    #[test]
    fn orthocomplement_values() {
        let v = CVector::from_vec(vec![cplx(1.0f64), cplx(0.0)]);
        let w = CVector::from_vec(vec![cplx(0.5f64.sqrt()), cplx(0.5f64.sqrt())]);
        let o = example1_orthocomplement(&v, &w, 4).unwrap();
        assert_eq!(o.phi_val, 0.0);
        assert!((o.psi_val - 0.9375).abs() < 1e-15);
        let perp = CVector::from_vec(vec![cplx(0.0f64), cplx(1.0)]);
        assert_eq!(example1_orthocomplement(&v, &perp, 3).unwrap().psi_val, 1.0);
        let bad = CVector::from_vec(vec![cplx(1.0f64), cplx(1.0)]);
        assert!(example1_orthocomplement(&v, &bad, 3).is_err());
    }

    #[test]
    fn sym_coeffs_small_cases() {
        let c = sym_basis_coeffs(5, 0.0f64).unwrap();
        assert_eq!(c.coeffs, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let d = sym_basis_coeffs(1, std::f64::consts::FRAC_PI_4).unwrap();
        assert!((d.coeffs[0] - 0.5f64.sqrt()).abs() < 1e-15 && (d.coeffs[1] - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(sym_basis_coeffs(3, 2.0f64).is_err());
    }

    #[test]
    fn vandermonde_values() {
        let v1 = vandermonde_sigma_min::<f64>(1).unwrap();
        assert!((v1.sigma_min - 2f64.sqrt()).abs() < 1e-14);
        // Reference values from an independent high-precision SVD.
        let v15 = vandermonde_sigma_min::<f64>(15).unwrap();
        assert!((v15.sigma_min / 1.54293e-6 - 1.0).abs() < 1e-4);
        assert!((v15.per_n_log_nat + 0.89212).abs() < 1e-4);
        assert!(vandermonde_sigma_min::<f64>(4).is_err());
        assert!(vandermonde_sigma_min::<f64>(27).is_err());
    }

    #[test]
    fn floor_for_own_direction() {
        let n = 7;
        let t = 0.4f64;
        let x = sym_basis_coeffs(n, example2_angles(n, t)[0]).unwrap().coeffs;
        let f = example2_uniform_overlap_floor(n, t, &x).unwrap();
        assert!((f.max_overlap - 1.0).abs() < 1e-12);
        assert!(f.certified_floor > 0.0 && f.certified_floor <= f.max_overlap);
    }
}
