use crate::error::{Error, Result};
use crate::scalar::Real;

/// Radius schedule `eps_n = scale * n^exponent`.
///
/// Typicality needs `eps_n -> 0` and `log(n+1) / (n eps_n^2) -> 0`, which for
/// a power law means `-1/2 < exponent < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsSchedule<T> {
    scale: T,
    exponent: T,
}

impl<T: Real> EpsSchedule<T> {
    pub fn power(scale: T, exponent: T) -> Result<Self> {
        if !(scale > T::zero()) || !scale.is_finite() {
            return Err(Error::InvalidSchedule(format!("scale must be positive, got {scale}")));
        }
        if !(exponent < T::zero() && exponent > T::lit(-0.5)) {
            return Err(Error::InvalidSchedule(format!(
                "exponent must lie in (-1/2, 0) so that eps_n -> 0 and log(n+1)/(n eps_n^2) -> 0, got {exponent}"
            )));
        }
        Ok(Self { scale, exponent })
    }

    /// `n^{-1/3}`.
    pub fn cube_root() -> Self {
        Self { scale: T::one(), exponent: T::lit(-1.0 / 3.0) }
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn exponent(&self) -> T {
        self.exponent
    }

    pub fn eps(&self, n: usize) -> T {
        self.scale * T::from_count(n.max(1)).powf(self.exponent)
    }
}

impl<T: Real> Default for EpsSchedule<T> {
    fn default() -> Self {
        Self::cube_root()
    }
}

/// Block lengths must be positive and strictly increasing.
pub fn validate_n_list(n_list: &[usize]) -> Result<()> {
    if n_list.is_empty() {
        return Err(Error::InvalidParameter("n_list is empty".into()));
    }
    if n_list[0] == 0 {
        return Err(Error::InvalidParameter("block lengths must be positive".into()));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("n_list must be strictly increasing".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_root_values() {
        let s = EpsSchedule::<f64>::cube_root();
        assert_eq!(s.eps(1), 1.0);
        assert!((s.eps(8) - 0.5).abs() < 1e-15);
        assert!((s.eps(1000) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn rejects_schedules_that_break_typicality() {
        assert!(EpsSchedule::power(1.0, -0.5).is_err());
        assert!(EpsSchedule::power(1.0, 0.0).is_err());
        assert!(EpsSchedule::power(-1.0, -0.3).is_err());
        assert!(EpsSchedule::power(0.5, -0.25).is_ok());
    }

    #[test]
    fn n_list_validation() {
        assert!(validate_n_list(&[]).is_err());
        assert!(validate_n_list(&[0, 1]).is_err());
        assert!(validate_n_list(&[3, 3]).is_err());
        assert!(validate_n_list(&[1, 2, 10]).is_ok());
    }
}
