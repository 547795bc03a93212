//! Summation of positive series with a tail certificate.
//!
//! Terms are added with Neumaier compensation. After each term the last
//! window of terms is tested against two tail models:
//!
//! * geometric: ratios `a_j / a_{j−1}` nonincreasing and below one, so the
//!   tail is at most `a_K r / (1 − r)`;
//! * algebraic: local exponents `p_j = ln(a_{j−1}/a_j) / ln(j/(j−1))` above
//!   one, so the tail lies between the integrals of `a_K (K/x)^p` over
//!   `[K+1, ∞)` and `[K, ∞)`, widened by the exponent drift across the window
//!   and by the change in the extrapolated sum since index `K/2`.
//!
//! Both are heuristics on the observed terms, not proofs about the tail.

use crate::error::{Error, Result};
use crate::scalar::Real;

const WINDOW: usize = 8;
const MIN_TERMS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSettings<T> {
    /// Admissible half-width of the enclosure of the sum.
    pub tol: T,
    pub max_terms: usize,
    /// Terms after which the non-decay check starts.
    pub divergence_after: usize,
    /// Lag of the non-decay check: `a_k ≥ a_{k−lag}` is reported as divergence.
    pub divergence_lag: usize,
}

impl<T: Real> Default for SeriesSettings<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-10).max(T::epsilon() * T::lit(64.0)),
            max_terms: 1_000_000,
            divergence_after: 1000,
            divergence_lag: 500,
        }
    }
}

impl<T: Real> SeriesSettings<T> {
    pub fn with_tol(mut self, tol: T) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_terms(mut self, n: usize) -> Self {
        self.max_terms = n;
        self
    }
}

/// Tail model used to close the sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certificate {
    Geometric,
    PowerLaw,
    /// The terms underflowed to zero.
    Vanished,
}

impl Certificate {
    pub fn as_str(&self) -> &'static str {
        match self {
            Certificate::Geometric => "geometric",
            Certificate::PowerLaw => "power-law",
            Certificate::Vanished => "vanished",
        }
    }
}

/// `value ± half_width` encloses the sum under the certificate's tail model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum<T> {
    pub value: T,
    pub half_width: T,
    pub partial: T,
    pub terms: usize,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, Copy, Default)]
struct Neumaier<T> {
    sum: T,
    carry: T,
}

impl<T: Real> Neumaier<T> {
    fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry = self.carry + ((self.sum - t) + x);
        } else {
            self.carry = self.carry + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    fn total(&self) -> T {
        self.sum + self.carry
    }
}

/// Sums `Σ_{k≥0} term(k)` for nonnegative terms.
pub fn sum_series<T: Real, F: FnMut(usize) -> Result<T>>(mut term: F, settings: &SeriesSettings<T>) -> Result<SeriesSum<T>> {
    let mut acc = Neumaier { sum: T::zero(), carry: T::zero() };
    let mut terms: Vec<T> = Vec::new();
    // extrapolated sums under the power-law model, NaN where it did not apply
    let mut extrapolated: Vec<T> = Vec::new();
    for k in 0..settings.max_terms {
        let a = term(k)?;
        if !(a >= T::zero() && a.is_finite()) {
            return Err(Error::SeriesDivergence {
                terms: k,
                partial: acc.total().as_f64(),
                reason: format!("term {k} is not a finite nonnegative number ({a})"),
            });
        }
        acc.add(a);
        terms.push(a);
        let n = terms.len();

        if k >= settings.divergence_after && k >= settings.divergence_lag && a > T::zero() && a >= terms[k - settings.divergence_lag] {
            return Err(Error::SeriesDivergence {
                terms: n,
                partial: acc.total().as_f64(),
                reason: format!("terms stopped decreasing: a_{k} >= a_{}", k - settings.divergence_lag),
            });
        }
        if n < MIN_TERMS {
            extrapolated.push(T::nan());
            continue;
        }
        let partial = acc.total();
        let window = &terms[n - WINDOW - 1..];
        let done = |value: T, half_width: T, certificate| SeriesSum {
            value: partial + value,
            half_width,
            partial,
            terms: n,
            certificate,
        };
        if let Some((tail, half, cert)) = geometric_tail(window, settings.tol) {
            return Ok(done(tail, half, cert));
        }
        match power_tail(window, k) {
            Some((tail, half)) => {
                let estimate = partial + tail;
                extrapolated.push(estimate);
                let earlier = extrapolated[k / 2];
                if earlier.is_nan() {
                    continue;
                }
                let half = half + (estimate - earlier).abs();
                if half <= settings.tol {
                    return Ok(done(tail, half, Certificate::PowerLaw));
                }
            }
            None => extrapolated.push(T::nan()),
        }
    }
    Err(Error::SeriesDivergence {
        terms: settings.max_terms,
        partial: acc.total().as_f64(),
        reason: "no tail certificate within the term limit".into(),
    })
}

/// Geometric tail from the last `WINDOW + 1` terms, if certified within `tol`.
fn geometric_tail<T: Real>(window: &[T], tol: T) -> Option<(T, T, Certificate)> {
    let last = *window.last()?;
    if window.iter().all(|&a| a == T::zero()) {
        return Some((T::zero(), T::zero(), Certificate::Vanished));
    }
    if window.iter().any(|&a| a == T::zero()) {
        return None;
    }
    let ratios: Vec<T> = window.windows(2).map(|w| w[1] / w[0]).collect();
    let slack = T::one() + T::lit(1e-12);
    let nonincreasing = ratios.windows(2).all(|r| r[1] <= r[0] * slack);
    let r = ratios[ratios.len() - 1].max(ratios[ratios.len() - 2]);
    if !(nonincreasing && r < T::one()) {
        return None;
    }
    let half = T::lit(0.5) * last * r / (T::one() - r);
    (half <= tol).then_some((half, half, Certificate::Geometric))
}

/// Power-law tail estimate and model half-width for the window ending at index `k`.
fn power_tail<T: Real>(window: &[T], k: usize) -> Option<(T, T)> {
    let last = *window.last()?;
    let first_index = (k + 1).checked_sub(window.len())?;
    if first_index == 0 || window.iter().any(|&a| !(a > T::zero())) {
        return None;
    }
    let mut p_min = T::infinity();
    let mut p_max = T::neg_infinity();
    let mut p = T::nan();
    for (i, w) in window.windows(2).enumerate() {
        let j = T::from_usize_lossy(first_index + i + 1);
        p = (w[0] / w[1]).ln() / (j / (j - T::one())).ln();
        p_min = p_min.min(p);
        p_max = p_max.max(p);
    }
    if !(p_min > T::one()) || !p_max.is_finite() {
        return None;
    }
    let kk = T::from_usize_lossy(k);
    let pm1 = p - T::one();
    let lo = last * (kk / (kk + T::one())).powf(p) * (kk + T::one()) / pm1;
    let hi = last * kk / pm1;
    let half = T::lit(0.5) * (hi - lo) + last * kk * (p_max - p_min) / (pm1 * pm1);
    Some((T::lit(0.5) * (lo + hi), half))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn geometric_series() {
        let s = sum_series(|k| Ok(0.5f64.powi(k as i32)), &SeriesSettings::default()).unwrap();
        assert_eq!(s.certificate, Certificate::Geometric);
        assert!((s.value - 2.0).abs() <= s.half_width + 1e-15);
        assert!((s.value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn basel_series() {
        let set = SeriesSettings::default().with_tol(1e-9);
        let s = sum_series(|k| Ok(1.0 / ((k + 1) as f64).powi(2)), &set).unwrap();
        assert_eq!(s.certificate, Certificate::PowerLaw);
        assert!((s.value - PI * PI / 6.0).abs() <= s.half_width.max(1e-12), "{s:?}");
        assert!((s.value - PI * PI / 6.0).abs() < 1e-9);
    }

    #[test]
    fn slowly_converging_power() {
        // ζ(1.5) = 2.612375348685488
        let set = SeriesSettings::default().with_tol(1e-7);
        let s = sum_series(|k| Ok(((k + 1) as f64).powf(-1.5)), &set).unwrap();
        assert!((s.value - 2.612_375_348_685_488).abs() < 1e-7, "{s:?}");
    }

    #[test]
    fn harmonic_series_fails() {
        let err = sum_series(|k| Ok(1.0 / (k + 1) as f64), &SeriesSettings::default().with_max_terms(200_000)).unwrap_err();
        assert!(matches!(err, Error::SeriesDivergence { .. }));
    }

    #[test]
    fn growing_terms_fail_early() {
        let err = sum_series(|k| Ok(k as f64), &SeriesSettings::default()).unwrap_err();
        match err {
            Error::SeriesDivergence { terms, .. } => assert!(terms <= 1001),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn non_finite_term_fails() {
        assert!(sum_series(|k| Ok(if k == 3 { f64::NAN } else { 1.0 }), &SeriesSettings::default()).is_err());
    }

    #[test]
    fn finite_support() {
        let s = sum_series(|k| Ok(if k < 5 { 1.0 } else { 0.0 }), &SeriesSettings::default()).unwrap();
        assert_eq!(s.value, 5.0);
        assert_eq!(s.certificate, Certificate::Vanished);
    }

    #[test]
    fn compensated_sum_is_accurate() {
        // 1 followed by many tiny terms that naive summation would drop
        let s = sum_series(
            |k| Ok(if k == 0 { 1.0 } else { 1e-17 * 0.999f64.powi(k as i32) }),
            &SeriesSettings::default().with_tol(1e-30),
        )
        .unwrap();
        let expect = 1.0 + 1e-17 * 0.999 / 0.001;
        assert!((s.value - expect).abs() < 1e-16);
    }
}
