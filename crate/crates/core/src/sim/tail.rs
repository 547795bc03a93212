//! Empirical supremum tails and their comparison with bounds.

use serde::Serialize;
use statrs::function::beta::inv_beta_reg;

use crate::curve::{check_u_grid, TailCurve, TailPoint};
use crate::error::{Error, Result};

/// Two-sided confidence level of the empirical intervals.
pub const CONFIDENCE: f64 = 0.99;

/// Clopper–Pearson interval for `k` successes out of `n` at level `level`.
pub fn clopper_pearson(k: usize, n: usize, level: f64) -> Result<(f64, f64)> {
    if n == 0 || k > n {
        return Err(Error::param("n", format!("need 0 <= k <= n and n > 0, got k = {k}, n = {n}")));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::param("level", format!("must lie in (0, 1), got {level}")));
    }
    let a = 1.0 - level;
    let (kf, nf) = (k as f64, n as f64);
    let lo = if k == 0 { 0.0 } else { inv_beta_reg(kf, nf - kf + 1.0, a / 2.0) };
    let hi = if k == n { 1.0 } else { inv_beta_reg(kf + 1.0, nf - kf, 1.0 - a / 2.0) };
    Ok((lo, hi))
}

/// Fraction of `sups` exceeding each `u`, with 99% Clopper–Pearson intervals.
pub fn empirical_sup_tail(sups: &[f64], u_grid: &[f64]) -> Result<TailCurve> {
    check_u_grid(u_grid)?;
    if sups.is_empty() {
        return Err(Error::param("samples", "need at least one realization"));
    }
    let mut sorted = sups.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let points = u_grid
        .iter()
        .map(|&u| {
            let k = n - sorted.partition_point(|&s| s <= u);
            let (lo, hi) = clopper_pearson(k, n, CONFIDENCE)?;
            Ok(TailPoint {
                u,
                value: Some(k as f64 / n as f64),
                ci_low: Some(lo),
                ci_high: Some(hi),
                samples: Some(n),
                theta: None,
            })
        })
        .collect::<Result<_>>()?;
    TailCurve::new(points)
}

/// As [`empirical_sup_tail`] from whole realizations.
pub fn empirical_sup_tail_fields(realizations: &[Vec<f64>], u_grid: &[f64]) -> Result<TailCurve> {
    let sups: Vec<f64> = realizations.iter().map(|x| x.iter().fold(0.0f64, |m, v| m.max(v.abs()))).collect();
    empirical_sup_tail(&sups, u_grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    /// No bound at this level (below the validity threshold).
    NotAsserted,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::NotAsserted => "NOT_ASSERTED",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyRow {
    pub u: f64,
    pub empirical: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub bound: Option<f64>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub rows: Vec<VerifyRow>,
    pub passed: usize,
    pub failed: usize,
    pub not_asserted: usize,
    pub note: &'static str,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    pub fn violations(&self) -> impl Iterator<Item = &VerifyRow> {
        self.rows.iter().filter(|r| r.verdict == Verdict::Fail)
    }
}

const GRID_NOTE: &str = "the grid maximum underestimates the supremum over the box, so PASS is necessary-condition evidence only";

/// `PASS` iff the lower confidence limit does not exceed the bound.
pub fn verify_bound(empirical: &TailCurve, theoretical: &TailCurve) -> Result<VerificationReport> {
    if empirical.len() != theoretical.len() {
        return Err(Error::GridMismatch(format!(
            "{} empirical levels vs {} theoretical levels",
            empirical.len(),
            theoretical.len()
        )));
    }
    let mut rows = Vec::with_capacity(empirical.len());
    for (e, t) in empirical.points.iter().zip(&theoretical.points) {
        if (e.u - t.u).abs() > 1e-12 * e.u.abs().max(1.0) {
            return Err(Error::GridMismatch(format!("level {} vs {}", e.u, t.u)));
        }
        let value = e.value.ok_or_else(|| Error::param("empirical", format!("no value at u = {}", e.u)))?;
        let ci_lo = e.ci_low.unwrap_or(value);
        let verdict = match t.value {
            None => Verdict::NotAsserted,
            Some(b) if ci_lo <= b => Verdict::Pass,
            Some(_) => Verdict::Fail,
        };
        rows.push(VerifyRow {
            u: e.u,
            empirical: value,
            ci_lo,
            ci_hi: e.ci_high.unwrap_or(value),
            bound: t.value,
            verdict,
        });
    }
    let count = |v| rows.iter().filter(|r| r.verdict == v).count();
    Ok(VerificationReport {
        passed: count(Verdict::Pass),
        failed: count(Verdict::Fail),
        not_asserted: count(Verdict::NotAsserted),
        rows,
        note: GRID_NOTE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clopper_pearson_reference() {
        // scipy.stats.beta.ppf
        let (lo, hi) = clopper_pearson(3, 100, 0.99).unwrap();
        assert!((lo - 0.003_407_070_103_179_756_7).abs() < 1e-10, "{lo}");
        assert!((hi - 0.105_481_253_725_078_24).abs() < 1e-10, "{hi}");
        let (lo, hi) = clopper_pearson(0, 1000, 0.99).unwrap();
        assert_eq!(lo, 0.0);
        assert!((hi - 0.005_284_306_039_497_442_5).abs() < 1e-10, "{hi}");
        let (lo, hi) = clopper_pearson(50, 50, 0.99).unwrap();
        assert_eq!(hi, 1.0);
        assert!((lo - 0.899_454_916_625_237_4).abs() < 1e-10, "{lo}");
        assert!(clopper_pearson(5, 4, 0.99).is_err());
    }

    #[test]
    fn empirical_tail_shape() {
        let sups = [0.5, 1.0, 1.5, 2.0];
        let c = empirical_sup_tail(&sups, &[0.0, 1.0, 1.7, 3.0]).unwrap();
        let v: Vec<f64> = c.points.iter().map(|p| p.value.unwrap()).collect();
        assert_eq!(v, vec![1.0, 0.5, 0.25, 0.0]);
        assert!(c.points.windows(2).all(|w| w[1].value <= w[0].value));
        for p in &c.points {
            assert!(p.ci_low.unwrap() <= p.value.unwrap() && p.value.unwrap() <= p.ci_high.unwrap());
        }
    }

    fn bound_curve(us: &[f64], f: impl Fn(f64) -> Option<f64>) -> TailCurve {
        TailCurve::new(us.iter().map(|&u| TailPoint::bound(u, f(u), None)).collect()).unwrap()
    }

    #[test]
    fn verdicts() {
        let us = [0.5, 1.0, 2.0, 3.0];
        // heavy-tailed synthetic sample: P{X > u} = 1 / (1 + u)
        let sups: Vec<f64> = (1..10_000).map(|i| 10_000.0 / i as f64 - 1.0).collect();
        let emp = empirical_sup_tail(&sups, &us).unwrap();
        let trivial = verify_bound(&emp, &bound_curve(&us, |_| Some(1.0))).unwrap();
        assert!(trivial.all_pass() && trivial.passed == 4);
        let zero = empirical_sup_tail(&[0.1, 0.2], &us).unwrap();
        assert!(verify_bound(&zero, &bound_curve(&us, |u| Some((-u * u).exp()))).unwrap().all_pass());
        let halved = verify_bound(&emp, &bound_curve(&us, |u| Some(0.5 / (1.0 + u)))).unwrap();
        assert_eq!(halved.failed, 4);
        assert_eq!(halved.violations().count(), 4);
        let partial = verify_bound(&emp, &bound_curve(&us, |u| if u < 1.5 { None } else { Some(1.0) })).unwrap();
        assert_eq!((partial.not_asserted, partial.passed), (2, 2));
        assert!(matches!(verify_bound(&emp, &bound_curve(&[1.0], |_| Some(1.0))), Err(Error::GridMismatch(_))));
    }
}
