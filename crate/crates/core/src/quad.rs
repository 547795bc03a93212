//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Intervals are bisected in order of decreasing error estimate until the
//! summed estimate meets `max(abs_tol, rel_tol * |value|)`. Integrable
//! endpoint singularities are handled by repeated bisection towards the
//! offending endpoint since the rule never samples the endpoints themselves.

use crate::error::{Error, Result};
use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and work limit for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_intervals: usize,
}

impl<T: Real> QuadConfig<T> {
    pub fn new(abs_tol: T) -> Self {
        Self {
            abs_tol,
            rel_tol: T::zero(),
            max_intervals: 4000,
        }
    }

    pub fn with_rel_tol(mut self, rel_tol: T) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_max_intervals(mut self, n: usize) -> Self {
        self.max_intervals = n;
        self
    }
}

impl<T: Real> Default for QuadConfig<T> {
    fn default() -> Self {
        Self::new(T::lit(1e-8))
    }
}

/// Result of a converged quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub abs_error: T,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
    abs: T,
    frozen: bool,
}

fn kronrod15<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T, T) {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let abs_half = half_len.abs();

    let fc = f(center);
    let mut res_g = fc * T::lit(WG[3]);
    let mut res_k = fc * T::lit(WGK[7]);
    let mut res_abs = res_k.abs();
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];

    for j in 0..7 {
        let dx = half_len * T::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        let w = T::lit(WGK[j]);
        res_k = res_k + w * (f1 + f2);
        res_abs = res_abs + w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }

    let mean = res_k * half;
    let mut res_asc = T::lit(WGK[7]) * (fc - mean).abs();
    for j in 0..7 {
        res_asc = res_asc + T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_k * half_len;
    let res_abs = res_abs * abs_half;
    let res_asc = res_asc * abs_half;
    let mut err = ((res_k - res_g) * half_len).abs();
    if res_asc != T::zero() && err != T::zero() {
        let scale = (T::lit(200.0) * err / res_asc).powf(T::lit(1.5));
        err = res_asc * scale.min(T::one());
    }
    let round = T::lit(50.0) * T::epsilon() * res_abs;
    if res_abs > T::min_positive_value() / (T::lit(50.0) * T::epsilon()) {
        err = err.max(round);
    }
    (value, err, res_abs)
}

/// Integrates `f` over `[a, b]` (finite endpoints).
pub fn integrate<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, cfg: &QuadConfig<T>) -> Result<Estimate<T>> {
    if a == b {
        return Ok(Estimate {
            value: T::zero(),
            abs_error: T::zero(),
            intervals: 0,
        });
    }
    let (v, e, r) = kronrod15(&f, a, b);
    let mut segs = vec![Segment {
        a,
        b,
        value: v,
        error: e,
        abs: r,
        frozen: false,
    }];

    loop {
        let value = segs.iter().fold(T::zero(), |acc, s| acc + s.value);
        let error = segs.iter().fold(T::zero(), |acc, s| acc + s.error);
        let magnitude = segs.iter().fold(T::zero(), |acc, s| acc + s.abs);
        // never ask for more than the rule's own roundoff floor
        let target = cfg
            .abs_tol
            .max(cfg.rel_tol * value.abs())
            .max(T::lit(100.0) * T::epsilon() * magnitude);
        if !value.is_finite() || !error.is_finite() {
            return Err(quad_failure(value, error, target, segs.len()));
        }
        if error <= target {
            return Ok(Estimate {
                value,
                abs_error: error,
                intervals: segs.len(),
            });
        }
        if segs.len() >= cfg.max_intervals {
            return Err(quad_failure(value, error, target, segs.len()));
        }

        let worst = segs
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.frozen)
            .max_by(|x, y| x.1.error.partial_cmp(&y.1.error).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i);
        let Some(i) = worst else {
            return Err(quad_failure(value, error, target, segs.len()));
        };

        let s = segs[i];
        let mid = T::lit(0.5) * (s.a + s.b);
        let width_floor = T::lit(4.0) * T::epsilon() * s.a.abs().max(s.b.abs());
        if (s.b - s.a).abs() <= width_floor || mid == s.a || mid == s.b {
            segs[i].frozen = true;
            continue;
        }
        let (v1, e1, r1) = kronrod15(&f, s.a, mid);
        let (v2, e2, r2) = kronrod15(&f, mid, s.b);
        segs[i] = Segment {
            a: s.a,
            b: mid,
            value: v1,
            error: e1,
            abs: r1,
            frozen: false,
        };
        segs.push(Segment {
            a: mid,
            b: s.b,
            value: v2,
            error: e2,
            abs: r2,
            frozen: false,
        });
    }
}

/// Integrates `f` over `[a, ∞)` for `a > 0` through the substitution `x = a / s`.
///
/// Suitable for integrands with algebraic decay `x^{-p}`, `p > 1`; the image
/// of the tail becomes an integrable endpoint singularity at `s = 0`.
pub fn integrate_to_infinity<T: Real, F: Fn(T) -> T>(f: F, a: T, cfg: &QuadConfig<T>) -> Result<Estimate<T>> {
    if !(a > T::zero()) {
        return Err(Error::param("a", "lower limit of a semi-infinite integral must be positive"));
    }
    integrate(
        |s: T| {
            let x = a / s;
            let fx = f(x);
            if fx == T::zero() || !x.is_finite() {
                T::zero()
            } else {
                fx * (x / s)
            }
        },
        T::zero(),
        T::one(),
        cfg,
    )
}

/// Integrates over `[a, b]` split into consecutive chunks of width `chunk`.
///
/// Meant for oscillatory integrands, with `chunk` a (half-)period, so that
/// each adaptive call sees a bounded number of sign changes.
pub fn integrate_chunked<T: Real, F: Fn(T) -> T>(
    f: F,
    a: T,
    b: T,
    chunk: T,
    max_chunks: usize,
    cfg: &QuadConfig<T>,
) -> Result<Estimate<T>> {
    if !(chunk > T::zero()) {
        return Err(Error::param("chunk", "chunk width must be positive"));
    }
    let span = b - a;
    let n = (span / chunk).ceil().to_usize().unwrap_or(usize::MAX).max(1);
    if n > max_chunks {
        return Err(Error::param(
            "chunk",
            format!("{n} chunks needed, more than the limit of {max_chunks}"),
        ));
    }
    let nf = T::from_usize_lossy(n);
    let sub = QuadConfig {
        abs_tol: cfg.abs_tol / nf,
        rel_tol: cfg.rel_tol,
        max_intervals: cfg.max_intervals,
    };
    let mut total = Estimate {
        value: T::zero(),
        abs_error: T::zero(),
        intervals: 0,
    };
    for k in 0..n {
        let lo = a + span * T::from_usize_lossy(k) / nf;
        let hi = if k + 1 == n { b } else { a + span * T::from_usize_lossy(k + 1) / nf };
        let part = integrate(&f, lo, hi, &sub)?;
        total.value = total.value + part.value;
        total.abs_error = total.abs_error + part.abs_error;
        total.intervals += part.intervals;
    }
    Ok(total)
}

fn quad_failure<T: Real>(value: T, error: T, target: T, intervals: usize) -> Error {
    Error::Quadrature {
        estimate: value.as_f64(),
        error_estimate: error.as_f64(),
        tolerance: target.as_f64(),
        intervals,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let est = integrate(|x: f64| x * x, 0.0, 1.0, &QuadConfig::new(1e-14)).unwrap();
        assert!((est.value - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn sine_over_many_periods() {
        let est = integrate(|x: f64| x.sin(), 0.0, 5.0 * PI, &QuadConfig::new(1e-12)).unwrap();
        assert!((est.value - 2.0).abs() < 1e-11);
    }

    #[test]
    fn endpoint_singularities() {
        // ∫_0^1 x^{-1/2} = 2 and ∫_0^1 ln x = -1
        let cfg = QuadConfig::new(1e-10);
        let a = integrate(|x: f64| x.powf(-0.5), 0.0, 1.0, &cfg).unwrap();
        assert!((a.value - 2.0).abs() < 1e-9, "{a:?}");
        let b = integrate(|x: f64| x.ln(), 0.0, 1.0, &cfg).unwrap();
        assert!((b.value + 1.0).abs() < 1e-9);
    }

    #[test]
    fn semi_infinite_algebraic_tail() {
        // ∫_1^∞ x^{-1.2} dx = 5
        let est = integrate_to_infinity(|x: f64| x.powf(-1.2), 1.0, &QuadConfig::new(1e-9)).unwrap();
        assert!((est.value - 5.0).abs() < 1e-8, "{est:?}");
        // ∫_1^∞ dx/(1+x^2) = π/4
        let est = integrate_to_infinity(|x: f64| 1.0 / (1.0 + x * x), 1.0, &QuadConfig::new(1e-12)).unwrap();
        assert!((est.value - PI / 4.0).abs() < 1e-11);
    }

    #[test]
    fn chunked_oscillatory() {
        let est = integrate_chunked(|x: f64| (20.0 * x).cos() * (-x).exp(), 0.0, 40.0, PI / 20.0, 10_000, &QuadConfig::new(1e-11))
            .unwrap();
        let exact = 1.0 / 401.0; // ∫_0^∞ e^{-x} cos(20x) dx, tail beyond 40 is ~e^{-40}
        assert!((est.value - exact).abs() < 1e-10);
    }

    #[test]
    fn reports_non_convergence() {
        let cfg = QuadConfig::new(1e-12).with_max_intervals(3);
        let err = integrate(|x: f64| 1.0 / x.abs().sqrt(), -1.0, 1.0, &cfg).unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }

    #[test]
    fn single_precision_works() {
        let est = integrate(|x: f32| x.exp(), 0.0f32, 1.0f32, &QuadConfig::new(1e-5f32)).unwrap();
        assert!((est.value - (1.0f32.exp() - 1.0)).abs() < 1e-5);
    }
}
