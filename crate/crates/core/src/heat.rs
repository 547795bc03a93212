//! Stochastic heat equation `∂u/∂t = ∂²u/∂x² + Ẇ` on the line, with noise white
//! in time and fractional (index `H ≤ 1/2`) in space.
//!
//! The mild solution splits as `u = ω + V`: `ω` carries the random initial
//! condition, `V` the noise. This module evaluates the constants of their
//! second-moment bounds and maps them onto the generic sup and growth bounds.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use statrs::function::beta::beta;
use statrs::function::gamma::gamma;

use crate::curve::{check_u_grid, TailCurve, TailPoint};
use crate::entropy::HolderProfile;
use crate::error::{Error, Result};
use crate::growth::{CellConstants, CellScale, GrowthConstants, GrowthSpec, Partition, SeriesSettings, Weight};
use crate::metric::AnisotropicBox;
use crate::orlicz::PhiFamily;
use crate::quad::{integrate, integrate_to_infinity, QuadConfig};
use crate::supbound::FieldBoundInputs;

/// Default absolute tolerance for the quadrature-defined constants.
pub const DEFAULT_TOL: f64 = 1e-10;

fn check_h(h: f64) -> Result<()> {
    if !(h > 0.0 && h <= 0.5) {
        return Err(Error::param("H", format!("noise index must lie in (0, 1/2], got {h}")));
    }
    Ok(())
}

/// `C_H = Γ(2H + 1) sin(πH) / (2π)`, density factor of the spatial noise spectrum.
pub fn noise_constant(h: f64) -> Result<f64> {
    check_h(h)?;
    Ok(gamma(2.0 * h + 1.0) * (PI * h).sin() / (2.0 * PI))
}

/// `c₁,H = Γ(1 − H) 2^{H−1} / H`, so that
/// `∫₀^t ∫_ℝ e^{−2sξ²} |ξ|^{1−2H} dξ ds = c₁,H t^H`.
pub fn c1h(h: f64) -> Result<f64> {
    check_h(h)?;
    Ok(gamma(1.0 - h) * 2f64.powf(h - 1.0) / h)
}

/// `c₂,H = ∫₀^∞ (1 − e^{−u²})² u^{−1−2H} du`.
pub fn c2h(h: f64, tol: f64) -> Result<f64> {
    check_h(h)?;
    const CUT: f64 = 8.0;
    // beyond CUT the bracket equals 1 to within e^{-64}
    let tail = CUT.powf(-2.0 * h) / (2.0 * h);
    let cfg = QuadConfig::new(tol).with_max_intervals(10_000);
    let head = integrate(
        |u: f64| {
            if u == 0.0 {
                return 0.0;
            }
            let b = -(-u * u).exp_m1();
            b * b * u.powf(-1.0 - 2.0 * h)
        },
        0.0,
        CUT,
        &cfg,
    )?;
    Ok(head.value + tail)
}

/// `c₃,H = ∫₀^∞ (1 − cos x) x^{−1−2H} dx`: `Γ(1 − 2H) cos(πH) / (2H)` for
/// `H < 1/2`, `π/2` at `H = 1/2`.
pub fn c3h(h: f64) -> Result<f64> {
    check_h(h)?;
    if h == 0.5 {
        return Ok(PI / 2.0);
    }
    Ok(gamma(1.0 - 2.0 * h) * (PI * h).cos() / (2.0 * h))
}

/// `C₁ = 4^ρ Γ(ρ + 1/2) / √π`.
pub fn c1_rho(rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::param("rho", format!("must lie in (0, 1], got {rho}")));
    }
    Ok(4f64.powf(rho) * gamma(rho + 0.5) / PI.sqrt())
}

/// `c_ω = √(2L max(C₁, L))`.
pub fn c_omega(l: f64, rho: f64) -> Result<f64> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::param("L", format!("must be positive, got {l}")));
    }
    let c1 = c1_rho(rho)?;
    Ok((2.0 * l * c1.max(l)).sqrt())
}

/// Constants of the `V` bounds for one noise index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConstants {
    pub h: f64,
    pub c_h: f64,
    pub c1h: f64,
    pub c2h: f64,
    pub c3h: f64,
    /// `c_V = √(3 C_H max(c₁,H + c₂,H, c₃,H))`.
    pub c_v: f64,
    /// `A(H) = √(C_H c₁,H)`.
    pub a_h: f64,
}

impl NoiseConstants {
    pub fn new(h: f64, tol: f64) -> Result<Self> {
        let c_h = noise_constant(h)?;
        let c1 = c1h(h)?;
        let c2 = c2h(h, tol)?;
        let c3 = c3h(h)?;
        Ok(Self {
            h,
            c_h,
            c1h: c1,
            c2h: c2,
            c3h: c3,
            c_v: (3.0 * c_h * (c1 + c2).max(c3)).sqrt(),
            a_h: (c_h * c1).sqrt(),
        })
    }

    /// `E V(t, x)² = C_H c₁,H t^H`.
    pub fn variance(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            self.c_h * self.c1h * t.powf(self.h)
        }
    }
}

pub fn c_v(h: f64, tol: f64) -> Result<f64> {
    Ok(NoiseConstants::new(h, tol)?.c_v)
}

pub fn a_h(h: f64) -> Result<f64> {
    Ok((noise_constant(h)? * c1h(h)?).sqrt())
}

/// Model parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SheParams {
    /// Spatial noise index `H ∈ (0, 1/2]`.
    pub h: f64,
    /// Hölder exponent `ρ ∈ (0, 1]` of the initial condition in `L²`.
    pub rho: f64,
    /// Hölder constant `L` of the initial condition.
    pub l: f64,
    /// Uniform `L²` bound `c₀` on the initial condition.
    pub c0: f64,
    /// Determining constant `c_φ` of the initial condition.
    pub c_phi: f64,
    pub family: PhiFamily<f64>,
}

/// Parameters with all derived constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SheModel {
    pub params: SheParams,
    pub noise: NoiseConstants,
    pub c1_rho: f64,
    /// `c = 2L max(C₁, L)`.
    pub c: f64,
    pub c_omega: f64,
}

/// Time-space rectangle `[a₁, b₁] × [a₂, b₂]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub t: (f64, f64),
    pub x: (f64, f64),
}

impl Rect {
    pub fn new(t: (f64, f64), x: (f64, f64)) -> Result<Self> {
        if !(t.0 >= 0.0 && t.1 >= t.0 && t.1.is_finite()) {
            return Err(Error::param("t", format!("need 0 <= a1 <= b1 < inf, got [{}, {}]", t.0, t.1)));
        }
        if !(x.1 >= x.0 && x.0.is_finite() && x.1.is_finite()) {
            return Err(Error::param("x", format!("need a2 <= b2, got [{}, {}]", x.0, x.1)));
        }
        Ok(Self { t, x })
    }

    pub fn with_exponents(&self, h1: f64, h2: f64) -> Result<AnisotropicBox<f64>> {
        AnisotropicBox::new(self.t, self.x, (h1, h2))
    }
}

impl SheModel {
    pub fn new(params: SheParams, tol: f64) -> Result<Self> {
        for (name, v) in [("c0", params.c0), ("c_phi", params.c_phi)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, format!("must be positive, got {v}")));
            }
        }
        let noise = NoiseConstants::new(params.h, tol)?;
        let c1 = c1_rho(params.rho)?;
        let c_om = c_omega(params.l, params.rho)?;
        Ok(Self {
            params,
            noise,
            c1_rho: c1,
            c: c_om * c_om,
            c_omega: c_om,
        })
    }

    /// Inputs for the sup bound of `ω`: `ε₀ = c₀c_φ`, `σ(h) = c_ω c_φ h`,
    /// metric exponents `(ρ/2, ρ)`.
    pub fn omega_inputs(&self, rect: &Rect) -> Result<FieldBoundInputs<f64>> {
        let p = &self.params;
        let bx = rect.with_exponents(p.rho / 2.0, p.rho)?;
        let profile = HolderProfile::power(self.c_omega * p.c_phi, 1.0)?;
        FieldBoundInputs::new(p.c0 * p.c_phi, bx, profile, p.family)
    }

    /// Inputs for the sup bound of `V` (Gaussian): `ε_V = A(H) b₁^{H/2}`,
    /// `σ(h) = c_V h`, metric exponents `(H/2, H)`.
    pub fn v_inputs(&self, rect: &Rect) -> Result<FieldBoundInputs<f64>> {
        let h = self.params.h;
        if !(rect.t.1 > 0.0) {
            return Err(Error::param("t", "V vanishes identically on t = 0"));
        }
        let bx = rect.with_exponents(h / 2.0, h)?;
        let profile = HolderProfile::power(self.noise.c_v, 1.0)?;
        let eps_v = self.noise.a_h * rect.t.1.powf(h / 2.0);
        FieldBoundInputs::new(eps_v, bx, profile, PhiFamily::gaussian())
    }

    /// `P{sup_D |ω| > u}` bound at `θ`.
    pub fn omega_sup_tail(&self, u: f64, theta: f64, rect: &Rect) -> Result<f64> {
        self.omega_inputs(rect)?.sup_tail_bound(u, theta)
    }

    /// `P{sup_D |V| > u}` bound at `θ`.
    pub fn v_sup_tail(&self, u: f64, theta: f64, rect: &Rect) -> Result<f64> {
        self.v_inputs(rect)?.sup_tail_bound(u, theta)
    }

    /// Growth spec for `V` over `[0, ∞) × [−A, A]` with weight
    /// `f(t) = max(t^{H/2} |ln t|^p, 1)` and cells `b_k = e^k`.
    pub fn v_growth_spec(&self, p: f64, half_width: f64, series: SeriesSettings<f64>) -> Result<GrowthSpec<f64>> {
        if !(p > 1.0) {
            return Err(Error::param("p", format!("log power must exceed 1, got {p}")));
        }
        let h = self.params.h;
        let spec = GrowthSpec {
            partition: Partition::Exponential,
            weight: Weight::PowerLog {
                exponent: h / 2.0,
                log_power: p,
            },
            scale: CellScale::PowerEnvelope {
                c_delta: self.noise.a_h,
                delta: h / 2.0,
            },
            constants: CellConstants::Uniform(self.noise.c_v),
            half_width,
            gamma: 1.0,
            exponents: (h / 2.0, h),
            family: PhiFamily::gaussian(),
            series,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Growth envelope of `V`: `|V(t, x)| ≤ max(t^{H/2}|ln t|^p, 1) ξ` with the
/// tail of `ξ` evaluated on `u_grid`. Levels at or below the validity
/// threshold carry no value.
pub fn she_growth_envelope(
    model: &SheModel,
    p: f64,
    half_width: f64,
    series: SeriesSettings<f64>,
    u_grid: &[f64],
) -> Result<(GrowthConstants<f64>, TailCurve)> {
    check_u_grid(u_grid)?;
    let spec = model.v_growth_spec(p, half_width, series)?;
    let consts = spec.constants()?;
    let points = u_grid
        .iter()
        .map(|&u| {
            let value = consts.remark_bound(u).ok();
            TailPoint::bound(u, value, value.map(|_| consts.remark_theta(u)))
        })
        .collect();
    Ok((consts, TailCurve::new(points)?))
}

/// Spectral measure of a stationary initial condition, symmetric on `ℝ`.
#[derive(Clone)]
pub enum SpectralMeasure {
    /// Density `σ² / (1 + λ²)^{2α}`.
    Matern { sigma2: f64, alpha: f64 },
    /// Even density given on `λ ≥ 0`.
    Density(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for SpectralMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralMeasure::Matern { sigma2, alpha } => f
                .debug_struct("Matern")
                .field("sigma2", sigma2)
                .field("alpha", alpha)
                .finish(),
            SpectralMeasure::Density(_) => f.write_str("Density(..)"),
        }
    }
}

impl SpectralMeasure {
    pub fn matern(sigma2: f64, alpha: f64) -> Result<Self> {
        if !(sigma2 >= 0.0 && sigma2.is_finite()) {
            return Err(Error::param("sigma2", format!("must be finite and nonnegative, got {sigma2}")));
        }
        if !(alpha > 0.25) {
            return Err(Error::param("alpha", format!("Matern density needs alpha > 1/4 for finite mass, got {alpha}")));
        }
        Ok(Self::Matern { sigma2, alpha })
    }

    /// Density value at `λ` (even extension).
    pub fn density(&self, lambda: f64) -> f64 {
        match self {
            SpectralMeasure::Matern { sigma2, alpha } => sigma2 * (1.0 + lambda * lambda).powf(-2.0 * alpha),
            SpectralMeasure::Density(f) => f(lambda.abs()),
        }
    }

    /// `∫_ℝ |λ|^{2ε} F(dλ)`; `ε = 0` gives the total mass.
    pub fn moment(&self, eps: f64, tol: f64) -> Result<f64> {
        if !(eps >= 0.0) {
            return Err(Error::param("eps", format!("moment order must be nonnegative, got {eps}")));
        }
        match self {
            SpectralMeasure::Matern { sigma2, alpha } => {
                let b = 2.0 * alpha - eps - 0.5;
                if !(b > 0.0) {
                    return Err(Error::param(
                        "alpha",
                        format!("moment of order {eps} needs 2 alpha - eps - 1/2 > 0, got {b}"),
                    ));
                }
                Ok(sigma2 * beta(eps + 0.5, b))
            }
            SpectralMeasure::Density(_) => self.moment_by_quadrature(eps, tol),
        }
    }

    /// `2 ∫₀^∞ λ^{2ε} f(λ) dλ` by quadrature, whatever the variant.
    pub fn moment_by_quadrature(&self, eps: f64, tol: f64) -> Result<f64> {
        let cfg = QuadConfig::new(tol / 4.0).with_rel_tol(1e-13).with_max_intervals(20_000);
        let g = |l: f64| {
            if l == 0.0 {
                if eps == 0.0 {
                    self.density(0.0)
                } else {
                    0.0
                }
            } else {
                l.powf(2.0 * eps) * self.density(l)
            }
        };
        let head = integrate(g, 0.0, 1.0, &cfg)?;
        let tail = integrate_to_infinity(g, 1.0, &cfg)?;
        Ok(2.0 * (head.value + tail.value))
    }
}

/// `c²(ε) = ∫ |λ|^{2ε} F(dλ)` for `ε ∈ (0, 1/2]`.
pub fn spectral_moment(f: &SpectralMeasure, eps: f64, tol: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::param("eps", format!("must lie in (0, 1/2], got {eps}")));
    }
    f.moment(eps, tol)
}

/// `c(ε) (4^{1−ε}|x − y|^{2ε} + |t − s|^ε)^{1/2}`, the `L²` increment bound of `ω`.
pub fn omega_spectral_increment_bound(p: (f64, f64), q: (f64, f64), f: &SpectralMeasure, eps: f64, tol: f64) -> Result<f64> {
    let c = spectral_moment(f, eps, tol)?.sqrt();
    let (dt, dx) = ((p.0 - q.0).abs(), (p.1 - q.1).abs());
    let pw = |v: f64, e: f64| if v == 0.0 { 0.0 } else { v.powf(e) };
    Ok(c * (4f64.powf(1.0 - eps) * pw(dx, 2.0 * eps) + pw(dt, eps)).sqrt())
}

/// `(∫ F(dλ))^{1/2}`, a uniform `L²` bound on `ω`.
pub fn omega_spectral_sup_norm(f: &SpectralMeasure, tol: f64) -> Result<f64> {
    Ok(f.moment(0.0, tol)?.sqrt())
}

/// Sup-bound inputs for `ω` with a stationary initial condition:
/// `ε₀ = c_φ (∫F)^{1/2}` and `σ(h) = c_φ 2^{1−ε} c(ε) h` on exponents `(ε/2, ε)`.
///
/// Uses `√(a + b) ≤ √a + √b` on the increment bound, so that
/// `‖ω(t, x) − ω(s, y)‖ ≤ 2^{1−ε} c(ε) (|t − s|^{ε/2} + |x − y|^ε)`.
pub fn omega_spectral_inputs(
    f: &SpectralMeasure,
    eps: f64,
    c_phi: f64,
    family: PhiFamily<f64>,
    rect: &Rect,
    tol: f64,
) -> Result<FieldBoundInputs<f64>> {
    if !(c_phi > 0.0) {
        return Err(Error::param("c_phi", format!("must be positive, got {c_phi}")));
    }
    let c = spectral_moment(f, eps, tol)?.sqrt();
    let eps0 = c_phi * omega_spectral_sup_norm(f, tol)?;
    let bx = rect.with_exponents(eps / 2.0, eps)?;
    let profile = HolderProfile::power(c_phi * 2f64.powf(1.0 - eps) * c, 1.0)?;
    FieldBoundInputs::new(eps0, bx, profile, family)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    fn model(h: f64) -> SheModel {
        SheModel::new(
            SheParams {
                h,
                rho: 0.5,
                l: 1.0,
                c0: 1.0,
                c_phi: 1.0,
                family: PhiFamily::gaussian(),
            },
            DEFAULT_TOL,
        )
        .unwrap()
    }

    #[test]
    fn noise_constant_values() {
        close(noise_constant(0.5).unwrap(), 1.0 / (2.0 * PI), 1e-15);
        close(noise_constant(0.25).unwrap(), 0.099_735_570_100_358_2, 1e-15);
        assert!(noise_constant(1e-9).unwrap() < 1e-8);
        assert!(noise_constant(0.6).is_err());
        assert!(noise_constant(0.0).is_err());
    }

    #[test]
    fn c1h_values() {
        close(c1h(0.5).unwrap(), SQRT_2PI, 1e-14);
        close(c1h(0.25).unwrap(), 2.914_548_522_829_52, 1e-13);
        close(c1h(0.1).unwrap(), 5.726_639_421_180_44, 1e-13);
        assert!(c1h(1e-8).unwrap() > 1e7);
    }

    #[test]
    fn c1h_matches_time_integral() {
        // ∫_ℝ (1 − e^{−2ξ²}) / (2ξ²) |ξ|^{1−2H} dξ at t = 1
        for h in [0.1, 0.25, 0.4, 0.5] {
            let g = |x: f64| -(-2.0 * x * x).exp_m1() / (2.0 * x * x) * x.powf(1.0 - 2.0 * h);
            let cfg = QuadConfig::new(1e-12);
            let head = integrate(g, 0.0, 1.0, &cfg).unwrap().value;
            let tail = integrate_to_infinity(g, 1.0, &cfg).unwrap().value;
            close(2.0 * (head + tail), c1h(h).unwrap(), 1e-9);
        }
    }

    #[test]
    fn c2h_values() {
        let exact = 2.0 * PI.sqrt() - SQRT_2PI;
        close(c2h(0.5, 1e-12).unwrap(), exact, 1e-10);
        close(c2h(0.25, 1e-12).unwrap(), 1.987_118_287_031_19, 1e-10);
        close(c2h(0.499, 1e-12).unwrap(), 1.040_058_884_556_07, 1e-10);
        for h in [0.05, 0.2, 0.35, 0.5] {
            close(c2h(h, 1e-8).unwrap(), c2h(h, 1e-12).unwrap(), 1e-8);
        }
    }

    #[test]
    fn c3h_values() {
        assert_eq!(c3h(0.5).unwrap(), PI / 2.0);
        close(c3h(0.25).unwrap(), SQRT_2PI, 1e-13);
        close(c3h(0.499).unwrap(), 1.572_130_834_131_34, 1e-10);
        assert!((c3h(0.499).unwrap() - PI / 2.0).abs() < 1e-2);
    }

    #[test]
    fn composite_values() {
        let n = NoiseConstants::new(0.5, 1e-12).unwrap();
        close(n.a_h, 0.631_618_777_746_065, 1e-13);
        close(n.c_v, 1.300_987_605_876_12, 1e-10);
        close(n.c1h + n.c2h, 3.544_907_701_811_03, 1e-10);
        let q = NoiseConstants::new(0.25, 1e-12).unwrap();
        close(q.a_h, 0.539_151_331_733_085, 1e-13);
        close(q.c_v, 1.211_037_407_007_06, 1e-10);
        for i in 1..=10 {
            let n = NoiseConstants::new(0.05 * i as f64, 1e-10).unwrap();
            assert!(n.c_v.is_finite() && n.c_v > 0.0 && n.a_h > 0.0);
        }
    }

    #[test]
    fn initial_condition_constants() {
        close(c1_rho(0.5).unwrap(), 2.0 / PI.sqrt(), 1e-14);
        close(c_omega(1.0, 0.5).unwrap(), 1.502_251_088_929_88, 1e-13);
        close(c_omega(2.0, 0.5).unwrap(), 2.0 * 2f64.sqrt(), 1e-14);
        assert!(c_omega(1.0, 0.0).is_err());
        assert!(c_omega(0.0, 0.5).is_err());
    }

    #[test]
    fn v_constant_is_generic_c1() {
        let m = model(0.5);
        let rect = Rect::new((0.1, 1.0), (0.0, 1.0)).unwrap();
        let inputs = m.v_inputs(&rect).unwrap();
        let c1 = inputs.closed_entropy().unwrap().c1;
        let h = 0.5;
        let (t1, t2) = (0.9, 1.0);
        let printed = 2.0 * (2.0 * m.noise.c_v).sqrt() * ((2.0 / h) * (t1 / 2.0f64).powf(h / 4.0) + (1.0 / h) * (t2 / 2.0f64).powf(h / 2.0));
        close(c1, printed, 1e-12);
        close(inputs.eps0, m.noise.a_h, 1e-15);
    }

    #[test]
    fn omega_constant_is_generic_c1() {
        let mut m = model(0.5);
        m.params.family = PhiFamily::new(1.5).unwrap();
        m.params.c_phi = 1.3;
        let rect = Rect::new((0.0, 2.0), (-1.0, 1.0)).unwrap();
        let inputs = m.omega_inputs(&rect).unwrap();
        let beta = 3.0;
        let rho = 0.5;
        let printed = 2f64.powf(1.0 / beta) * (m.c_omega * 1.3).powf(1.0 / beta) / (1.0 - 1.0 / beta)
            * ((2.0 / rho) * (2.0 / 2.0f64).powf(rho / (2.0 * beta)) + (1.0 / rho) * (2.0 / 2.0f64).powf(rho / beta));
        close(inputs.closed_entropy().unwrap().c1, printed, 1e-12);
    }

    #[test]
    fn omega_sup_tail_delegates() {
        let m = model(0.5);
        let rect = Rect::new((0.0, 1.0), (0.0, 1.0)).unwrap();
        let inputs = m.omega_inputs(&rect).unwrap();
        let thr = inputs.u_threshold(0.5).unwrap();
        let mut prev = 1.0;
        for i in 1..20 {
            let u = thr * (1.0 + 0.1 * i as f64);
            let p = m.omega_sup_tail(u, 0.5, &rect).unwrap();
            assert_eq!(p.to_bits(), inputs.sup_tail_bound(u, 0.5).unwrap().to_bits());
            assert!(p < 1.0 && p <= prev);
            prev = p;
        }
        assert!(m.omega_sup_tail(thr * 0.99, 0.5, &rect).is_err());
    }

    #[test]
    fn v_sup_tail_vanishes() {
        let m = model(0.5);
        let rect = Rect::new((0.1, 1.0), (0.0, 1.0)).unwrap();
        assert_eq!(m.v_sup_tail(1e4, 0.5, &rect).unwrap(), 0.0);
    }

    #[test]
    fn matern_moments() {
        let m1 = SpectralMeasure::matern(1.0, 1.0).unwrap();
        close(spectral_moment(&m1, 0.5, 1e-10).unwrap(), 1.0, 1e-14);
        let m2 = SpectralMeasure::matern(1.0, 1.5).unwrap();
        close(spectral_moment(&m2, 0.5, 1e-10).unwrap(), 0.5, 1e-14);
        close(omega_spectral_sup_norm(&m1, 1e-10).unwrap(), (PI / 2.0).sqrt(), 1e-14);
        let bad = SpectralMeasure::matern(1.0, 0.4).unwrap();
        assert!(spectral_moment(&bad, 0.5, 1e-10).is_err());
        assert!(spectral_moment(&m1, 0.0, 1e-10).is_err());
        assert!(spectral_moment(&m1, 0.6, 1e-10).is_err());
    }

    #[test]
    fn matern_quadrature_agrees() {
        for (alpha, eps) in [(1.0, 0.5), (1.5, 0.25), (0.75, 0.1), (2.0, 0.5), (0.6, 0.3)] {
            let m = SpectralMeasure::matern(1.7, alpha).unwrap();
            let closed = m.moment(eps, 1e-12).unwrap();
            let quad = m.moment_by_quadrature(eps, 1e-12).unwrap();
            close(quad, closed, 1e-8);
        }
    }

    #[test]
    fn generic_density_uses_quadrature() {
        let d = SpectralMeasure::Density(Arc::new(|l: f64| (-l * l).exp()));
        // ∫_ℝ e^{−λ²} dλ = √π and ∫_ℝ |λ| e^{−λ²} dλ = 1
        close(omega_spectral_sup_norm(&d, 1e-12).unwrap(), PI.sqrt().sqrt(), 1e-10);
        close(spectral_moment(&d, 0.5, 1e-12).unwrap(), 1.0, 1e-10);
        let zero = SpectralMeasure::Density(Arc::new(|_| 0.0));
        assert_eq!(omega_spectral_sup_norm(&zero, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn increment_bound_examples() {
        let m = SpectralMeasure::matern(1.0, 1.0).unwrap();
        assert_eq!(omega_spectral_increment_bound((0.3, 0.2), (0.3, 0.2), &m, 0.5, 1e-10).unwrap(), 0.0);
        let b = omega_spectral_increment_bound((0.5, 0.1), (0.1, 0.4), &m, 0.5, 1e-10).unwrap();
        close(b, (2.0 * 0.3 + 0.4f64.sqrt()).sqrt(), 1e-12);
        let r = omega_spectral_increment_bound((0.1, 0.4), (0.5, 0.1), &m, 0.5, 1e-10).unwrap();
        assert_eq!(b, r);
    }

    #[test]
    fn spectral_inputs_dominate_increment_bound() {
        let m = SpectralMeasure::matern(1.0, 1.0).unwrap();
        let rect = Rect::new((0.0, 1.0), (0.0, 1.0)).unwrap();
        let eps = 0.3;
        let inputs = omega_spectral_inputs(&m, eps, 1.0, PhiFamily::gaussian(), &rect, 1e-10).unwrap();
        close(inputs.eps0, (PI / 2.0).sqrt(), 1e-14);
        for (p, q) in [((0.1, 0.2), (0.7, 0.9)), ((0.5, 0.5), (0.5, 0.6)), ((0.0, 0.0), (1.0, 0.0))] {
            let d = inputs.bx.dist([p.0, p.1], [q.0, q.1]);
            let incr = omega_spectral_increment_bound(p, q, &m, eps, 1e-10).unwrap();
            assert!(incr <= inputs.profile.sigma(d) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn growth_envelope_series() {
        let m = model(0.5);
        let set = SeriesSettings::default().with_tol(1e-9);
        let (consts, curve) = she_growth_envelope(&m, 2.0, 1.0, set, &[1.0, 100.0, 1e4, 1e6]).unwrap();
        let exact = m.noise.a_h * 0.25f64.exp() * (1.0 + PI * PI / 6.0);
        close(consts.c.value, exact, 1e-8);
        assert!(consts.s.value.is_finite() && consts.s.value > 0.0);
        assert!(curve.points[0].value.is_none());
        let last = curve.points.last().unwrap().value.unwrap();
        assert!(last < 1e-10);
        assert!(she_growth_envelope(&m, 1.0, 1.0, set, &[10.0]).is_err());
    }

    #[test]
    fn envelope_constant_decreases_in_p() {
        let m = model(0.5);
        let set = SeriesSettings::default().with_tol(1e-8);
        let mut prev = f64::INFINITY;
        for p in [1.5, 2.0, 3.0, 5.0, 8.0] {
            let c = m.v_growth_spec(p, 1.0, set).unwrap().series_c().unwrap().value;
            assert!(c < prev);
            prev = c;
        }
        assert!(prev > 2.0 * m.noise.a_h * 0.25f64.exp());
    }
}
