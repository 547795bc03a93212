//! Exact covariances of `V` and `ω` by quadrature.

use std::collections::HashMap;

use nalgebra::DMatrix;
use rayon::prelude::*;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::heat::{c3h, noise_constant, SpectralMeasure};
use crate::metric::Point;
use crate::quad::{integrate, integrate_chunked, integrate_to_infinity, QuadConfig};

const MAX_CHUNKS: usize = 200_000;

/// Which component of the mild solution a grid covariance describes.
#[derive(Debug, Clone)]
pub enum FieldKernel {
    /// Noise part, spatial index `H`.
    V { h: f64 },
    /// Initial-condition part with a stationary Gaussian initial condition.
    Omega { measure: SpectralMeasure },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSettings {
    /// Absolute tolerance of each covariance entry.
    pub tol: f64,
    /// Diffusivity `μ` of `∂u/∂t = μ ∂²u/∂x² + Ẇ`.
    pub mu: f64,
}

impl Default for KernelSettings {
    fn default() -> Self {
        Self { tol: 1e-10, mu: 1.0 }
    }
}

impl KernelSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::param("tol", format!("must be positive, got {}", self.tol)));
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::param("mu", format!("must be positive, got {}", self.mu)));
        }
        Ok(())
    }
}

fn check_times(t: f64, s: f64) -> Result<()> {
    if !(t >= 0.0 && s >= 0.0 && t.is_finite() && s.is_finite()) {
        return Err(Error::param("t", format!("times must be finite and nonnegative, got {t} and {s}")));
    }
    Ok(())
}

/// `∫₀^∞ (1 − e^{−τξ²}) / (2ξ²) ξ^{1−2H} dξ = Γ(1 − H) τ^H / (4H)`.
fn v_level(tau: f64, h: f64) -> f64 {
    if tau <= 0.0 {
        0.0
    } else {
        gamma(1.0 - h) * tau.powf(h) / (4.0 * h)
    }
}

/// `∫₀^∞ e^{−τξ²} (1 − cos ξz) / (2ξ²) ξ^{1−2H} dξ`.
fn v_oscillation(tau: f64, z: f64, h: f64, tol: f64) -> Result<f64> {
    let z = z.abs();
    if z == 0.0 {
        return Ok(0.0);
    }
    if tau == 0.0 {
        return Ok(c3h(h)? * z.powf(2.0 * h) / 2.0);
    }
    let f = |xi: f64| {
        if xi == 0.0 {
            return 0.0;
        }
        let s = (0.5 * xi * z).sin();
        (-tau * xi * xi).exp() * s * s * xi.powf(-1.0 - 2.0 * h)
    };
    // e^{−τξ²} < e^{−40} past the cutoff
    let cutoff = (40.0 / tau).sqrt();
    let period = 2.0 * std::f64::consts::PI / z;
    let cfg = QuadConfig::new(tol).with_max_intervals(2_000);
    let head_end = period.min(cutoff);
    let head = integrate(f, 0.0, head_end, &cfg)?;
    if head_end >= cutoff {
        return Ok(head.value);
    }
    let rest = integrate_chunked(f, head_end, cutoff, period, MAX_CHUNKS, &cfg)?;
    Ok(head.value + rest.value)
}

/// `Cov(V(t, x), V(s, y))` with unit diffusivity:
/// `C_H ∫_ℝ (e^{−|t−s|ξ²} − e^{−(t+s)ξ²}) / (2ξ²) cos(ξ(x − y)) |ξ|^{1−2H} dξ`.
pub fn v_covariance(t: f64, x: f64, s: f64, y: f64, h: f64, tol: f64) -> Result<f64> {
    v_covariance_mu(t, x, s, y, h, tol, 1.0)
}

/// As [`v_covariance`] for diffusivity `μ`, via `Cov_μ(t, s) = Cov₁(μt, μs) / μ`.
pub fn v_covariance_mu(t: f64, x: f64, s: f64, y: f64, h: f64, tol: f64, mu: f64) -> Result<f64> {
    check_times(t, s)?;
    let ch = noise_constant(h)?;
    let (a, b, z) = (mu * (t - s).abs(), mu * (t + s), x - y);
    if t == 0.0 || s == 0.0 {
        return Ok(0.0);
    }
    let tol_inner = tol * mu / (8.0 * ch);
    let osc = v_oscillation(b, z, h, tol_inner)? - v_oscillation(a, z, h, tol_inner)?;
    Ok(2.0 * ch * (v_level(b, h) - v_level(a, h) + osc) / mu)
}

/// `∫₀^∞ cos(λz) e^{−τλ²} f(λ) dλ` plus its truncation error bound.
fn omega_half_line(tau: f64, z: f64, f: &SpectralMeasure, tol: f64) -> Result<f64> {
    let z = z.abs();
    let g = |l: f64| (-tau * l * l).exp() * f.density(l);
    let cfg = QuadConfig::new(tol / 4.0).with_max_intervals(4_000);
    if z == 0.0 {
        let head = integrate(g, 0.0, 1.0, &cfg)?;
        let tail = integrate_to_infinity(g, 1.0, &cfg)?;
        return Ok(head.value + tail.value);
    }
    // grow the cutoff until the ignored mass is below tol / 4
    let mut cutoff = 8.0f64;
    loop {
        let tail = integrate_to_infinity(|l: f64| g(l).abs(), cutoff, &cfg)?;
        if tail.value <= tol / 4.0 {
            break;
        }
        cutoff *= 2.0;
        if cutoff > 1e7 {
            return Err(Error::param("measure", "spectral density decays too slowly for the covariance quadrature"));
        }
    }
    let period = std::f64::consts::PI / z;
    let osc = |l: f64| (l * z).cos() * g(l);
    Ok(integrate_chunked(osc, 0.0, cutoff, period.min(cutoff), MAX_CHUNKS, &cfg)?.value)
}

/// `Cov(ω(t, x), ω(s, y)) = ∫ cos(λ(x − y)) e^{−(t+s)λ²} F(dλ)` for a
/// stationary Gaussian initial condition with spectral measure `F`.
pub fn omega_covariance(t: f64, x: f64, s: f64, y: f64, f: &SpectralMeasure, tol: f64) -> Result<f64> {
    omega_covariance_mu(t, x, s, y, f, tol, 1.0)
}

pub fn omega_covariance_mu(t: f64, x: f64, s: f64, y: f64, f: &SpectralMeasure, tol: f64, mu: f64) -> Result<f64> {
    check_times(t, s)?;
    Ok(2.0 * omega_half_line(mu * (t + s), x - y, f, tol / 2.0)?)
}

/// Quantised key so that `t₃ − t₁` and `t₄ − t₂` on a regular grid share an entry.
fn key(v: f64) -> i64 {
    (v * 1e12).round() as i64
}

/// Covariance matrix of the field on `grid`, entries in parallel.
pub fn covariance_matrix(kernel: &FieldKernel, grid: &[Point<f64>], settings: &KernelSettings) -> Result<DMatrix<f64>> {
    settings.validate()?;
    for p in grid {
        check_times(p[0], p[0])?;
    }
    let n = grid.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..=i).map(move |j| (i, j))).collect();
    let mu = settings.mu;
    let values: Vec<f64> = match kernel {
        FieldKernel::V { h } => {
            let h = *h;
            let ch = noise_constant(h)?;
            let tol_inner = settings.tol * mu / (8.0 * ch);
            let mut need: HashMap<(i64, i64), (f64, f64)> = HashMap::new();
            for &(i, j) in &pairs {
                let (p, q) = (grid[i], grid[j]);
                if p[0] == 0.0 || q[0] == 0.0 {
                    continue;
                }
                let z = (p[1] - q[1]).abs();
                for tau in [mu * (p[0] - q[0]).abs(), mu * (p[0] + q[0])] {
                    need.entry((key(tau), key(z))).or_insert((tau, z));
                }
            }
            let keys: Vec<_> = need.into_iter().collect();
            let table: HashMap<(i64, i64), f64> = keys
                .par_iter()
                .map(|(k, (tau, z))| Ok((*k, v_oscillation(*tau, *z, h, tol_inner)?)))
                .collect::<Result<_>>()?;
            pairs
                .iter()
                .map(|&(i, j)| {
                    let (p, q) = (grid[i], grid[j]);
                    if p[0] == 0.0 || q[0] == 0.0 {
                        return 0.0;
                    }
                    let z = (p[1] - q[1]).abs();
                    let (a, b) = (mu * (p[0] - q[0]).abs(), mu * (p[0] + q[0]));
                    let osc = table[&(key(b), key(z))] - table[&(key(a), key(z))];
                    2.0 * ch * (v_level(b, h) - v_level(a, h) + osc) / mu
                })
                .collect()
        }
        FieldKernel::Omega { measure } => {
            let mut need: HashMap<(i64, i64), (f64, f64)> = HashMap::new();
            for &(i, j) in &pairs {
                let (p, q) = (grid[i], grid[j]);
                let (tau, z) = (mu * (p[0] + q[0]), (p[1] - q[1]).abs());
                need.entry((key(tau), key(z))).or_insert((tau, z));
            }
            let keys: Vec<_> = need.into_iter().collect();
            let table: HashMap<(i64, i64), f64> = keys
                .par_iter()
                .map(|(k, (tau, z))| Ok((*k, 2.0 * omega_half_line(*tau, *z, measure, settings.tol / 2.0)?)))
                .collect::<Result<_>>()?;
            pairs
                .iter()
                .map(|&(i, j)| {
                    let (p, q) = (grid[i], grid[j]);
                    table[&(key(mu * (p[0] + q[0])), key((p[1] - q[1]).abs()))]
                })
                .collect()
        }
    };
    let mut m = DMatrix::zeros(n, n);
    for (&(i, j), v) in pairs.iter().zip(values) {
        m[(i, j)] = v;
        m[(j, i)] = v;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heat::{c1h, NoiseConstants};

    #[test]
    fn level_closed_form_matches_quadrature() {
        for h in [0.1, 0.3, 0.5] {
            for tau in [0.01, 1.0, 7.0] {
                let f = |x: f64| if x == 0.0 { 0.0 } else { -(-tau * x * x).exp_m1() / (2.0 * x * x) * x.powf(1.0 - 2.0 * h) };
                let cfg = QuadConfig::new(1e-12);
                let q = integrate(f, 0.0, 1.0, &cfg).unwrap().value + integrate_to_infinity(f, 1.0, &cfg).unwrap().value;
                assert!((q - v_level(tau, h)).abs() < 1e-9, "h={h} tau={tau}");
            }
        }
    }

    #[test]
    fn variance_identity() {
        for h in [0.2, 0.35, 0.5] {
            let n = NoiseConstants::new(h, 1e-12).unwrap();
            for t in [0.01, 0.3, 1.0, 5.0] {
                let v = v_covariance(t, 0.4, t, 0.4, h, 1e-10).unwrap();
                assert!((v - n.c_h * c1h(h).unwrap() * t.powf(h)).abs() < 1e-8);
            }
        }
        assert_eq!(v_covariance(0.0, 0.0, 0.0, 0.0, 0.5, 1e-10).unwrap(), 0.0);
        assert_eq!(v_covariance(0.0, 0.0, 1.0, 0.3, 0.5, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn covariance_matches_direct_integral() {
        // direct quadrature of the kernel, H = 1/2, Gaussian factor keeps it short
        let h = 0.5;
        let ch = noise_constant(h).unwrap();
        for &(t, x, s, y) in &[(0.3f64, 0.0f64, 0.7f64, 0.5f64), (1.0, 0.2, 1.0, -0.6), (0.05, 1.0, 0.4, 0.0)] {
            let (a, b, z): (f64, f64, f64) = ((t - s).abs(), t + s, x - y);
            let g = |xi: f64| {
                if xi == 0.0 {
                    return (b - a) / 2.0;
                }
                ((-a * xi * xi).exp() - (-b * xi * xi).exp()) / (2.0 * xi * xi) * (xi * z).cos()
            };
            let cfg = QuadConfig::new(1e-12);
            // without Gaussian damping, stop on a full period where the tail is O(1/ξ²)
            let period = 2.0 * std::f64::consts::PI / z.abs();
            let end = if a > 0.0 { (40.0 / a).sqrt() } else { period * (5000.0 / period).round() };
            let direct = 2.0 * ch * integrate_chunked(g, 0.0, end, period.min(1.0), 100_000, &cfg).unwrap().value;
            let got = v_covariance(t, x, s, y, h, 1e-11).unwrap();
            assert!((got - direct).abs() < 1e-7, "{got} vs {direct}");
        }
    }

    #[test]
    fn symmetry_and_stationarity() {
        let h = 0.3;
        let c1 = v_covariance(0.4, 0.1, 0.9, 0.6, h, 1e-10).unwrap();
        let c2 = v_covariance(0.9, 0.6, 0.4, 0.1, h, 1e-10).unwrap();
        let c3 = v_covariance(0.4, 2.1, 0.9, 2.6, h, 1e-10).unwrap();
        assert!((c1 - c2).abs() < 1e-12 && (c1 - c3).abs() < 1e-9);
    }

    #[test]
    fn diffusivity_scaling() {
        let h = 0.5;
        let base = v_covariance(0.6, 0.0, 0.6, 0.0, h, 1e-10).unwrap();
        let scaled = v_covariance_mu(0.3, 0.0, 0.3, 0.0, h, 1e-10, 2.0).unwrap();
        // variance with μ: C_H c₁,H (μt)^H / μ
        assert!((scaled - base / 2.0).abs() < 1e-9);
    }

    #[test]
    fn omega_reduces_to_stationary_covariance() {
        // Matérn α = 1: ∫ cos(λz) (1 + λ²)^{−2} dλ = π(1 + |z|) e^{−|z|} / 2
        let m = SpectralMeasure::matern(1.0, 1.0).unwrap();
        for z in [0.0f64, 0.3, 1.0, 2.5] {
            let got = omega_covariance(0.0, z, 0.0, 0.0, &m, 1e-10).unwrap();
            let exact = std::f64::consts::PI * (1.0 + z) * (-z).exp() / 2.0;
            assert!((got - exact).abs() < 1e-9, "z={z}: {got} vs {exact}");
        }
    }

    #[test]
    fn omega_variance_dominated_by_mass() {
        let m = SpectralMeasure::matern(2.0, 0.75).unwrap();
        let mass = m.moment(0.0, 1e-12).unwrap();
        let mut prev = mass + 1e-12;
        for t in [0.0, 0.1, 0.5, 2.0] {
            let v = omega_covariance(t, 0.0, t, 0.0, &m, 1e-10).unwrap();
            assert!(v <= prev);
            prev = v;
        }
        let a = omega_covariance(0.2, 0.1, 0.5, 0.8, &m, 1e-10).unwrap();
        let b = omega_covariance(0.2, 3.1, 0.5, 3.8, &m, 1e-10).unwrap();
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn matrix_matches_pointwise() {
        let grid = vec![[0.2, 0.0], [0.5, 0.3], [1.0, -0.4], [0.0, 0.1]];
        let s = KernelSettings::default();
        let m = covariance_matrix(&FieldKernel::V { h: 0.4 }, &grid, &s).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let (p, q) = (grid[i], grid[j]);
                let v = v_covariance(p[0], p[1], q[0], q[1], 0.4, 1e-10).unwrap();
                assert!((m[(i, j)] - v).abs() < 1e-9);
            }
        }
        let om = FieldKernel::Omega {
            measure: SpectralMeasure::matern(1.0, 1.0).unwrap(),
        };
        let m = covariance_matrix(&om, &grid, &s).unwrap();
        assert!((m[(3, 3)] - std::f64::consts::PI / 2.0).abs() < 1e-9);
        assert!(covariance_matrix(&FieldKernel::V { h: 0.4 }, &[[-1.0, 0.0]], &s).is_err());
    }
}
