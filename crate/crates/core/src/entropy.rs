//! Entropy integrals `Ĩ(ε) = ∫₀^ε κ(ln N(σ⁻¹(u))) du` over an anisotropic box.

use crate::error::{Error, Result};
use crate::metric::AnisotropicBox;
use crate::orlicz::PhiFamily;
use crate::quad::{integrate, QuadConfig};
use crate::scalar::Real;

/// Increasing modulus `σ(h)` bounding `τ_φ(X(t) − X(s))` for `d(t, s) ≤ h`.
#[derive(Debug, Clone, PartialEq)]
pub enum HolderProfile<T> {
    /// `σ(h) = c h^γ`, `0 < γ ≤ 1`.
    Power { scale: T, exponent: T },
    /// Piecewise-linear `σ` through `(0, 0)` and the given knots, extended
    /// linearly past the last knot.
    Tabulated { h: Vec<T>, sigma: Vec<T> },
}

impl<T: Real> HolderProfile<T> {
    pub fn power(scale: T, exponent: T) -> Result<Self> {
        if !(scale > T::zero() && scale.is_finite()) {
            return Err(Error::param("scale", format!("must be positive, got {scale}")));
        }
        if !(exponent > T::zero() && exponent <= T::one()) {
            return Err(Error::param("exponent", format!("must lie in (0, 1], got {exponent}")));
        }
        Ok(Self::Power { scale, exponent })
    }

    /// Knots must be strictly increasing in both coordinates with `h > 0`, `σ > 0`.
    pub fn tabulated(h: Vec<T>, sigma: Vec<T>) -> Result<Self> {
        if h.is_empty() || h.len() != sigma.len() {
            return Err(Error::param("table", "need equally many h and sigma knots, at least one"));
        }
        let mut prev = (T::zero(), T::zero());
        for (&a, &b) in h.iter().zip(&sigma) {
            if !(a > prev.0 && b > prev.1 && a.is_finite() && b.is_finite()) {
                return Err(Error::param("table", "knots must be finite and strictly increasing from (0, 0)"));
            }
            prev = (a, b);
        }
        Ok(Self::Tabulated { h, sigma })
    }

    pub fn sigma(&self, h: T) -> T {
        match self {
            Self::Power { scale, exponent } => {
                if h <= T::zero() {
                    T::zero()
                } else {
                    *scale * h.powf(*exponent)
                }
            }
            Self::Tabulated { h: hs, sigma } => {
                if h <= T::zero() {
                    return T::zero();
                }
                let i = hs.partition_point(|&k| k < h);
                let (x0, y0, x1, y1) = match i {
                    0 => (T::zero(), T::zero(), hs[0], sigma[0]),
                    i if i == hs.len() => {
                        let n = hs.len();
                        if n == 1 {
                            (T::zero(), T::zero(), hs[0], sigma[0])
                        } else {
                            (hs[n - 2], sigma[n - 2], hs[n - 1], sigma[n - 1])
                        }
                    }
                    i => (hs[i - 1], sigma[i - 1], hs[i], sigma[i]),
                };
                y0 + (y1 - y0) * (h - x0) / (x1 - x0)
            }
        }
    }

    /// `σ⁻¹(u)`; closed form for the power law, bisection for tables.
    pub fn inverse(&self, u: T) -> T {
        if u <= T::zero() {
            return T::zero();
        }
        match self {
            Self::Power { scale, exponent } => (u / *scale).powf(exponent.recip()),
            Self::Tabulated { .. } => {
                let mut hi = T::one();
                while self.sigma(hi) < u {
                    hi = hi * T::lit(2.0);
                }
                let mut lo = T::zero();
                let tol = T::lit(1e-12).max(T::epsilon() * T::lit(4.0));
                while hi - lo > tol * hi.max(T::one()) {
                    let mid = T::lit(0.5) * (lo + hi);
                    if mid == lo || mid == hi {
                        break;
                    }
                    if self.sigma(mid) < u {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                T::lit(0.5) * (lo + hi)
            }
        }
    }

    /// `(c, γ)` of a power-law profile.
    pub fn power_params(&self) -> Option<(T, T)> {
        match self {
            Self::Power { scale, exponent } => Some((*scale, *exponent)),
            Self::Tabulated { .. } => None,
        }
    }

    /// `γ₀ = σ(diam)`.
    pub fn gamma0(&self, bx: &AnisotropicBox<T>) -> T {
        self.sigma(bx.diameter())
    }
}

/// Function applied to the log covering number inside the entropy integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EntropyKernel {
    /// `(ln N)^{1/β}`, the form dominated by the closed-form constant.
    #[default]
    LogPower,
    /// `Ψ(ln N) = (ln N)^{1/β} α^{−1/α}`.
    Psi,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropySettings<T> {
    pub kernel: EntropyKernel,
    pub quad: QuadConfig<T>,
}

impl<T: Real> Default for EntropySettings<T> {
    fn default() -> Self {
        Self {
            kernel: EntropyKernel::LogPower,
            quad: QuadConfig::new(T::lit(1e-8).max(T::epsilon() * T::lit(100.0))),
        }
    }
}

impl<T: Real> EntropySettings<T> {
    pub fn with_tol(mut self, abs_tol: T) -> Self {
        self.quad.abs_tol = abs_tol;
        self
    }

    pub fn with_kernel(mut self, kernel: EntropyKernel) -> Self {
        self.kernel = kernel;
        self
    }
}

fn check_gamma_beta<T: Real>(gamma: T, fam: &PhiFamily<T>) -> Result<T> {
    let gb = gamma * fam.beta();
    if !(gb > T::one()) {
        return Err(Error::EntropyDiverges { gamma_beta: gb.as_f64() });
    }
    Ok(gb)
}

/// `c₁ = 2^{1/β} c^{1/(γβ)} / (1 − 1/(γβ)) · Σ (1/H_i)(T_i/2)^{H_i/β}`.
pub fn c1_constant<T: Real>(bx: &AnisotropicBox<T>, prof: &HolderProfile<T>, fam: &PhiFamily<T>) -> Result<T> {
    let (c, gamma) = prof
        .power_params()
        .ok_or_else(|| Error::param("profile", "closed form needs a power-law profile"))?;
    let gb = check_gamma_beta(gamma, fam)?;
    let beta = fam.beta();
    let two = T::lit(2.0);
    let sum = (0..2).fold(T::zero(), |acc, i| {
        let h = bx.exponent(i);
        let half = bx.side(i) / two;
        let term = if half == T::zero() { T::zero() } else { half.powf(h / beta) / h };
        acc + term
    });
    Ok(two.powf(beta.recip()) * c.powf(gb.recip()) / (T::one() - gb.recip()) * sum)
}

/// `Ĩ(ε) = c₁ ε^{1 − 1/(γβ)}`.
pub fn entropy_integral_closed<T: Real>(eps: T, c1: T, prof: &HolderProfile<T>, fam: &PhiFamily<T>) -> Result<T> {
    let (_, gamma) = prof
        .power_params()
        .ok_or_else(|| Error::param("profile", "closed form needs a power-law profile"))?;
    let gb = check_gamma_beta(gamma, fam)?;
    if !(eps >= T::zero()) {
        return Err(Error::param("eps", format!("must be nonnegative, got {eps}")));
    }
    if eps == T::zero() {
        return Ok(T::zero());
    }
    Ok(c1 * eps.powf(T::one() - gb.recip()))
}

/// Covering bound capped at one ball once the radius reaches the diameter.
pub fn covering_bound_capped<T: Real>(bx: &AnisotropicBox<T>, r: T) -> T {
    if r >= bx.diameter() {
        return T::one();
    }
    bx.covering_upper_bound(r).unwrap_or_else(|_| T::infinity())
}

/// `∫₀^ε κ(ln Ñ(σ⁻¹(u))) du` by adaptive quadrature, `Ñ` the capped covering bound.
///
/// The integrand vanishes for `u ≥ σ(diam)`, so the range is cut there.
pub fn entropy_integral_numeric<T: Real>(
    eps: T,
    bx: &AnisotropicBox<T>,
    prof: &HolderProfile<T>,
    fam: &PhiFamily<T>,
    settings: &EntropySettings<T>,
) -> Result<T> {
    if !(eps >= T::zero()) {
        return Err(Error::param("eps", format!("must be nonnegative, got {eps}")));
    }
    let upper = eps.min(prof.gamma0(bx));
    if upper <= T::zero() {
        return Ok(T::zero());
    }
    let inv_beta = fam.beta().recip();
    let psi_scale = match settings.kernel {
        EntropyKernel::LogPower => T::one(),
        EntropyKernel::Psi => fam.alpha().powf(-fam.alpha().recip()),
    };
    let integrand = |u: T| {
        let n = covering_bound_capped(bx, prof.inverse(u));
        let ln = n.ln();
        if ln <= T::zero() {
            T::zero()
        } else {
            psi_scale * ln.powf(inv_beta)
        }
    };
    Ok(integrate(integrand, T::zero(), upper, &settings.quad)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit() -> AnisotropicBox<f64> {
        AnisotropicBox::from_extents(1.0, 1.0, (1.0, 1.0)).unwrap()
    }

    fn lin() -> HolderProfile<f64> {
        HolderProfile::power(1.0, 1.0).unwrap()
    }

    #[test]
    fn c1_examples() {
        let g = PhiFamily::gaussian();
        assert!((c1_constant(&unit(), &lin(), &g).unwrap() - 4.0).abs() < 1e-12);
        let big = AnisotropicBox::from_extents(2.0, 2.0, (1.0, 1.0)).unwrap();
        assert!((c1_constant(&big, &lin(), &g).unwrap() - 4.0 * 2f64.sqrt()).abs() < 1e-12);
        let weak = HolderProfile::power(1.0, 0.4).unwrap();
        assert!(matches!(c1_constant(&unit(), &weak, &g), Err(Error::EntropyDiverges { .. })));
    }

    #[test]
    fn closed_examples() {
        let g = PhiFamily::gaussian();
        let p: HolderProfile<f64> = HolderProfile::power(1.0, 1.0).unwrap();
        assert!((entropy_integral_closed(0.25, 4.0, &p, &g).unwrap() - 2.0).abs() < 1e-14);
        assert!((entropy_integral_closed(1.0, 4.0, &p, &g).unwrap() - 4.0).abs() < 1e-14);
        assert!(entropy_integral_closed(1e-30, 4.0, &p, &g).unwrap() < 1e-14);
        assert_eq!(entropy_integral_closed(0.0, 4.0, &p, &g).unwrap(), 0.0);
    }

    #[test]
    fn numeric_fixtures() {
        let g = PhiFamily::gaussian();
        let s = EntropySettings::default().with_tol(1e-12);
        let v = entropy_integral_numeric(0.25, &unit(), &lin(), &g, &s).unwrap();
        assert!((v - 0.551_279_302_807_187).abs() < 1e-9, "{v}");
        let big = AnisotropicBox::from_extents(2.0, 2.0, (1.0, 1.0)).unwrap();
        let w = entropy_integral_numeric(0.25, &big, &lin(), &g, &s).unwrap();
        assert!((w - 0.620_271_297_492_499).abs() < 1e-9, "{w}");
        assert!(w > v);
        let psi = entropy_integral_numeric(0.25, &unit(), &lin(), &g, &s.with_kernel(EntropyKernel::Psi)).unwrap();
        assert!((psi - v / 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn numeric_flat_beyond_diameter() {
        let g = PhiFamily::gaussian();
        let s = EntropySettings::default();
        let at = entropy_integral_numeric(2.0, &unit(), &lin(), &g, &s).unwrap();
        let past = entropy_integral_numeric(3.0, &unit(), &lin(), &g, &s).unwrap();
        assert_eq!(at, past);
        assert_eq!(entropy_integral_numeric(0.0, &unit(), &lin(), &g, &s).unwrap(), 0.0);
    }

    #[test]
    fn domination_grid() {
        let s = EntropySettings::default();
        for alpha in [1.25, 1.5, 2.0] {
            let fam = PhiFamily::new(alpha).unwrap();
            for gamma in [0.6, 0.8, 1.0] {
                if gamma * fam.beta() <= 1.0 {
                    continue;
                }
                let prof = HolderProfile::power(1.3, gamma).unwrap();
                for h1 in [0.25, 0.5, 1.0] {
                    for h2 in [0.25, 0.5, 1.0] {
                        let bx = AnisotropicBox::from_extents(1.5, 0.8, (h1, h2)).unwrap();
                        let c1 = c1_constant(&bx, &prof, &fam).unwrap();
                        for eps in [0.05, 0.3, 1.0] {
                            let n = entropy_integral_numeric(eps, &bx, &prof, &fam, &s).unwrap();
                            let c = entropy_integral_closed(eps, c1, &prof, &fam).unwrap();
                            assert!(n <= c + 1e-6, "alpha={alpha} gamma={gamma} H=({h1},{h2}) eps={eps}: {n} > {c}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn tabulated_profile_inverts() {
        let p: HolderProfile<f64> = HolderProfile::tabulated(vec![0.5, 1.0, 2.0], vec![1.0, 1.5, 1.75]).unwrap();
        assert!((p.sigma(0.25) - 0.5).abs() < 1e-15);
        assert!((p.sigma(3.0) - 2.0).abs() < 1e-15);
        for u in [0.1, 1.2, 1.6, 3.0] {
            assert!((p.sigma(p.inverse(u)) - u).abs() < 1e-11);
        }
        assert!(HolderProfile::tabulated(vec![1.0, 0.5], vec![1.0, 2.0]).is_err());
        assert!(c1_constant(&unit(), &p, &PhiFamily::gaussian()).is_err());
    }

    #[test]
    fn tabulated_matches_power_on_knots() {
        // a linear table is exactly σ(h) = h
        let t = HolderProfile::tabulated(vec![1.0, 4.0], vec![1.0, 4.0]).unwrap();
        let g = PhiFamily::gaussian();
        let s = EntropySettings::default();
        let a = entropy_integral_numeric(0.5, &unit(), &t, &g, &s).unwrap();
        let b = entropy_integral_numeric(0.5, &unit(), &lin(), &g, &s).unwrap();
        assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn single_precision_numeric() {
        let bx = AnisotropicBox::from_extents(1.0f32, 1.0, (1.0, 1.0)).unwrap();
        let p = HolderProfile::power(1.0f32, 1.0).unwrap();
        let v = entropy_integral_numeric(0.25f32, &bx, &p, &PhiFamily::gaussian(), &EntropySettings::default()).unwrap();
        assert!((v - 0.551_279_3).abs() < 1e-4);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn integrals_monotone(e1 in 0.001f64..2.0, e2 in 0.001f64..2.0, gamma in 0.55f64..=1.0, h in 0.2f64..=1.0) {
            let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
            let fam = PhiFamily::gaussian();
            let prof = HolderProfile::power(1.0, gamma).unwrap();
            let bx = AnisotropicBox::from_extents(1.0, 2.0, (h, 1.0)).unwrap();
            let s = EntropySettings::default();
            let a = entropy_integral_numeric(lo, &bx, &prof, &fam, &s).unwrap();
            let b = entropy_integral_numeric(hi, &bx, &prof, &fam, &s).unwrap();
            prop_assert!(a <= b + 1e-8);
            let c1 = c1_constant(&bx, &prof, &fam).unwrap();
            prop_assert!(entropy_integral_closed(lo, c1, &prof, &fam).unwrap() <= entropy_integral_closed(hi, c1, &prof, &fam).unwrap());
        }
    }
}
