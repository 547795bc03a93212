//! Growth bounds over the strip `V = [0, ∞) × [−A, A]`.
//!
//! The strip is cut into cells `V_k = [b_k, b_{k+1}] × [−A, A]`. With
//! `ε_k = sup_{V_k} τ_φ(X)`, increments bounded by `c_k h^γ` on `V_k` and a
//! weight `f`, the series
//!
//! ```text
//! C = Σ ε_k / f(b_k),   S = Σ ε_k^{1 − 1/(γβ)} c₁(k) / f(b_k)
//! ```
//!
//! control `P{sup_V |X(t, x)| / f(t) > u}`. Cell quantities are evaluated in
//! log space so exponential partitions do not overflow.

pub mod series;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::orlicz::{clamp_prob, PhiFamily};
use crate::scalar::Real;
pub use series::{sum_series, Certificate, SeriesSettings, SeriesSum};

type SeqFn<T> = Arc<dyn Fn(usize) -> T + Send + Sync>;
type WeightFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Cell boundaries `0 = b₀ < b₁ < …`.
#[derive(Clone)]
pub enum Partition<T> {
    /// `b₀ = 0`, `b_k = e^k` for `k ≥ 1`.
    Exponential,
    Custom(SeqFn<T>),
}

/// Weight `f` with `f(b_k) > 0`.
#[derive(Clone)]
pub enum Weight<T> {
    /// `f(t) = max(t^a |ln t|^p, 1)`.
    PowerLog { exponent: T, log_power: T },
    Custom(WeightFn<T>),
}

/// `ε_k`, the largest `τ_φ` of the field on cell `k`.
#[derive(Clone)]
pub enum CellScale<T> {
    Explicit(SeqFn<T>),
    /// `ln ε_k`, for scales that overflow the scalar type.
    ExplicitLog(SeqFn<T>),
    /// `ε_k = c(δ) b_{k+1}^δ`, from `τ_φ(X(t, x)) ≤ c(δ) t^δ`.
    PowerEnvelope { c_delta: T, delta: T },
}

/// Per-cell Hölder constants `c_k`.
#[derive(Clone)]
pub enum CellConstants<T> {
    Uniform(T),
    PerCell(SeqFn<T>),
}

impl<T: fmt::Debug> fmt::Debug for Partition<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Partition::Exponential => f.write_str("Exponential"),
            Partition::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for Weight<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::PowerLog { exponent, log_power } => f
                .debug_struct("PowerLog")
                .field("exponent", exponent)
                .field("log_power", log_power)
                .finish(),
            Weight::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for CellScale<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellScale::Explicit(_) => f.write_str("Explicit(..)"),
            CellScale::ExplicitLog(_) => f.write_str("ExplicitLog(..)"),
            CellScale::PowerEnvelope { c_delta, delta } => f
                .debug_struct("PowerEnvelope")
                .field("c_delta", c_delta)
                .field("delta", delta)
                .finish(),
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for CellConstants<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellConstants::Uniform(c) => f.debug_tuple("Uniform").field(c).finish(),
            CellConstants::PerCell(_) => f.write_str("PerCell(..)"),
        }
    }
}

/// Everything the growth series depend on.
#[derive(Debug, Clone)]
pub struct GrowthSpec<T> {
    pub partition: Partition<T>,
    pub weight: Weight<T>,
    pub scale: CellScale<T>,
    pub constants: CellConstants<T>,
    /// Strip half-width `A`.
    pub half_width: T,
    pub gamma: T,
    /// Metric exponents `(H₁, H₂)`.
    pub exponents: (T, T),
    pub family: PhiFamily<T>,
    pub series: SeriesSettings<T>,
}

/// `C`, `S` and `θ̃` with the data needed by the tail formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthConstants<T> {
    pub c: SeriesSum<T>,
    pub s: SeriesSum<T>,
    /// `inf_k γ_k / ε_k` over the cells used by the series.
    pub theta_tilde: T,
    pub gamma_beta: T,
    pub family: PhiFamily<T>,
}

fn log_add<T: Real>(x: T, y: T) -> T {
    if x == T::neg_infinity() {
        return y;
    }
    if y == T::neg_infinity() {
        return x;
    }
    let m = x.max(y);
    m + ((x - m).exp() + (y - m).exp()).ln()
}

fn positive_ln<T: Real>(what: &'static str, k: usize, v: T) -> Result<T> {
    if !(v > T::zero() && v.is_finite()) {
        return Err(Error::param(what, format!("cell {k}: must be positive and finite, got {v}")));
    }
    Ok(v.ln())
}

impl<T: Real> GrowthSpec<T> {
    /// Validates the scalar parameters; sequence values are checked lazily per cell.
    pub fn validate(&self) -> Result<()> {
        if !(self.half_width >= T::zero() && self.half_width.is_finite()) {
            return Err(Error::param("half_width", format!("must be finite and nonnegative, got {}", self.half_width)));
        }
        if !(self.gamma > T::zero() && self.gamma <= T::one()) {
            return Err(Error::param("gamma", format!("must lie in (0, 1], got {}", self.gamma)));
        }
        for (i, h) in [self.exponents.0, self.exponents.1].into_iter().enumerate() {
            if !(h > T::zero() && h <= T::one()) {
                return Err(Error::param("exponents", format!("H{} must lie in (0, 1], got {h}", i + 1)));
            }
        }
        if let Weight::PowerLog { exponent, log_power } = self.weight {
            if !(exponent >= T::zero() && log_power >= T::zero()) {
                return Err(Error::param("weight", "power-log weight needs nonnegative exponents"));
            }
        }
        if let CellScale::PowerEnvelope { c_delta, delta } = self.scale {
            if !(c_delta > T::zero() && delta > T::zero()) {
                return Err(Error::param("scale", "power envelope needs c(delta) > 0 and delta > 0"));
            }
        }
        if let CellConstants::Uniform(c) = self.constants {
            if !(c > T::zero()) {
                return Err(Error::param("constants", format!("c_k must be positive, got {c}")));
            }
        }
        self.gamma_beta().map(|_| ())
    }

    pub fn gamma_beta(&self) -> Result<T> {
        let gb = self.gamma * self.family.beta();
        if !(gb > T::one()) {
            return Err(Error::EntropyDiverges { gamma_beta: gb.as_f64() });
        }
        Ok(gb)
    }

    /// `ln b_k`, `−∞` for `k = 0`.
    pub fn ln_b(&self, k: usize) -> Result<T> {
        match &self.partition {
            Partition::Exponential => Ok(if k == 0 { T::neg_infinity() } else { T::from_usize_lossy(k) }),
            Partition::Custom(b) => {
                let v = b(k);
                if k == 0 {
                    if v != T::zero() {
                        return Err(Error::param("partition", format!("b_0 must be 0, got {v}")));
                    }
                    return Ok(T::neg_infinity());
                }
                positive_ln("partition", k, v)
            }
        }
    }

    /// `b_k`; may overflow to infinity for large `k`.
    pub fn b(&self, k: usize) -> Result<T> {
        Ok(self.ln_b(k)?.exp())
    }

    /// `ln l_k`, `l_k = b_{k+1} − b_k`.
    pub fn ln_l(&self, k: usize) -> Result<T> {
        match &self.partition {
            // l_0 = e, l_k = e^k (e − 1)
            Partition::Exponential => Ok(if k == 0 {
                T::one()
            } else {
                T::from_usize_lossy(k) + (T::E() - T::one()).ln()
            }),
            Partition::Custom(b) => {
                let (lo, hi) = (b(k), b(k + 1));
                if !(hi > lo) {
                    return Err(Error::param("partition", format!("b_{} = {hi} must exceed b_{k} = {lo}", k + 1)));
                }
                positive_ln("partition", k, hi - lo)
            }
        }
    }

    /// `ln f(b_k)`.
    pub fn ln_f(&self, k: usize) -> Result<T> {
        let ln_b = self.ln_b(k)?;
        match &self.weight {
            Weight::PowerLog { exponent, log_power } => {
                if ln_b == T::neg_infinity() {
                    return Ok(T::zero());
                }
                let log_part = if *log_power == T::zero() {
                    T::zero()
                } else if ln_b == T::zero() {
                    T::neg_infinity()
                } else {
                    *log_power * ln_b.abs().ln()
                };
                Ok((*exponent * ln_b + log_part).max(T::zero()))
            }
            Weight::Custom(f) => positive_ln("weight", k, f(ln_b.exp())),
        }
    }

    /// `ln ε_k`.
    pub fn ln_eps(&self, k: usize) -> Result<T> {
        match &self.scale {
            CellScale::Explicit(e) => positive_ln("scale", k, e(k)),
            CellScale::ExplicitLog(e) => {
                let v = e(k);
                if !v.is_finite() {
                    return Err(Error::param("scale", format!("cell {k}: ln eps must be finite, got {v}")));
                }
                Ok(v)
            }
            CellScale::PowerEnvelope { c_delta, delta } => Ok(c_delta.ln() + *delta * self.ln_b(k + 1)?),
        }
    }

    pub fn c_k(&self, k: usize) -> Result<T> {
        let c = match &self.constants {
            CellConstants::Uniform(c) => *c,
            CellConstants::PerCell(f) => f(k),
        };
        positive_ln("constants", k, c).map(|_| c)
    }

    /// `ln c₁(k)`.
    pub fn ln_cell_constant(&self, k: usize) -> Result<T> {
        let gb = self.gamma_beta()?;
        let beta = self.family.beta();
        let (h1, h2) = self.exponents;
        let two = T::lit(2.0);
        let first = (h1 / beta) * (self.ln_l(k)? - two.ln()) - h1.ln();
        let second = if self.half_width > T::zero() {
            (h2 / beta) * self.half_width.ln() - h2.ln()
        } else {
            T::neg_infinity()
        };
        let factor = two.ln() / beta + self.c_k(k)?.ln() / gb - (T::one() - gb.recip()).ln();
        Ok(log_add(first, second) + factor)
    }

    /// `c₁(k) = ((1/H₁)(l_k/2)^{H₁/β} + (1/H₂)A^{H₂/β}) 2^{1/β} c_k^{1/(γβ)} / (1 − 1/(γβ))`.
    pub fn cell_constant(&self, k: usize) -> Result<T> {
        Ok(self.ln_cell_constant(k)?.exp())
    }

    /// `ε_k / f_k`.
    pub fn c_term(&self, k: usize) -> Result<T> {
        Ok((self.ln_eps(k)? - self.ln_f(k)?).exp())
    }

    /// `ε_k^{1 − 1/(γβ)} c₁(k) / f_k`.
    pub fn s_term(&self, k: usize) -> Result<T> {
        let gb = self.gamma_beta()?;
        Ok(((T::one() - gb.recip()) * self.ln_eps(k)? + self.ln_cell_constant(k)? - self.ln_f(k)?).exp())
    }

    pub fn series_c(&self) -> Result<SeriesSum<T>> {
        self.validate()?;
        sum_series(|k| self.c_term(k), &self.series)
    }

    pub fn series_s(&self) -> Result<SeriesSum<T>> {
        self.validate()?;
        sum_series(|k| self.s_term(k), &self.series)
    }

    /// `γ_k / ε_k` with `γ_k = c_k (l_k^{H₁} + (2A)^{H₂})^γ`.
    pub fn theta_ratio(&self, k: usize) -> Result<T> {
        let (h1, h2) = self.exponents;
        let width = if self.half_width > T::zero() {
            h2 * (T::lit(2.0) * self.half_width).ln()
        } else {
            T::neg_infinity()
        };
        let ln_diam = log_add(h1 * self.ln_l(k)?, width);
        Ok((self.c_k(k)?.ln() + self.gamma * ln_diam - self.ln_eps(k)?).exp())
    }

    /// `min_{k < cells} γ_k / ε_k`.
    pub fn theta_tilde(&self, cells: usize) -> Result<T> {
        (0..cells.max(1)).try_fold(T::infinity(), |m, k| Ok(m.min(self.theta_ratio(k)?)))
    }

    /// `C`, `S` and `θ̃`, the latter over as many cells as the longer series used.
    pub fn constants(&self) -> Result<GrowthConstants<T>> {
        let c = self.series_c()?;
        let s = self.series_s()?;
        let theta_tilde = self.theta_tilde(c.terms.max(s.terms))?;
        Ok(GrowthConstants {
            c,
            s,
            theta_tilde,
            gamma_beta: self.gamma_beta()?,
            family: self.family,
        })
    }
}

impl<T: Real> GrowthConstants<T> {
    /// Constants from known `C`, `S`, `θ̃`, e.g. closed-form sums.
    pub fn from_values(c: T, s: T, theta_tilde: T, gamma_beta: T, family: PhiFamily<T>) -> Result<Self> {
        if !(c > T::zero() && s >= T::zero() && theta_tilde > T::zero()) {
            return Err(Error::param("constants", "need C > 0, S >= 0 and theta_tilde > 0"));
        }
        if !(gamma_beta > T::one()) {
            return Err(Error::EntropyDiverges {
                gamma_beta: gamma_beta.as_f64(),
            });
        }
        let exact = |v: T| SeriesSum {
            value: v,
            half_width: T::zero(),
            partial: v,
            terms: 0,
            certificate: Certificate::Vanished,
        };
        Ok(Self {
            c: exact(c),
            s: exact(s),
            theta_tilde,
            gamma_beta,
            family,
        })
    }

    /// Upper end (exclusive) of admissible `θ`: `min(1, θ̃)`.
    pub fn theta_max(&self) -> T {
        T::one().min(self.theta_tilde)
    }

    fn check_theta(&self, theta: T) -> Result<()> {
        if !(theta > T::zero() && theta < self.theta_max()) {
            return Err(Error::InvalidTheta {
                theta: theta.as_f64(),
                reason: format!("must lie in (0, min(1, theta_tilde)) = (0, {})", self.theta_max()),
            });
        }
        Ok(())
    }

    /// `2S / ((1 − θ) θ^{1/(γβ)})`.
    pub fn u_threshold(&self, theta: T) -> Result<T> {
        self.check_theta(theta)?;
        Ok(T::lit(2.0) * self.s.value / ((T::one() - theta) * theta.powf(self.gamma_beta.recip())))
    }

    /// `2 exp(−(u(1 − θ) − 2Sθ^{−1/(γβ)})^β / (βC^β))`.
    pub fn tail_bound(&self, u: T, theta: T) -> Result<T> {
        let thr = self.u_threshold(theta)?;
        if !(u > thr) {
            return Err(Error::BelowThreshold {
                u: u.as_f64(),
                threshold: thr.as_f64(),
            });
        }
        let two = T::lit(2.0);
        let arg = u * (T::one() - theta) - two * self.s.value * theta.powf(-self.gamma_beta.recip());
        Ok(self.finish(arg))
    }

    /// `2 exp((λC/(1 − θ))^α / α + 2λS / ((1 − θ)θ^{1/(γβ)}))`.
    pub fn mgf_bound(&self, lambda: T, theta: T) -> Result<T> {
        if !(lambda > T::zero()) {
            return Err(Error::param("lambda", format!("must be positive, got {lambda}")));
        }
        self.check_theta(theta)?;
        let one = T::one();
        let two = T::lit(2.0);
        let expo = self.family.phi(lambda * self.c.value / (one - theta))
            + two * lambda * self.s.value / ((one - theta) * theta.powf(self.gamma_beta.recip()));
        Ok(two * expo.exp())
    }

    /// `θ = u^{−γβ/(γβ+1)}`.
    pub fn remark_theta(&self, u: T) -> T {
        u.powf(-self.gamma_beta / (self.gamma_beta + T::one()))
    }

    /// `(1 + 2S)^{(γβ+1)/(γβ)}`.
    pub fn remark_threshold(&self) -> T {
        let gb = self.gamma_beta;
        (T::one() + T::lit(2.0) * self.s.value).powf((gb + T::one()) / gb)
    }

    /// The tail bound at `θ = u^{−γβ/(γβ+1)}`:
    /// `2 exp(−(u − u^{1/(γβ+1)}(1 + 2S))^β / (βC^β))`.
    pub fn remark_bound(&self, u: T) -> Result<T> {
        let thr = self.remark_threshold();
        if !(u > thr) {
            return Err(Error::BelowThreshold {
                u: u.as_f64(),
                threshold: thr.as_f64(),
            });
        }
        self.check_theta(self.remark_theta(u))?;
        let gb = self.gamma_beta;
        let arg = u - u.powf((gb + T::one()).recip()) * (T::one() + T::lit(2.0) * self.s.value);
        Ok(self.finish(arg))
    }

    /// Smallest tail bound over admissible `θ` at `u`.
    pub fn optimize_theta(&self, u: T) -> Result<(T, T)> {
        let two = T::lit(2.0);
        let z = |theta: T| u * (T::one() - theta) - two * self.s.value * theta.powf(-self.gamma_beta.recip());
        let theta = crate::supbound::maximise_on_log_grid(z, self.theta_max())?;
        if !(z(theta) > T::zero()) {
            return Err(Error::NoValidTheta {
                u: u.as_f64(),
                inf_threshold: f64::NAN,
            });
        }
        Ok((theta, self.finish(z(theta))))
    }

    fn finish(&self, arg: T) -> T {
        let beta = self.family.beta();
        clamp_prob(T::lit(2.0) * (-(arg / self.c.value).powf(beta) / beta).exp())
    }
}

/// Tail bound over the strip at a fixed `θ`.
pub fn growth_tail_bound<T: Real>(u: T, theta: T, spec: &GrowthSpec<T>) -> Result<T> {
    spec.constants()?.tail_bound(u, theta)
}

/// [`growth_tail_bound`] for a spec whose cell scales come from a power envelope
/// `τ_φ(X(t, x)) ≤ c(δ) t^δ`.
pub fn growth_tail_bound_power<T: Real>(u: T, theta: T, spec: &GrowthSpec<T>) -> Result<T> {
    if !matches!(spec.scale, CellScale::PowerEnvelope { .. }) {
        return Err(Error::param("scale", "expected a power envelope c(delta) t^delta"));
    }
    growth_tail_bound(u, theta, spec)
}

/// Tail bound at `θ = u^{−γβ/(γβ+1)}`.
pub fn remark_theta_bound<T: Real>(u: T, spec: &GrowthSpec<T>) -> Result<T> {
    spec.constants()?.remark_bound(u)
}

/// Tail of `ξ` in the envelope `|X(t, x)| ≤ f(t) ξ`; power-envelope specs only.
pub fn envelope_tail<T: Real>(u: T, spec: &GrowthSpec<T>) -> Result<T> {
    if !matches!(spec.scale, CellScale::PowerEnvelope { .. }) {
        return Err(Error::param("scale", "the envelope needs a power envelope c(delta) t^delta"));
    }
    remark_theta_bound(u, spec)
}
