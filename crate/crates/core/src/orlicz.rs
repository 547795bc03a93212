//! The power Orlicz family `φ(x) = |x|^α / α`, `1 < α ≤ 2`.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `φ(x) = |x|^α / α` together with its conjugate exponent `β = α / (α − 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiFamily<T> {
    alpha: T,
    beta: T,
}

impl<T: Real> PhiFamily<T> {
    /// Rejects `α` outside `(1, 2]`.
    pub fn new(alpha: T) -> Result<Self> {
        if !(alpha > T::one() && alpha <= T::lit(2.0)) {
            return Err(Error::param("alpha", format!("must lie in (1, 2], got {alpha}")));
        }
        Ok(Self {
            alpha,
            beta: alpha / (alpha - T::one()),
        })
    }

    /// The sub-Gaussian member `α = β = 2`.
    pub fn gaussian() -> Self {
        let two = T::lit(2.0);
        Self { alpha: two, beta: two }
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    /// `φ(x) = |x|^α / α`.
    pub fn phi(&self, x: T) -> T {
        x.abs().powf(self.alpha) / self.alpha
    }

    /// Young–Fenchel transform `φ*(x) = |x|^β / β`.
    pub fn conjugate(&self, x: T) -> T {
        x.abs().powf(self.beta) / self.beta
    }

    /// `φ⁻¹(y) = (αy)^{1/α}` for `y ≥ 0`.
    pub fn inverse(&self, y: T) -> Result<T> {
        if !(y >= T::zero()) {
            return Err(Error::param("y", format!("inverse needs y >= 0, got {y}")));
        }
        Ok((self.alpha * y).powf(self.alpha.recip()))
    }

    /// `Ψ(v) = v / φ⁻¹(v) = v^{1/β} α^{−1/α}`, with `Ψ(0) = 0`.
    pub fn psi(&self, v: T) -> T {
        if v <= T::zero() {
            return T::zero();
        }
        v.powf(self.beta.recip()) * self.alpha.powf(-self.alpha.recip())
    }

    /// `min(1, 2 exp(−φ*(u/τ)))`, the tail of a variable with `τ_φ(ζ) ≤ τ`.
    pub fn tail_bound(&self, u: T, tau: T) -> Result<T> {
        if !(tau > T::zero()) {
            return Err(Error::param("tau", format!("must be positive, got {tau}")));
        }
        if !(u >= T::zero()) {
            return Err(Error::param("u", format!("must be nonnegative, got {u}")));
        }
        Ok(clamp_prob(T::lit(2.0) * (-self.conjugate(u / tau)).exp()))
    }
}

/// `P{|ζ| > u} ≤ min(1, 2 exp(−φ*(u/τ)))` for `τ_φ(ζ) ≤ τ`.
pub fn rv_tail_bound<T: Real>(u: T, tau: T, fam: &PhiFamily<T>) -> Result<T> {
    fam.tail_bound(u, tau)
}

/// Clamps a raw bound expression into `[0, 1]`.
pub(crate) fn clamp_prob<T: Real>(p: T) -> T {
    if p.is_nan() {
        return T::one();
    }
    p.max(T::zero()).min(T::one())
}
