//! Supremum bounds for a φ-sub-Gaussian field on a bounded anisotropic box.
//!
//! With `Ĩ` an entropy integral and `0 < θ < 1`,
//!
//! ```text
//! P{sup |X| > u} ≤ 2 exp(−φ*(z)),   z = (u(1 − θ) − (2/θ) Ĩ(θε₀)) / ε₀,
//! ```
//!
//! asserted for `u > 2Ĩ(θε₀) / (θ(1 − θ))`, i.e. for `z > 0`.

use crate::entropy::{c1_constant, entropy_integral_numeric, EntropySettings, HolderProfile};
use crate::error::{Error, Result};
use crate::metric::AnisotropicBox;
use crate::orlicz::{clamp_prob, PhiFamily};
use crate::scalar::Real;

const GRID_POINTS: usize = 512;
const GOLDEN_TOL: f64 = 1e-10;

/// Closed-form entropy `Ĩ(ε) = c₁ ε^{1 − 1/(γβ)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedEntropy<T> {
    pub c1: T,
    pub gamma_beta: T,
}

impl<T: Real> ClosedEntropy<T> {
    pub fn new(c1: T, gamma_beta: T) -> Result<Self> {
        if !(gamma_beta > T::one()) {
            return Err(Error::EntropyDiverges {
                gamma_beta: gamma_beta.as_f64(),
            });
        }
        if !(c1 >= T::zero() && c1.is_finite()) {
            return Err(Error::param("c1", format!("must be finite and nonnegative, got {c1}")));
        }
        Ok(Self { c1, gamma_beta })
    }

    pub fn at(&self, eps: T) -> T {
        if eps <= T::zero() {
            return T::zero();
        }
        self.c1 * eps.powf(T::one() - self.gamma_beta.recip())
    }
}

/// `θ` with the bound it yields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaOptimum<T> {
    pub theta: T,
    pub bound: T,
    /// Argument of `φ*` at the optimum.
    pub z: T,
}

/// Everything the bounded-domain bounds depend on.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldBoundInputs<T> {
    /// `ε₀ = sup τ_φ(X(t))`.
    pub eps0: T,
    /// `γ₀ = σ(diam)`.
    pub gamma0: T,
    pub bx: AnisotropicBox<T>,
    pub profile: HolderProfile<T>,
    pub family: PhiFamily<T>,
}

impl<T: Real> FieldBoundInputs<T> {
    /// Takes `γ₀ = σ(diam)` from the profile.
    pub fn new(eps0: T, bx: AnisotropicBox<T>, profile: HolderProfile<T>, family: PhiFamily<T>) -> Result<Self> {
        if !(eps0 > T::zero() && eps0.is_finite()) {
            return Err(Error::param("eps0", format!("must be positive, got {eps0}")));
        }
        let gamma0 = profile.gamma0(&bx);
        if !(gamma0 > T::zero()) {
            return Err(Error::param("gamma0", "box has zero diameter"));
        }
        Ok(Self {
            eps0,
            gamma0,
            bx,
            profile,
            family,
        })
    }

    pub fn with_gamma0(mut self, gamma0: T) -> Result<Self> {
        if !(gamma0 > T::zero()) {
            return Err(Error::param("gamma0", format!("must be positive, got {gamma0}")));
        }
        self.gamma0 = gamma0;
        Ok(self)
    }

    pub fn closed_entropy(&self) -> Result<ClosedEntropy<T>> {
        let c1 = c1_constant(&self.bx, &self.profile, &self.family)?;
        let (_, gamma) = self.profile.power_params().expect("checked by c1_constant");
        ClosedEntropy::new(c1, gamma * self.family.beta())
    }

    /// Largest admissible `θ` (exclusive): `min(1, γ₀/ε₀)`.
    pub fn theta_max(&self) -> T {
        T::one().min(self.gamma0 / self.eps0)
    }

    /// `0 < θ < 1` and `θε₀ < γ₀` (`≤` when `strict` is false).
    pub fn check_theta(&self, theta: T, strict: bool) -> Result<()> {
        if !(theta > T::zero() && theta < T::one()) {
            return Err(Error::InvalidTheta {
                theta: theta.as_f64(),
                reason: "must lie in (0, 1)".into(),
            });
        }
        let scaled = theta * self.eps0;
        let ok = if strict { scaled < self.gamma0 } else { scaled <= self.gamma0 };
        if !ok {
            return Err(Error::InvalidTheta {
                theta: theta.as_f64(),
                reason: format!("theta * eps0 = {scaled} exceeds gamma0 = {}", self.gamma0),
            });
        }
        Ok(())
    }

    /// `2Ĩ(θε₀) / (θ(1 − θ))` with the closed-form entropy.
    pub fn u_threshold(&self, theta: T) -> Result<T> {
        self.check_theta(theta, true)?;
        let ent = self.closed_entropy()?;
        Ok(threshold(theta, ent.at(theta * self.eps0)))
    }

    /// Tail bound with the closed-form entropy.
    pub fn sup_tail_bound(&self, u: T, theta: T) -> Result<T> {
        self.check_theta(theta, true)?;
        let ent = self.closed_entropy()?;
        tail_from_entropy(u, theta, self.eps0, ent.at(theta * self.eps0), &self.family)
    }

    /// `2 exp(φ(λε₀/(1 − θ)) + 2λĨ(θε₀)/(θ(1 − θ)))`, a bound on `E exp(λ sup |X|)`.
    pub fn sup_mgf_bound(&self, lambda: T, theta: T) -> Result<T> {
        if !(lambda > T::zero()) {
            return Err(Error::param("lambda", format!("must be positive, got {lambda}")));
        }
        self.check_theta(theta, true)?;
        let ent = self.closed_entropy()?;
        let one = T::one();
        let two = T::lit(2.0);
        let expo = self.family.phi(lambda * self.eps0 / (one - theta))
            + two * lambda * ent.at(theta * self.eps0) / (theta * (one - theta));
        Ok(two * expo.exp())
    }

    /// Entropy threshold with the quadrature entropy.
    pub fn u_threshold_numeric(&self, theta: T, settings: &EntropySettings<T>) -> Result<T> {
        self.check_theta(theta, false)?;
        Ok(threshold(theta, self.numeric_entropy(theta * self.eps0, settings)?))
    }

    /// Tail bound with the quadrature entropy; works for tabulated profiles.
    pub fn sup_tail_bound_numeric(&self, u: T, theta: T, settings: &EntropySettings<T>) -> Result<T> {
        self.check_theta(theta, false)?;
        let ient = self.numeric_entropy(theta * self.eps0, settings)?;
        tail_from_entropy(u, theta, self.eps0, ient, &self.family)
    }

    fn numeric_entropy(&self, eps: T, settings: &EntropySettings<T>) -> Result<T> {
        entropy_integral_numeric(eps, &self.bx, &self.profile, &self.family, settings)
    }

    /// `θ` minimising the closed-form tail bound at `u`.
    ///
    /// The argument `z(θ)` of `φ*` is concave in `θ`; it is maximised over a
    /// 512-point log grid on `(0, θ_max)` and refined by golden section.
    pub fn optimize_theta(&self, u: T) -> Result<ThetaOptimum<T>> {
        let ent = self.closed_entropy()?;
        let theta_max = self.theta_max();
        let z = |theta: T| z_value(u, theta, self.eps0, ent.at(theta * self.eps0));
        let theta = maximise_on_log_grid(z, theta_max)?;
        let zt = z(theta);
        if !(zt > T::zero()) {
            let (_, inf) = self.inf_threshold()?;
            return Err(Error::NoValidTheta {
                u: u.as_f64(),
                inf_threshold: inf.as_f64(),
            });
        }
        Ok(ThetaOptimum {
            theta,
            bound: bound_from_z(zt, &self.family),
            z: zt,
        })
    }

    /// As [`optimize_theta`](Self::optimize_theta) with the quadrature entropy.
    pub fn optimize_theta_numeric(&self, u: T, settings: &EntropySettings<T>) -> Result<ThetaOptimum<T>> {
        let theta_max = self.theta_max();
        let mut failure = None;
        let z = |theta: T| match self.numeric_entropy(theta * self.eps0, settings) {
            Ok(ient) => z_value(u, theta, self.eps0, ient),
            Err(e) => {
                failure.get_or_insert(e);
                T::neg_infinity()
            }
        };
        let theta = maximise_on_log_grid(z, theta_max)?;
        if let Some(e) = failure {
            return Err(e);
        }
        let zt = z_value(u, theta, self.eps0, self.numeric_entropy(theta * self.eps0, settings)?);
        if !(zt > T::zero()) {
            return Err(Error::NoValidTheta {
                u: u.as_f64(),
                inf_threshold: f64::NAN,
            });
        }
        Ok(ThetaOptimum {
            theta,
            bound: bound_from_z(zt, &self.family),
            z: zt,
        })
    }

    /// `(θ, inf_θ threshold(θ))` for the closed form.
    ///
    /// The threshold is proportional to `θ^{−1/(γβ)} / (1 − θ)`, minimal at
    /// `θ = κ/(1 + κ)`, `κ = 1/(γβ)`; past `θ_max` the infimum sits at the edge
    /// and is not attained.
    pub fn inf_threshold(&self) -> Result<(T, T)> {
        let ent = self.closed_entropy()?;
        let kappa = ent.gamma_beta.recip();
        let theta = (kappa / (T::one() + kappa)).min(self.theta_max());
        Ok((theta, threshold(theta, ent.at(theta * self.eps0))))
    }
}

fn threshold<T: Real>(theta: T, ient: T) -> T {
    T::lit(2.0) * ient / (theta * (T::one() - theta))
}

fn z_value<T: Real>(u: T, theta: T, eps0: T, ient: T) -> T {
    (u * (T::one() - theta) - T::lit(2.0) * ient / theta) / eps0
}

fn bound_from_z<T: Real>(z: T, fam: &PhiFamily<T>) -> T {
    clamp_prob(T::lit(2.0) * (-fam.conjugate(z)).exp())
}

/// `min(1, 2 exp(−φ*(z)))` once `u` clears the threshold for `(θ, Ĩ(θε₀))`.
pub fn tail_from_entropy<T: Real>(u: T, theta: T, eps0: T, ient: T, fam: &PhiFamily<T>) -> Result<T> {
    let thr = threshold(theta, ient);
    if !(u > thr) {
        return Err(Error::BelowThreshold {
            u: u.as_f64(),
            threshold: thr.as_f64(),
        });
    }
    Ok(bound_from_z(z_value(u, theta, eps0, ient), fam))
}

/// Argmax of `f` on `(0, hi)`: log grid, then golden section between the
/// neighbours of the best grid point.
pub(crate) fn maximise_on_log_grid<T: Real, F: FnMut(T) -> T>(mut f: F, hi: T) -> Result<T> {
    if !(hi > T::zero()) {
        return Err(Error::param("theta", "empty range of admissible theta"));
    }
    let lo = hi * T::lit(1e-8);
    let top = hi * (T::one() - T::lit(1e-9).max(T::epsilon() * T::lit(4.0)));
    let ratio = (top / lo).ln();
    let n = GRID_POINTS;
    let grid: Vec<T> = (0..n)
        .map(|i| lo * (ratio * T::from_usize_lossy(i) / T::from_usize_lossy(n - 1)).exp())
        .collect();
    let values: Vec<T> = grid.iter().map(|&t| f(t)).collect();
    let best = values
        .iter()
        .enumerate()
        .fold(0usize, |b, (i, &v)| if v > values[b] { i } else { b });
    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(n - 1)];
    let inv_phi = T::lit(0.618_033_988_749_894_9);
    let tol = T::lit(GOLDEN_TOL).max(T::epsilon() * T::lit(16.0));
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iters = 0;
    while (b - a).abs() > tol * hi && iters < 200 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        iters += 1;
    }
    let mid = T::lit(0.5) * (a + b);
    let fm = f(mid);
    // golden section can only improve on the grid for unimodal f; keep the grid point otherwise
    Ok(if fm >= values[best] { mid } else { grid[best] })
}
