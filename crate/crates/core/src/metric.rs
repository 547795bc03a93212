//! Anisotropic metric `d(t, s) = Σ |t_i − s_i|^{H_i}` on a rectangle.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Two-dimensional point `(t, x)`.
pub type Point<T> = [T; 2];

/// Rectangle `[a₁, b₁] × [a₂, b₂]` with metric exponents `(H₁, H₂)`.
///
/// Either side may be degenerate (`b_i = a_i`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnisotropicBox<T> {
    lo: Point<T>,
    hi: Point<T>,
    h: Point<T>,
}

impl<T: Real> AnisotropicBox<T> {
    pub fn new(t_range: (T, T), x_range: (T, T), exponents: (T, T)) -> Result<Self> {
        let lo = [t_range.0, x_range.0];
        let hi = [t_range.1, x_range.1];
        let h = [exponents.0, exponents.1];
        for i in 0..2 {
            if !(lo[i].is_finite() && hi[i].is_finite() && hi[i] >= lo[i]) {
                return Err(Error::param("box", format!("axis {i}: need finite a <= b, got [{}, {}]", lo[i], hi[i])));
            }
            if !(h[i] > T::zero() && h[i] <= T::one()) {
                return Err(Error::param("exponents", format!("H{} must lie in (0, 1], got {}", i + 1, h[i])));
            }
        }
        Ok(Self { lo, hi, h })
    }

    /// Box `[0, T₁] × [0, T₂]`.
    pub fn from_extents(t1: T, t2: T, exponents: (T, T)) -> Result<Self> {
        Self::new((T::zero(), t1), (T::zero(), t2), exponents)
    }

    pub fn lower(&self) -> Point<T> {
        self.lo
    }

    pub fn upper(&self) -> Point<T> {
        self.hi
    }

    /// Side length `T_i`.
    pub fn side(&self, axis: usize) -> T {
        self.hi[axis] - self.lo[axis]
    }

    /// Metric exponent `H_i`.
    pub fn exponent(&self, axis: usize) -> T {
        self.h[axis]
    }

    pub fn exponents(&self) -> Point<T> {
        self.h
    }

    pub fn with_exponents(&self, exponents: (T, T)) -> Result<Self> {
        Self::new((self.lo[0], self.hi[0]), (self.lo[1], self.hi[1]), exponents)
    }

    /// Diameter in `d`: `T₁^{H₁} + T₂^{H₂}`.
    pub fn diameter(&self) -> T {
        (0..2).fold(T::zero(), |acc, i| acc + axis_pow(self.side(i), self.h[i]))
    }

    pub fn contains(&self, p: Point<T>) -> bool {
        (0..2).all(|i| p[i] >= self.lo[i] && p[i] <= self.hi[i])
    }

    pub fn dist(&self, t: Point<T>, s: Point<T>) -> T {
        aniso_dist(t, s, self.h)
    }

    /// Upper bound on the number of closed `ε`-balls needed to cover the box:
    /// `∏ (2^{1/H_i} T_i / (2 ε^{1/H_i}) + 1)`, degenerate sides giving `1`.
    pub fn covering_upper_bound(&self, eps: T) -> Result<T> {
        if !(eps > T::zero()) {
            return Err(Error::param("eps", format!("must be positive, got {eps}")));
        }
        Ok((0..2).fold(T::one(), |acc, i| acc * self.covering_factor(i, eps)))
    }

    /// The per-axis factor of [`covering_upper_bound`](Self::covering_upper_bound).
    pub fn covering_factor(&self, axis: usize, eps: T) -> T {
        let side = self.side(axis);
        if side == T::zero() {
            return T::one();
        }
        let inv_h = self.h[axis].recip();
        let two = T::lit(2.0);
        two.powf(inv_h) * side / (two * eps.powf(inv_h)) + T::one()
    }

    /// Smallest grid resolution accepted by [`covering_oracle`](Self::covering_oracle) for `eps`.
    pub fn oracle_resolution(&self, eps: T) -> usize {
        let limit = eps / T::lit(10.0);
        (0..2)
            .filter(|&i| self.side(i) > T::zero())
            .map(|i| {
                let step = limit.powf(self.h[i].recip());
                (self.side(i) / step).ceil().to_usize().unwrap_or(usize::MAX).saturating_add(1)
            })
            .max()
            .unwrap_or(2)
            .max(2)
    }

    /// Greedy cover of a `resolution × resolution` grid by closed `ε`-balls.
    ///
    /// Points are scanned lexicographically (time axis major). Each uncovered
    /// point `p` gets a ball centred at `p + w`, clamped to the box, with
    /// `w_i = (ε/k)^{1/H_i}` and `k` the number of nondegenerate sides. The
    /// grid step must satisfy `step_i^{H_i} ≤ ε/10` on every nondegenerate side.
    pub fn covering_oracle(&self, eps: T, resolution: usize) -> Result<usize> {
        if !(eps > T::zero()) {
            return Err(Error::param("eps", format!("must be positive, got {eps}")));
        }
        if resolution < 2 {
            return Err(Error::param("resolution", "need at least 2 grid points per side"));
        }
        let limit = eps / T::lit(10.0);
        let live: Vec<usize> = (0..2).filter(|&i| self.side(i) > T::zero()).collect();
        for &i in &live {
            let step = self.side(i) / T::from_usize_lossy(resolution - 1);
            let dstep = step.powf(self.h[i]);
            if dstep > limit {
                return Err(Error::CoarseResolution {
                    resolution,
                    axis: i,
                    step: dstep.as_f64(),
                    limit: limit.as_f64(),
                });
            }
        }

        let k = T::from_usize_lossy(live.len().max(1));
        let counts: [usize; 2] = std::array::from_fn(|i| if self.side(i) > T::zero() { resolution } else { 1 });
        let coord = |axis: usize, j: usize| -> T {
            if counts[axis] == 1 {
                self.lo[axis]
            } else {
                self.lo[axis] + self.side(axis) * T::from_usize_lossy(j) / T::from_usize_lossy(counts[axis] - 1)
            }
        };
        let shift: [T; 2] = std::array::from_fn(|i| {
            if self.side(i) > T::zero() {
                (eps / k).powf(self.h[i].recip())
            } else {
                T::zero()
            }
        });
        let reach: [T; 2] = std::array::from_fn(|i| eps.powf(self.h[i].recip()));
        // index window [lo, hi] of grid coordinates within `reach` of `c` on one axis
        let window = |axis: usize, c: T| -> (usize, usize) {
            if counts[axis] == 1 {
                return (0, 0);
            }
            let n = counts[axis] - 1;
            let scale = T::from_usize_lossy(n) / self.side(axis);
            let lo = ((c - reach[axis] - self.lo[axis]) * scale).floor();
            let hi = ((c + reach[axis] - self.lo[axis]) * scale).ceil();
            let clip = |v: T| v.max(T::zero()).min(T::from_usize_lossy(n)).to_usize().unwrap_or(0);
            (clip(lo), clip(hi))
        };

        let mut covered = vec![false; counts[0] * counts[1]];
        let mut balls = 0usize;
        for i0 in 0..counts[0] {
            for i1 in 0..counts[1] {
                if covered[i0 * counts[1] + i1] {
                    continue;
                }
                balls += 1;
                covered[i0 * counts[1] + i1] = true;
                let p = [coord(0, i0), coord(1, i1)];
                let c: Point<T> = std::array::from_fn(|a| (p[a] + shift[a]).min(self.hi[a]));
                let (a0, b0) = window(0, c[0]);
                let (a1, b1) = window(1, c[1]);
                for j0 in a0..=b0 {
                    let d0 = axis_pow((coord(0, j0) - c[0]).abs(), self.h[0]);
                    if d0 > eps {
                        continue;
                    }
                    for j1 in a1..=b1 {
                        let d = d0 + axis_pow((coord(1, j1) - c[1]).abs(), self.h[1]);
                        if d <= eps {
                            covered[j0 * counts[1] + j1] = true;
                        }
                    }
                }
            }
        }
        Ok(balls)
    }
}

/// `Σ |t_i − s_i|^{H_i}`.
pub fn aniso_dist<T: Real>(t: Point<T>, s: Point<T>, h: Point<T>) -> T {
    axis_pow((t[0] - s[0]).abs(), h[0]) + axis_pow((t[1] - s[1]).abs(), h[1])
}

fn axis_pow<T: Real>(x: T, h: T) -> T {
    if x == T::zero() {
        T::zero()
    } else {
        x.powf(h)
    }
}
