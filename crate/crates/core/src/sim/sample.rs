//! Gaussian field sampling from a factorised covariance.

use nalgebra::{Cholesky, DMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::kernel::{covariance_matrix, FieldKernel, KernelSettings};
use crate::error::{Error, Result};
use crate::heat::Rect;
use crate::metric::Point;

/// Replicas per matrix product.
const BATCH: usize = 64;

/// Largest diagonal regulariser, relative to the largest variance.
pub const MAX_RELATIVE_JITTER: f64 = 1e-8;

/// A Gaussian field restricted to a finite grid.
#[derive(Debug, Clone)]
pub struct GaussianFieldModel {
    pub kernel: FieldKernel,
    pub grid: Vec<Point<f64>>,
    pub settings: KernelSettings,
}

impl GaussianFieldModel {
    /// Rejects grid points outside `rect`.
    pub fn new(kernel: FieldKernel, grid: Vec<Point<f64>>, rect: &Rect, settings: KernelSettings) -> Result<Self> {
        settings.validate()?;
        if grid.is_empty() {
            return Err(Error::param("grid", "must contain at least one point"));
        }
        for p in &grid {
            let inside = p[0] >= rect.t.0 && p[0] <= rect.t.1 && p[1] >= rect.x.0 && p[1] <= rect.x.1;
            if !inside {
                return Err(Error::param("grid", format!("point ({}, {}) outside the box", p[0], p[1])));
            }
        }
        Ok(Self { kernel, grid, settings })
    }

    /// Regular `nt × nx` grid spanning `rect`, time-major.
    pub fn regular(kernel: FieldKernel, rect: &Rect, nt: usize, nx: usize, settings: KernelSettings) -> Result<Self> {
        Self::new(kernel, regular_grid(rect, nt, nx)?, rect, settings)
    }

    pub fn covariance(&self) -> Result<DMatrix<f64>> {
        covariance_matrix(&self.kernel, &self.grid, &self.settings)
    }
}

/// `nt × nx` points including the corners of `rect`; a side of length one
/// collapses to the lower edge.
pub fn regular_grid(rect: &Rect, nt: usize, nx: usize) -> Result<Vec<Point<f64>>> {
    if nt == 0 || nx == 0 {
        return Err(Error::param("grid", "needs at least one point per axis"));
    }
    let axis = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
        if n == 1 {
            return vec![lo];
        }
        (0..n).map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect()
    };
    let ts = axis(rect.t.0, rect.t.1, nt);
    let xs = axis(rect.x.0, rect.x.1, nx);
    Ok(ts.iter().flat_map(|&t| xs.iter().map(move |&x| [t, x])).collect())
}

/// Lower-triangular square root of a grid covariance.
#[derive(Debug, Clone)]
pub struct FieldSampler {
    factor: DMatrix<f64>,
    jitter: f64,
}

impl FieldSampler {
    pub fn new(model: &GaussianFieldModel) -> Result<Self> {
        Self::from_covariance(model.covariance()?)
    }

    /// Cholesky with diagonal jitter `1e−12, 1e−11, …, 1e−8` times the
    /// largest variance, stopping at the first success.
    pub fn from_covariance(cov: DMatrix<f64>) -> Result<Self> {
        if !cov.is_square() {
            return Err(Error::param("covariance", "must be square"));
        }
        let n = cov.nrows();
        let scale = (0..n).map(|i| cov[(i, i)]).fold(0.0f64, f64::max);
        if n > 0 && !(scale > 0.0) {
            // all variances vanish: the field is identically zero
            return Ok(Self {
                factor: DMatrix::zeros(n, n),
                jitter: 0.0,
            });
        }
        let mut rel = 0.0;
        loop {
            let mut m = cov.clone();
            for i in 0..n {
                m[(i, i)] += rel * scale;
            }
            if let Some(ch) = Cholesky::new(m) {
                return Ok(Self {
                    factor: ch.l(),
                    jitter: rel * scale,
                });
            }
            rel = if rel == 0.0 { 1e-12 } else { rel * 10.0 };
            if rel > MAX_RELATIVE_JITTER * (1.0 + 1e-9) {
                return Err(Error::Factorization { jitter: MAX_RELATIVE_JITTER * scale });
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.factor.nrows()
    }

    /// Diagonal regulariser that made the factorisation succeed.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Replica `r` uses ChaCha8 seeded by `seed` on stream `r`, so its draw
    /// does not depend on batching or thread count.
    fn batch(&self, seed: u64, start: usize, len: usize) -> DMatrix<f64> {
        let d = self.dim();
        let mut z = DMatrix::zeros(d, len);
        for c in 0..len {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((start + c) as u64);
            for r in 0..d {
                z[(r, c)] = StandardNormal.sample(&mut rng);
            }
        }
        &self.factor * z
    }

    fn batches(n: usize) -> Vec<(usize, usize)> {
        (0..n.div_ceil(BATCH)).map(|b| (b * BATCH, BATCH.min(n - b * BATCH))).collect()
    }

    /// `n` realizations on the grid.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<Vec<f64>> {
        Self::batches(n)
            .into_par_iter()
            .flat_map_iter(|(start, len)| {
                let x = self.batch(seed, start, len);
                (0..len).map(move |c| x.column(c).iter().copied().collect::<Vec<_>>())
            })
            .collect()
    }

    /// `max_grid |field|` for each of `n` replicas, without keeping the fields.
    pub fn sample_sup(&self, n: usize, seed: u64) -> Vec<f64> {
        Self::batches(n)
            .into_par_iter()
            .flat_map_iter(|(start, len)| {
                let x = self.batch(seed, start, len);
                (0..len).map(move |c| x.column(c).iter().fold(0.0f64, |m, v| m.max(v.abs())))
            })
            .collect()
    }
}

/// `n` i.i.d. realizations of `model`, deterministic in `seed`.
pub fn sample_fields(model: &GaussianFieldModel, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    Ok(FieldSampler::new(model)?.sample(n, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heat::SpectralMeasure;

    fn small_model() -> GaussianFieldModel {
        let rect = Rect::new((0.0, 1.0), (0.0, 1.0)).unwrap();
        let grid = vec![[0.3, 0.1], [0.6, 0.5], [1.0, 0.9]];
        GaussianFieldModel::new(FieldKernel::V { h: 0.5 }, grid, &rect, KernelSettings::default()).unwrap()
    }

    #[test]
    fn sample_covariance_converges() {
        let model = small_model();
        let cov = model.covariance().unwrap();
        let n = 100_000;
        let xs = sample_fields(&model, n, 7).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let emp = xs.iter().map(|x| x[i] * x[j]).sum::<f64>() / n as f64;
                let se = (cov[(i, i)] * cov[(j, j)] + cov[(i, j)].powi(2)).sqrt() / (n as f64).sqrt();
                assert!((emp - cov[(i, j)]).abs() <= 5.0 * se, "({i},{j}) {emp} vs {}", cov[(i, j)]);
            }
        }
        let mean = xs.iter().map(|x| x[2]).sum::<f64>() / n as f64;
        assert!(mean.abs() < 5.0 * (cov[(2, 2)] / n as f64).sqrt());
    }

    #[test]
    fn deterministic_and_batch_independent() {
        let model = small_model();
        assert!(sample_fields(&model, 0, 1).unwrap().is_empty());
        let a = sample_fields(&model, 150, 42).unwrap();
        let b = sample_fields(&model, 150, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_fields(&model, 70, 42).unwrap();
        assert_eq!(a[..64], c[..64]);
        assert_ne!(a, sample_fields(&model, 150, 43).unwrap());
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let serial = pool.install(|| sample_fields(&model, 150, 42).unwrap());
        assert_eq!(a, serial);
        let sampler = FieldSampler::new(&model).unwrap();
        let sups = sampler.sample_sup(150, 42);
        for (x, s) in a.iter().zip(&sups) {
            assert_eq!(x.iter().fold(0.0f64, |m, v| m.max(v.abs())), *s);
        }
    }

    #[test]
    fn jitter_rescues_semidefinite() {
        // rank one: exact Cholesky breaks down
        let cov = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let s = FieldSampler::from_covariance(cov).unwrap();
        assert!(s.jitter() > 0.0 && s.jitter() <= 1e-8);
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(FieldSampler::from_covariance(bad), Err(Error::Factorization { .. })));
    }

    #[test]
    fn regular_grid_and_box_check() {
        let rect = Rect::new((0.5, 1.0), (-1.0, 1.0)).unwrap();
        let g = regular_grid(&rect, 3, 5).unwrap();
        assert_eq!(g.len(), 15);
        assert_eq!(g[0], [0.5, -1.0]);
        assert_eq!(g[14], [1.0, 1.0]);
        let m = FieldKernel::Omega {
            measure: SpectralMeasure::matern(1.0, 1.0).unwrap(),
        };
        assert!(GaussianFieldModel::new(m, vec![[0.2, 0.0]], &rect, KernelSettings::default()).is_err());
    }

    #[test]
    fn zero_field_samples_zero() {
        let rect = Rect::new((0.0, 1.0), (0.0, 1.0)).unwrap();
        let model = GaussianFieldModel::new(FieldKernel::V { h: 0.5 }, vec![[0.0, 0.0], [0.0, 1.0]], &rect, KernelSettings::default()).unwrap();
        let xs = sample_fields(&model, 3, 1).unwrap();
        assert!(xs.iter().flatten().all(|v| *v == 0.0));
    }
}
