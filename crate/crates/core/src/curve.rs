//! Tail curves `u ↦ P{· > u}` shared by the bound and simulation layers.

use serde::Serialize;

use crate::error::{Error, Result};

/// One level of a tail curve.
///
/// Theoretical curves leave `value` empty where the bound is not asserted;
/// empirical curves carry a confidence interval and the sample count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailPoint {
    pub u: f64,
    pub value: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub samples: Option<usize>,
    pub theta: Option<f64>,
}

impl TailPoint {
    pub fn bound(u: f64, value: Option<f64>, theta: Option<f64>) -> Self {
        Self {
            u,
            value,
            ci_low: None,
            ci_high: None,
            samples: None,
            theta,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TailCurve {
    pub points: Vec<TailPoint>,
}

impl TailCurve {
    /// Checks that `u` is strictly increasing and values lie in `[0, 1]`.
    pub fn new(points: Vec<TailPoint>) -> Result<Self> {
        for w in points.windows(2) {
            if !(w[1].u > w[0].u) {
                return Err(Error::GridMismatch(format!("u grid not strictly increasing at {} -> {}", w[0].u, w[1].u)));
            }
        }
        for p in &points {
            if let Some(v) = p.value {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::param("value", format!("tail value {v} at u = {} outside [0, 1]", p.u)));
                }
            }
        }
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn u_grid(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.u).collect()
    }
}

/// Rejects empty, non-finite or non-increasing grids.
pub fn check_u_grid(u_grid: &[f64]) -> Result<()> {
    if u_grid.is_empty() {
        return Err(Error::param("u_grid", "must not be empty"));
    }
    if u_grid.iter().any(|u| !u.is_finite() || *u < 0.0) {
        return Err(Error::param("u_grid", "levels must be finite and nonnegative"));
    }
    if u_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param("u_grid", "levels must be strictly increasing"));
    }
    Ok(())
}
