//! Monte Carlo for the Gaussian components of the mild solution, on a grid.

pub mod kernel;
pub mod sample;
pub mod tail;

pub use kernel::{covariance_matrix, omega_covariance, omega_covariance_mu, v_covariance, v_covariance_mu, FieldKernel, KernelSettings};
pub use sample::{regular_grid, sample_fields, FieldSampler, GaussianFieldModel};
pub use tail::{clopper_pearson, empirical_sup_tail, empirical_sup_tail_fields, verify_bound, Verdict, VerificationReport, VerifyRow};
