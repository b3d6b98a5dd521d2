//! Invariant Riemannian metrics on Ledger–Obata spaces `F^m / diag(F)`.
//!
//! Metrics are classified by natural reductivity, the geodesic orbit
//! property and their irreducible product decomposition. A brute-force
//! numeric oracle over a concrete compact simple Lie algebra (so(3) by
//! default) cross-checks the coefficient-space classifiers.

pub mod classify;
pub mod coeff;
pub mod error;
pub mod io;
pub mod lie;
pub(crate) mod linalg;
pub mod metric;
pub mod oracle;
pub mod random;
pub mod reduce;

pub use error::{Error, Result};

/// Numerical tolerances shared by the classifiers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Residual tolerance for span, reconstruction and constancy tests.
    pub tol: f64,
    /// Relative eigenvalue gap at which eigenvalues are considered equal.
    pub cluster_tol: f64,
    /// Relative size below which an off-diagonal entry of `T` is structural zero.
    pub split_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            cluster_tol: 1e-8,
            split_tol: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tol", self.tol),
            ("cluster_tol", self.cluster_tol),
            ("split_tol", self.split_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}
