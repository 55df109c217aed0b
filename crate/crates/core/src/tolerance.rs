//! Process-wide default tolerance scale.
//!
//! PSD verdicts compare the minimum eigenvalue against
//! `tol_scale * max(1, spectral_norm)`. The scale defaults to
//! [`DEFAULT_TOL_SCALE`] and may be overridden once per process through the
//! `PSDEQ_TOL_SCALE` environment variable.

use std::sync::OnceLock;

pub const DEFAULT_TOL_SCALE: f64 = 1e-10;

/// Name of the environment variable read by [`default_tol_scale`].
pub const TOL_SCALE_ENV: &str = "PSDEQ_TOL_SCALE";

static DEFAULT: OnceLock<f64> = OnceLock::new();

/// The tolerance scale used when a caller does not pass one explicitly.
///
/// Read on first use and frozen afterwards. Unparseable or non-positive
/// values in the environment fall back to [`DEFAULT_TOL_SCALE`].
pub fn default_tol_scale() -> f64 {
    *DEFAULT.get_or_init(|| {
        std::env::var(TOL_SCALE_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<f64>().ok())
            .filter(|v| v.is_finite() && *v > 0.0)
            .unwrap_or(DEFAULT_TOL_SCALE)
    })
}

/// Absolute tolerance for a matrix with the given spectral norm.
#[inline]
pub fn absolute_tolerance(tol_scale: f64, spectral_norm: f64) -> f64 {
    tol_scale * spectral_norm.max(1.0)
}
