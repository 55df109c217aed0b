//! Dense symmetric matrices, their spectra, fractional powers and the Löwner order.

mod matrix;
mod psd;
mod spectral;

pub mod generate;

pub use matrix::{relative_frobenius_error, relative_max_entry_error, SymMatrix};
pub use psd::{check_psd, check_psd_decomposed, loewner_ge, PsdReport, PsdVerdict};
pub use spectral::{matrix_power, matrix_power_with_tol, spectral_decompose, SpectralDecomposition};
