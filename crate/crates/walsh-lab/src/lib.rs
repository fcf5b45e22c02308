//! A computational laboratory for dyadic harmonic analysis on the Walsh
//! group: the Paley and Kaczmarz enumerations of the Walsh characters,
//! Cesàro summation of their Fourier series, and the cone-restricted
//! maximal operators whose boundedness thresholds the experiments probe.
//!
//! Everything is exact-dyadic: functions are sampled on rank-`m` coset
//! grids where Walsh polynomials of degree below `2^m` are resolved without
//! discretization error, transforms are fast Walsh-Hadamard butterflies,
//! and convolution with a summation kernel is a per-axis spectral
//! reweighting. The crate is organized bottom-up:
//!
//! - [`point`]: the group, its dyadic intervals, and the bit-reversal maps
//! - [`sample`]: functions sampled on coset grids, integration, `L^p` norms
//! - [`systems`]: Rademacher functions and both Walsh enumerations
//! - [`transform`]: fast transforms and spectra in either enumeration
//! - [`cesaro`]: Cesàro numbers and the `(C, alpha)` kernels
//! - [`summation`]: partial sums, means, maximal fields, Hardy norms
//! - [`cones`]: cone-restriction functions and their index paths
//! - [`experiments`]: the packaged experiments behind the command-line tool

pub mod cesaro;
pub mod cones;
pub mod error;
pub mod experiments;
pub mod guide;
pub mod point;
pub mod sample;
pub mod summation;
pub mod systems;
pub mod transform;

pub use cesaro::{cesaro_number, CesaroOrder, KernelTable};
pub use cones::{ConeAxis, ConeSpec, CrfSpec, GammaFn};
pub use error::{Error, Result};
pub use experiments::ExperimentRecord;
pub use point::{DyadicInterval, GroupPoint};
pub use sample::SampledFunction;
pub use summation::{MaximalField, MeanEvaluator};
pub use systems::SystemKind;
pub use transform::{fourier_coeffs, Spectrum};
