//! Sparse two-component separation by Morphological Component Analysis.
//!
//! A signal `x = x1 + x2` is split into components that are sparse in two
//! different representation systems. The crate provides
//!
//! * [`frames`]: signals, frames (synthesis/analysis operator pairs),
//!   built-in orthonormal dictionaries and concatenated two-frame dictionaries;
//! * [`coherence`]: mutual coherence, Babel functions, cluster coherence,
//!   joint-concentration bounds and an exact null space property check;
//! * [`solvers`]: an exhaustive `l0` oracle and the four `l1` separation
//!   programs (synthesis/analysis, exact/denoising);
//! * [`separate`]: a high-level separation API with error-bound diagnostics
//!   and uncertainty-principle checks;
//! * [`cli`]: the experiment harness behind the `mca` binary.
//!
//! All arithmetic is complex; real data is embedded with zero imaginary part.

pub mod cli;
pub mod coherence;
mod error;
pub mod frames;
pub mod io;
pub mod separate;
pub mod solvers;

pub use error::{Error, Result};
pub use frames::{CoefficientVector, ConcatDictionary, Dictionary, Frame, FrameKind, Shape, Signal};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;
