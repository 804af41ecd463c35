//! Spectral toolkit for maximal-regularity diagnostics of the abstract
//! second-order integro-differential equation
//!
//! ```text
//! (P u')' + B u' + A u + c * u = f      on a truncated line
//! ```
//!
//! solved by Fourier multipliers on a uniform periodic grid. The crate
//! certifies the hypotheses behind such solvers at desk scale with
//! finite-dimensional operator pencils:
//!
//! * [`grid`] — FFT substrate: transforms, multipliers, convolution;
//! * [`spaces`] — Banach function space norms, the Hardy-Littlewood maximal
//!   operator, Muckenhoupt constants, and the weight-building iteration;
//! * [`dyadic`] — Littlewood-Paley filter banks, Besov and Triebel-Lizorkin
//!   norms, lifting, equivalent-norm diagnostics;
//! * [`symbols`] — operator pencils, exact derivative recursions, Mihlin and
//!   Calderon-Zygmund certificates, kernel extraction;
//! * [`solver`] — the multiplier solver with component decompositions,
//!   strong-solution checks, and regularity sweeps;
//! * [`bank`] — deterministic seeded test banks;
//! * [`config`]/[`cli`] — the experiment driver behind the `maxreg` binary.
//!
//! Everything is pure and immutable after construction; batch sweeps over
//! independent inputs can run concurrently with no shared state.

// index-based loops walk several parallel arrays at once here
#![allow(clippy::needless_range_loop)]

pub mod bank;
pub mod cli;
pub mod config;
pub mod dyadic;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod solver;
pub mod spaces;
pub mod symbols;

pub use error::{Error, Result};
pub use grid::{Grid, GridFunction, MatrixGridFunction, SpectralFunction};
pub use spaces::{MaximalConfig, SpaceDescriptor, Weight};
pub use symbols::{ConvolutionSymbol, FrequencySymbol, OperatorPencil};
