//! Wigner functions, Weyl quantization and reference-frame transformations on
//! discrete phase-space grids.
//!
//! The crate is organized bottom-up:
//!
//! * [`grid`] — position grids and their conjugate / Wigner momentum axes;
//! * [`states`] — normalized test wavefunctions and `ψ̃(p)`;
//! * [`wigner`] — `W(x, p)` of a pure state, marginals, negativity;
//! * [`weyl`] — symbol ↔ kernel maps and the Hilbert–Schmidt identity;
//! * [`frames`] — affine frame changes acting on states and Wigner functions;
//! * [`cli`] — config parsing, export formats and the verification suites
//!   behind the `wigner-frames` binary.

pub mod cli;
pub mod error;
pub mod fft;
pub mod frames;
pub mod grid;
pub mod resample;
pub mod states;
pub mod weyl;
pub mod wigner;

pub use error::{Error, Result};
pub use frames::{AffineFrame, PhaseConvention, PhasePolynomial};
pub use grid::{MomentumKind, PhaseGrid};
pub use states::{MomentumWaveFunction, WaveFunction};
pub use weyl::{KernelMatrix, Symbol};
pub use wigner::WignerGrid;
