//! Finite-dimensional quantum measurement theory and a 2D double-slit
//! wavepacket simulator.
//!
//! The crate is layered bottom-up:
//!
//! * [`kernel`]: dense complex vectors and operators (tensor products,
//!   adjoints, positivity and commutator tests).
//! * [`measurement`]: states, POVM observables, the probability rule,
//!   sampling, product/tensor/formal products and conditional formal
//!   (weak) values.
//! * [`causality`]: Heisenberg-picture causal maps over a finite tree and the
//!   bottom-up realization of a sequential causal observable.
//! * [`doubleslit`]: discretized 2D Schrödinger evolution behind a
//!   two-hole wall, with detector-strip statistics.
//! * [`scenarios`]: canned drivers for the eraser, delayed-choice, Hardy,
//!   three-box and double-slit set-ups, plus deterministic JSON/CSV output.

pub mod causality;
pub mod doubleslit;
mod error;
pub mod kernel;
pub mod measurement;
pub mod scenarios;

pub use error::{Error, Result};
pub use kernel::{COp, CVec, C64};
pub use measurement::{DensityOperator, OperatorValuedMeasure, Outcome, Pmf, Povm, PureState, Shot, State};
