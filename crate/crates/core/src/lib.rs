//! Component statistics of the Erdős–Rényi random graph `G(n,p)`.
//!
//! The crate is organised in layers:
//!
//! * [`exact`]: validated parameters, exact probabilities and the
//!   coefficient convolution that the exact recursions are built from.
//! * [`probability`]: exact connectivity probability, the distribution of the
//!   number of components, the isolated-vertex probability and factorial
//!   moments, each available through two independent routes.
//! * [`counting`]: big-integer counts of labeled graphs by vertices, edges and
//!   components, plus the exhaustive enumeration oracle for small `n`.
//! * [`asymptotics`]: the labeled-tree series `β`, parameter regimes, limit
//!   approximations, two-sided bounds and a high-precision float evaluator
//!   for large `n`.
//! * [`montecarlo`]: reproducible simulation with union-find.
//!
//! Exact quantities are [`rug::Rational`]s; no floating point is involved
//! unless a function says so.

pub mod asymptotics;
pub mod counting;
mod dsu;
mod error;
pub mod exact;
pub mod montecarlo;
pub mod probability;

pub use error::{Error, Result};
pub use exact::{make_params, sg_convolve, CoefficientSeq, ExactProb, GraphParams};

/// Largest `n` for which exact rational evaluation is offered by default.
///
/// Numerators grow like `C(n,2)·log2(den(p))` bits, so the recursions become
/// impractically slow much beyond this.
pub const EXACT_N_LIMIT: u32 = 400;

pub use rug;
