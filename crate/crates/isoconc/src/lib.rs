//! Isoperimetric and concentration profiles of metric-measure spaces.
//!
//! This crate computes, transfers, and verifies the two classical ways of
//! quantifying how a metric interacts with a probability measure:
//!
//! - the **isoperimetric profile** `I(v)`: the largest lower bound on the
//!   boundary measure of sets of measure `v` (symmetrized to
//!   `Ĩ(v) = min(I(v), I(1-v))` on `(0, 1/2]`), and
//! - the **log-concentration profile** `K(r)`: `-log` of the largest mass
//!   that can stay at distance `r` from any set of measure 1/2.
//!
//! Isoperimetry always implies concentration by integrating along the
//! profile ([`transfer::iso_to_conc`]). The reverse direction fails in
//! general, but under a curvature lower bound it holds with explicit,
//! dimension-free constants; the transfer bounds implemented in
//! [`transfer`] make that direction computable:
//!
//! - [`transfer::thm1_bound`]: convexity setting (`kappa = 0`),
//! - [`transfer::thm2_bound`]: semi-convex setting (`kappa >= 0`) under the
//!   quadratic growth condition `alpha(r) >= delta0 * kappa * r^2`,
//! - [`transfer::gen_bobkov_bound`]: ball-tail integrability input,
//! - [`transfer::linear_iso_bound`]: a single concentration data point
//!   yields a linear isoperimetric inequality.
//!
//! Ground truth comes from [`model1d`] (exact profiles of one-dimensional
//! log-concave measures, where isoperimetric minimizers are half-lines) and
//! from [`oracle1d`] (a brute-force minimizer over unions of finitely many
//! intervals on a discretized measure). [`transfer::verify_bound`] compares
//! any bound against any truth on a grid and emits a [`report::BoundReport`].
//!
//! See the crate examples for runnable walkthroughs of each capability, and
//! the `isoconc` binary for the file-oriented command-line front end.

pub mod cli;
pub mod extreal;
pub mod gauss;
pub mod model1d;
pub mod monotone;
pub mod oracle1d;
pub mod profile;
pub mod quad;
pub mod report;
pub mod transfer;

pub use extreal::ExtReal;
pub use monotone::{ClosedForm, Interpolation, MonotoneFn, Tail};
pub use profile::{ConcProfileSpec, IsoProfile, Provenance};

