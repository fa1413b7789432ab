//! Minimum-time speed planning along a fixed planar path.
//!
//! A vehicle travels a path of length `s_f` subject to a speed window
//! `v⁻ ≤ v ≤ v⁺`, a bound on the slope of the squared speed
//! `α⁻ ≤ (v²)′ ≤ α⁺` and a normal-acceleration bound `|k|·v² ≤ β`.
//! Working in the squared speed `w = v²` the problem becomes linear in its
//! constraints, and the optimal profile is the pointwise minimum of a
//! forward and a backward clipped integration of the upper envelope `μ⁺`.
//! The problem is feasible exactly when that profile dominates `μ⁻`.
//!
//! Modules:
//!
//! * [`lattice`]: sampled functions on a uniform grid with pointwise
//!   min/max, ordering and finite differences.
//! * [`problem`]: curvature models, bound sets and the squared-speed
//!   envelope.
//! * [`solver`]: the O(n) forward/backward/meet planner.
//! * [`oracle`]: a brute-force O(n²) evaluation of the same operators
//!   through the hemi-metric, for cross-checking.
//! * [`cli`]: problem files, presets and result tables.

pub mod cli;
pub mod error;
pub mod lattice;
pub mod oracle;
pub mod problem;
pub mod solver;
pub mod spline;

pub use error::{Error, Result};
pub use lattice::{Grid, SampledFunction};
pub use problem::{BoundProfile, BoundSet, CurvatureModel, Envelope, ProblemSpec};
pub use solver::{plan, PlanResult};
