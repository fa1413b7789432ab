//! The O(n) planner.
//!
//! `forward` marches from `s = 0` integrating the acceleration limit and
//! clipping to the envelope at every step; `backward` does the same from
//! `s_f` with the braking limit. Their pointwise minimum applied to `μ⁺` is
//! the optimal squared-speed profile `w*`, and the instance is feasible iff
//! `w* ≥ μ⁻`.
//!
//! The clip `φ_{i+1} = min(μ_{i+1}, φ_i + ∫α⁺)` needs no branch tracking: when
//! `φ` sits on `μ` and `μ` rises slower than `α⁺` the clip returns `μ_{i+1}`,
//! otherwise the slope-limited step.

use std::fmt;

use crate::error::{Error, Result};
use crate::lattice::SampledFunction;
use crate::problem::{build_envelope, ProblemSpec};

/// Trapezoid integral of `f` over cell `[s_i, s_{i+1}]`.
fn cell_integral(f: &SampledFunction, i: usize) -> f64 {
    0.5 * (f[i] + f[i + 1]) * f.grid().step()
}

/// Forward operator: `φ(0) = μ(0)`, then
/// `φ_{i+1} = min(μ_{i+1}, φ_i + ∫_{s_i}^{s_{i+1}} α⁺)`.
pub fn forward(mu: &SampledFunction, alpha_plus: &SampledFunction) -> Result<SampledFunction> {
    mu.ensure_same_grid(alpha_plus)?;
    let mut phi = Vec::with_capacity(mu.len());
    phi.push(mu.first());
    for i in 0..mu.len() - 1 {
        let next = (phi[i] + cell_integral(alpha_plus, i)).min(mu[i + 1]);
        phi.push(next);
    }
    SampledFunction::new(*mu.grid(), phi)
}

/// Backward operator: `φ(s_f) = μ(s_f)`, then
/// `φ_i = min(μ_i, φ_{i+1} − ∫_{s_i}^{s_{i+1}} α⁻)`.
pub fn backward(mu: &SampledFunction, alpha_minus: &SampledFunction) -> Result<SampledFunction> {
    mu.ensure_same_grid(alpha_minus)?;
    let n = mu.len() - 1;
    let mut phi = vec![0.0; n + 1];
    phi[n] = mu.last();
    for i in (0..n).rev() {
        phi[i] = (phi[i + 1] - cell_integral(alpha_minus, i)).min(mu[i]);
    }
    SampledFunction::new(*mu.grid(), phi)
}

/// `M(μ) = F(μ) ∧ B(μ)`.
pub fn meet_operator(
    mu: &SampledFunction,
    alpha_minus: &SampledFunction,
    alpha_plus: &SampledFunction,
) -> Result<SampledFunction> {
    forward(mu, alpha_plus)?.meet(&backward(mu, alpha_minus)?)
}

/// Travel time along a squared-speed profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ManeuverTime {
    /// Seconds; `+∞` when the profile rests on a whole cell.
    pub total: f64,
    /// `t(s_i)`, nondecreasing, possibly `+∞` past a resting cell.
    pub cumulative: Vec<f64>,
    /// Cells `[s_i, s_{i+1}]` on which the vehicle is at rest.
    pub resting_cells: Vec<usize>,
}

/// `∫ w^{-1/2} ds` with `w` linear on each cell. On a cell of width `h` with
/// end values `a`, `b` the exact integral is `2h / (√a + √b)`, which is finite
/// as long as one end is positive.
pub fn maneuver_time(w: &SampledFunction) -> Result<ManeuverTime> {
    let scale = w.sup_norm().max(1.0);
    let neg_tol = 1e-9 * scale;
    let rest = 1e-12 * scale;
    let mut roots = Vec::with_capacity(w.len());
    for (index, v) in w.values().iter().enumerate() {
        if *v < -neg_tol {
            return Err(Error::NegativeSquaredSpeed { index, value: *v });
        }
        roots.push(v.max(0.0).sqrt());
    }
    let h = w.grid().step();
    let mut cumulative = Vec::with_capacity(w.len());
    let mut resting_cells = Vec::new();
    let mut t = 0.0;
    cumulative.push(t);
    for i in 0..w.len() - 1 {
        if w[i].max(w[i + 1]) <= rest {
            resting_cells.push(i);
            t = f64::INFINITY;
        } else {
            t += 2.0 * h / (roots[i] + roots[i + 1]);
        }
        cumulative.push(t);
    }
    Ok(ManeuverTime {
        total: t,
        cumulative,
        resting_cells,
    })
}

/// Which constraint a [`Violation`] refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    MuMinus,
    MuPlus,
    AlphaMinus,
    AlphaPlus,
    Beta,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::MuMinus => "mu_minus",
            Self::MuPlus => "mu_plus",
            Self::AlphaMinus => "alpha_minus",
            Self::AlphaPlus => "alpha_plus",
            Self::Beta => "beta",
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub index: usize,
    pub s: f64,
    pub bound: BoundKind,
    /// Amount by which the bound is exceeded.
    pub magnitude: f64,
}

/// Checks a squared-speed profile against the envelope (tolerance `eps`) and
/// the per-cell slope limits (tolerance `eps_slope`).
pub fn check_profile(
    w: &SampledFunction,
    mu_minus: &SampledFunction,
    mu_plus: &SampledFunction,
    alpha_minus: &SampledFunction,
    alpha_plus: &SampledFunction,
    eps: f64,
    eps_slope: f64,
) -> Result<Vec<Violation>> {
    for other in [mu_minus, mu_plus, alpha_minus, alpha_plus] {
        w.ensure_same_grid(other)?;
    }
    let grid = *w.grid();
    let h = grid.step();
    let mut out = Vec::new();
    for i in 0..w.len() {
        let s = grid.point(i);
        if w[i] < mu_minus[i] - eps {
            out.push(Violation {
                index: i,
                s,
                bound: BoundKind::MuMinus,
                magnitude: mu_minus[i] - w[i],
            });
        }
        if w[i] > mu_plus[i] + eps {
            out.push(Violation {
                index: i,
                s,
                bound: BoundKind::MuPlus,
                magnitude: w[i] - mu_plus[i],
            });
        }
        if i + 1 < w.len() {
            let slope = (w[i + 1] - w[i]) / h;
            let lo = cell_integral(alpha_minus, i) / h;
            let hi = cell_integral(alpha_plus, i) / h;
            if slope < lo - eps_slope {
                out.push(Violation {
                    index: i,
                    s,
                    bound: BoundKind::AlphaMinus,
                    magnitude: lo - slope,
                });
            }
            if slope > hi + eps_slope {
                out.push(Violation {
                    index: i,
                    s,
                    bound: BoundKind::AlphaPlus,
                    magnitude: slope - hi,
                });
            }
        }
    }
    Ok(out)
}

/// Slope tolerance `1e-7 · max(1, ‖α⁻‖∞, ‖α⁺‖∞)`.
pub fn slope_tolerance(alpha_minus: &SampledFunction, alpha_plus: &SampledFunction) -> f64 {
    1e-7 * alpha_minus.sup_norm().max(alpha_plus.sup_norm()).max(1.0)
}

/// Outcome of [`plan`]. Profiles are returned even when infeasible.
#[derive(Debug, Clone)]
pub struct PlanResult {
    pub feasible: bool,
    pub curvature: SampledFunction,
    pub mu_minus: SampledFunction,
    pub mu_plus: SampledFunction,
    /// `F(μ⁺)`.
    pub forward: SampledFunction,
    /// `B(μ⁺)`.
    pub backward: SampledFunction,
    pub w_star: SampledFunction,
    pub v_star: SampledFunction,
    pub total_time: f64,
    pub cumulative_time: Vec<f64>,
    /// Forward differences of `w*`, the quantity bounded by `α⁻`, `α⁺`.
    pub a_long: SampledFunction,
    /// `|k|·w*`.
    pub a_norm: SampledFunction,
    /// Absolute tolerance used for the feasibility verdict.
    pub eps_feas: f64,
    pub violation_report: Vec<Violation>,
}

/// Solves a planning instance.
///
/// Bound inconsistencies are returned as errors; an unreachable lower bound
/// is a `feasible = false` result with the offending points listed in
/// `violation_report`.
pub fn plan(spec: &ProblemSpec) -> Result<PlanResult> {
    spec.validate()?;
    let curvature = spec.sample_curvature()?;
    let bounds = spec.bounds.sample(&spec.grid)?;
    let env = build_envelope(spec)?;

    let fwd = forward(&env.mu_plus, &bounds.alpha_plus)?;
    let bwd = backward(&env.mu_plus, &bounds.alpha_minus)?;
    let w_star = fwd.meet(&bwd)?;

    let eps_feas = spec.tolerances.eps_feas * env.mu_plus.sup_norm().max(1.0);
    let feasible = env.mu_minus.leq(&w_star, eps_feas)?;

    let eps_slope = slope_tolerance(&bounds.alpha_minus, &bounds.alpha_plus);
    let mut violation_report = check_profile(
        &w_star,
        &env.mu_minus,
        &env.mu_plus,
        &bounds.alpha_minus,
        &bounds.alpha_plus,
        eps_feas,
        eps_slope,
    )?;
    let a_norm = curvature.zip_with(&w_star, |k, w| k.abs() * w.max(0.0))?;
    for (i, (an, b)) in a_norm.values().iter().zip(bounds.beta.values()).enumerate() {
        if *an > b + eps_feas {
            violation_report.push(Violation {
                index: i,
                s: spec.grid.point(i),
                bound: BoundKind::Beta,
                magnitude: an - b,
            });
        }
    }

    let v_star = w_star.map(|w| w.max(0.0).sqrt())?;
    let time = maneuver_time(&w_star)?;
    Ok(PlanResult {
        feasible,
        a_long: w_star.derivative(),
        a_norm,
        curvature,
        mu_minus: env.mu_minus,
        mu_plus: env.mu_plus,
        forward: fwd,
        backward: bwd,
        v_star,
        total_time: time.total,
        cumulative_time: time.cumulative,
        w_star,
        eps_feas,
        violation_report,
    })
}
