//! Problem construction: curvature models, bound functions and the
//! squared-speed envelope `(μ⁻, μ⁺)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Grid, SampledFunction};
use crate::spline::SplinePath;

/// Curvature magnitudes below this drop the normal-acceleration term of μ⁺.
pub const DEFAULT_KAPPA_EPS: f64 = 1e-9;

/// Relative feasibility tolerance; the absolute value is
/// `eps_feas · max(1, ‖μ⁺‖∞)`.
pub const DEFAULT_EPS_FEAS: f64 = 1e-6;

/// Smooth blend from `k_a` at `l_a` to `k_b` at `l_b` with vanishing first
/// and second derivatives at both ends (the quintic `10t³ − 15t⁴ + 6t⁵`).
pub fn hermite_transition(l_a: f64, l_b: f64, k_a: f64, k_b: f64, s: f64) -> Result<f64> {
    if l_a.is_nan() || l_b.is_nan() || l_a >= l_b {
        return Err(Error::InvalidCurvature(format!(
            "transition needs l_a < l_b, got {l_a} and {l_b}"
        )));
    }
    let t = ((s - l_a) / (l_b - l_a)).clamp(0.0, 1.0);
    let blend = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
    Ok(k_a + (k_b - k_a) * blend)
}

/// How the path curvature `k(s)` is obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum CurvatureModel {
    /// Straight, transition, circular arc of radius `radius`, transition,
    /// straight. Curvature rises on `[l1, l2]`, is `1/radius` on the arc and
    /// falls on `[l3, l4]`.
    PiecewiseHermite {
        breakpoints: [f64; 4],
        radius: f64,
        length: f64,
    },
    /// Quintic spline through planar waypoints.
    Spline { waypoints: Vec<[f64; 2]> },
    /// Curvature given directly on the grid.
    Sampled { values: Vec<f64> },
}

impl CurvatureModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::PiecewiseHermite {
                breakpoints: [l1, l2, l3, l4],
                radius,
                length,
            } => {
                let ordered = 0.0 < *l1 && l1 < l2 && l2 < l3 && l3 < l4 && l4 < length;
                if !ordered || !length.is_finite() {
                    return Err(Error::InvalidCurvature(format!(
                        "breakpoints must satisfy 0 < l1 < l2 < l3 < l4 < s_f, got [{l1}, {l2}, {l3}, {l4}] with s_f = {length}"
                    )));
                }
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidCurvature(format!(
                        "radius must be positive, got {radius}"
                    )));
                }
                Ok(())
            }
            Self::Spline { waypoints } => SplinePath::through(waypoints).map(|_| ()),
            Self::Sampled { values } => match values.iter().position(|v| !v.is_finite()) {
                Some(index) => Err(Error::NonFinite { index }),
                None => Ok(()),
            },
        }
    }

    /// Total arc length implied by the model, if it fixes one.
    pub fn length(&self) -> Result<Option<f64>> {
        match self {
            Self::PiecewiseHermite { length, .. } => Ok(Some(*length)),
            Self::Spline { waypoints } => Ok(Some(SplinePath::through(waypoints)?.length())),
            Self::Sampled { .. } => Ok(None),
        }
    }

    /// Curvature at `s` for the piecewise model.
    fn hermite_at(breakpoints: &[f64; 4], radius: f64, s: f64) -> f64 {
        let [l1, l2, l3, l4] = *breakpoints;
        let arc = 1.0 / radius;
        if s < l1 || s > l4 {
            0.0
        } else if s <= l2 {
            hermite_transition(l1, l2, 0.0, arc, s).unwrap_or(arc)
        } else if s < l3 {
            arc
        } else {
            hermite_transition(l3, l4, arc, 0.0, s).unwrap_or(0.0)
        }
    }

    pub fn sample(&self, grid: &Grid) -> Result<SampledFunction> {
        self.validate()?;
        match self {
            Self::PiecewiseHermite {
                breakpoints,
                radius,
                ..
            } => SampledFunction::from_fn(*grid, |s| Self::hermite_at(breakpoints, *radius, s)),
            Self::Spline { waypoints } => SplinePath::through(waypoints)?.sample_curvature(grid),
            Self::Sampled { values } => SampledFunction::new(*grid, values.clone()),
        }
    }
}

/// A bound that is either constant in `s` or given per grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoundProfile {
    Constant(f64),
    Sampled(Vec<f64>),
}

impl BoundProfile {
    pub fn sample(&self, grid: &Grid) -> Result<SampledFunction> {
        match self {
            Self::Constant(c) => SampledFunction::constant(*grid, *c),
            Self::Sampled(v) => SampledFunction::new(*grid, v.clone()),
        }
    }
}

impl From<f64> for BoundProfile {
    fn from(v: f64) -> Self {
        Self::Constant(v)
    }
}

/// Speed and acceleration limits. `v_minus`/`v_plus` hold on the open
/// interval; the endpoints are pinned to `v_start` and `v_end`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundSet {
    pub v_minus: BoundProfile,
    pub v_plus: BoundProfile,
    pub v_start: f64,
    pub v_end: f64,
    pub alpha_minus: BoundProfile,
    pub alpha_plus: BoundProfile,
    pub beta: BoundProfile,
}

/// A [`BoundSet`] evaluated on a grid, endpoint speeds merged in.
#[derive(Debug, Clone)]
pub struct SampledBounds {
    pub v_minus: SampledFunction,
    pub v_plus: SampledFunction,
    pub alpha_minus: SampledFunction,
    pub alpha_plus: SampledFunction,
    pub beta: SampledFunction,
}

impl BoundSet {
    pub fn sample(&self, grid: &Grid) -> Result<SampledBounds> {
        for (name, v) in [("v_start", self.v_start), ("v_end", self.v_end)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidBound {
                    name,
                    reason: format!("must be finite and non-negative, got {v}"),
                });
            }
        }
        let pin = |f: SampledFunction| -> Result<SampledFunction> {
            let mut v = f.into_values();
            let n = v.len() - 1;
            v[0] = self.v_start;
            v[n] = self.v_end;
            SampledFunction::new(*grid, v)
        };
        let v_minus = pin(self.v_minus.sample(grid).map_err(named("v_minus"))?)?;
        let v_plus = pin(self.v_plus.sample(grid).map_err(named("v_plus"))?)?;
        let alpha_minus = self
            .alpha_minus
            .sample(grid)
            .map_err(named("alpha_minus"))?;
        let alpha_plus = self.alpha_plus.sample(grid).map_err(named("alpha_plus"))?;
        let beta = self.beta.sample(grid).map_err(named("beta"))?;

        check_sign("v_minus", &v_minus, |v| v >= 0.0, "non-negative")?;
        check_sign("alpha_minus", &alpha_minus, |v| v <= 0.0, "non-positive")?;
        check_sign("alpha_plus", &alpha_plus, |v| v >= 0.0, "non-negative")?;
        check_sign("beta", &beta, |v| v >= 0.0, "non-negative")?;
        for (index, (lo, hi)) in v_minus.values().iter().zip(v_plus.values()).enumerate() {
            if lo > hi {
                return Err(Error::InconsistentBounds {
                    index,
                    v_minus: *lo,
                    v_plus: *hi,
                });
            }
        }
        Ok(SampledBounds {
            v_minus,
            v_plus,
            alpha_minus,
            alpha_plus,
            beta,
        })
    }
}

fn named(name: &'static str) -> impl Fn(Error) -> Error {
    move |e| Error::InvalidBound {
        name,
        reason: e.to_string(),
    }
}

fn check_sign(
    name: &'static str,
    f: &SampledFunction,
    ok: impl Fn(f64) -> bool,
    what: &str,
) -> Result<()> {
    match f.values().iter().position(|v| !ok(*v)) {
        Some(i) => Err(Error::InvalidBound {
            name,
            reason: format!("must be {what}, got {} at index {i}", f[i]),
        }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative feasibility tolerance.
    pub eps_feas: f64,
    pub kappa_eps: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eps_feas: DEFAULT_EPS_FEAS,
            kappa_eps: DEFAULT_KAPPA_EPS,
        }
    }
}

/// Lower and upper bounds on the squared speed `w = v²`.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    pub mu_minus: SampledFunction,
    pub mu_plus: SampledFunction,
}

impl Envelope {
    /// `μ⁺ = v⁺² ∧ β/|k|`, the curvature term omitted where `|k| < kappa_eps`;
    /// `μ⁻ = v⁻²`.
    pub fn from_samples(
        curvature: &SampledFunction,
        bounds: &SampledBounds,
        kappa_eps: f64,
    ) -> Result<Self> {
        let speed_cap = bounds.v_plus.map(|v| v * v)?;
        let lateral_cap = bounds.beta.zip_with(curvature, |b, k| {
            if k.abs() < kappa_eps {
                f64::MAX
            } else {
                b / k.abs()
            }
        })?;
        Ok(Self {
            mu_minus: bounds.v_minus.map(|v| v * v)?,
            mu_plus: speed_cap.meet(&lateral_cap)?,
        })
    }
}

/// A complete planning instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub grid: Grid,
    pub curvature: CurvatureModel,
    pub bounds: BoundSet,
    pub tolerances: Tolerances,
}

impl ProblemSpec {
    pub fn new(grid: Grid, curvature: CurvatureModel, bounds: BoundSet) -> Result<Self> {
        let spec = Self {
            grid,
            curvature,
            bounds,
            tolerances: Tolerances::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_tolerances(mut self, tolerances: Tolerances) -> Self {
        self.tolerances = tolerances;
        self
    }

    /// Checks the curvature model and that the grid spans the path.
    pub fn validate(&self) -> Result<()> {
        self.curvature.validate()?;
        if let Some(len) = self.curvature.length()? {
            let tol = match self.curvature {
                CurvatureModel::Spline { .. } => 1e-6,
                _ => 1e-12,
            };
            if ((self.grid.length() - len) / len).abs() > tol {
                return Err(Error::InvalidGrid(format!(
                    "grid length {} differs from path length {len}",
                    self.grid.length()
                )));
            }
        }
        Ok(())
    }

    pub fn sample_curvature(&self) -> Result<SampledFunction> {
        self.curvature.sample(&self.grid)
    }
}

/// Samples curvature and bounds on the problem grid and forms `(μ⁻, μ⁺)`.
pub fn build_envelope(spec: &ProblemSpec) -> Result<Envelope> {
    let k = spec.sample_curvature()?;
    let bounds = spec.bounds.sample(&spec.grid)?;
    Envelope::from_samples(&k, &bounds, spec.tolerances.kappa_eps)
}
