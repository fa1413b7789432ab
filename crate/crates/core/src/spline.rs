//! Planar paths through waypoints: a natural quintic spline in a
//! chord-length parameter, with arc-length reparameterization and signed
//! curvature sampling.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lattice::{Grid, SampledFunction};

/// Speeds below this are treated as a singular parameterization.
const MIN_SPEED: f64 = 1e-12;

/// Relative tolerance of the arc-length quadrature.
const QUAD_TOL: f64 = 1e-13;

const MAX_DEPTH: u32 = 40;

/// Piecewise quintic curve with C⁴ continuity at the interior knots and
/// vanishing third and fourth derivatives at both ends.
#[derive(Debug, Clone)]
pub struct QuinticSpline {
    knots: Vec<f64>,
    x: Vec<[f64; 6]>,
    y: Vec<[f64; 6]>,
}

impl QuinticSpline {
    /// Interpolates `waypoints` with parameter values given by cumulative
    /// chord length.
    pub fn through(waypoints: &[[f64; 2]]) -> Result<Self> {
        if waypoints.len() < 3 {
            return Err(Error::InvalidCurvature(format!(
                "spline needs at least 3 waypoints, got {}",
                waypoints.len()
            )));
        }
        if waypoints.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidCurvature(
                "non-finite waypoint coordinate".into(),
            ));
        }
        let mut knots = Vec::with_capacity(waypoints.len());
        knots.push(0.0);
        for (i, w) in waypoints.windows(2).enumerate() {
            let chord = (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]);
            if chord < MIN_SPEED {
                return Err(Error::DegeneratePath(format!(
                    "waypoints {i} and {} coincide",
                    i + 1
                )));
            }
            knots.push(knots[i] + chord);
        }
        let xs: Vec<f64> = waypoints.iter().map(|p| p[0]).collect();
        let ys: Vec<f64> = waypoints.iter().map(|p| p[1]).collect();
        Ok(Self {
            x: fit_natural_quintic(&knots, &xs)?,
            y: fit_natural_quintic(&knots, &ys)?,
            knots,
        })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn parameter_range(&self) -> (f64, f64) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let last = self.knots.len() - 2;
        let j = match self.knots.binary_search_by(|k| k.total_cmp(&t)) {
            Ok(i) => i.min(last),
            Err(i) => i.saturating_sub(1).min(last),
        };
        (j, t - self.knots[j])
    }

    /// `order`-th derivative of the curve with respect to the parameter.
    pub fn derivative(&self, t: f64, order: usize) -> [f64; 2] {
        let (j, u) = self.locate(t);
        [
            poly_derivative(&self.x[j], u, order),
            poly_derivative(&self.y[j], u, order),
        ]
    }

    pub fn position(&self, t: f64) -> [f64; 2] {
        self.derivative(t, 0)
    }

    pub fn speed(&self, t: f64) -> f64 {
        let [dx, dy] = self.derivative(t, 1);
        dx.hypot(dy)
    }

    /// Signed curvature, invariant under reparameterization.
    pub fn curvature(&self, t: f64) -> Result<f64> {
        let [dx, dy] = self.derivative(t, 1);
        let [ddx, ddy] = self.derivative(t, 2);
        let speed = dx.hypot(dy);
        if speed < MIN_SPEED {
            return Err(Error::DegeneratePath(format!(
                "parameter speed {speed:e} at t = {t}"
            )));
        }
        Ok((dx * ddy - dy * ddx) / (speed * speed * speed))
    }
}

/// `c_k · k!/(k−r)! · u^(k−r)` summed over `k ≥ r`.
fn poly_derivative(c: &[f64; 6], u: f64, order: usize) -> f64 {
    let mut acc = 0.0;
    for k in (order..6).rev() {
        acc = acc * u + c[k] * falling(k, order);
    }
    acc
}

fn falling(k: usize, r: usize) -> f64 {
    ((k - r + 1)..=k).map(|v| v as f64).product()
}

fn fit_natural_quintic(knots: &[f64], values: &[f64]) -> Result<Vec<[f64; 6]>> {
    let m = knots.len() - 1;
    let size = 6 * m;
    let mut a = DMatrix::<f64>::zeros(size, size);
    let mut b = DVector::<f64>::zeros(size);
    let mut row = 0;

    // Row of the r-th derivative of segment j at local offset u.
    let put = |a: &mut DMatrix<f64>, row: usize, j: usize, u: f64, r: usize, sign: f64| {
        for k in r..6 {
            a[(row, 6 * j + k)] += sign * falling(k, r) * u.powi((k - r) as i32);
        }
    };

    for j in 0..m {
        let d = knots[j + 1] - knots[j];
        put(&mut a, row, j, 0.0, 0, 1.0);
        b[row] = values[j];
        row += 1;
        put(&mut a, row, j, d, 0, 1.0);
        b[row] = values[j + 1];
        row += 1;
    }
    for j in 1..m {
        let d = knots[j] - knots[j - 1];
        for r in 1..=4 {
            put(&mut a, row, j - 1, d, r, 1.0);
            put(&mut a, row, j, 0.0, r, -1.0);
            row += 1;
        }
    }
    let d_last = knots[m] - knots[m - 1];
    for r in 3..=4 {
        put(&mut a, row, 0, 0.0, r, 1.0);
        row += 1;
        put(&mut a, row, m - 1, d_last, r, 1.0);
        row += 1;
    }
    debug_assert_eq!(row, size);

    let sol = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::DegeneratePath("spline interpolation system is singular".into()))?;
    Ok((0..m)
        .map(|j| std::array::from_fn(|k| sol[6 * j + k]))
        .collect())
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// A spline path together with its arc-length table.
#[derive(Debug, Clone)]
pub struct SplinePath {
    spline: QuinticSpline,
    /// Arc length at each knot.
    cumulative: Vec<f64>,
}

impl SplinePath {
    pub fn through(waypoints: &[[f64; 2]]) -> Result<Self> {
        let spline = QuinticSpline::through(waypoints)?;
        let mut cumulative = vec![0.0];
        for w in spline.knots.windows(2) {
            let piece = segment_length(&spline, w[0], w[1]);
            cumulative.push(cumulative[cumulative.len() - 1] + piece);
        }
        Ok(Self { spline, cumulative })
    }

    pub fn spline(&self) -> &QuinticSpline {
        &self.spline
    }

    pub fn length(&self) -> f64 {
        self.cumulative[self.cumulative.len() - 1]
    }

    /// Arc length from the start to parameter `t`.
    pub fn arc_length(&self, t: f64) -> f64 {
        let (j, _) = self.spline.locate(t);
        self.cumulative[j] + segment_length(&self.spline, self.spline.knots[j], t)
    }

    /// Parameter at arc length `s`, by safeguarded Newton iteration inside
    /// the knot interval that contains `s`.
    pub fn parameter_at(&self, s: f64) -> f64 {
        let s = s.clamp(0.0, self.length());
        let last = self.cumulative.len() - 2;
        let j = self
            .cumulative
            .partition_point(|c| *c <= s)
            .saturating_sub(1)
            .min(last);
        let (mut lo, mut hi) = (self.spline.knots[j], self.spline.knots[j + 1]);
        let base = self.cumulative[j];
        let seg = self.cumulative[j + 1] - base;
        let target = s - base;
        let mut t = lo + (hi - lo) * if seg > 0.0 { target / seg } else { 0.0 };
        for _ in 0..100 {
            let g = segment_length(&self.spline, self.spline.knots[j], t) - target;
            if g.abs() <= 1e-14 * self.length().max(1.0) {
                break;
            }
            if g > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let speed = self.spline.speed(t);
            let newton = t - g / speed;
            t = if speed > MIN_SPEED && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
                break;
            }
        }
        t
    }

    /// Parameters at the grid's arc-length points, marching forward so each
    /// step only integrates over one grid cell.
    fn grid_parameters(&self, grid: &Grid) -> Vec<f64> {
        let scale = self.length() / grid.length();
        let (t0, t1) = self.spline.parameter_range();
        let mut out = Vec::with_capacity(grid.len());
        let (mut t_prev, mut s_prev) = (t0, 0.0);
        out.push(t0);
        for i in 1..grid.len() {
            let target = grid.point(i) * scale;
            let (mut lo, mut hi) = (t_prev, t1);
            let mut t =
                (t_prev + (target - s_prev) / self.spline.speed(t_prev).max(MIN_SPEED)).min(t1);
            for _ in 0..100 {
                let g = s_prev + span_length(&self.spline, t_prev, t) - target;
                if g.abs() <= 1e-14 * self.length().max(1.0) {
                    break;
                }
                if g > 0.0 {
                    hi = t;
                } else {
                    lo = t;
                }
                let speed = self.spline.speed(t);
                let newton = t - g / speed;
                t = if speed > MIN_SPEED && newton > lo && newton < hi {
                    newton
                } else {
                    0.5 * (lo + hi)
                };
                if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
                    break;
                }
            }
            if i == grid.len() - 1 {
                t = t1;
            }
            s_prev += span_length(&self.spline, t_prev, t);
            t_prev = t;
            out.push(t);
        }
        out
    }

    /// Signed curvature sampled at uniform arc length.
    pub fn sample_curvature(&self, grid: &Grid) -> Result<SampledFunction> {
        self.check_grid(grid)?;
        let values = self
            .grid_parameters(grid)
            .into_iter()
            .map(|t| self.spline.curvature(t))
            .collect::<Result<Vec<_>>>()?;
        SampledFunction::new(*grid, values)
    }

    /// Path positions at uniform arc length.
    pub fn sample_positions(&self, grid: &Grid) -> Result<Vec<[f64; 2]>> {
        self.check_grid(grid)?;
        Ok(self
            .grid_parameters(grid)
            .into_iter()
            .map(|t| self.spline.position(t))
            .collect())
    }

    fn check_grid(&self, grid: &Grid) -> Result<()> {
        let rel = (grid.length() - self.length()).abs() / self.length();
        if rel > 1e-6 {
            return Err(Error::InvalidGrid(format!(
                "grid length {} does not match path length {}",
                grid.length(),
                self.length()
            )));
        }
        Ok(())
    }
}

/// Arc length between two parameters that may lie in different segments.
fn span_length(spline: &QuinticSpline, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let mut total = 0.0;
    let mut lo = a;
    for k in spline.knots.iter().copied().filter(|k| *k > a && *k < b) {
        total += segment_length(spline, lo, k);
        lo = k;
    }
    total + segment_length(spline, lo, b)
}

fn segment_length(spline: &QuinticSpline, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let speed = |t: f64| spline.speed(t);
    // Scale tolerance by a rough length estimate.
    let rough = (b - a) * (speed(a) + speed(b)).max(MIN_SPEED);
    adaptive_simpson(&speed, a, b, QUAD_TOL * rough)
}

/// Signed curvature of the quintic spline through `waypoints`, sampled at
/// uniform arc length on `grid`. The grid length must match the path length
/// to 1e-6 relative.
pub fn spline_curvature(waypoints: &[[f64; 2]], grid: &Grid) -> Result<SampledFunction> {
    SplinePath::through(waypoints)?.sample_curvature(grid)
}
