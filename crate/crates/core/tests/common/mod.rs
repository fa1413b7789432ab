//! Random instance generators shared by the integration suites.
#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::Rng;
use velplan::{Grid, SampledFunction};

/// Acceleration limits and envelopes on one grid.
pub struct Instance {
    pub grid: Grid,
    pub alpha_minus: SampledFunction,
    pub alpha_plus: SampledFunction,
    pub mu_plus: SampledFunction,
    pub mu_minus: SampledFunction,
}

/// Piecewise-constant values over `pieces` random index intervals.
pub fn piecewise_constant(rng: &mut StdRng, grid: Grid, lo: f64, hi: f64) -> SampledFunction {
    let n = grid.intervals();
    let pieces = rng.random_range(1..=6usize);
    let mut cuts: Vec<usize> = (0..pieces - 1).map(|_| rng.random_range(1..n)).collect();
    cuts.sort_unstable();
    let levels: Vec<f64> = (0..pieces).map(|_| rng.random_range(lo..hi)).collect();
    let values = (0..=n)
        .map(|i| levels[cuts.partition_point(|c| *c <= i)])
        .collect();
    SampledFunction::new(grid, values).unwrap()
}

/// Random piecewise-linear function with values in `[0, cap]`, optionally
/// pinned to zero at both ends.
pub fn piecewise_envelope(
    rng: &mut StdRng,
    grid: Grid,
    cap: f64,
    rest_ends: bool,
) -> SampledFunction {
    let n = grid.intervals();
    let knots = rng.random_range(2..=8usize);
    let mut xs: Vec<usize> = (0..knots).map(|_| rng.random_range(0..=n)).collect();
    xs.push(0);
    xs.push(n);
    xs.sort_unstable();
    xs.dedup();
    let ys: Vec<f64> = xs
        .iter()
        .map(|_| rng.random_range(0.05 * cap..cap))
        .collect();
    let mut values: Vec<f64> = (0..=n)
        .map(|i| {
            let k = xs.partition_point(|x| *x <= i).min(xs.len() - 1).max(1);
            let (x0, x1) = (xs[k - 1] as f64, xs[k] as f64);
            let t = ((i as f64 - x0) / (x1 - x0)).clamp(0.0, 1.0);
            ys[k - 1] * (1.0 - t) + ys[k] * t
        })
        .collect();
    // Occasional steps.
    if rng.random_bool(0.5) {
        let at = rng.random_range(1..n);
        let drop = rng.random_range(0.1..0.9);
        for v in &mut values[at..] {
            *v *= drop;
        }
    }
    if rest_ends {
        values[0] = 0.0;
        values[n] = 0.0;
    }
    SampledFunction::new(grid, values).unwrap()
}

pub fn random_instance(rng: &mut StdRng, n: usize) -> Instance {
    let grid = Grid::new(rng.random_range(5.0..300.0), n).unwrap();
    let alpha_plus = piecewise_constant(rng, grid, 0.1, 6.0);
    let alpha_minus = piecewise_constant(rng, grid, -12.0, -0.1);
    let cap = rng.random_range(10.0..2000.0);
    let rest_ends = rng.random_bool(0.5);
    let mu_plus = piecewise_envelope(rng, grid, cap, rest_ends);
    let mu_minus = SampledFunction::constant(grid, 0.0).unwrap();
    Instance {
        grid,
        alpha_minus,
        alpha_plus,
        mu_plus,
        mu_minus,
    }
}

/// A random function `μ ≤ mu` obtained by scaling each sample by a random
/// factor in `[0, 1]` that varies piecewise.
pub fn random_below(rng: &mut StdRng, mu: &SampledFunction) -> SampledFunction {
    let factor = piecewise_constant(rng, *mu.grid(), 0.0, 1.0);
    mu.zip_with(&factor, |m, f| m * f).unwrap()
}
