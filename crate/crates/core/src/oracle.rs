//! Brute-force lattice operators, used to cross-check the fast planner.
//!
//! `A(x, y)` is the largest admissible change of `w` from `x` to `y`:
//! `∫_x^y α⁺` going forward and `∫_x^y α⁻` (a non-negative quantity, since
//! the integral runs backwards over a non-positive integrand) going
//! backward. With it,
//!
//! ```text
//! F̄(μ)(x) = min_{y ≤ x} μ(y) + A(y, x)
//! B̄(μ)(x) = min_{y ≥ x} μ(y) + A(y, x)
//! M̄(μ)(x) = min_{y}     μ(y) + A(y, x)
//! ```
//!
//! evaluated here literally over all grid pairs, O(n²).

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::Result;
use crate::lattice::{Grid, SampledFunction};

/// Triple checks are exhaustive up to this many intervals, sampled above.
const EXHAUSTIVE_LIMIT: usize = 50;
const SAMPLED_TRIPLES: usize = 10_000;

/// Cumulative trapezoid integrals of `α⁺` and `α⁻`, giving O(1) lookups of
/// `A(i, j)`.
#[derive(Debug, Clone)]
pub struct HemiMetricTable {
    grid: Grid,
    cum_plus: Vec<f64>,
    cum_minus: Vec<f64>,
}

impl HemiMetricTable {
    pub fn new(alpha_minus: &SampledFunction, alpha_plus: &SampledFunction) -> Result<Self> {
        alpha_minus.ensure_same_grid(alpha_plus)?;
        let grid = *alpha_plus.grid();
        Ok(Self {
            grid,
            cum_plus: cumulative_trapezoid(alpha_plus),
            cum_minus: cumulative_trapezoid(alpha_minus),
        })
    }

    /// Builds a table from raw cumulative arrays without checking them.
    pub fn from_cumulative(grid: Grid, cum_plus: Vec<f64>, cum_minus: Vec<f64>) -> Self {
        assert_eq!(cum_plus.len(), grid.len());
        assert_eq!(cum_minus.len(), grid.len());
        Self {
            grid,
            cum_plus,
            cum_minus,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn cum_plus(&self) -> &[f64] {
        &self.cum_plus
    }

    pub fn cum_minus(&self) -> &[f64] {
        &self.cum_minus
    }

    /// `A(s_i, s_j)`.
    pub fn a(&self, i: usize, j: usize) -> f64 {
        if j >= i {
            self.cum_plus[j] - self.cum_plus[i]
        } else {
            self.cum_minus[j] - self.cum_minus[i]
        }
    }

    fn scale(&self) -> f64 {
        self.cum_plus
            .iter()
            .chain(&self.cum_minus)
            .fold(1.0_f64, |m, v| m.max(v.abs()))
    }
}

fn cumulative_trapezoid(f: &SampledFunction) -> Vec<f64> {
    let h = f.grid().step();
    let mut out = Vec::with_capacity(f.len());
    let mut acc = 0.0;
    out.push(acc);
    for w in f.values().windows(2) {
        acc += 0.5 * (w[0] + w[1]) * h;
        out.push(acc);
    }
    out
}

fn brute(
    mu: &SampledFunction,
    table: &HemiMetricTable,
    sources: impl Fn(usize) -> std::ops::RangeInclusive<usize>,
) -> Result<SampledFunction> {
    let n = mu.len() - 1;
    let values = (0..=n)
        .map(|i| {
            sources(i)
                .map(|j| mu[j] + table.a(j, i))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    SampledFunction::new(table.grid, values)
}

/// `M̄(μ)(s_i) = min_j μ(s_j) + A(s_j, s_i)`.
pub fn brute_meet(mu: &SampledFunction, table: &HemiMetricTable) -> Result<SampledFunction> {
    let n = mu.len() - 1;
    brute(mu, table, |_| 0..=n)
}

/// `F̄(μ)(s_i) = min_{j ≤ i} μ(s_j) + A(s_j, s_i)`.
pub fn brute_forward(mu: &SampledFunction, table: &HemiMetricTable) -> Result<SampledFunction> {
    brute(mu, table, |i| 0..=i)
}

/// `B̄(μ)(s_i) = min_{j ≥ i} μ(s_j) + A(s_j, s_i)`.
pub fn brute_backward(mu: &SampledFunction, table: &HemiMetricTable) -> Result<SampledFunction> {
    let n = mu.len() - 1;
    brute(mu, table, move |i| i..=n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HemiMetricAxiom {
    NonNegative,
    ZeroDiagonal,
    Triangle,
    MonotoneEquality,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomViolation {
    pub axiom: HemiMetricAxiom,
    pub indices: (usize, usize, usize),
    pub excess: f64,
}

#[derive(Debug, Clone, Default)]
pub struct HemiMetricReport {
    pub triples_checked: usize,
    pub violations: Vec<AxiomViolation>,
}

impl HemiMetricReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `A ≥ 0`, `A(i, i) = 0`, the triangle inequality and equality on
/// monotone triples, all to `1e-9` relative to the table's magnitude.
/// Exhaustive for small grids, otherwise on 10⁴ triples drawn from `seed`.
pub fn check_hemimetric(table: &HemiMetricTable, seed: u64) -> HemiMetricReport {
    let tol = 1e-9 * table.scale();
    let n = table.grid.intervals();
    let mut report = HemiMetricReport::default();

    for i in 0..=n {
        let d = table.a(i, i);
        if d.abs() > tol {
            report.violations.push(AxiomViolation {
                axiom: HemiMetricAxiom::ZeroDiagonal,
                indices: (i, i, i),
                excess: d.abs(),
            });
        }
    }

    let check = |report: &mut HemiMetricReport, i: usize, j: usize, k: usize| {
        report.triples_checked += 1;
        let (ij, jk, ik) = (table.a(i, j), table.a(j, k), table.a(i, k));
        for (d, idx) in [(ij, (i, j, j)), (jk, (j, k, k)), (ik, (i, k, k))] {
            if d < -tol {
                report.violations.push(AxiomViolation {
                    axiom: HemiMetricAxiom::NonNegative,
                    indices: idx,
                    excess: -d,
                });
            }
        }
        if ik > ij + jk + tol {
            report.violations.push(AxiomViolation {
                axiom: HemiMetricAxiom::Triangle,
                indices: (i, j, k),
                excess: ik - ij - jk,
            });
        }
        let monotone = (i <= j && j <= k) || (i >= j && j >= k);
        if monotone && (ik - ij - jk).abs() > tol {
            report.violations.push(AxiomViolation {
                axiom: HemiMetricAxiom::MonotoneEquality,
                indices: (i, j, k),
                excess: (ik - ij - jk).abs(),
            });
        }
    };

    if n <= EXHAUSTIVE_LIMIT {
        for i in 0..=n {
            for j in 0..=n {
                for k in 0..=n {
                    check(&mut report, i, j, k);
                }
            }
        }
    } else {
        let mut rng = StdRng::seed_from_u64(seed);
        for _ in 0..SAMPLED_TRIPLES {
            let (i, j, k) = (
                rng.random_range(0..=n),
                rng.random_range(0..=n),
                rng.random_range(0..=n),
            );
            check(&mut report, i, j, k);
        }
    }
    report
}
