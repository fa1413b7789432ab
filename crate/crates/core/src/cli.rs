//! Problem files, presets and result output for the `velplan` binary.
//!
//! Problem files are TOML:
//!
//! ```toml
//! [grid]
//! s_f = 200.0          # meters, or "from_path" for spline paths
//! n = 4000
//!
//! [curvature]
//! kind = "piecewise_hermite"   # or "spline" / "sampled"
//! l1 = 30.0
//! l2 = 40.0
//! l3 = 124.2478
//! l4 = 134.2478
//! radius = 60.0
//!
//! [bounds]
//! v_minus = 0.0        # m/s, constant or one value per grid point
//! v_plus = 36.1
//! v_start = 0.0
//! v_end = 22.0
//! alpha_minus = -10.5  # m/s², bounds on d(v²)/ds
//! alpha_plus = 4.0
//! beta = 7.0           # m/s², normal acceleration
//!
//! [tolerances]         # optional
//! eps_feas = 1e-6      # relative to max(1, ‖μ⁺‖∞)
//! kappa_eps = 1e-9     # 1/m
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Grid;
use crate::problem::{BoundProfile, BoundSet, CurvatureModel, ProblemSpec, Tolerances};
use crate::solver::{plan, PlanResult};

pub const DEFAULT_N: usize = 4000;

pub const PROFILE_FILE: &str = "profile.csv";
pub const VERDICT_FILE: &str = "verdict.toml";
pub const OPERATORS_FILE: &str = "operators.csv";
pub const OPTIMAL_FILE: &str = "optimal.csv";

pub const PROFILE_COLUMNS: [&str; 11] = [
    "s", "k", "mu_minus", "mu_plus", "F", "B", "w_star", "v_star", "t", "a_long", "a_norm",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthKeyword {
    FromPath,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PathLength {
    Meters(f64),
    Keyword(LengthKeyword),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub s_f: PathLength,
    #[serde(default = "default_n")]
    pub n: usize,
}

fn default_n() -> usize {
    DEFAULT_N
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurvatureSection {
    PiecewiseHermite {
        l1: f64,
        l2: f64,
        l3: f64,
        l4: f64,
        #[serde(alias = "R")]
        radius: f64,
    },
    Spline {
        waypoints: Vec<[f64; 2]>,
    },
    Sampled {
        values: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSection {
    pub v_minus: BoundProfile,
    pub v_plus: BoundProfile,
    pub v_start: f64,
    pub v_end: f64,
    pub alpha_minus: BoundProfile,
    pub alpha_plus: BoundProfile,
    pub beta: BoundProfile,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_feas: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_eps: Option<f64>,
}

/// On-disk problem description. Units are SI throughout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub grid: GridSection,
    pub curvature: CurvatureSection,
    pub bounds: BoundsSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<TolerancesSection>,
}

impl ProblemFile {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Resolves the file into a validated [`ProblemSpec`], optionally
    /// overriding the grid resolution and the relative feasibility tolerance.
    pub fn to_spec(&self, n: Option<usize>, eps_feas: Option<f64>) -> Result<ProblemSpec> {
        let n = n.unwrap_or(self.grid.n);
        let curvature = match &self.curvature {
            CurvatureSection::PiecewiseHermite {
                l1,
                l2,
                l3,
                l4,
                radius,
            } => {
                let PathLength::Meters(length) = self.grid.s_f else {
                    return Err(Error::Parse(
                        "grid.s_f must be a number for piecewise_hermite curvature".into(),
                    ));
                };
                CurvatureModel::PiecewiseHermite {
                    breakpoints: [*l1, *l2, *l3, *l4],
                    radius: *radius,
                    length,
                }
            }
            CurvatureSection::Spline { waypoints } => CurvatureModel::Spline {
                waypoints: waypoints.clone(),
            },
            CurvatureSection::Sampled { values } => CurvatureModel::Sampled {
                values: values.clone(),
            },
        };
        let s_f = match self.grid.s_f {
            PathLength::Meters(v) => v,
            PathLength::Keyword(LengthKeyword::FromPath) => {
                curvature.length()?.ok_or_else(|| {
                    Error::Parse("grid.s_f = \"from_path\" needs a spline curvature model".into())
                })?
            }
        };
        let b = &self.bounds;
        let bounds = BoundSet {
            v_minus: b.v_minus.clone(),
            v_plus: b.v_plus.clone(),
            v_start: b.v_start,
            v_end: b.v_end,
            alpha_minus: b.alpha_minus.clone(),
            alpha_plus: b.alpha_plus.clone(),
            beta: b.beta.clone(),
        };
        let mut tol = Tolerances::default();
        if let Some(t) = &self.tolerances {
            tol.eps_feas = t.eps_feas.unwrap_or(tol.eps_feas);
            tol.kappa_eps = t.kappa_eps.unwrap_or(tol.kappa_eps);
        }
        if let Some(e) = eps_feas {
            tol.eps_feas = e;
        }
        for (name, v) in [("eps_feas", tol.eps_feas), ("kappa_eps", tol.kappa_eps)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Parse(format!(
                    "tolerance {name} must be non-negative, got {v}"
                )));
            }
        }
        Ok(ProblemSpec::new(Grid::new(s_f, n)?, curvature, bounds)?.with_tolerances(tol))
    }
}

/// Built-in instances: `example1` (feasible, arc between straights),
/// `example2` (same path, unreachable final speed 35 m/s) and `example3`
/// (quintic spline through five waypoints).
pub fn preset(name: &str) -> Result<ProblemFile> {
    let hermite = CurvatureSection::PiecewiseHermite {
        l1: 30.0,
        l2: 40.0,
        l3: 124.2478,
        l4: 134.2478,
        radius: 60.0,
    };
    let road = |v_end: f64| ProblemFile {
        grid: GridSection {
            s_f: PathLength::Meters(200.0),
            n: DEFAULT_N,
        },
        curvature: hermite.clone(),
        bounds: BoundsSection {
            v_minus: BoundProfile::Constant(0.0),
            v_plus: BoundProfile::Constant(36.1),
            v_start: 0.0,
            v_end,
            alpha_minus: BoundProfile::Constant(-10.5),
            alpha_plus: BoundProfile::Constant(4.0),
            beta: BoundProfile::Constant(7.0),
        },
        tolerances: None,
    };
    match name {
        "example1" => Ok(road(22.0)),
        "example2" => Ok(road(35.0)),
        "example3" => {
            let x = [0.0, 2.0, 2.60, 1.75, 3.0];
            let y = [0.0, -0.5, 0.0, 2.0, 3.0];
            Ok(ProblemFile {
                grid: GridSection {
                    s_f: PathLength::Keyword(LengthKeyword::FromPath),
                    n: DEFAULT_N,
                },
                curvature: CurvatureSection::Spline {
                    waypoints: x.iter().zip(y).map(|(a, b)| [*a, b]).collect(),
                },
                bounds: BoundsSection {
                    v_minus: BoundProfile::Constant(0.0),
                    v_plus: BoundProfile::Constant(1.3),
                    v_start: 0.0,
                    v_end: 0.0,
                    alpha_minus: BoundProfile::Constant(-0.1),
                    alpha_plus: BoundProfile::Constant(0.1),
                    beta: BoundProfile::Constant(0.05),
                },
                tolerances: None,
            })
        }
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationRecord {
    pub index: usize,
    pub s: f64,
    pub bound: String,
    pub magnitude: f64,
}

/// Machine-readable outcome, written as TOML. A non-finite `total_time` is
/// written as the bare token `inf`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub feasible: bool,
    pub total_time: f64,
    pub s_f: f64,
    pub n: usize,
    pub eps_feas: f64,
    pub w_star_start: f64,
    pub w_star_end: f64,
    pub violations: Vec<ViolationRecord>,
}

/// Verdict plus the per-point profile table.
#[derive(Debug, Clone)]
pub struct ResultBundle {
    pub verdict: Verdict,
    pub result: PlanResult,
}

impl ResultBundle {
    pub fn from_plan(result: PlanResult) -> Self {
        let grid = *result.w_star.grid();
        let verdict = Verdict {
            feasible: result.feasible,
            total_time: result.total_time,
            s_f: grid.length(),
            n: grid.intervals(),
            eps_feas: result.eps_feas,
            w_star_start: result.w_star.first(),
            w_star_end: result.w_star.last(),
            violations: result
                .violation_report
                .iter()
                .map(|v| ViolationRecord {
                    index: v.index,
                    s: v.s,
                    bound: v.bound.name().to_string(),
                    magnitude: v.magnitude,
                })
                .collect(),
        };
        Self { verdict, result }
    }

    pub fn grid(&self) -> Grid {
        *self.result.w_star.grid()
    }

    pub fn verdict_toml(&self) -> Result<String> {
        toml::to_string(&self.verdict).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Comma-separated table with the [`PROFILE_COLUMNS`] header.
    pub fn profile_csv(&self) -> String {
        let r = &self.result;
        table(&PROFILE_COLUMNS, self.grid().len(), |i| {
            vec![
                self.grid().point(i),
                r.curvature[i],
                r.mu_minus[i],
                r.mu_plus[i],
                r.forward[i],
                r.backward[i],
                r.w_star[i],
                r.v_star[i],
                r.cumulative_time[i],
                r.a_long[i],
                r.a_norm[i],
            ]
        })
    }

    /// `(s, μ⁺, F, B)`.
    pub fn operators_csv(&self) -> String {
        let r = &self.result;
        table(&["s", "mu_plus", "F", "B"], self.grid().len(), |i| {
            vec![
                self.grid().point(i),
                r.mu_plus[i],
                r.forward[i],
                r.backward[i],
            ]
        })
    }

    /// `(s, μ⁺, w*)`.
    pub fn optimal_csv(&self) -> String {
        let r = &self.result;
        table(&["s", "mu_plus", "w_star"], self.grid().len(), |i| {
            vec![self.grid().point(i), r.mu_plus[i], r.w_star[i]]
        })
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        let v = &self.verdict;
        if v.feasible {
            format!(
                "feasible: total time {} s over {} m ({} intervals)",
                format_number(v.total_time),
                v.s_f,
                v.n
            )
        } else {
            let first = v
                .violations
                .iter()
                .find(|x| x.bound == "mu_minus")
                .map(|x| {
                    format!(
                        " first violation at s = {} (short by {})",
                        x.s,
                        format_number(x.magnitude)
                    )
                })
                .unwrap_or_default();
            format!(
                "infeasible: {} point(s) below the lower speed bound;{first}",
                v.violations
                    .iter()
                    .filter(|x| x.bound == "mu_minus")
                    .count()
            )
        }
    }
}

/// Twelve significant digits; non-finite values as `inf`, `-inf`, `nan`.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.11e}")
    }
}

fn table(header: &[&str], rows: usize, row: impl Fn(usize) -> Vec<f64>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for i in 0..rows {
        let cells: Vec<String> = row(i).into_iter().map(format_number).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

/// Writes the per-figure tables, creating `dir` if needed.
pub fn emit_plot_data(bundle: &ResultBundle, dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    Ok(vec![
        write_file(dir, OPERATORS_FILE, &bundle.operators_csv())?,
        write_file(dir, OPTIMAL_FILE, &bundle.optimal_csv())?,
    ])
}

/// Options of the `plan` command.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub problem: Option<PathBuf>,
    pub preset: Option<String>,
    pub out: PathBuf,
    pub n: Option<usize>,
    pub eps_feas: Option<f64>,
    pub emit_plots: bool,
}

/// Loads the problem, plans it and writes `profile.csv` and
/// `verdict.toml` (plus plot tables on request) into `out`.
pub fn run(opts: &RunOptions) -> Result<ResultBundle> {
    let file = match (&opts.problem, &opts.preset) {
        (Some(_), Some(_)) => {
            return Err(Error::Parse(
                "give either a problem file or --preset, not both".into(),
            ))
        }
        (Some(path), None) => ProblemFile::load(path)?,
        (None, Some(name)) => preset(name)?,
        (None, None) => return Err(Error::Parse("no problem file or --preset given".into())),
    };
    let spec = file.to_spec(opts.n, opts.eps_feas)?;
    let bundle = ResultBundle::from_plan(plan(&spec)?);
    ensure_dir(&opts.out)?;
    write_file(&opts.out, PROFILE_FILE, &bundle.profile_csv())?;
    write_file(&opts.out, VERDICT_FILE, &bundle.verdict_toml()?)?;
    if opts.emit_plots {
        emit_plot_data(&bundle, &opts.out)?;
    }
    Ok(bundle)
}

/// Process exit status for a run: 0 feasible, 2 infeasible, 1 error.
pub fn exit_code(outcome: &Result<ResultBundle>) -> i32 {
    match outcome {
        Ok(b) if b.verdict.feasible => 0,
        Ok(_) => 2,
        Err(_) => 1,
    }
}
