use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{self, ClassifyOptions, FitOptions, Pattern, SolutionReport};
use crate::faml::{self, DecomposeOptions, FactorProblem, RationalMatrix};
use crate::groebner::Budget;
use crate::Rational;

use super::simulate::{sample_covariance, SimulationModel};
use super::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Numeric,
}

/// Everything that decides a study's output, so a run can be replayed from its JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub mode: Mode,
    /// Numeric starts per classification.
    pub starts: usize,
    pub seed: u64,
    /// Sample size behind the observed information.
    pub n: f64,
    pub max_basis: usize,
    pub max_degree: u32,
    /// Bisection steps used to pin down a pattern change between grid points.
    pub bisection_steps: usize,
    /// Points per profile curve in the interpolation study.
    pub profile_points: usize,
}

impl Default for StudyConfig {
    fn default() -> Self {
        let b = Budget::default();
        StudyConfig {
            mode: Mode::Numeric,
            starts: 100,
            seed: 0,
            n: 100.0,
            max_basis: b.max_basis,
            max_degree: b.max_degree,
            bisection_steps: 20,
            profile_points: 21,
        }
    }
}

impl StudyConfig {
    pub fn budget(&self) -> Budget {
        Budget { max_basis: self.max_basis, max_degree: self.max_degree, ..Budget::default() }
    }
}

/// Exact path: enumerate every candidate and pick the verdict among them.
/// Numeric path: multi-start fits on the decimal covariance.
pub fn classify_problem(prob: &FactorProblem, cfg: &StudyConfig) -> Result<SolutionReport, HarnessError> {
    let s = prob.s_f64();
    match cfg.mode {
        Mode::Exact => {
            let opts = DecomposeOptions { budget: cfg.budget(), seed: cfg.seed, ..Default::default() };
            let e = faml::enumerate_with(prob, &opts)?;
            if e.hit_budget() {
                let detail = e.leaves.iter().filter_map(|l| l.diagnostic.clone()).collect::<Vec<_>>().join("; ");
                return Err(HarnessError::Resource(detail));
            }
            let copts = ClassifyOptions { n: cfg.n, ..Default::default() };
            let mut report = classify::classify_pattern(&e.solutions, &s, &copts)?;
            report.diagnostics.extend(e.errors);
            Ok(report)
        }
        Mode::Numeric => {
            let copts = ClassifyOptions { n: cfg.n, ..classify::numeric_options() };
            Ok(classify::classify_numeric(&s, prob.k(), cfg.starts, cfg.seed, &copts)?)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub run: u64,
    pub pattern: Pattern,
    pub discrepancy: Option<f64>,
    pub psi_min: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloTable {
    pub rows: Vec<RunRow>,
}

impl MonteCarloTable {
    pub fn counts(&self) -> BTreeMap<Pattern, usize> {
        let mut m: BTreeMap<Pattern, usize> = [Pattern::Proper, Pattern::Improper, Pattern::NoSolution]
            .into_iter()
            .map(|p| (p, 0))
            .collect();
        for r in &self.rows {
            *m.entry(r.pattern).or_default() += 1;
        }
        m
    }

    pub fn to_csv(&self) -> Result<String, HarnessError> {
        to_csv(&self.rows)
    }

    /// One row per pattern: `pattern,count`.
    pub fn counts_csv(&self) -> Result<String, HarnessError> {
        #[derive(Serialize)]
        struct Count {
            pattern: Pattern,
            count: usize,
        }
        to_csv(&self.counts().into_iter().map(|(pattern, count)| Count { pattern, count }).collect::<Vec<_>>())
    }
}

pub(crate) fn to_csv<R: Serialize>(rows: &[R]) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| HarnessError::Output(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| HarnessError::Output(e.to_string()))
}

/// Repeated simulate-then-classify. A failing run is recorded as
/// `NoSolution` with its error; the batch always completes.
pub fn monte_carlo(model: &SimulationModel, runs: usize, cfg: &StudyConfig) -> Result<MonteCarloTable, HarnessError> {
    if runs == 0 {
        return Err(HarnessError::Model("need at least one run".into()));
    }
    model.validate()?;
    let rows = (0..runs as u64)
        .into_par_iter()
        .map(|run| {
            let cfg = StudyConfig { seed: cfg.seed.wrapping_add(run), ..cfg.clone() };
            let decimals = model.rounding.decimals(cfg.mode == Mode::Exact);
            let prob = sample_covariance(model, run, decimals)
                .and_then(|s| Ok(FactorProblem::new(s, model.k(), Rational::zero())?));
            match prob.and_then(|prob| classify_problem(&prob, &cfg)) {
                Ok(r) => RunRow {
                    run,
                    pattern: r.pattern,
                    discrepancy: r.discrepancy.is_finite().then_some(r.discrepancy),
                    psi_min: r.psi_min(),
                    error: None,
                },
                Err(e) => RunRow { run, pattern: Pattern::NoSolution, discrepancy: None, psi_min: None, error: Some(e.to_string()) },
            }
        })
        .collect();
    Ok(MonteCarloTable { rows })
}

/// `t S_a + (1 - t) S_b`, exactly.
pub fn blend(sa: &RationalMatrix, sb: &RationalMatrix, t: &Rational) -> RationalMatrix {
    let u = Rational::one() - t;
    sa.iter()
        .zip(sb)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(a, b)| t * a + &u * b).collect())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub t: f64,
    pub pattern: Pattern,
    pub discrepancy: Option<f64>,
    pub psi_min: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub t: f64,
    pub psi_last: f64,
    pub discrepancy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    /// Bracket `[lower, upper]` around the pattern change.
    pub lower: f64,
    pub upper: f64,
    pub from: Pattern,
    pub to: Pattern,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpolationStudy {
    pub grid: Vec<GridRow>,
    pub transitions: Vec<Transition>,
    pub profile: Vec<ProfileRow>,
}

impl InterpolationStudy {
    pub fn grid_csv(&self) -> Result<String, HarnessError> {
        to_csv(&self.grid)
    }

    pub fn profile_csv(&self) -> Result<String, HarnessError> {
        to_csv(&self.profile)
    }
}

fn grid_t(i: usize, points: usize) -> Rational {
    if points == 1 {
        return Rational::zero();
    }
    Rational::new(i.into(), (points - 1).into())
}

/// Classifies `S(t) = t S_a + (1 - t) S_b` on an evenly spaced grid of
/// `points` values of `t`, brackets each pattern change by bisection, and
/// records `q` against the last unique variance for every grid point.
pub fn interpolate_study(
    sa: &RationalMatrix,
    sb: &RationalMatrix,
    k: usize,
    points: usize,
    cfg: &StudyConfig,
) -> Result<InterpolationStudy, HarnessError> {
    if points < 2 {
        return Err(HarnessError::Model("interpolation grid needs at least 2 points".into()));
    }
    let zero = Rational::zero();
    FactorProblem::new(sa.clone(), k, zero.clone())?;
    FactorProblem::new(sb.clone(), k, zero.clone())?;
    let classify_at = |t: &Rational| -> Result<SolutionReport, HarnessError> {
        let prob = FactorProblem::new(blend(sa, sb, t), k, zero.clone())?;
        classify_problem(&prob, cfg)
    };
    let ts: Vec<Rational> = (0..points).map(|i| grid_t(i, points)).collect();
    let reports: Vec<SolutionReport> = ts.par_iter().map(classify_at).collect::<Result<_, _>>()?;
    let grid: Vec<GridRow> = ts
        .iter()
        .zip(&reports)
        .map(|(t, r)| GridRow {
            t: crate::realsolve::rational_to_f64(t),
            pattern: r.pattern,
            discrepancy: r.discrepancy.is_finite().then_some(r.discrepancy),
            psi_min: r.psi_min(),
        })
        .collect();

    let mut transitions = Vec::new();
    for i in 1..points {
        let (from, to) = (reports[i - 1].pattern, reports[i].pattern);
        if from == to {
            continue;
        }
        let (mut lo, mut hi) = (ts[i - 1].clone(), ts[i].clone());
        let two = Rational::from_integer(2.into());
        for _ in 0..cfg.bisection_steps {
            let mid = (&lo + &hi) / &two;
            if classify_at(&mid)?.pattern == from {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let f = crate::realsolve::rational_to_f64;
        transitions.push(Transition { lower: f(&lo), upper: f(&hi), from, to });
    }

    let fopts = FitOptions::default();
    let profile: Vec<ProfileRow> = ts
        .par_iter()
        .map(|t| -> Result<Vec<ProfileRow>, HarnessError> {
            let s: Vec<Vec<f64>> = blend(sa, sb, t)
                .iter()
                .map(|r| r.iter().map(crate::realsolve::rational_to_f64).collect())
                .collect();
            let p = s.len();
            let top = s[p - 1][p - 1];
            let start: Vec<f64> = (0..p).map(|i| s[i][i] / 2.0).collect();
            let tf = crate::realsolve::rational_to_f64(t);
            (0..cfg.profile_points)
                .map(|j| {
                    let psi_last = top * j as f64 / (cfg.profile_points.max(2) - 1) as f64;
                    let q = classify::profile_discrepancy(&s, k, p - 1, psi_last, &start, &fopts)?;
                    Ok(ProfileRow { t: tf, psi_last, discrepancy: q })
                })
                .collect()
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(InterpolationStudy { grid, transitions, profile })
}
