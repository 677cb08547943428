use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::polyring::MonomialOrder;
use crate::realsolve::{self, rational_to_f64, RatInterval, RealPoint, SolveError};
use crate::{groebner, Rational};

use super::decompose::{decompose, DecomposeOptions, DecompositionNode, LeafStatus};
use super::ideal::{build_explicit_ideal, build_likelihood_ideal, Formulation};
use super::problem::{FactorProblem, RationalMatrix};
use super::FamlError;

/// A real stationary-point candidate `(L, Psi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateSolution {
    pub l: Vec<Vec<f64>>,
    pub psi: Vec<f64>,
    /// Present when every loading is rational.
    pub l_exact: Option<RationalMatrix>,
    pub psi_exact: Option<Vec<Rational>>,
    pub leaf: String,
    pub sample_only: bool,
}

impl CandidateSolution {
    pub fn is_exact(&self) -> bool {
        self.l_exact.is_some()
    }

    pub fn min_psi(&self) -> f64 {
        self.psi.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn to_json(&self) -> SolutionJson {
        let text = |v: &[Rational]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        SolutionJson {
            l: self.l.clone(),
            psi: self.psi.clone(),
            l_exact: self.l_exact.as_ref().map(|m| m.iter().map(|r| text(r)).collect()),
            psi_exact: self.psi_exact.as_ref().map(|v| text(v)),
            leaf: self.leaf.clone(),
            sample_only: self.sample_only,
            exact: self.is_exact(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionJson {
    #[serde(rename = "L")]
    pub l: Vec<Vec<f64>>,
    pub psi: Vec<f64>,
    #[serde(rename = "L_exact", skip_serializing_if = "Option::is_none", default)]
    pub l_exact: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub psi_exact: Option<Vec<String>>,
    pub leaf: String,
    pub sample_only: bool,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafSummary {
    pub label: String,
    pub status: LeafStatus,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub diagnostic: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionSetJson {
    pub solutions: Vec<SolutionJson>,
    pub leaves: Vec<LeafSummary>,
}

#[derive(Clone, Debug)]
pub struct Enumeration {
    pub solutions: Vec<CandidateSolution>,
    pub leaves: Vec<LeafSummary>,
    /// Leaves whose points could not be extracted, with the reason.
    pub errors: Vec<String>,
}

impl Enumeration {
    pub fn to_json(&self) -> SolutionSetJson {
        SolutionSetJson {
            solutions: self.solutions.iter().map(|s| s.to_json()).collect(),
            leaves: self.leaves.clone(),
        }
    }

    /// Any leaf stopped by the resource budget.
    pub fn hit_budget(&self) -> bool {
        self.leaves.iter().any(|l| l.status == LeafStatus::Budget)
    }
}

/// `psi_i = s_ii - sum_j l_ij^2`, no clamping.
pub fn recover_psi(l: &[Vec<f64>], s: &RationalMatrix) -> Vec<f64> {
    l.iter()
        .enumerate()
        .map(|(i, row)| rational_to_f64(&s[i][i]) - row.iter().map(|x| x * x).sum::<f64>())
        .collect()
}

pub fn recover_psi_exact(l: &[Vec<Rational>], s: &RationalMatrix) -> Vec<Rational> {
    l.iter()
        .enumerate()
        .map(|(i, row)| row.iter().fold(s[i][i].clone(), |acc, x| acc - x * x))
        .collect()
}

/// Flips each column so that its first entry of largest magnitude is non-negative.
pub fn canonicalize_sign<T: Signed + PartialOrd + Clone>(l: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out = l.to_vec();
    let k = l.first().map_or(0, |r| r.len());
    for c in 0..k {
        let mut best: Option<usize> = None;
        for (i, row) in l.iter().enumerate() {
            if best.map_or(true, |b| row[c].abs() > l[b][c].abs()) {
                best = Some(i);
            }
        }
        if let Some(b) = best {
            if l[b][c].is_negative() {
                for row in out.iter_mut() {
                    row[c] = -row[c].clone();
                }
            }
        }
    }
    out
}

/// One sign-canonical representative per class of solutions equal up to column signs.
pub fn sign_classes(sols: &[CandidateSolution]) -> Vec<CandidateSolution> {
    let mut out: Vec<CandidateSolution> = Vec::new();
    for s in sols {
        let mut c = s.clone();
        c.l = canonicalize_sign(&s.l);
        c.l_exact = s.l_exact.as_ref().map(|m| canonicalize_sign(m));
        let dup = out.iter().any(|o| match (&o.l_exact, &c.l_exact) {
            (Some(a), Some(b)) => a == b,
            _ => max_diff(&o.l, &c.l) < 1e-9,
        });
        if !dup {
            out.push(c);
        }
    }
    out
}

fn max_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

struct RawPoint {
    leaf: String,
    loadings: Vec<RatInterval>,
    sample_only: bool,
}

fn leaf_points(node: &DecompositionNode, opts: &DecomposeOptions) -> Result<Vec<RealPoint>, String> {
    let gb = match (&node.gb, node.status) {
        (Some(gb), LeafStatus::ZeroDim | LeafStatus::PositiveDim) => gb,
        _ => return Ok(Vec::new()),
    };
    let fail = |e: String| format!("leaf {}: {e}", node.label);
    match node.status {
        LeafStatus::ZeroDim => {
            let lex = groebner::fglm(gb, &MonomialOrder::lex(gb.nvars())).map_err(|e| fail(e.to_string()))?;
            realsolve::solve_triangular(&lex).map_err(|e| fail(e.to_string()))
        }
        _ => {
            let seed = opts.seed ^ u64::from_str_radix(&format!("1{}", node.label), 2).unwrap_or(0);
            let mut points = match realsolve::slice_positive_dimensional(gb, opts.samples, seed) {
                Ok(p) => p,
                Err(SolveError::EmptySample) => Vec::new(),
                Err(e) => return Err(fail(e.to_string())),
            };
            // generic slices miss special points; the origin (L = 0) is checked exactly
            let origin = vec![Rational::zero(); gb.nvars()];
            if gb.elements().iter().all(|g| g.eval(&origin).is_zero()) {
                points.insert(
                    0,
                    RealPoint {
                        coords: origin.into_iter().map(RatInterval::point).collect(),
                        residual_bound: Rational::zero(),
                        sample_only: false,
                    },
                );
            }
            Ok(points)
        }
    }
}

fn same_point(a: &RawPoint, b: &RawPoint) -> bool {
    a.loadings.iter().zip(&b.loadings).all(|(x, y)| x.intersects(y))
}

fn to_candidate(raw: RawPoint, prob: &FactorProblem) -> CandidateSolution {
    let layout = prob.loading_layout();
    let mut l = vec![vec![Rational::zero(); prob.k()]; prob.p()];
    let exact = raw.loadings.iter().all(|c| c.is_point());
    for ((i, j), c) in layout.iter().zip(&raw.loadings) {
        l[*i][*j] = c.mid();
    }
    let psi_q = recover_psi_exact(&l, prob.s());
    let to_f = |m: &RationalMatrix| m.iter().map(|r| r.iter().map(rational_to_f64).collect()).collect();
    CandidateSolution {
        l: to_f(&l),
        psi: psi_q.iter().map(rational_to_f64).collect(),
        l_exact: exact.then(|| l.clone()),
        psi_exact: exact.then_some(psi_q),
        leaf: raw.leaf,
        sample_only: raw.sample_only,
    }
}

/// Every real solution of the likelihood equations, leaf by leaf. Points
/// are reported as found (no sign collapsing); see [`sign_classes`].
pub fn enumerate_solutions(prob: &FactorProblem) -> Result<Enumeration, FamlError> {
    enumerate_with(prob, &DecomposeOptions::default())
}

pub fn enumerate_with(prob: &FactorProblem, opts: &DecomposeOptions) -> Result<Enumeration, FamlError> {
    let j = match opts.formulation {
        Formulation::Eliminated => build_likelihood_ideal(prob)?,
        Formulation::Explicit => build_explicit_ideal(prob)?,
    };
    let nodes = decompose(&j, prob, opts);
    let offset = opts.formulation.offset(prob);
    let nl = prob.loading_layout().len();
    let per_leaf: Vec<Result<Vec<RealPoint>, String>> = nodes.par_iter().map(|n| leaf_points(n, opts)).collect();

    let mut errors = Vec::new();
    let mut raw: Vec<RawPoint> = Vec::new();
    for (node, res) in nodes.iter().zip(per_leaf) {
        match res {
            Ok(points) => {
                for p in points {
                    let cand = RawPoint {
                        leaf: node.label.clone(),
                        loadings: p.coords[offset..offset + nl].to_vec(),
                        sample_only: p.sample_only,
                    };
                    if !cand.sample_only && raw.iter().any(|r| !r.sample_only && same_point(r, &cand)) {
                        continue;
                    }
                    raw.push(cand);
                }
            }
            Err(e) => errors.push(e),
        }
        if let Some(d) = &node.diagnostic {
            errors.push(format!("leaf {}: {d}", node.label));
        }
    }
    Ok(Enumeration {
        solutions: raw.into_iter().map(|r| to_candidate(r, prob)).collect(),
        leaves: nodes
            .iter()
            .map(|n| LeafSummary { label: n.label.clone(), status: n.status, diagnostic: n.diagnostic.clone() })
            .collect(),
        errors,
    })
}
