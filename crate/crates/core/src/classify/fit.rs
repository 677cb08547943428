use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::faml::CandidateSolution;

use super::linalg::{diag, implied_covariance, lower_triangular_form, matmul, symmetric_eigen, transpose, Lu, Matrix};
use super::measure::{classify_pattern, discrepancy, eqdiff0_residual, gradient_kernel, ClassifyOptions, SolutionReport};
use super::optimize::{minimize_bfgs, BfgsOptions};
use super::{cst, ClassifyError, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Lawley,
    Jennrich,
    Em,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::Lawley => "lawley",
            Algorithm::Jennrich => "jennrich",
            Algorithm::Em => "em",
        })
    }
}

impl std::str::FromStr for Algorithm {
    type Err = ClassifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lawley" => Ok(Algorithm::Lawley),
            "jennrich" => Ok(Algorithm::Jennrich),
            "em" => Ok(Algorithm::Em),
            other => Err(ClassifyError::Invalid(format!("unknown algorithm '{other}'"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FitOptions<T> {
    pub grad_tol: T,
    pub max_iter: usize,
    /// Lower bound on unique variances in the Lawley fitter.
    pub floor: T,
    /// EM is linearly convergent, so it gets its own iteration cap.
    pub em_max_iter: usize,
}

impl<T: Scalar> Default for FitOptions<T> {
    fn default() -> Self {
        FitOptions { grad_tol: cst(1e-9), max_iter: 500, floor: cst(0.005), em_max_iter: 5000 }
    }
}

#[derive(Clone, Debug)]
pub struct FitResult<T> {
    /// Loadings rotated to lower-triangular form.
    pub l: Matrix<T>,
    pub psi: Vec<T>,
    pub converged: bool,
    pub iterations: usize,
    pub discrepancy: T,
    pub algorithm: Algorithm,
    /// Discrepancy after every iteration, starting with the initial point.
    pub history: Vec<T>,
}

impl FitResult<f64> {
    pub fn to_candidate(&self, label: &str) -> CandidateSolution {
        CandidateSolution {
            l: self.l.clone(),
            psi: self.psi.clone(),
            l_exact: None,
            psi_exact: None,
            leaf: label.to_string(),
            sample_only: false,
        }
    }
}

fn check_inputs<T: Scalar>(s: &[Vec<T>], k: usize, psi0: &[T]) -> Result<(), ClassifyError> {
    let p = s.len();
    if p == 0 || s.iter().any(|r| r.len() != p) {
        return Err(ClassifyError::Invalid("covariance must be square".into()));
    }
    if k == 0 || k >= p {
        return Err(ClassifyError::Invalid(format!("factor count {k} must satisfy 1 <= k < {p}")));
    }
    if psi0.len() != p {
        return Err(ClassifyError::Invalid("starting values have the wrong length".into()));
    }
    Ok(())
}

/// Loadings maximizing the likelihood for fixed positive `psi`:
/// `Psi^{1/2} P (Theta - I)_+^{1/2}` from the top `k` eigenpairs of `Psi^{-1/2} S Psi^{-1/2}`.
fn lawley_loadings<T: Scalar>(s: &[Vec<T>], k: usize, psi: &[T]) -> (Matrix<T>, Vec<T>) {
    let p = s.len();
    let r: Vec<T> = psi.iter().map(|&x| x.sqrt()).collect();
    let scaled: Matrix<T> = (0..p).map(|i| (0..p).map(|j| s[i][j] / (r[i] * r[j])).collect()).collect();
    let e = symmetric_eigen(&scaled);
    let mut l = vec![vec![T::zero(); k]; p];
    for j in 0..k {
        let w = (e.values[j] - T::one()).max(T::zero()).sqrt();
        for i in 0..p {
            l[i][j] = r[i] * e.vectors[i][j] * w;
        }
    }
    (l, e.values)
}

fn lawley_profile<T: Scalar>(s: &[Vec<T>], k: usize, psi: &[T]) -> Result<(T, Vec<T>), ClassifyError> {
    let (l, theta) = lawley_loadings(s, k, psi);
    let phi = |t: T| t - t.ln() - T::one();
    let mut q = T::zero();
    for (j, &t) in theta.iter().enumerate() {
        if j >= k || t < T::one() {
            q = q + phi(t);
        }
    }
    let a = gradient_kernel(s, &l, psi)?;
    Ok((q, (0..psi.len()).map(|i| a[i][i]).collect()))
}

fn finish<T: Scalar>(
    s: &[Vec<T>],
    l: Matrix<T>,
    psi: Vec<T>,
    converged: bool,
    iterations: usize,
    algorithm: Algorithm,
    history: Vec<T>,
) -> FitResult<T> {
    let l = lower_triangular_form(&l);
    let q = discrepancy(s, &l, &psi).unwrap_or(T::nan());
    FitResult { l, psi, converged, iterations, discrepancy: q, algorithm, history }
}

/// Alternates the eigen-solution for `L` with quasi-Newton steps on
/// `log psi`, keeping every unique variance at or above the floor.
pub fn fit_lawley<T: Scalar>(s: &[Vec<T>], k: usize, psi0: &[T], opts: &FitOptions<T>) -> Result<FitResult<T>, ClassifyError> {
    check_inputs(s, k, psi0)?;
    let lower: Vec<T> = vec![opts.floor.ln(); s.len()];
    let z0: Vec<T> = psi0.iter().map(|&x| x.max(opts.floor).ln()).collect();
    let fg = |z: &[T]| {
        let psi: Vec<T> = z.iter().map(|&x| x.exp()).collect();
        match lawley_profile(s, k, &psi) {
            Ok((q, g)) => (q, g.iter().zip(&psi).map(|(&gi, &pi)| gi * pi).collect()),
            Err(_) => (T::infinity(), vec![T::zero(); psi.len()]),
        }
    };
    let bopts = BfgsOptions { grad_tol: opts.grad_tol, max_iter: opts.max_iter, ..Default::default() };
    let r = minimize_bfgs(fg, &z0, Some(&lower), &bopts);
    let psi: Vec<T> = r.x.iter().map(|&x| x.exp().max(opts.floor)).collect();
    let (l, _) = lawley_loadings(s, k, &psi);
    Ok(finish(s, l, psi, r.converged, r.iterations, Algorithm::Lawley, r.history))
}

/// `S^{1/2}` and `S^{-1/2}`.
fn sqrt_pair<T: Scalar>(s: &[Vec<T>]) -> Result<(Matrix<T>, Matrix<T>), ClassifyError> {
    let e = symmetric_eigen(s);
    if e.values.iter().any(|&v| v <= T::zero()) {
        return Err(ClassifyError::SingularCovariance);
    }
    Ok((e.map(|v| v.sqrt()), e.map(|v| T::one() / v.sqrt())))
}

struct JennrichPoint<T> {
    q: T,
    grad: Vec<T>,
    l: Matrix<T>,
}

/// Profile over unrestricted `psi` through the eigenvalues `gamma` of
/// `S^{-1/2} Psi S^{-1/2}`: the `k` smallest are lifted to 1 by the loadings.
fn jennrich_profile<T: Scalar>(
    s_half: &[Vec<T>],
    s_inv_half: &[Vec<T>],
    k: usize,
    psi: &[T],
) -> Option<JennrichPoint<T>> {
    let p = psi.len();
    let m = matmul(&matmul(s_inv_half, &diag(psi)), s_inv_half);
    let e = symmetric_eigen(&m);
    // ascending order
    let idx: Vec<usize> = (0..p).rev().collect();
    let mut q = T::zero();
    let mut grad = vec![T::zero(); p];
    let mut b = vec![vec![T::zero(); k]; p];
    for (rank, &j) in idx.iter().enumerate() {
        let g = e.values[j];
        if rank < k && g <= T::one() {
            let w = (T::one() - g).sqrt();
            for i in 0..p {
                b[i][rank] = e.vectors[i][j] * w;
            }
            continue;
        }
        if g <= T::zero() {
            return None;
        }
        q = q + g.ln() + T::one() / g - T::one();
        let dphi = T::one() / g - T::one() / (g * g);
        let v = e.column(j);
        for (i, gi) in grad.iter_mut().enumerate() {
            let u: T = (0..p).fold(T::zero(), |acc, r| acc + s_inv_half[i][r] * v[r]);
            *gi = *gi + dphi * u * u;
        }
    }
    Some(JennrichPoint { q, grad, l: matmul(s_half, &b) })
}

/// Quasi-Newton on unrestricted `psi`; zero or negative unique variances
/// are reachable.
pub fn fit_jennrich<T: Scalar>(s: &[Vec<T>], k: usize, psi0: &[T], opts: &FitOptions<T>) -> Result<FitResult<T>, ClassifyError> {
    check_inputs(s, k, psi0)?;
    let (half, inv_half) = sqrt_pair(s)?;
    let fg = |x: &[T]| match jennrich_profile(&half, &inv_half, k, x) {
        Some(pt) => (pt.q, pt.grad),
        None => (T::infinity(), vec![T::zero(); x.len()]),
    };
    let bopts = BfgsOptions { grad_tol: opts.grad_tol, max_iter: opts.max_iter, ..Default::default() };
    let r = minimize_bfgs(fg, psi0, None, &bopts);
    let l = jennrich_profile(&half, &inv_half, k, &r.x)
        .map(|pt| pt.l)
        .unwrap_or_else(|| vec![vec![T::zero(); k]; s.len()]);
    Ok(finish(s, l, r.x, r.converged, r.iterations, Algorithm::Jennrich, r.history))
}

/// One EM step for the factor model on the sufficient statistic `S`.
fn em_step<T: Scalar>(s: &[Vec<T>], l: &[Vec<T>], psi: &[T]) -> Option<(Matrix<T>, Vec<T>)> {
    let k = l.first().map_or(0, |r| r.len());
    let sigma = implied_covariance(l, psi);
    let inv = Lu::new(&sigma)?.inverse();
    let beta = matmul(&transpose(l), &inv); // k x p
    let bs = matmul(&beta, s); // k x p
    let mut ezz = matmul(&bs, &transpose(&beta));
    let bl = matmul(&beta, l);
    for i in 0..k {
        for j in 0..k {
            let id = if i == j { T::one() } else { T::zero() };
            ezz[i][j] = ezz[i][j] + id - bl[i][j];
        }
    }
    let ezz_inv = Lu::new(&ezz)?.inverse();
    let l_new = matmul(&transpose(&bs), &ezz_inv);
    let lbs = matmul(&l_new, &bs);
    let psi_new = (0..s.len()).map(|i| s[i][i] - lbs[i][i]).collect();
    Some((l_new, psi_new))
}

/// EM from `psi0` (loadings initialised from the eigen-solution at `psi0`).
/// Every step leaves the discrepancy non-increasing and `psi` positive.
pub fn fit_em<T: Scalar>(s: &[Vec<T>], k: usize, psi0: &[T], opts: &FitOptions<T>) -> Result<FitResult<T>, ClassifyError> {
    check_inputs(s, k, psi0)?;
    if psi0.iter().any(|&x| x <= T::zero()) {
        return Err(ClassifyError::Invalid("EM needs positive starting unique variances".into()));
    }
    let (mut l, _) = lawley_loadings(s, k, psi0);
    let mut psi = psi0.to_vec();
    let mut history = vec![discrepancy(s, &l, &psi)?];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.em_max_iter {
        if eqdiff0_residual(s, &l, &psi)? < opts.grad_tol {
            converged = true;
            break;
        }
        let Some((ln, pn)) = em_step(s, &l, &psi) else { break };
        iterations += 1;
        l = ln;
        psi = pn;
        history.push(discrepancy(s, &l, &psi)?);
    }
    Ok(finish(s, l, psi, converged, iterations, Algorithm::Em, history))
}

pub fn fit<T: Scalar>(
    algo: Algorithm,
    s: &[Vec<T>],
    k: usize,
    psi0: &[T],
    opts: &FitOptions<T>,
) -> Result<FitResult<T>, ClassifyError> {
    match algo {
        Algorithm::Lawley => fit_lawley(s, k, psi0, opts),
        Algorithm::Jennrich => fit_jennrich(s, k, psi0, opts),
        Algorithm::Em => fit_em(s, k, psi0, opts),
    }
}

/// `starts` vectors of U(0,1) unique variances from a ChaCha8 stream.
pub fn uniform_starts(p: usize, starts: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..starts)
        .map(|_| (0..p).map(|_| rng.gen_range(f64::EPSILON..1.0)).collect())
        .collect()
}

/// All fits from [`uniform_starts`], in start order. Failed fits are dropped.
pub fn multi_start(
    algo: Algorithm,
    s: &[Vec<f64>],
    k: usize,
    starts: usize,
    seed: u64,
    opts: &FitOptions<f64>,
) -> Vec<Result<FitResult<f64>, ClassifyError>> {
    uniform_starts(s.len(), starts, seed).par_iter().map(|x0| fit(algo, s, k, x0, opts)).collect()
}

/// Least finite discrepancy; the earliest start wins ties.
pub fn best_fit(fits: &[Result<FitResult<f64>, ClassifyError>]) -> Option<&FitResult<f64>> {
    fits.iter()
        .filter_map(|r| r.as_ref().ok())
        .filter(|f| f.discrepancy.is_finite())
        .fold(None, |best: Option<&FitResult<f64>>, f| match best {
            Some(b) if b.discrepancy <= f.discrepancy => Some(b),
            _ => Some(f),
        })
}

/// Multi-start Jennrich fits, then the exact-path classification applied
/// to the best numeric solution.
pub fn classify_numeric(
    s: &[Vec<f64>],
    k: usize,
    starts: usize,
    seed: u64,
    opts: &ClassifyOptions,
) -> Result<SolutionReport, ClassifyError> {
    if starts == 0 {
        return Err(ClassifyError::Invalid("need at least one start".into()));
    }
    let fits = multi_start(Algorithm::Jennrich, s, k, starts, seed, &FitOptions::default());
    let mut diagnostics: Vec<String> = fits.iter().filter_map(|r| r.as_ref().err().map(|e| e.to_string())).collect();
    let mut report = match best_fit(&fits) {
        Some(best) => classify_pattern(&[best.to_candidate("numeric")], s, opts)?,
        None => {
            diagnostics.push("every numeric fit failed".into());
            SolutionReport {
                pattern: super::Pattern::NoSolution,
                best: None,
                discrepancy: f64::NAN,
                fisher_min_eigenvalue: f64::NAN,
                eqdiff0_residual: f64::NAN,
                algorithm: String::new(),
                starts,
                diagnostics: Vec::new(),
            }
        }
    };
    report.algorithm = Algorithm::Jennrich.to_string();
    report.starts = starts;
    report.diagnostics.extend(diagnostics);
    Ok(report)
}

/// Numeric classification: looser stationarity tolerance than the exact
/// path, and unique variances within `1e-6` of zero count as zero.
pub fn numeric_options() -> ClassifyOptions {
    ClassifyOptions { residual_tol: 1e-6, psi_zero_tol: 1e-6, ..Default::default() }
}

/// Least discrepancy with `psi[index]` held at `value`, minimizing over the
/// remaining unique variances from `start` (unrestricted, as in Jennrich's fitter).
pub fn profile_discrepancy(
    s: &[Vec<f64>],
    k: usize,
    index: usize,
    value: f64,
    start: &[f64],
    opts: &FitOptions<f64>,
) -> Result<f64, ClassifyError> {
    check_inputs(s, k, start)?;
    let (half, inv_half) = sqrt_pair(s)?;
    let expand = |free: &[f64]| {
        let mut psi = free.to_vec();
        psi.insert(index, value);
        psi
    };
    let fg = |free: &[f64]| match jennrich_profile(&half, &inv_half, k, &expand(free)) {
        Some(mut pt) => {
            pt.grad.remove(index);
            (pt.q, pt.grad)
        }
        None => (f64::INFINITY, vec![0.0; free.len()]),
    };
    let mut x0 = start.to_vec();
    x0.remove(index);
    let bopts = BfgsOptions { grad_tol: opts.grad_tol, max_iter: opts.max_iter, ..Default::default() };
    Ok(minimize_bfgs(fg, &x0, None, &bopts).f)
}
