use serde::{Deserialize, Serialize};

use crate::faml::{canonicalize_sign, CandidateSolution};

use super::linalg::{implied_covariance, matmul, max_abs, sub, symmetric_eigen, trace, Lu, Matrix};
use super::{cst, ClassifyError, Scalar};

/// `log|Sigma| + tr(Sigma^-1 S) - log|S| - p` with `Sigma = L L' + diag(psi)`.
pub fn discrepancy<T: Scalar>(s: &[Vec<T>], l: &[Vec<T>], psi: &[T]) -> Result<T, ClassifyError> {
    let sigma = implied_covariance(l, psi);
    let lu = Lu::new(&sigma).ok_or(ClassifyError::SingularSigma)?;
    let (sign, log_sigma) = lu.log_det();
    if sign <= T::zero() {
        return Err(ClassifyError::IndefiniteSigma);
    }
    let (ssign, log_s) = Lu::new(s).ok_or(ClassifyError::SingularCovariance)?.log_det();
    if ssign <= T::zero() {
        return Err(ClassifyError::SingularCovariance);
    }
    let tr = trace(&matmul(&lu.inverse(), s));
    let p = T::from(s.len()).unwrap();
    Ok(log_sigma + tr - log_s - p)
}

/// `Sigma^-1 (Sigma - S) Sigma^-1`; the likelihood gradient is built from it.
pub(crate) fn gradient_kernel<T: Scalar>(s: &[Vec<T>], l: &[Vec<T>], psi: &[T]) -> Result<Matrix<T>, ClassifyError> {
    let sigma = implied_covariance(l, psi);
    let inv = Lu::new(&sigma).ok_or(ClassifyError::SingularSigma)?.inverse();
    Ok(matmul(&matmul(&inv, &sub(&sigma, s)), &inv))
}

/// Max-norm of `Sigma^-1 (Sigma - S) Sigma^-1 L` stacked with the diagonal of
/// `Sigma^-1 (Sigma - S) Sigma^-1`: zero exactly at a stationary point of the
/// unrestricted likelihood.
pub fn eqdiff0_residual<T: Scalar>(s: &[Vec<T>], l: &[Vec<T>], psi: &[T]) -> Result<T, ClassifyError> {
    let a = gradient_kernel(s, l, psi)?;
    let al = matmul(&a, l);
    let d = a.iter().enumerate().fold(T::zero(), |m, (i, r)| m.max(r[i].abs()));
    Ok(max_abs(&al).max(d))
}

#[derive(Clone, Debug)]
pub struct Fisher<T> {
    /// Parameters: free loadings row-major (`j <= i`), then the unique variances.
    pub matrix: Matrix<T>,
    pub min_eigenvalue: T,
    pub positive_definite: bool,
}

fn pack<T: Scalar>(l: &[Vec<T>], psi: &[T]) -> Vec<T> {
    let mut v = Vec::new();
    for (i, row) in l.iter().enumerate() {
        v.extend(row.iter().take(i + 1).copied());
    }
    v.extend_from_slice(psi);
    v
}

fn unpack<T: Scalar>(theta: &[T], p: usize, k: usize) -> (Matrix<T>, Vec<T>) {
    let mut l = vec![vec![T::zero(); k]; p];
    let mut it = theta.iter();
    for (i, row) in l.iter_mut().enumerate() {
        for x in row.iter_mut().take(i + 1) {
            *x = *it.next().unwrap();
        }
    }
    (l, it.copied().collect())
}

/// Observed information: Hessian of `(n/2) q` by central differences
/// (step `1e-4 * max(1, |param|)`) with one Richardson halving.
pub fn observed_fisher<T: Scalar>(s: &[Vec<T>], l: &[Vec<T>], psi: &[T], n: T) -> Result<Fisher<T>, ClassifyError> {
    let (p, k) = (s.len(), l.first().map_or(0, |r| r.len()));
    let theta = pack(l, psi);
    let half = n / cst(2.0);
    let f = |x: &[T]| -> Result<T, ClassifyError> {
        let (l, psi) = unpack(x, p, k);
        discrepancy(s, &l, &psi).map(|q| half * q)
    };
    let base: Vec<T> = theta.iter().map(|&t| cst::<T>(1e-4) * t.abs().max(T::one())).collect();
    let mut last_err = None;
    // a probe that lands on a singular Sigma is retried with smaller steps
    for shrink in [1.0, 0.1, 0.01] {
        let h: Vec<T> = base.iter().map(|&b| b * cst(shrink)).collect();
        let coarse = hessian(&f, &theta, &h);
        let h2: Vec<T> = h.iter().map(|&x| x / cst(2.0)).collect();
        let fine = hessian(&f, &theta, &h2);
        match (coarse, fine) {
            (Ok(c), Ok(fi)) => {
                let d = theta.len();
                let mut m = vec![vec![T::zero(); d]; d];
                for i in 0..d {
                    for j in 0..d {
                        m[i][j] = (cst::<T>(4.0) * fi[i][j] - c[i][j]) / cst(3.0);
                    }
                }
                for i in 0..d {
                    for j in 0..i {
                        let v = (m[i][j] + m[j][i]) / cst(2.0);
                        m[i][j] = v;
                        m[j][i] = v;
                    }
                }
                let min = symmetric_eigen(&m).values.last().copied().unwrap_or(T::zero());
                let tol = cst::<T>(1e-6) * trace(&m) / T::from(d.max(1)).unwrap();
                return Ok(Fisher { positive_definite: min > tol && min > T::zero(), min_eigenvalue: min, matrix: m });
            }
            (Err(e), _) | (_, Err(e)) => last_err = Some(e),
        }
    }
    Err(ClassifyError::FisherProbe(last_err.map(|e| e.to_string()).unwrap_or_default()))
}

fn hessian<T: Scalar>(
    f: &impl Fn(&[T]) -> Result<T, ClassifyError>,
    x: &[T],
    h: &[T],
) -> Result<Matrix<T>, ClassifyError> {
    let d = x.len();
    let eval = |di: usize, si: T, dj: usize, sj: T| {
        let mut y = x.to_vec();
        y[di] = y[di] + si * h[di];
        y[dj] = y[dj] + sj * h[dj];
        f(&y)
    };
    let one = T::one();
    let mut m = vec![vec![T::zero(); d]; d];
    for i in 0..d {
        for j in i..d {
            let v = (eval(i, one, j, one)? - eval(i, one, j, -one)? - eval(i, -one, j, one)? + eval(i, -one, j, -one)?)
                / (cst::<T>(4.0) * h[i] * h[j]);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    Ok(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pattern {
    Proper,
    Improper,
    NoSolution,
}

impl std::fmt::Display for Pattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Pattern::Proper => "Proper",
            Pattern::Improper => "Improper",
            Pattern::NoSolution => "NoSolution",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    /// Sample size behind the observed information.
    pub n: f64,
    /// Tolerance on [`eqdiff0_residual`] for the selected candidate.
    pub residual_tol: f64,
    /// A unique variance at or below this counts as non-positive.
    pub psi_zero_tol: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { n: 100.0, residual_tol: 1e-8, psi_zero_tol: 0.0 }
    }
}

#[derive(Clone, Debug)]
pub struct SolutionReport {
    pub pattern: Pattern,
    pub best: Option<CandidateSolution>,
    pub discrepancy: f64,
    pub fisher_min_eigenvalue: f64,
    pub eqdiff0_residual: f64,
    pub algorithm: String,
    pub starts: usize,
    pub diagnostics: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub pattern: Pattern,
    pub discrepancy: Option<f64>,
    pub psi_min: Option<f64>,
    pub fisher_min_eig: Option<f64>,
    pub residual: Option<f64>,
    pub algorithm: String,
    pub starts: usize,
}

impl SolutionReport {
    pub fn psi_min(&self) -> Option<f64> {
        self.best.as_ref().map(|b| b.min_psi())
    }

    pub fn to_json(&self) -> ReportJson {
        let fin = |x: f64| x.is_finite().then_some(x);
        ReportJson {
            pattern: self.pattern,
            discrepancy: fin(self.discrepancy),
            psi_min: self.psi_min(),
            fisher_min_eig: fin(self.fisher_min_eigenvalue),
            residual: fin(self.eqdiff0_residual),
            algorithm: self.algorithm.clone(),
            starts: self.starts,
        }
    }
}

fn lex_cmp(a: &CandidateSolution, b: &CandidateSolution) -> std::cmp::Ordering {
    a.leaf.cmp(&b.leaf).then_with(|| {
        let fa = a.l.iter().flatten().chain(&a.psi);
        let fb = b.l.iter().flatten().chain(&b.psi);
        fa.zip(fb).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    })
}

/// Picks the candidate of least discrepancy (ties go to the smaller leaf
/// label), then checks the likelihood equations and the observed information.
pub fn classify_pattern(
    candidates: &[CandidateSolution],
    s: &[Vec<f64>],
    opts: &ClassifyOptions,
) -> Result<SolutionReport, ClassifyError> {
    if candidates.is_empty() {
        return Err(ClassifyError::NoCandidates);
    }
    let mut diagnostics = Vec::new();
    let mut scored: Vec<(f64, CandidateSolution)> = Vec::new();
    for c in candidates {
        let mut c = c.clone();
        c.l = canonicalize_sign(&c.l);
        c.l_exact = c.l_exact.as_ref().map(|m| canonicalize_sign(m));
        match discrepancy(s, &c.l, &c.psi) {
            Ok(q) => scored.push((q, c)),
            Err(e) => diagnostics.push(format!("candidate from leaf {}: {e}", c.leaf)),
        }
    }
    let Some(qmin) = scored.iter().map(|(q, _)| *q).min_by(f64::total_cmp) else {
        return Ok(SolutionReport {
            pattern: Pattern::NoSolution,
            best: None,
            discrepancy: f64::NAN,
            fisher_min_eigenvalue: f64::NAN,
            eqdiff0_residual: f64::NAN,
            algorithm: "exact".into(),
            starts: 0,
            diagnostics,
        });
    };
    let tie = 1e-12 * qmin.abs().max(1.0);
    let (q, best) = scored
        .into_iter()
        .filter(|(q, _)| *q <= qmin + tie)
        .min_by(|a, b| lex_cmp(&a.1, &b.1))
        .unwrap();
    let residual = eqdiff0_residual(s, &best.l, &best.psi)?;
    let (min_eig, pd) = match observed_fisher(s, &best.l, &best.psi, opts.n) {
        Ok(f) => (f.min_eigenvalue, f.positive_definite),
        Err(e) => {
            diagnostics.push(e.to_string());
            (f64::NAN, false)
        }
    };
    let pattern = if residual < opts.residual_tol && pd {
        if best.min_psi() > opts.psi_zero_tol {
            Pattern::Proper
        } else {
            Pattern::Improper
        }
    } else {
        Pattern::NoSolution
    };
    Ok(SolutionReport {
        pattern,
        best: Some(best),
        discrepancy: q,
        fisher_min_eigenvalue: min_eig,
        eqdiff0_residual: residual,
        algorithm: "exact".into(),
        starts: 0,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_fit_has_zero_discrepancy() {
        let l: Vec<Vec<f64>> = vec![vec![0.9], vec![0.8], vec![0.7]];
        let psi = vec![0.19, 0.36, 0.51];
        let s = implied_covariance(&l, &psi);
        assert!(discrepancy(&s, &l, &psi).unwrap().abs() < 1e-14);
        assert!(eqdiff0_residual(&s, &l, &psi).unwrap() < 1e-14);
    }

    #[test]
    fn indefinite_sigma_is_an_error() {
        let s = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let l = vec![vec![0.0], vec![0.0]];
        assert_eq!(discrepancy(&s, &l, &[-1.0, 1.0]), Err(ClassifyError::IndefiniteSigma));
        assert_eq!(discrepancy(&s, &l, &[0.0, 1.0]), Err(ClassifyError::SingularSigma));
    }

    #[test]
    fn fisher_of_quadratic_surrogate() {
        // at S = Sigma the information is positive definite and symmetric
        let l: Vec<Vec<f64>> = vec![vec![0.9], vec![0.8], vec![0.7]];
        let psi = vec![0.19, 0.36, 0.51];
        let s = implied_covariance(&l, &psi);
        let f = observed_fisher(&s, &l, &psi, 100.0).unwrap();
        assert!(f.positive_definite);
        let asym = (0..6).flat_map(|i| (0..6).map(move |j| (i, j))).map(|(i, j)| (f.matrix[i][j] - f.matrix[j][i]).abs());
        assert!(asym.fold(0.0, f64::max) <= 1e-6 * max_abs(&f.matrix));
    }
}
