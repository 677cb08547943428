use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::groebner::Ideal;
use crate::polyring::Polynomial;
use crate::{QPolynomial, Rational};

use super::problem::{rational_matrix_inverse, FactorProblem};
use super::FamlError;

/// Which ring the likelihood equations live in.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formulation {
    /// Loadings only; each unique variance is the polynomial `s_ii - sum_j l_ij^2`.
    #[default]
    Eliminated,
    /// Unique variances `psi1..psip` are ring variables ahead of the loadings.
    Explicit,
}

impl Formulation {
    /// Index of the first loading variable.
    pub(crate) fn offset(self, prob: &FactorProblem) -> usize {
        match self {
            Formulation::Eliminated => 0,
            Formulation::Explicit => prob.p(),
        }
    }

    pub(crate) fn nvars(self, prob: &FactorProblem) -> usize {
        self.offset(prob) + prob.loading_layout().len()
    }
}

pub fn loading_var_names(prob: &FactorProblem) -> Vec<String> {
    let wide = prob.p() > 9;
    prob.loading_layout()
        .into_iter()
        .map(|(i, j)| if wide { format!("l{}_{}", i + 1, j + 1) } else { format!("l{}{}", i + 1, j + 1) })
        .collect()
}

pub fn explicit_var_names(prob: &FactorProblem) -> Vec<String> {
    let mut v: Vec<String> = (1..=prob.p()).map(|i| format!("psi{i}")).collect();
    v.extend(loading_var_names(prob));
    v
}

pub fn var_names(prob: &FactorProblem, f: Formulation) -> Vec<String> {
    match f {
        Formulation::Eliminated => loading_var_names(prob),
        Formulation::Explicit => explicit_var_names(prob),
    }
}

/// `p x k` matrix of loading variables, zero above the diagonal.
pub(crate) fn loading_matrix(prob: &FactorProblem, nvars: usize, offset: usize) -> Vec<Vec<QPolynomial>> {
    let mut l = vec![vec![Polynomial::zero(nvars); prob.k()]; prob.p()];
    for (idx, (i, j)) in prob.loading_layout().into_iter().enumerate() {
        l[i][j] = Polynomial::var(nvars, offset + idx);
    }
    l
}

fn constant(nvars: usize, c: &Rational) -> QPolynomial {
    Polynomial::constant(nvars, c.clone())
}

/// `s_ii - sum_j l_ij^2` in the given ring.
pub(crate) fn psi_of_loadings(prob: &FactorProblem, l: &[Vec<QPolynomial>], nvars: usize) -> Vec<QPolynomial> {
    (0..prob.p())
        .map(|i| {
            let mut h = constant(nvars, &prob.s()[i][i]);
            for lij in &l[i] {
                h = &h - &(lij * lij);
            }
            h
        })
        .collect()
}

/// The splitting polynomials that test `psi_i = 0`.
pub(crate) fn psi_splitters(prob: &FactorProblem, f: Formulation) -> Vec<QPolynomial> {
    let n = f.nvars(prob);
    match f {
        Formulation::Eliminated => {
            let l = loading_matrix(prob, n, 0);
            psi_of_loadings(prob, &l, n)
        }
        Formulation::Explicit => (0..prob.p()).map(|i| Polynomial::var(n, i)).collect(),
    }
}

/// Further splitters for multi-factor problems: `l11`, the second-column
/// loadings, and the `k x k` minors of the loading rows below the first.
pub(crate) fn extra_splitters(prob: &FactorProblem, f: Formulation) -> Vec<QPolynomial> {
    if prob.k() < 2 {
        return Vec::new();
    }
    let n = f.nvars(prob);
    let l = loading_matrix(prob, n, f.offset(prob));
    let mut out = vec![l[0][0].clone()];
    for row in l.iter().skip(1) {
        out.push(row[1].clone());
    }
    let rows: Vec<usize> = (1..prob.p()).collect();
    for combo in combinations(&rows, prob.k()) {
        let sub: Vec<Vec<QPolynomial>> = combo.iter().map(|&r| l[r].clone()).collect();
        let d = determinant(&sub, n);
        if !d.is_zero() {
            out.push(d);
        }
    }
    out
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        for mut rest in combinations(&items[i + 1..], k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Laplace expansion along the first row; only used on small minors.
fn determinant(m: &[Vec<QPolynomial>], nvars: usize) -> QPolynomial {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = Polynomial::zero(nvars);
    for c in 0..n {
        if m[0][c].is_zero() {
            continue;
        }
        let minor: Vec<Vec<QPolynomial>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = &m[0][c] * &determinant(&minor, nvars);
        acc = if c % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

fn matmul_const_right(a: &[Vec<QPolynomial>], b: &[Vec<Rational>], nvars: usize) -> Vec<Vec<QPolynomial>> {
    let cols = b[0].len();
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|c| {
                    let mut acc = Polynomial::zero(nvars);
                    for (j, x) in row.iter().enumerate() {
                        if !b[j][c].is_zero() && !x.is_zero() {
                            acc = &acc + &x.scale(&b[j][c]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn matmul(a: &[Vec<QPolynomial>], b: &[Vec<QPolynomial>], nvars: usize) -> Vec<Vec<QPolynomial>> {
    let cols = b[0].len();
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|c| {
                    let mut acc = Polynomial::zero(nvars);
                    for (j, x) in row.iter().enumerate() {
                        if !x.is_zero() && !b[j][c].is_zero() {
                            acc = &acc + &(x * &b[j][c]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn lower_entries(prob: &FactorProblem, e: Vec<Vec<QPolynomial>>) -> Vec<QPolynomial> {
    prob.loading_layout().into_iter().map(|(i, j)| e[i][j].clone()).collect()
}

/// Likelihood equations over the loadings alone:
/// `(S - LL' - diag(S - LL')) S^{-1} L = 0`, restricted to the free positions.
pub fn build_likelihood_ideal(prob: &FactorProblem) -> Result<Ideal<Rational>, FamlError> {
    let n = prob.loading_layout().len();
    let p = prob.p();
    let sinv = rational_matrix_inverse(prob.s())?;
    let l = loading_matrix(prob, n, 0);
    let mut m = vec![vec![Polynomial::zero(n); p]; p];
    for i in 0..p {
        for j in 0..p {
            if i == j {
                continue;
            }
            let mut x = constant(n, &prob.s()[i][j]);
            for c in 0..prob.k() {
                x = &x - &(&l[i][c] * &l[j][c]);
            }
            m[i][j] = x;
        }
    }
    let ms = matmul_const_right(&m, &sinv, n);
    let e = matmul(&ms, &l, n);
    Ok(Ideal::new(n, lower_entries(prob, e))?)
}

/// The same equations with the unique variances as variables:
/// `psi_i - (s_ii - sum_j l_ij^2)` and `L - (LL' + Psi) S^{-1} L`.
pub fn build_explicit_ideal(prob: &FactorProblem) -> Result<Ideal<Rational>, FamlError> {
    let p = prob.p();
    let n = Formulation::Explicit.nvars(prob);
    let sinv = rational_matrix_inverse(prob.s())?;
    let l = loading_matrix(prob, n, p);
    let psi_def = psi_of_loadings(prob, &l, n);
    let mut gens: Vec<QPolynomial> = (0..p).map(|i| &Polynomial::var(n, i) - &psi_def[i]).collect();
    let mut sigma = vec![vec![Polynomial::zero(n); p]; p];
    for i in 0..p {
        for j in 0..p {
            let mut x = Polynomial::zero(n);
            for c in 0..prob.k() {
                x = &x + &(&l[i][c] * &l[j][c]);
            }
            if i == j {
                x = &x + &Polynomial::var(n, i);
            }
            sigma[i][j] = x;
        }
    }
    let sinv_poly: Vec<Vec<QPolynomial>> = sinv.iter().map(|r| r.iter().map(|c| constant(n, c)).collect()).collect();
    let sl = matmul(&sinv_poly, &l, n);
    let rhs = matmul(&sigma, &sl, n);
    let diff: Vec<Vec<QPolynomial>> = l
        .iter()
        .zip(&rhs)
        .map(|(lr, rr)| lr.iter().zip(rr).map(|(a, b)| a - b).collect())
        .collect();
    gens.extend(lower_entries(prob, diff));
    Ok(Ideal::new(n, gens)?)
}
