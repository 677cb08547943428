#![allow(dead_code)]

use exact_fa::classify::linalg::Lu;
use exact_fa::faml::{self, FactorProblem, RationalMatrix};
use exact_fa::groebner::Ideal;
use exact_fa::polyring::{text, Monomial, UniPoly};
use exact_fa::realsolve::rational_to_f64;
use exact_fa::{QPolynomial, Rational};
use rand::Rng;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn parse(s: &str, vars: &[&str]) -> QPolynomial {
    let names: Vec<String> = vars.iter().map(|v| v.to_string()).collect();
    text::parse(s, &names).unwrap()
}

pub fn heywood_s() -> RationalMatrix {
    faml::parse_covariance(include_str!("../fixtures/heywood_cov.json")).unwrap()
}

pub fn heywood() -> FactorProblem {
    FactorProblem::new(heywood_s(), 1, q(0, 1)).unwrap()
}

pub fn to_f64(s: &RationalMatrix) -> Vec<Vec<f64>> {
    s.iter().map(|r| r.iter().map(rational_to_f64).collect()).collect()
}

/// Global optimum of the Heywood problem (improper, psi2 = 0).
pub fn heywood_global() -> (Vec<f64>, Vec<f64>) {
    (vec![0.5, 1.0, 2.0 / 3.0], vec![0.75, 0.0, 5.0 / 9.0])
}

/// Exact one-factor fit with psi1 = -11/70.
pub fn improper_s() -> Vec<Vec<f64>> {
    vec![vec![1.0, 0.9, 0.9], vec![0.9, 1.0, 0.7], vec![0.9, 0.7, 1.0]]
}

pub fn proper_s() -> Vec<Vec<f64>> {
    vec![vec![1.0, 0.72, 0.81], vec![0.72, 1.0, 0.72], vec![0.81, 0.72, 1.0]]
}

/// `s12 * s13 * s23 < 0`: no one-factor fit with positive variances.
pub fn nosolution_s() -> Vec<Vec<f64>> {
    vec![vec![1.0, 0.5, 0.4], vec![0.5, 1.0, -0.3], vec![0.4, -0.3, 1.0]]
}

pub fn rational_matrix(s: &[Vec<f64>]) -> RationalMatrix {
    s.iter().map(|r| r.iter().map(|&x| faml::parse_rational(&x.to_string()).unwrap()).collect()).collect()
}

pub fn eval(p: &QPolynomial, x: &[f64]) -> f64 {
    p.eval_with(x, rational_to_f64)
}

/// `|p(x)| / (1 + sum |c m(x)|)`.
pub fn rel_residual(p: &QPolynomial, x: &[f64]) -> f64 {
    let scale: f64 = p
        .terms()
        .map(|(m, c)| {
            let mut t = rational_to_f64(c).abs();
            for (v, &e) in m.exps().iter().enumerate() {
                t *= x[v].abs().powi(e as i32);
            }
            t
        })
        .sum();
    eval(p, x).abs() / (1.0 + scale)
}

pub fn max_rel_residual(gens: &[QPolynomial], x: &[f64]) -> f64 {
    gens.iter().map(|g| rel_residual(g, x)).fold(0.0, f64::max)
}

/// Points of `V(gens)` reached by damped minimum-norm Gauss-Newton from a
/// grid over `[-2, 2]^n` and `random` uniform starts; only points refined
/// below `1e-12` are kept. Iteration runs until the step stalls, since near a
/// singular point a small residual alone leaves the position off by its square root.
pub fn sample_variety<R: Rng>(gens: &[QPolynomial], n: usize, random: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let grid_side = if n == 2 { 9 } else { 5 };
    let mut starts = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        starts.push(idx.iter().map(|&i| -2.0 + 4.0 * i as f64 / (grid_side - 1) as f64 + 0.013).collect::<Vec<f64>>());
        let mut d = 0;
        while d < n && idx[d] == grid_side - 1 {
            idx[d] = 0;
            d += 1;
        }
        if d == n {
            break;
        }
        idx[d] += 1;
    }
    for _ in 0..random {
        starts.push((0..n).map(|_| rng.gen_range(-2.0..2.0)).collect());
    }
    let jac: Vec<Vec<QPolynomial>> = gens.iter().map(|g| (0..n).map(|v| g.derivative(v)).collect()).collect();
    starts.into_iter().filter_map(|x| newton_project(gens, &jac, x)).collect()
}

fn newton_project(gens: &[QPolynomial], jac: &[Vec<QPolynomial>], mut x: Vec<f64>) -> Option<Vec<f64>> {
    let m = gens.len();
    let n = x.len();
    for _ in 0..300 {
        if max_rel_residual(gens, &x) == 0.0 {
            break;
        }
        let f: Vec<f64> = gens.iter().map(|g| eval(g, &x)).collect();
        let j: Vec<Vec<f64>> = jac.iter().map(|row| row.iter().map(|d| eval(d, &x)).collect()).collect();
        let mut jjt = vec![vec![0.0; m]; m];
        for a in 0..m {
            for b in 0..m {
                jjt[a][b] = (0..n).map(|v| j[a][v] * j[b][v]).sum();
            }
        }
        let tr: f64 = (0..m).map(|a| jjt[a][a]).sum();
        for (a, row) in jjt.iter_mut().enumerate() {
            row[a] += 1e-14 * (1.0 + tr);
        }
        let y = Lu::new(&jjt)?.solve(&f);
        let step: Vec<f64> = (0..n).map(|v| (0..m).map(|a| j[a][v] * y[a]).sum::<f64>()).collect();
        for v in 0..n {
            x[v] -= step[v];
        }
        if x.iter().any(|c| !c.is_finite() || c.abs() > 1e6) {
            return None;
        }
        let size = x.iter().fold(1.0f64, |a, c| a.max(c.abs()));
        if step.iter().all(|d| d.abs() <= 1e-15 * size) {
            break;
        }
    }
    (max_rel_residual(gens, &x) < 1e-12).then_some(x)
}

fn small_int<R: Rng>(rng: &mut R, r: i64) -> Rational {
    Rational::from_integer(rng.gen_range(-r..=r).into())
}

/// `a0 + a1 x1 + ... + an xn` with small integer coefficients, not constant.
pub fn random_linear<R: Rng>(rng: &mut R, n: usize) -> QPolynomial {
    loop {
        let mut p = QPolynomial::constant(n, small_int(rng, 2));
        for v in 0..n {
            p.add_term(Monomial::var(n, v, 1), small_int(rng, 2));
        }
        if !p.is_constant() {
            return p;
        }
    }
}

/// Random polynomial with every term of total degree at most `deg`.
pub fn random_poly<R: Rng>(rng: &mut R, n: usize, deg: u32, terms: usize) -> QPolynomial {
    let mut p = QPolynomial::zero(n);
    for _ in 0..terms {
        let mut exps = vec![0u32; n];
        let mut left = rng.gen_range(0..=deg);
        for e in exps.iter_mut() {
            let take = rng.gen_range(0..=left);
            *e = take;
            left -= take;
        }
        p.add_term(Monomial::new(exps), small_int(rng, 3));
    }
    p
}

/// `(I, h)` in 2 or 3 variables with total degrees at most 3. Generators are
/// products of linear forms, some sharing a factor, so real varieties are
/// nonempty and `h` often vanishes on a whole component.
pub fn random_saturation_instance<R: Rng>(rng: &mut R) -> (Ideal<Rational>, QPolynomial) {
    let n = rng.gen_range(2..=3);
    let shared = random_linear(rng, n);
    let ngens = rng.gen_range(n - 1..=n);
    let mut gens = Vec::new();
    let mut factors = Vec::new();
    for _ in 0..ngens {
        let use_shared = rng.gen_bool(0.5);
        let extra = rng.gen_range(1..=if use_shared { 2 } else { 3 });
        let mut g = if use_shared { shared.clone() } else { QPolynomial::one(n) };
        for _ in 0..extra {
            let f = random_linear(rng, n);
            g = &g * &f;
            factors.push(f);
        }
        gens.push(g);
    }
    let h = match rng.gen_range(0..3) {
        0 => shared,
        1 => factors[rng.gen_range(0..factors.len())].clone(),
        _ => {
            let p = random_poly(rng, n, 2, 3);
            if p.is_zero() {
                random_linear(rng, n)
            } else {
                p
            }
        }
    };
    (Ideal::new(n, gens).unwrap(), h)
}

/// Zero-dimensional by construction: the `i`-th generator is `x_i^d` plus
/// terms of lower total degree.
pub fn random_zero_dim_ideal<R: Rng>(rng: &mut R) -> Ideal<Rational> {
    let n = rng.gen_range(2..=3);
    let mut gens = Vec::new();
    for v in 0..n {
        let d = rng.gen_range(1..=if n == 2 { 3 } else { 2 });
        let mut g = random_poly(rng, n, d - 1, 3);
        g.add_term(Monomial::var(n, v, d), Rational::from_integer(1.into()));
        gens.push(g);
    }
    if rng.gen_bool(0.3) {
        gens.push(random_poly(rng, n, 2, 3));
    }
    Ideal::new(n, gens).unwrap()
}

/// Product of distinct linear factors with roots on a 1/4 grid in [-4, 4],
/// times zero or more positive-definite quadratics; degree at most 8.
pub fn random_univariate<R: Rng>(rng: &mut R) -> (UniPoly<Rational>, usize) {
    let deg = rng.gen_range(1..=8usize);
    let nquad = rng.gen_range(0..=deg / 2);
    let nlin = deg - 2 * nquad;
    let mut roots: Vec<i64> = Vec::new();
    while roots.len() < nlin {
        let r = rng.gen_range(-16..=16);
        if !roots.contains(&r) {
            roots.push(r);
        }
    }
    let mut p = UniPoly::constant(q(rng.gen_range(1..=5) * if rng.gen_bool(0.5) { 1 } else { -1 }, 1));
    for &r in &roots {
        p = p.mul(&UniPoly::linear_root(q(r, 4)));
    }
    for _ in 0..nquad {
        // x^2 + b x + c with b^2 < 4c
        let b = q(rng.gen_range(-6..=6), 2);
        let c = &b * &b / q(4, 1) + q(rng.gen_range(1..=8), 4);
        p = p.mul(&UniPoly::new(vec![c, b, q(1, 1)]));
    }
    (p, roots.len())
}

/// Sign changes of `p` sampled on a uniform grid (exact zeros are skipped).
pub fn grid_sign_changes(p: &UniPoly<Rational>, lo: f64, hi: f64, steps: usize) -> usize {
    let c: Vec<f64> = p.coeffs().iter().map(rational_to_f64).collect();
    let mut last = 0.0f64;
    let mut changes = 0;
    for i in 0..=steps {
        let x = lo + (hi - lo) * i as f64 / steps as f64;
        let v = c.iter().rev().fold(0.0, |acc, &a| acc * x + a);
        if v != 0.0 {
            if last != 0.0 && (v > 0.0) != (last > 0.0) {
                changes += 1;
            }
            last = v;
        }
    }
    changes
}
