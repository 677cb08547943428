use super::{cst, Scalar};

#[derive(Clone, Debug)]
pub struct BfgsOptions<T> {
    pub grad_tol: T,
    pub max_iter: usize,
    /// Armijo sufficient-decrease constant.
    pub armijo: T,
    pub max_backtracks: usize,
}

impl<T: Scalar> Default for BfgsOptions<T> {
    fn default() -> Self {
        BfgsOptions { grad_tol: cst(1e-9), max_iter: 500, armijo: cst(1e-4), max_backtracks: 60 }
    }
}

#[derive(Clone, Debug)]
pub struct BfgsResult<T> {
    pub x: Vec<T>,
    pub f: T,
    pub grad_norm: T,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<T>,
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Projected gradient: components pinned at their lower bound and pushing
/// outward are zeroed.
fn projected<T: Scalar>(x: &[T], g: &[T], lower: Option<&[T]>) -> Vec<T> {
    match lower {
        None => g.to_vec(),
        Some(lo) => x
            .iter()
            .zip(g)
            .zip(lo)
            .map(|((&xi, &gi), &li)| if xi <= li && gi > T::zero() { T::zero() } else { gi })
            .collect(),
    }
}

/// BFGS with backtracking (Armijo) line search. `fg` returns the value and
/// gradient; a non-finite value rejects the trial step. Optional lower
/// bounds are handled by projection and freezing active components.
pub fn minimize_bfgs<T, F>(mut fg: F, x0: &[T], lower: Option<&[T]>, opts: &BfgsOptions<T>) -> BfgsResult<T>
where
    T: Scalar,
    F: FnMut(&[T]) -> (T, Vec<T>),
{
    let n = x0.len();
    let clamp = |x: &mut Vec<T>| {
        if let Some(lo) = lower {
            for (xi, &li) in x.iter_mut().zip(lo) {
                *xi = xi.max(li);
            }
        }
    };
    let mut x = x0.to_vec();
    clamp(&mut x);
    let (mut f, mut g) = fg(&x);
    let mut h = super::linalg::identity::<T>(n);
    let mut history = vec![f];
    let mut iterations = 0;
    let norm = |v: &[T]| v.iter().fold(T::zero(), |m, &e| m.max(e.abs()));
    let mut pg = projected(&x, &g, lower);
    while iterations < opts.max_iter && f.is_finite() && norm(&pg) >= opts.grad_tol {
        iterations += 1;
        let active: Vec<bool> = (0..n).map(|i| pg[i] == T::zero() && g[i] != T::zero()).collect();
        let mut d: Vec<T> = (0..n)
            .map(|i| {
                if active[i] {
                    return T::zero();
                }
                -(0..n).filter(|&j| !active[j]).fold(T::zero(), |acc, j| acc + h[i][j] * g[j])
            })
            .collect();
        let mut slope = dot(&d, &pg);
        if slope >= T::zero() {
            // not a descent direction: restart from steepest descent
            h = super::linalg::identity(n);
            d = pg.iter().map(|&v| -v).collect();
            slope = dot(&d, &pg);
        }
        let mut step = T::one();
        let mut accepted = None;
        for _ in 0..opts.max_backtracks {
            let mut xn: Vec<T> = x.iter().zip(&d).map(|(&xi, &di)| xi + step * di).collect();
            clamp(&mut xn);
            let (fnew, gnew) = fg(&xn);
            let moved: Vec<T> = xn.iter().zip(&x).map(|(&a, &b)| a - b).collect();
            if moved.iter().all(|m| *m == T::zero()) {
                break;
            }
            if fnew.is_finite() && fnew <= f + opts.armijo * dot(&g, &moved) {
                accepted = Some((xn, fnew, gnew));
                break;
            }
            step = step / cst(2.0);
        }
        if accepted.is_none() {
            // at the rounding floor of f: accept a step that shrinks the gradient instead
            let slack = cst::<T>(4.0) * T::epsilon() * f.abs().max(T::one());
            let mut step = T::one();
            for _ in 0..opts.max_backtracks {
                let mut xn: Vec<T> = x.iter().zip(&d).map(|(&xi, &di)| xi + step * di).collect();
                clamp(&mut xn);
                let (fnew, gnew) = fg(&xn);
                if fnew.is_finite() && fnew <= f + slack && norm(&projected(&xn, &gnew, lower)) < norm(&pg) {
                    accepted = Some((xn, fnew, gnew));
                    break;
                }
                step = step / cst(2.0);
            }
        }
        let Some((xn, fnew, gnew)) = accepted else { break };
        let s: Vec<T> = xn.iter().zip(&x).map(|(&a, &b)| a - b).collect();
        let y: Vec<T> = gnew.iter().zip(&g).map(|(&a, &b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > cst::<T>(1e-12) * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            let hy: Vec<T> = (0..n).map(|i| dot(&h[i], &y)).collect();
            let yhy = dot(&y, &hy);
            for i in 0..n {
                for j in 0..n {
                    h[i][j] = h[i][j] + ((sy + yhy) * s[i] * s[j]) / (sy * sy) - (hy[i] * s[j] + s[i] * hy[j]) / sy;
                }
            }
        }
        let stalled = (f - fnew).abs() <= T::epsilon() * f.abs().max(T::one()) && norm(&s) <= T::epsilon();
        x = xn;
        f = fnew;
        g = gnew;
        pg = projected(&x, &g, lower);
        history.push(f);
        if stalled {
            break;
        }
    }
    let grad_norm = norm(&pg);
    BfgsResult { converged: grad_norm < opts.grad_tol, x, f, grad_norm, iterations, history }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let fg = |x: &[f64]| {
            let (a, b) = (x[0], x[1]);
            let f = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
            (f, vec![-2.0 * (1.0 - a) - 400.0 * a * (b - a * a), 200.0 * (b - a * a)])
        };
        let r = minimize_bfgs(fg, &[-1.2, 1.0], None, &BfgsOptions::default());
        assert!(r.converged, "{r:?}");
        assert!((r.x[0] - 1.0).abs() < 1e-8 && (r.x[1] - 1.0).abs() < 1e-8);
        assert!(r.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn bound_is_active() {
        // minimum of (x+1)^2 + (y-2)^2 with x >= 0 is at (0, 2)
        let fg = |x: &[f64]| ((x[0] + 1.0).powi(2) + (x[1] - 2.0).powi(2), vec![2.0 * (x[0] + 1.0), 2.0 * (x[1] - 2.0)]);
        let r = minimize_bfgs(fg, &[3.0, 0.0], Some(&[0.0, f64::NEG_INFINITY]), &BfgsOptions::default());
        assert!(r.converged);
        assert_eq!(r.x[0], 0.0);
        assert!((r.x[1] - 2.0).abs() < 1e-9);
    }
}
