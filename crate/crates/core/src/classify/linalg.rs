//! Small dense linear algebra on row-major `Vec<Vec<T>>` matrices.

use super::{cst, Scalar};

pub type Matrix<T> = Vec<Vec<T>>;

pub fn zeros<T: Scalar>(r: usize, c: usize) -> Matrix<T> {
    vec![vec![T::zero(); c]; r]
}

pub fn identity<T: Scalar>(n: usize) -> Matrix<T> {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = T::one();
    }
    m
}

pub fn diag<T: Scalar>(d: &[T]) -> Matrix<T> {
    let mut m = zeros(d.len(), d.len());
    for (i, &x) in d.iter().enumerate() {
        m[i][i] = x;
    }
    m
}

pub fn transpose<T: Scalar>(a: &[Vec<T>]) -> Matrix<T> {
    let c = a.first().map_or(0, |r| r.len());
    (0..c).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

pub fn matmul<T: Scalar>(a: &[Vec<T>], b: &[Vec<T>]) -> Matrix<T> {
    let c = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..c)
                .map(|j| row.iter().zip(b).fold(T::zero(), |acc, (&x, br)| acc + x * br[j]))
                .collect()
        })
        .collect()
}

pub fn add<T: Scalar>(a: &[Vec<T>], b: &[Vec<T>]) -> Matrix<T> {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(&u, &v)| u + v).collect()).collect()
}

pub fn sub<T: Scalar>(a: &[Vec<T>], b: &[Vec<T>]) -> Matrix<T> {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(&u, &v)| u - v).collect()).collect()
}

pub fn max_abs<T: Scalar>(a: &[Vec<T>]) -> T {
    a.iter().flatten().fold(T::zero(), |m, &x| m.max(x.abs()))
}

pub fn trace<T: Scalar>(a: &[Vec<T>]) -> T {
    a.iter().enumerate().fold(T::zero(), |acc, (i, r)| acc + r[i])
}

/// `L L' + diag(psi)`.
pub fn implied_covariance<T: Scalar>(l: &[Vec<T>], psi: &[T]) -> Matrix<T> {
    add(&matmul(l, &transpose(l)), &diag(psi))
}

/// LU factorization with partial pivoting, enough for determinants and inverses.
pub struct Lu<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
    sign: T,
}

impl<T: Scalar> Lu<T> {
    /// `None` when a pivot is exactly zero or an entry is not finite.
    pub fn new(a: &[Vec<T>]) -> Option<Self> {
        let n = a.len();
        if a.iter().flatten().any(|x| !x.is_finite()) {
            return None;
        }
        let mut lu = a.to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = T::one();
        for c in 0..n {
            let piv = (c..n).max_by(|&x, &y| lu[x][c].abs().partial_cmp(&lu[y][c].abs()).unwrap_or(std::cmp::Ordering::Equal))?;
            if lu[piv][c] == T::zero() || !lu[piv][c].is_finite() {
                return None;
            }
            if piv != c {
                lu.swap(piv, c);
                perm.swap(piv, c);
                sign = -sign;
            }
            for r in c + 1..n {
                let f = lu[r][c] / lu[c][c];
                lu[r][c] = f;
                for j in c + 1..n {
                    let v = lu[c][j];
                    lu[r][j] = lu[r][j] - f * v;
                }
            }
        }
        Some(Lu { lu, perm, sign })
    }

    pub fn det(&self) -> T {
        self.lu.iter().enumerate().fold(self.sign, |acc, (i, r)| acc * r[i])
    }

    /// `(sign, log|det|)`.
    pub fn log_det(&self) -> (T, T) {
        let mut sign = self.sign;
        let mut acc = T::zero();
        for (i, r) in self.lu.iter().enumerate() {
            if r[i] < T::zero() {
                sign = -sign;
            }
            acc = acc + r[i].abs().ln();
        }
        (sign, acc)
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.lu.len();
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] = x[i] - self.lu[i][j] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] = x[i] - self.lu[i][j] * x[j];
            }
            x[i] = x[i] / self.lu[i][i];
        }
        x
    }

    pub fn inverse(&self) -> Matrix<T> {
        let n = self.lu.len();
        let cols: Vec<Vec<T>> = (0..n)
            .map(|j| {
                let mut e = vec![T::zero(); n];
                e[j] = T::one();
                self.solve(&e)
            })
            .collect();
        transpose(&cols)
    }
}

/// Eigen-decomposition of a symmetric matrix: eigenvalues in decreasing
/// order, eigenvectors as the matching columns of `vectors`.
#[derive(Clone, Debug)]
pub struct SymEigen<T> {
    pub values: Vec<T>,
    pub vectors: Matrix<T>,
}

impl<T: Scalar> SymEigen<T> {
    pub fn column(&self, j: usize) -> Vec<T> {
        self.vectors.iter().map(|r| r[j]).collect()
    }

    /// `V f(Lambda) V'`.
    pub fn map(&self, f: impl Fn(T) -> T) -> Matrix<T> {
        let n = self.values.len();
        let fv: Vec<T> = self.values.iter().map(|&x| f(x)).collect();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).fold(T::zero(), |acc, m| acc + self.vectors[i][m] * fv[m] * self.vectors[j][m]))
                    .collect()
            })
            .collect()
    }
}

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops
/// below `1e-13` relative to the matrix scale.
pub fn symmetric_eigen<T: Scalar>(m: &[Vec<T>]) -> SymEigen<T> {
    let n = m.len();
    let mut a = m.to_vec();
    // symmetrize so a slightly asymmetric input does not stall the sweeps
    for i in 0..n {
        for j in 0..i {
            let v = (a[i][j] + a[j][i]) / cst(2.0);
            a[i][j] = v;
            a[j][i] = v;
        }
    }
    let mut v = identity::<T>(n);
    let scale = a.iter().flatten().fold(T::zero(), |acc, &x| acc + x * x).sqrt().max(T::one());
    let tol = cst::<T>(1e-13) * scale;
    for _sweep in 0..100 {
        let off = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .fold(T::zero(), |acc, (i, j)| acc + a[i][j] * a[i][j])
            .sqrt();
        if off < tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == T::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (cst::<T>(2.0) * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[y][y].partial_cmp(&a[x][x]).unwrap_or(std::cmp::Ordering::Equal));
    SymEigen {
        values: order.iter().map(|&i| a[i][i]).collect(),
        vectors: v.iter().map(|row| order.iter().map(|&i| row[i]).collect()).collect(),
    }
}

/// Rotates the columns of a `p x k` loading matrix so that entries above
/// the diagonal vanish (an LQ factorization by Givens rotations).
pub fn lower_triangular_form<T: Scalar>(l: &[Vec<T>]) -> Matrix<T> {
    let mut out = l.to_vec();
    let k = l.first().map_or(0, |r| r.len());
    for i in 0..k.min(out.len()) {
        for j in (i + 1..k).rev() {
            let (a, b) = (out[i][j - 1], out[i][j]);
            if b == T::zero() {
                continue;
            }
            let r = a.hypot(b);
            let (c, s) = (a / r, b / r);
            for row in out.iter_mut() {
                let (x, y) = (row[j - 1], row[j]);
                row[j - 1] = c * x + s * y;
                row[j] = -s * x + c * y;
            }
        }
    }
    out
}
