use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::Rational;

use super::FamlError;

pub type RationalMatrix = Vec<Vec<Rational>>;

/// A factor-analysis instance: covariance `S` (ridge already added), `p`
/// observed variables and `k` factors.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorProblem {
    s: RationalMatrix,
    p: usize,
    k: usize,
    ridge: Rational,
}

impl FactorProblem {
    pub fn new(s: RationalMatrix, k: usize, ridge: Rational) -> Result<Self, FamlError> {
        let p = s.len();
        if p < 2 {
            return Err(FamlError::InvalidProblem(format!("need at least 2 variables, got {p}")));
        }
        if s.iter().any(|row| row.len() != p) {
            return Err(FamlError::InvalidProblem("covariance matrix is not square".into()));
        }
        if k == 0 || k >= p {
            return Err(FamlError::InvalidProblem(format!("factor count {k} must satisfy 1 <= k < {p}")));
        }
        if ridge.is_negative() {
            return Err(FamlError::InvalidProblem("ridge must be non-negative".into()));
        }
        for i in 0..p {
            for j in 0..i {
                if s[i][j] != s[j][i] {
                    return Err(FamlError::InvalidProblem(format!("not symmetric at ({}, {})", i + 1, j + 1)));
                }
            }
        }
        let mut s = s;
        for (i, row) in s.iter_mut().enumerate() {
            row[i] = &row[i] + &ridge;
        }
        check_positive_definite(&s)?;
        Ok(FactorProblem { s, p, k, ridge })
    }

    /// The covariance in use, `S + ridge * I`.
    pub fn s(&self) -> &RationalMatrix {
        &self.s
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn ridge(&self) -> &Rational {
        &self.ridge
    }

    /// Free loading positions `(i, j)` with `j <= i`, row-major.
    pub fn loading_layout(&self) -> Vec<(usize, usize)> {
        (0..self.p)
            .flat_map(|i| (0..self.k.min(i + 1)).map(move |j| (i, j)))
            .collect()
    }

    pub fn s_f64(&self) -> Vec<Vec<f64>> {
        self.s
            .iter()
            .map(|r| r.iter().map(crate::realsolve::rational_to_f64).collect())
            .collect()
    }
}

/// Unpivoted elimination: all pivots positive iff every leading principal minor is.
fn check_positive_definite(s: &RationalMatrix) -> Result<(), FamlError> {
    let n = s.len();
    let mut a = s.clone();
    for c in 0..n {
        if !a[c][c].is_positive() {
            return Err(FamlError::NotPositiveDefinite(c + 1));
        }
        for r in c + 1..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &a[c][c];
            for j in c..n {
                let v = &a[c][j] * &f;
                a[r][j] = &a[r][j] - &v;
            }
        }
    }
    Ok(())
}

/// Exact inverse by Gauss–Jordan elimination.
pub fn rational_matrix_inverse(s: &RationalMatrix) -> Result<RationalMatrix, FamlError> {
    let n = s.len();
    let mut a: Vec<Vec<Rational>> = s
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).find(|&r| !a[r][c].is_zero()).ok_or(FamlError::SingularCovariance)?;
        a.swap(c, piv);
        let inv = Rational::one() / &a[c][c];
        for v in a[c].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..n {
            if r == c || a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].clone();
            for j in 0..2 * n {
                let v = &a[c][j] * &f;
                a[r][j] = &a[r][j] - &v;
            }
        }
    }
    Ok(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Exact value of a decimal (`-0.35`, `1e-3`, `2.5E2`) or fraction (`3/4`) literal.
pub fn parse_rational(text: &str) -> Result<Rational, FamlError> {
    let t = text.trim();
    let bad = || FamlError::Parse(format!("bad number '{t}'"));
    if t.contains('/') {
        return t.parse::<Rational>().map_err(|_| bad());
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(pos) => (&t[..pos], t[pos + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let num: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        Rational::from_integer(num * ten.pow(scale as u32))
    } else {
        Rational::new(num, ten.pow((-scale) as u32))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

/// Covariance text: CSV of decimals (no header), or a JSON array of rows
/// whose entries are `p/q` strings (decimal strings and numbers also accepted).
pub fn parse_covariance(text: &str) -> Result<RationalMatrix, FamlError> {
    let trimmed = text.trim();
    let rows: RationalMatrix = if trimmed.starts_with('[') {
        let v: Vec<Vec<serde_json::Value>> =
            serde_json::from_str(trimmed).map_err(|e| FamlError::Parse(e.to_string()))?;
        v.iter()
            .map(|row| {
                row.iter()
                    .map(|x| match x {
                        serde_json::Value::String(s) => parse_rational(s),
                        serde_json::Value::Number(n) => parse_rational(&n.to_string()),
                        other => Err(FamlError::Parse(format!("unexpected entry {other}"))),
                    })
                    .collect()
            })
            .collect::<Result<_, _>>()?
    } else {
        trimmed
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| l.split(',').map(parse_rational).collect())
            .collect::<Result<_, _>>()?
    };
    if rows.is_empty() {
        return Err(FamlError::Parse("empty covariance".into()));
    }
    Ok(rows)
}
