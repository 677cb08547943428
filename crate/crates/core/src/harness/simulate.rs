use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::faml::{FactorProblem, RationalMatrix};
use crate::Rational;

use super::HarnessError;

/// A factor model to draw samples from. Unique variances default to
/// `diag(I - L L')`, the unit-variance convention.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationModel {
    pub loadings: Vec<Vec<f64>>,
    #[serde(default)]
    pub psi: Option<Vec<f64>>,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub rounding: Rounding,
}

/// How the sample covariance is turned into rationals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rounding {
    /// One decimal for the exact solver, none for numeric fitting.
    #[default]
    Auto,
    /// Keep the binary value exactly.
    Exact,
    Decimals(u32),
}

impl Rounding {
    pub fn decimals(self, exact_mode: bool) -> Option<u32> {
        match self {
            Rounding::Auto => exact_mode.then_some(1),
            Rounding::Exact => None,
            Rounding::Decimals(d) => Some(d),
        }
    }
}

fn default_n() -> usize {
    100
}

impl SimulationModel {
    pub fn new(loadings: Vec<Vec<f64>>) -> Self {
        SimulationModel { loadings, psi: None, n: default_n(), seed: 0, rounding: Rounding::Auto }
    }

    pub fn p(&self) -> usize {
        self.loadings.len()
    }

    pub fn k(&self) -> usize {
        self.loadings.first().map_or(0, |r| r.len())
    }

    pub fn psi_true(&self) -> Vec<f64> {
        match &self.psi {
            Some(p) => p.clone(),
            None => self.loadings.iter().map(|r| 1.0 - r.iter().map(|x| x * x).sum::<f64>()).collect(),
        }
    }

    pub fn sigma_true(&self) -> Vec<Vec<f64>> {
        let psi = self.psi_true();
        let p = self.p();
        (0..p)
            .map(|i| {
                (0..p)
                    .map(|j| {
                        let c: f64 = self.loadings[i].iter().zip(&self.loadings[j]).map(|(a, b)| a * b).sum();
                        if i == j { c + psi[i] } else { c }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let (p, k) = (self.p(), self.k());
        if p < 2 || k == 0 || k >= p || self.loadings.iter().any(|r| r.len() != k) {
            return Err(HarnessError::Model(format!("loadings must be p x k with 1 <= k < p, got {p} x {k}")));
        }
        if self.n < 2 {
            return Err(HarnessError::Model("sample size must be at least 2".into()));
        }
        let psi = self.psi_true();
        if psi.len() != p || psi.iter().any(|&x| !(x > 0.0)) {
            return Err(HarnessError::Model(format!("unique variances must be positive, got {psi:?}")));
        }
        cholesky(&self.sigma_true()).ok_or_else(|| HarnessError::Model("model covariance is not positive definite".into()))?;
        Ok(())
    }
}

pub(crate) fn cholesky(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut c = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|m| c[i][m] * c[j][m]).sum();
            if i == j {
                let d = a[i][i] - s;
                if !(d > 0.0) {
                    return None;
                }
                c[i][i] = d.sqrt();
            } else {
                c[i][j] = (a[i][j] - s) / c[j][j];
            }
        }
    }
    Some(c)
}

/// Standard normals by the Box–Muller transform, both outputs used.
struct Normals {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl Normals {
    fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // u1 in (0, 1] keeps the logarithm finite
        let u1: f64 = 1.0 - self.rng.gen::<f64>();
        let u2: f64 = self.rng.gen();
        let r = (-2.0 * u1.ln()).sqrt();
        let t = std::f64::consts::TAU * u2;
        self.spare = Some(r * t.sin());
        r * t.cos()
    }
}

/// `x` rounded half away from zero to `decimals` places, as an exact rational.
pub fn round_to_rational(x: f64, decimals: u32) -> Rational {
    let scale = 10f64.powi(decimals as i32);
    let n = (x * scale).round();
    Rational::new(BigInt::from(n as i64), BigInt::from(10u64.pow(decimals)))
}

/// Sample covariance (divisor `n`) of `model.n` draws from `N(0, L L' + Psi)`,
/// rounded to `decimals` places when given. Run `run` uses stream `run` of
/// the ChaCha8 generator seeded by `model.seed`.
pub fn sample_covariance(model: &SimulationModel, run: u64, decimals: Option<u32>) -> Result<RationalMatrix, HarnessError> {
    model.validate()?;
    let p = model.p();
    let c = cholesky(&model.sigma_true()).expect("validated");
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    rng.set_stream(run);
    let mut normals = Normals { rng, spare: None };
    let mut xs = Vec::with_capacity(model.n);
    for _ in 0..model.n {
        let z: Vec<f64> = (0..p).map(|_| normals.next()).collect();
        xs.push((0..p).map(|i| (0..=i).map(|j| c[i][j] * z[j]).sum::<f64>()).collect::<Vec<f64>>());
    }
    let nf = model.n as f64;
    let mean: Vec<f64> = (0..p).map(|i| xs.iter().map(|x| x[i]).sum::<f64>() / nf).collect();
    let mut s = vec![vec![Rational::zero(); p]; p];
    for i in 0..p {
        for j in 0..=i {
            let v = xs.iter().map(|x| (x[i] - mean[i]) * (x[j] - mean[j])).sum::<f64>() / nf;
            let r = match decimals {
                Some(d) => round_to_rational(v, d),
                None => Rational::from_float(v).unwrap_or_else(Rational::zero),
            };
            s[i][j] = r.clone();
            s[j][i] = r;
        }
    }
    Ok(s)
}

/// [`sample_covariance`] with the rounding the exact solver would use.
pub fn simulate_covariance(model: &SimulationModel, run: u64) -> Result<FactorProblem, HarnessError> {
    let s = sample_covariance(model, run, model.rounding.decimals(true))?;
    Ok(FactorProblem::new(s, model.k(), Rational::zero())?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_is_exact() {
        assert_eq!(round_to_rational(0.74, 1), Rational::new(7.into(), 10.into()));
        assert_eq!(round_to_rational(-0.25, 1), Rational::new((-3).into(), 10.into()));
        assert_eq!(round_to_rational(1.0, 2), Rational::from_integer(1.into()));
    }

    #[test]
    fn default_psi_is_unit_complement() {
        let m = SimulationModel::new(vec![vec![0.9], vec![0.8], vec![0.7]]);
        let psi = m.psi_true();
        assert!((psi[0] - 0.19).abs() < 1e-12 && (psi[2] - 0.51).abs() < 1e-12);
        assert!(m.validate().is_ok());
        assert!(SimulationModel::new(vec![vec![1.1], vec![0.5], vec![0.5]]).validate().is_err());
    }
}
