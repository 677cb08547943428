//! Real points of zero-dimensional ideals: certified root isolation,
//! shape-lemma back-substitution with exact interval arithmetic, and
//! hyperplane slicing of positive-dimensional varieties.

mod interval;
mod roots;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groebner::{self, GroebnerBasis, GroebnerError, Ideal, QuotientRing};
use crate::polyring::{MonomialOrder, Polynomial, UniPoly};
use crate::Rational;

pub use interval::{eval_uni, RatInterval};
pub use roots::{isolate_real_roots, isolate_real_roots_to, IsolatingInterval};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("the zero polynomial has no isolated roots")]
    ZeroPolynomial,
    #[error("ideal is not zero-dimensional")]
    NotZeroDimensional,
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error("interval refinement stalled on generator {generator} (residual bound {bound:e})")]
    PrecisionFailure { generator: usize, bound: f64 },
    #[error("no separating linear form found")]
    NoSeparatingForm,
    #[error("every slice was inconsistent or degenerate; no sample point found")]
    EmptySample,
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Target width of every non-exact coordinate enclosure.
    pub width: Rational,
    pub max_rounds: usize,
    /// Bound on `|g(point)|` over all generators.
    pub residual_tol: Rational,
    pub max_forms: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            width: default_width(),
            max_rounds: 20,
            residual_tol: Rational::new(1.into(), BigInt::from(10u64.pow(10))),
            max_forms: 64,
        }
    }
}

pub fn default_width() -> Rational {
    Rational::new(1.into(), BigInt::from(10u64.pow(12)))
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `r` rounded half away from zero to `digits` decimals.
pub fn to_decimal(r: &Rational, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = (r.abs() * Rational::from_integer(scale)).round().to_integer();
    let s = format!("{:0>width$}", scaled.to_string(), width = digits + 1);
    let (int, frac) = s.split_at(s.len() - digits);
    let neg = r.is_negative() && scaled.is_positive();
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

/// A real solution: one enclosure per coordinate (degenerate when exact).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealPoint {
    pub coords: Vec<RatInterval>,
    pub residual_bound: Rational,
    pub sample_only: bool,
}

impl RealPoint {
    pub fn exact(&self, i: usize) -> Option<&Rational> {
        self.coords[i].is_point().then_some(&self.coords[i].lo)
    }

    pub fn is_exact(&self) -> bool {
        self.coords.iter().all(|c| c.is_point())
    }

    pub fn approx(&self) -> Vec<f64> {
        self.coords.iter().map(|c| rational_to_f64(&c.mid())).collect()
    }

    pub fn midpoints(&self) -> Vec<Rational> {
        self.coords.iter().map(|c| c.mid()).collect()
    }

    pub fn to_json(&self, digits: usize) -> RealPointJson {
        RealPointJson {
            coordinates: self
                .coords
                .iter()
                .map(|c| CoordinateJson {
                    decimal: to_decimal(&c.mid(), digits),
                    exact: c.is_point().then(|| c.lo.to_string()),
                    lower: c.lo.to_string(),
                    upper: c.hi.to_string(),
                })
                .collect(),
            residual_bound: self.residual_bound.to_string(),
            sample_only: self.sample_only,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordinateJson {
    pub decimal: String,
    pub exact: Option<String>,
    pub lower: String,
    pub upper: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealPointJson {
    pub coordinates: Vec<CoordinateJson>,
    pub residual_bound: String,
    pub sample_only: bool,
}

/// Largest `|g|` enclosure bound over the generators, and which generator attains it.
fn residual(gens: &[Polynomial<Rational>], coords: &[RatInterval]) -> (Rational, usize) {
    let mut worst = (Rational::zero(), 0);
    for (i, g) in gens.iter().enumerate() {
        let v = g.eval_with(coords, |c| RatInterval::point(c.clone())).mag();
        if v > worst.0 {
            worst = (v, i);
        }
    }
    worst
}

fn separating_forms(n: usize, max: usize) -> Vec<Vec<Rational>> {
    let mut out = Vec::with_capacity(max);
    let mut last = vec![Rational::zero(); n];
    last[n - 1] = Rational::one();
    out.push(last);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    while out.len() < max {
        let mut f: Vec<Rational> = (0..n).map(|_| Rational::from_integer(rng.gen_range(-9i64..=9).into())).collect();
        f[n - 1] = Rational::one();
        out.push(f);
    }
    out
}

type Shape = (UniPoly<Rational>, Vec<UniPoly<Rational>>);

fn find_shape(q: &QuotientRing<Rational>, max_forms: usize) -> Option<Shape> {
    separating_forms(q.nvars(), max_forms)
        .iter()
        .find_map(|f| q.shape_representation(f))
}

/// All real points of a zero-dimensional ideal given by a Gröbner basis
/// (any order; lex as produced by FGLM is the usual input).
pub fn solve_triangular(g: &GroebnerBasis<Rational>) -> Result<Vec<RealPoint>, SolveError> {
    solve_with(g, &SolveOptions::default())
}

pub fn solve_with(g: &GroebnerBasis<Rational>, opts: &SolveOptions) -> Result<Vec<RealPoint>, SolveError> {
    if g.is_unit() {
        return Ok(Vec::new());
    }
    if !groebner::is_zero_dimensional(g) {
        return Err(SolveError::NotZeroDimensional);
    }
    let n = g.nvars();
    let mut q = QuotientRing::new(g)?;
    let rad = groebner::zero_dim_radical(g)?;
    if rad.generators().len() > g.elements().len() {
        // repeated points: work in the radical
        let rg = groebner::buchberger(&rad, &MonomialOrder::grevlex(n))?;
        q = QuotientRing::new(&rg)?;
    }
    let shape = find_shape(&q, opts.max_forms).ok_or(SolveError::NoSeparatingForm)?;
    let (m, gs) = shape;
    let u_roots = isolate_real_roots_to(&m, &opts.width)?;
    if u_roots.is_empty() {
        return Ok(Vec::new());
    }
    let eliminants: Vec<Vec<IsolatingInterval>> = (0..n)
        .map(|v| isolate_real_roots_to(&q.min_poly_var(v), &opts.width))
        .collect::<Result<_, _>>()?;

    let mut points = Vec::with_capacity(u_roots.len());
    for mut u in u_roots {
        points.push(back_substitute(&mut u, &gs, &eliminants, g.elements(), opts)?);
    }
    points.sort_by(|a, b| a.midpoints().cmp(&b.midpoints()));
    Ok(points)
}

fn snap_exact(c: RatInterval, roots: &[IsolatingInterval]) -> RatInterval {
    if c.is_point() {
        return c;
    }
    let mut hits = roots.iter().filter(|r| r.as_interval().intersects(&c));
    match (hits.next(), hits.next()) {
        (Some(r), None) => match r.exact() {
            Some(x) if c.contains(x) => RatInterval::point(x.clone()),
            _ => c,
        },
        _ => c,
    }
}

fn back_substitute(
    u: &mut IsolatingInterval,
    gs: &[UniPoly<Rational>],
    eliminants: &[Vec<IsolatingInterval>],
    gens: &[Polynomial<Rational>],
    opts: &SolveOptions,
) -> Result<RealPoint, SolveError> {
    let mut step = BigInt::from(1u64 << 16);
    let mut last = (Rational::zero(), 0usize);
    for _ in 0..=opts.max_rounds {
        let ui = u.as_interval();
        let coords: Vec<RatInterval> = gs
            .iter()
            .zip(eliminants)
            .map(|(gi, roots)| snap_exact(eval_uni(gi, &ui), roots))
            .collect();
        let narrow = coords.iter().all(|c| c.width() <= opts.width);
        last = residual(gens, &coords);
        if narrow && last.0 < opts.residual_tol {
            return Ok(RealPoint { coords, residual_bound: last.0, sample_only: false });
        }
        if u.is_exact() {
            break;
        }
        let target = u.width() / Rational::from_integer(step.clone());
        u.refine_to(&target);
        step = &step * &step;
    }
    Err(SolveError::PrecisionFailure { generator: last.1, bound: rational_to_f64(&last.0) })
}

/// Sample points of a positive-dimensional variety, found by cutting with
/// random rational hyperplanes until the slice is zero-dimensional. Every
/// point is tagged `sample_only`; components may be missed.
pub fn slice_positive_dimensional(
    g: &GroebnerBasis<Rational>,
    count: usize,
    seed: u64,
) -> Result<Vec<RealPoint>, SolveError> {
    if g.is_unit() || groebner::is_zero_dimensional(g) {
        return Err(SolveError::Precondition("slicing needs a positive-dimensional variety"));
    }
    let n = g.nvars();
    let d = g.dimension().unwrap_or(0);
    let opts = SolveOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<RealPoint> = Vec::new();
    let budget = 10 * count + 20;
    for _ in 0..budget {
        if out.len() >= count {
            break;
        }
        let mut gens = g.elements().to_vec();
        for _ in 0..d {
            let mut h = Polynomial::constant(n, random_rational(&mut rng));
            for v in 0..n {
                h.add_term(crate::polyring::Monomial::var(n, v, 1), random_rational(&mut rng));
            }
            gens.push(h);
        }
        let sliced = match Ideal::new(n, gens).and_then(|i| groebner::buchberger(&i, &MonomialOrder::grevlex(n))) {
            Ok(s) => s,
            Err(_) => continue,
        };
        if sliced.is_unit() || !groebner::is_zero_dimensional(&sliced) {
            continue;
        }
        let Ok(points) = solve_with(&sliced, &opts) else { continue };
        for mut p in points {
            let (bound, _) = residual(g.elements(), &p.coords);
            if bound < opts.residual_tol && out.len() < count {
                p.residual_bound = bound;
                p.sample_only = true;
                out.push(p);
            }
        }
    }
    if out.is_empty() {
        return Err(SolveError::EmptySample);
    }
    Ok(out)
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let num: i64 = rng.gen_range(-9..=9);
    let den: i64 = rng.gen_range(1..=4);
    Rational::new(num.into(), den.into())
}
