//! Sturm-sequence isolation of the real roots of a univariate rational polynomial.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::polyring::UniPoly;
use crate::Rational;

use super::interval::RatInterval;
use super::SolveError;

/// An interval holding exactly one real root of `poly`. Endpoints are not
/// roots unless the interval is the degenerate `[r, r]` of a rational root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsolatingInterval {
    pub lower: Rational,
    pub upper: Rational,
    pub poly: UniPoly<Rational>,
}

impl IsolatingInterval {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn exact(&self) -> Option<&Rational> {
        self.is_exact().then_some(&self.lower)
    }

    pub fn width(&self) -> Rational {
        &self.upper - &self.lower
    }

    pub fn as_interval(&self) -> RatInterval {
        RatInterval::new(self.lower.clone(), self.upper.clone())
    }

    pub fn midpoint_f64(&self) -> f64 {
        super::rational_to_f64(&((&self.lower + &self.upper) / Rational::from_integer(2.into())))
    }

    /// Halves the interval until its width is at most `width`, or the root is hit exactly.
    pub fn refine_to(&mut self, width: &Rational) {
        if self.is_exact() {
            return;
        }
        let s_lo = sign(&self.poly.eval(&self.lower));
        let two = Rational::from_integer(2.into());
        while &self.width() > width {
            let mid = (&self.lower + &self.upper) / &two;
            let v = sign(&self.poly.eval(&mid));
            if v == 0 {
                self.lower = mid.clone();
                self.upper = mid;
                return;
            }
            if v == s_lo {
                self.lower = mid;
            } else {
                self.upper = mid;
            }
        }
    }
}

fn sign(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

struct Sturm {
    seq: Vec<UniPoly<Rational>>,
}

impl Sturm {
    fn new(f: &UniPoly<Rational>) -> Self {
        let mut seq = vec![f.clone(), f.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            // positive rescaling keeps signs and tames coefficient growth
            let lc = r.leading().unwrap().abs();
            seq.push(r.scale(&(-Rational::one() / lc)));
        }
        Sturm { seq }
    }

    fn variations<I: Iterator<Item = i8>>(signs: I) -> usize {
        let mut last = 0i8;
        let mut count = 0;
        for s in signs.filter(|&s| s != 0) {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    fn at(&self, x: &Rational) -> usize {
        Self::variations(self.seq.iter().map(|p| sign(&p.eval(x))))
    }

    fn at_infinity(&self, positive: bool) -> usize {
        Self::variations(self.seq.iter().map(|p| {
            let s = sign(p.leading().unwrap());
            let odd = p.degree().unwrap() % 2 == 1;
            if !positive && odd {
                -s
            } else {
                s
            }
        }))
    }

    /// Distinct real roots in `(a, b]`.
    fn count(&self, a: &Rational, b: &Rational) -> usize {
        self.at(a) - self.at(b)
    }
}

/// `1 + max |a_i / a_n|`: every real root lies strictly inside `(-B, B)`.
fn cauchy_bound(f: &UniPoly<Rational>) -> Rational {
    let lc = f.leading().unwrap().abs();
    let n = f.coeffs().len() - 1;
    let m = f.coeffs()[..n].iter().map(|c| c.abs() / &lc).max().unwrap_or_else(Rational::zero);
    m + Rational::one()
}

/// Leading coefficient of the primitive integer multiple of `f`; a rational
/// root `p/q` in lowest terms has `q` dividing it.
fn primitive_leading(f: &UniPoly<Rational>) -> BigInt {
    let mut den = BigInt::one();
    for c in f.coeffs() {
        den = den.lcm(c.denom());
    }
    let ints: Vec<BigInt> = f.coeffs().iter().map(|c| (c * Rational::from_integer(den.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for i in &ints {
        g = g.gcd(i);
    }
    (ints.last().unwrap() / g).abs()
}

/// Simplest rational (smallest denominator) in the closed interval `[lo, hi]`, `0 < lo`.
fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    if lo.is_negative() && hi.is_negative() {
        return -simplest_between(&-hi, &-lo);
    }
    if !lo.is_positive() {
        return Rational::zero();
    }
    let fl = lo.floor();
    if &fl == lo {
        return fl;
    }
    if &(fl.clone() + Rational::one()) <= hi {
        return fl + Rational::one();
    }
    // lo and hi share the integer part; recurse on reciprocals of the fractional parts
    let inner = simplest_between(&(Rational::one() / (hi - &fl)), &(Rational::one() / (lo - &fl)));
    fl + Rational::one() / inner
}

fn try_exact(iv: &mut IsolatingInterval, lead: &BigInt) {
    if iv.is_exact() {
        return;
    }
    let a = Rational::from_integer(lead.clone());
    let from = (&iv.lower * &a).ceil().to_integer();
    let to = (&iv.upper * &a).floor().to_integer();
    let mut cands = Vec::new();
    if &to - &from <= BigInt::from(8) {
        let mut k = from;
        while k <= to {
            cands.push(Rational::new(k.clone(), lead.clone()));
            k += 1;
        }
    }
    cands.push(simplest_between(&iv.lower, &iv.upper));
    for r in cands {
        if iv.as_interval().contains(&r) && iv.poly.eval(&r).is_zero() {
            iv.lower = r.clone();
            iv.upper = r;
            return;
        }
    }
}

/// One isolating interval per distinct real root, in increasing order,
/// refined to width at most `width`. Rational roots come back degenerate.
pub fn isolate_real_roots_to(f: &UniPoly<Rational>, width: &Rational) -> Result<Vec<IsolatingInterval>, SolveError> {
    if f.is_zero() {
        return Err(SolveError::ZeroPolynomial);
    }
    let s = f.squarefree_part();
    if s.degree() == Some(0) {
        return Ok(Vec::new());
    }
    if s.degree() == Some(1) {
        let r = -s.coeffs()[0].clone() / s.coeffs()[1].clone();
        return Ok(vec![IsolatingInterval { lower: r.clone(), upper: r, poly: s }]);
    }
    let sturm = Sturm::new(&s);
    let total = sturm.at_infinity(false) - sturm.at_infinity(true);
    let b = cauchy_bound(&s);
    let two = Rational::from_integer(2.into());
    let mut found: Vec<IsolatingInterval> = Vec::new();
    let mut stack = vec![(-b.clone(), b, total)];
    while let Some((lo, hi, count)) = stack.pop() {
        if count == 0 {
            continue;
        }
        if count == 1 {
            found.push(IsolatingInterval { lower: lo, upper: hi, poly: s.clone() });
            continue;
        }
        let mid = (&lo + &hi) / &two;
        if s.eval(&mid).is_zero() {
            found.push(IsolatingInterval { lower: mid.clone(), upper: mid.clone(), poly: s.clone() });
            // shrink a punctured neighbourhood until it holds no other root
            let mut delta = (&hi - &lo) / Rational::from_integer(4.into());
            loop {
                let a = &mid - &delta;
                let c = &mid + &delta;
                if !s.eval(&a).is_zero() && !s.eval(&c).is_zero() && sturm.count(&a, &c) == 1 {
                    stack.push((lo.clone(), a.clone(), sturm.count(&lo, &a)));
                    stack.push((c.clone(), hi.clone(), sturm.count(&c, &hi)));
                    break;
                }
                delta = delta / &two;
            }
        } else {
            let left = sturm.count(&lo, &mid);
            stack.push((mid.clone(), hi, count - left));
            stack.push((lo, mid, left));
        }
    }
    let lead = primitive_leading(&s);
    for iv in &mut found {
        iv.refine_to(width);
        try_exact(iv, &lead);
    }
    found.sort_by(|a, b| a.lower.cmp(&b.lower));
    Ok(found)
}

/// Isolation at the default target width `1e-12`.
pub fn isolate_real_roots(f: &UniPoly<Rational>) -> Result<Vec<IsolatingInterval>, SolveError> {
    isolate_real_roots_to(f, &super::default_width())
}
