use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::polyring::UniPoly;
use crate::Rational;

/// Closed interval with exact rational endpoints. Arithmetic is exact, so
/// no outward rounding is needed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl RatInterval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        RatInterval { lo, hi }
    }

    pub fn point(r: Rational) -> Self {
        RatInterval { lo: r.clone(), hi: r }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Largest absolute value over the interval.
    pub fn mag(&self) -> Rational {
        let a = self.lo.abs();
        let b = self.hi.abs();
        if a > b {
            a
        } else {
            b
        }
    }

    pub fn contains(&self, r: &Rational) -> bool {
        &self.lo <= r && r <= &self.hi
    }

    pub fn intersects(&self, other: &RatInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }
}

impl Add for RatInterval {
    type Output = RatInterval;
    fn add(self, rhs: RatInterval) -> RatInterval {
        RatInterval { lo: self.lo + rhs.lo, hi: self.hi + rhs.hi }
    }
}

impl Sub for RatInterval {
    type Output = RatInterval;
    fn sub(self, rhs: RatInterval) -> RatInterval {
        RatInterval { lo: self.lo - rhs.hi, hi: self.hi - rhs.lo }
    }
}

impl Neg for RatInterval {
    type Output = RatInterval;
    fn neg(self) -> RatInterval {
        RatInterval { lo: -self.hi, hi: -self.lo }
    }
}

impl Mul for RatInterval {
    type Output = RatInterval;
    fn mul(self, rhs: RatInterval) -> RatInterval {
        if self.is_point() && rhs.is_point() {
            return RatInterval::point(self.lo * rhs.lo);
        }
        let c = [&self.lo * &rhs.lo, &self.lo * &rhs.hi, &self.hi * &rhs.lo, &self.hi * &rhs.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        RatInterval { lo, hi }
    }
}

impl Zero for RatInterval {
    fn zero() -> Self {
        RatInterval::point(Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.lo.is_zero() && self.hi.is_zero()
    }
}

impl One for RatInterval {
    fn one() -> Self {
        RatInterval::point(Rational::one())
    }
}

/// Horner evaluation over an interval argument.
pub fn eval_uni(p: &UniPoly<Rational>, x: &RatInterval) -> RatInterval {
    let mut acc = RatInterval::zero();
    for c in p.coeffs().iter().rev() {
        acc = acc * x.clone() + RatInterval::point(c.clone());
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn product_straddling_zero() {
        let a = RatInterval::new(q(-1, 1), q(2, 1));
        let b = RatInterval::new(q(-3, 1), q(1, 1));
        assert_eq!(a * b, RatInterval::new(q(-6, 1), q(3, 1)));
    }

    #[test]
    fn horner_encloses_values() {
        let p = UniPoly::new(vec![q(-1, 9), q(0, 1), q(1, 1)]);
        let x = RatInterval::new(q(1, 3), q(1, 3) + q(1, 1000));
        let v = eval_uni(&p, &x);
        assert!(v.contains(&q(0, 1)));
        assert!(v.contains(&p.eval(&x.hi)));
    }
}
