use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Num, NumOps};

use super::monomial::{Monomial, MonomialOrder};
use super::PolyError;

/// Coefficient field for the polynomial kernel.
///
/// Any `num-traits` number with field division qualifies; the exact
/// pipeline instantiates it with [`crate::Rational`].
pub trait Field:
    Num + Clone + Debug + Neg<Output = Self> + Send + Sync + for<'a> NumOps<&'a Self>
{
}

impl<T> Field for T where
    T: Num + Clone + Debug + Neg<Output = T> + Send + Sync + for<'a> NumOps<&'a T>
{
}

/// Sparse multivariate polynomial. Terms are keyed by exponent vector and
/// zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial<C> {
    nvars: usize,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Field> Polynomial<C> {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C::one())
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    /// The variable `z_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        Self::term(Monomial::var(nvars, i, 1), C::one())
    }

    pub fn term(m: Monomial, c: C) -> Self {
        let mut p = Self::zero(m.arity());
        p.add_term(m, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, C)>>(nvars: usize, terms: I) -> Result<Self, PolyError> {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            if m.arity() != nvars {
                return Err(PolyError::ArityMismatch { expected: nvars, found: m.arity() });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> + '_ {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&Monomial::one(self.nvars))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.exp(var)).max().unwrap_or(0)
    }

    pub fn involves(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.exp(var) > 0)
    }

    /// Adds `c * m` in place.
    pub fn add_term(&mut self, m: Monomial, c: C) {
        debug_assert_eq!(m.arity(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = existing.clone() + c;
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a.clone() * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(t, a)| (t.mul(m), a.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// The ≻-maximal monomial with its coefficient.
    pub fn leading_term(&self, ord: &MonomialOrder) -> Result<(&Monomial, &C), PolyError> {
        if ord.arity() != self.nvars {
            return Err(PolyError::ArityMismatch { expected: ord.arity(), found: self.nvars });
        }
        self.terms
            .iter()
            .max_by(|a, b| ord.cmp(a.0, b.0))
            .ok_or(PolyError::ZeroPolynomial)
    }

    pub fn leading_monomial(&self, ord: &MonomialOrder) -> Result<&Monomial, PolyError> {
        self.leading_term(ord).map(|(m, _)| m)
    }

    /// Divides by the leading coefficient under `ord`; the zero polynomial stays zero.
    pub fn monic(&self, ord: &MonomialOrder) -> Self {
        match self.leading_term(ord) {
            Ok((_, lc)) => {
                let inv = C::one() / lc.clone();
                self.scale(&inv)
            }
            Err(_) => self.clone(),
        }
    }

    /// Terms sorted from largest to smallest under `ord`.
    pub fn sorted_terms(&self, ord: &MonomialOrder) -> Vec<(&Monomial, &C)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| ord.cmp(b.0, a.0));
        v
    }

    /// Evaluates with values in any ring that the coefficients map into.
    pub fn eval_with<T, F>(&self, point: &[T], lift: F) -> T
    where
        T: Clone + Add<Output = T> + Mul<Output = T> + num_traits::Zero + num_traits::One,
        F: Fn(&C) -> T,
    {
        assert_eq!(point.len(), self.nvars, "evaluation point has wrong arity");
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            let mut t = lift(c);
            for (v, &e) in m.exps().iter().enumerate() {
                for _ in 0..e {
                    t = t * point[v].clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// Exact evaluation in the coefficient field.
    pub fn eval(&self, point: &[C]) -> C {
        self.eval_with(point, |c| c.clone())
    }

    /// Replaces `z_var` by `value`, keeping the arity.
    pub fn substitute(&self, var: usize, value: &Polynomial<C>) -> Self {
        assert_eq!(value.nvars, self.nvars);
        let mut powers: Vec<Polynomial<C>> = vec![Self::one(self.nvars)];
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exp(var) as usize;
            while powers.len() <= e {
                let next = powers.last().unwrap() * value;
                powers.push(next);
            }
            let mut rest = m.exps().to_vec();
            rest[var] = 0;
            let piece = powers[e].mul_monomial(&Monomial::new(rest)).scale(c);
            out = out + piece;
        }
        out
    }

    /// Partial derivative with respect to `z_var`.
    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exp(var);
            if e == 0 {
                continue;
            }
            let mut exps = m.exps().to_vec();
            exps[var] -= 1;
            let mut k = C::zero();
            for _ in 0..e {
                k = k + C::one();
            }
            out.add_term(Monomial::new(exps), c.clone() * k);
        }
        out
    }

    /// Embeds into a ring with `extra` new trailing variables.
    pub fn extend_vars(&self, extra: usize) -> Self {
        Polynomial {
            nvars: self.nvars + extra,
            terms: self.terms.iter().map(|(m, c)| (m.extend(extra), c.clone())).collect(),
        }
    }

    /// Drops trailing variables from index `keep`; `None` if any of them occurs.
    pub fn truncate_vars(&self, keep: usize) -> Option<Self> {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            terms.insert(m.truncate(keep)?, c.clone());
        }
        Some(Polynomial { nvars: keep, terms })
    }

    /// Renames variables: variable `i` of `self` becomes variable `map[i]` in a ring of `nvars` variables.
    pub fn remap_vars(&self, nvars: usize, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.nvars);
        let mut out = Self::zero(nvars);
        for (m, c) in &self.terms {
            let mut exps = vec![0; nvars];
            for (i, &e) in m.exps().iter().enumerate() {
                exps[map[i]] += e;
            }
            out.add_term(Monomial::new(exps), c.clone());
        }
        out
    }

    pub fn map_coeffs<D: Field, F: Fn(&C) -> D>(&self, f: F) -> Polynomial<D> {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        assert_eq!(self.nvars, other.nvars, "polynomials live in different rings");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            let c = if negate { -c.clone() } else { c.clone() };
            out.add_term(m.clone(), c);
        }
        out
    }
}

impl<C: Debug> std::fmt::Debug for Polynomial<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

impl<'a, C: Field> Add<&'a Polynomial<C>> for &'a Polynomial<C> {
    type Output = Polynomial<C>;
    fn add(self, rhs: &'a Polynomial<C>) -> Polynomial<C> {
        self.combine(rhs, false)
    }
}

impl<C: Field> Add for Polynomial<C> {
    type Output = Polynomial<C>;
    fn add(self, rhs: Polynomial<C>) -> Polynomial<C> {
        &self + &rhs
    }
}

impl<'a, C: Field> Sub<&'a Polynomial<C>> for &'a Polynomial<C> {
    type Output = Polynomial<C>;
    fn sub(self, rhs: &'a Polynomial<C>) -> Polynomial<C> {
        self.combine(rhs, true)
    }
}

impl<C: Field> Sub for Polynomial<C> {
    type Output = Polynomial<C>;
    fn sub(self, rhs: Polynomial<C>) -> Polynomial<C> {
        &self - &rhs
    }
}

impl<'a, C: Field> Mul<&'a Polynomial<C>> for &'a Polynomial<C> {
    type Output = Polynomial<C>;
    fn mul(self, rhs: &'a Polynomial<C>) -> Polynomial<C> {
        assert_eq!(self.nvars, rhs.nvars, "polynomials live in different rings");
        let mut out = Polynomial::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb);
            }
        }
        out
    }
}

impl<C: Field> Mul for Polynomial<C> {
    type Output = Polynomial<C>;
    fn mul(self, rhs: Polynomial<C>) -> Polynomial<C> {
        &self * &rhs
    }
}

impl<C: Field> Neg for Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl<C: Field> Neg for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        -self.clone()
    }
}
