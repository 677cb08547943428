use super::monomial::Monomial;
use super::polynomial::{Field, Polynomial};

/// Dense univariate polynomial, coefficients from degree 0 upwards.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniPoly<C> {
    coeffs: Vec<C>,
}

impl<C: Field> UniPoly<C> {
    pub fn new(mut coeffs: Vec<C>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: C) -> Self {
        Self::new(vec![c])
    }

    /// `t - r`.
    pub fn linear_root(r: C) -> Self {
        Self::new(vec![-r, C::one()])
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&C> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &C) -> C {
        let mut acc = C::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len().saturating_sub(1));
        let mut k = C::zero();
        for c in self.coeffs.iter().skip(1) {
            k = k + C::one();
            out.push(c.clone() * &k);
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c).collect())
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(lc) => self.scale(&(C::one() / lc.clone())),
            None => self.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i).cloned().unwrap_or_else(C::zero);
            let b = other.coeffs.get(i).cloned().unwrap_or_else(C::zero);
            out.push(a + b);
        }
        Self::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-C::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![C::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b;
            }
        }
        Self::new(out)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lc = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![C::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let q = rem[i].clone() / lc.clone();
            if q.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[i - dd + j] = rem[i - dd + j].clone() - q.clone() * dc;
            }
            quot[i - dd] = q;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// `f / gcd(f, f')`, monic: same roots, all simple.
    pub fn squarefree_part(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// Reads a multivariate polynomial that only involves `var`.
    pub fn from_poly(p: &Polynomial<C>, var: usize) -> Option<Self> {
        let mut coeffs = vec![C::zero(); p.degree_in(var) as usize + 1];
        for (m, c) in p.terms() {
            let e = m.exp(var);
            if m.degree() != e {
                return None;
            }
            coeffs[e as usize] = c.clone();
        }
        Some(Self::new(coeffs))
    }

    /// Embeds as a polynomial in `z_var` of an `nvars`-variable ring.
    pub fn to_poly(&self, nvars: usize, var: usize) -> Polynomial<C> {
        let mut p = Polynomial::zero(nvars);
        for (e, c) in self.coeffs.iter().enumerate() {
            p.add_term(Monomial::var(nvars, var, e as u32), c.clone());
        }
        p
    }
}
