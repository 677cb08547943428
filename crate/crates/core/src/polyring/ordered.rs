//! Order-sorted term vectors used by the reduction engine.
//!
//! Terms are stored in ascending order under the active monomial order, so
//! the leading term is the last element.

use std::cmp::Ordering;

use super::monomial::{Monomial, MonomialOrder};
use super::polynomial::{Field, Polynomial};

#[derive(Clone, Debug, PartialEq)]
pub struct OrdPoly<C> {
    pub(crate) terms: Vec<(Monomial, C)>,
}

impl<C: Field> OrdPoly<C> {
    pub fn from_poly(p: &Polynomial<C>, ord: &MonomialOrder) -> Self {
        let mut terms: Vec<(Monomial, C)> = p.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
        terms.sort_by(|a, b| ord.cmp(&a.0, &b.0));
        OrdPoly { terms }
    }

    pub fn to_poly(&self, nvars: usize) -> Polynomial<C> {
        Polynomial::from_terms(nvars, self.terms.iter().cloned()).expect("arity preserved")
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lm(&self) -> &Monomial {
        &self.terms.last().expect("nonzero polynomial").0
    }

    pub fn lc(&self) -> &C {
        &self.terms.last().expect("nonzero polynomial").1
    }

    pub fn monic(mut self) -> Self {
        if let Some((_, lc)) = self.terms.last() {
            if !lc.is_one() {
                let inv = C::one() / lc.clone();
                for t in &mut self.terms {
                    t.1 = t.1.clone() * &inv;
                }
            }
        }
        self
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|t| t.0.degree()).max().unwrap_or(0)
    }

    /// `self - c * m * g`, merged in order.
    pub fn sub_mul(&self, c: &C, m: &Monomial, g: &OrdPoly<C>, ord: &MonomialOrder) -> OrdPoly<C> {
        sub_mul_slice(&self.terms, c, m, &g.terms, ord)
    }

    /// S-polynomial of two monic polynomials.
    pub fn s_poly(f: &OrdPoly<C>, g: &OrdPoly<C>, ord: &MonomialOrder) -> OrdPoly<C> {
        let lcm = f.lm().lcm(g.lm());
        let mf = lcm.div(f.lm()).unwrap();
        let mg = lcm.div(g.lm()).unwrap();
        let cf = C::one() / f.lc().clone();
        let cg = C::one() / g.lc().clone();
        let a = OrdPoly {
            terms: f.terms.iter().map(|(t, c)| (t.mul(&mf), c.clone() * &cf)).collect(),
        };
        a.sub_mul(&cg, &mg, g, ord)
    }
}

pub(crate) fn sub_mul_slice<C: Field>(
    p: &[(Monomial, C)],
    c: &C,
    m: &Monomial,
    g: &[(Monomial, C)],
    ord: &MonomialOrder,
) -> OrdPoly<C> {
    let mut out = Vec::with_capacity(p.len() + g.len());
    let mut i = 0;
    let mut j = 0;
    let mut gt: Option<(Monomial, C)> = None;
    loop {
        if gt.is_none() && j < g.len() {
            gt = Some((g[j].0.mul(m), g[j].1.clone() * c));
            j += 1;
        }
        match (p.get(i), gt.as_ref()) {
            (None, None) => break,
            (Some(a), None) => {
                out.push(a.clone());
                i += 1;
            }
            (None, Some(_)) => {
                let (tm, tc) = gt.take().unwrap();
                out.push((tm, -tc));
            }
            (Some(a), Some(b)) => match ord.cmp(&a.0, &b.0) {
                Ordering::Less => {
                    out.push(a.clone());
                    i += 1;
                }
                Ordering::Greater => {
                    let (tm, tc) = gt.take().unwrap();
                    out.push((tm, -tc));
                }
                Ordering::Equal => {
                    let (tm, tc) = gt.take().unwrap();
                    let v = a.1.clone() - tc;
                    if !v.is_zero() {
                        out.push((tm, v));
                    }
                    i += 1;
                }
            },
        }
    }
    OrdPoly { terms: out }
}

/// Full reduction of `f` by `divisors` (all nonzero). Divisors are tried in
/// the given order for each term.
pub fn reduce_full<C: Field>(f: &OrdPoly<C>, divisors: &[&OrdPoly<C>], ord: &MonomialOrder) -> OrdPoly<C> {
    let mut work = f.terms.clone();
    let mut rem: Vec<(Monomial, C)> = Vec::new();
    while let Some((lm, lc)) = work.last().cloned() {
        let hit = divisors.iter().find(|g| g.lm().divides(&lm));
        match hit {
            Some(g) => {
                let shift = lm.div(g.lm()).unwrap();
                let coef = lc / g.lc().clone();
                // leading terms cancel exactly; drop them before merging
                work.pop();
                let tail = &g.terms[..g.terms.len() - 1];
                work = sub_mul_slice(&work, &coef, &shift, tail, ord).terms;
            }
            None => {
                rem.push(work.pop().unwrap());
            }
        }
    }
    rem.reverse();
    OrdPoly { terms: rem }
}
