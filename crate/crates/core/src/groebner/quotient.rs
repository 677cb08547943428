//! Linear algebra in the finite-dimensional quotient `K[z]/I` of a
//! zero-dimensional ideal.

use std::collections::{HashMap, HashSet};

use crate::polyring::ordered::{reduce_full, OrdPoly};
use crate::polyring::{Field, Monomial, MonomialOrder, Polynomial, UniPoly};

use super::{GroebnerBasis, GroebnerError, Ideal};

/// Incremental row echelon form that remembers how each row was built from
/// the inserted vectors.
struct Echelon<C> {
    width: usize,
    rows: Vec<(usize, Vec<C>, Vec<C>)>,
}

impl<C: Field> Echelon<C> {
    fn new(width: usize) -> Self {
        Echelon { width, rows: Vec::new() }
    }

    fn reduce(&self, mut v: Vec<C>, mut comb: Vec<C>) -> (Vec<C>, Vec<C>) {
        for (piv, row, rc) in &self.rows {
            if v[*piv].is_zero() {
                continue;
            }
            let f = v[*piv].clone();
            for (a, b) in v.iter_mut().zip(row) {
                if !b.is_zero() {
                    *a = a.clone() - f.clone() * b;
                }
            }
            for (a, b) in comb.iter_mut().zip(rc) {
                if !b.is_zero() {
                    *a = a.clone() - f.clone() * b;
                }
            }
        }
        (v, comb)
    }

    /// Adds `v` as input number `rows.len()`. When `v` is dependent, returns
    /// coefficients `r` (last entry 1) with `sum r_k input_k = 0` instead.
    fn insert(&mut self, v: Vec<C>) -> Option<Vec<C>> {
        debug_assert_eq!(v.len(), self.width);
        let m = self.rows.len();
        let mut comb = vec![C::zero(); m + 1];
        comb[m] = C::one();
        let (mut v, mut comb) = self.reduce(v, comb);
        match v.iter().position(|c| !c.is_zero()) {
            None => Some(comb),
            Some(piv) => {
                let inv = C::one() / v[piv].clone();
                for a in v.iter_mut().chain(comb.iter_mut()) {
                    *a = a.clone() * &inv;
                }
                self.rows.push((piv, v, comb));
                None
            }
        }
    }

    /// Coefficients over the inserted vectors expressing `v`, if it lies in their span.
    fn express(&self, v: Vec<C>) -> Option<Vec<C>> {
        let m = self.rows.len();
        let (rest, comb) = self.reduce(v, vec![C::zero(); m]);
        if rest.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(comb.into_iter().map(|c| -c).collect())
    }
}

/// `K[z]/I` with the standard-monomial basis of a reduced Gröbner basis.
#[derive(Clone, Debug)]
pub struct QuotientRing<C> {
    order: MonomialOrder,
    basis: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    gb: Vec<OrdPoly<C>>,
    // mult[var][j]: sparse coordinates of z_var * basis[j]
    mult: Vec<Vec<Vec<(usize, C)>>>,
}

impl<C: Field> QuotientRing<C> {
    pub fn new(g: &GroebnerBasis<C>) -> Result<Self, GroebnerError> {
        if !super::is_zero_dimensional(g) {
            return Err(GroebnerError::NotZeroDimensional);
        }
        let ord = g.order().clone();
        let n = ord.arity();
        let gb: Vec<OrdPoly<C>> = g.elements().iter().map(|p| OrdPoly::from_poly(p, &ord)).collect();
        let lms: Vec<Monomial> = gb.iter().map(|p| p.lm().clone()).collect();
        let standard = |m: &Monomial| !lms.iter().any(|l| l.divides(m));

        let mut basis = Vec::new();
        if !g.is_unit() {
            let mut seen = HashSet::new();
            let mut stack = vec![Monomial::one(n)];
            seen.insert(Monomial::one(n));
            while let Some(m) = stack.pop() {
                for v in 0..n {
                    let next = m.mul(&Monomial::var(n, v, 1));
                    if standard(&next) && seen.insert(next.clone()) {
                        stack.push(next);
                    }
                }
                basis.push(m);
            }
        }
        basis.sort_by(|a, b| ord.cmp(a, b));
        let index: HashMap<Monomial, usize> = basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();

        let mut q = QuotientRing { order: ord, basis, index, gb, mult: Vec::new() };
        let mut mult = Vec::with_capacity(n);
        for v in 0..n {
            let x = Monomial::var(n, v, 1);
            let cols = q
                .basis
                .iter()
                .map(|b| {
                    let m = b.mul(&x);
                    match q.index.get(&m) {
                        Some(&i) => vec![(i, C::one())],
                        None => q.sparse_coords(&OrdPoly { terms: vec![(m, C::one())] }),
                    }
                })
                .collect();
            mult.push(cols);
        }
        q.mult = mult;
        Ok(q)
    }

    fn sparse_coords(&self, f: &OrdPoly<C>) -> Vec<(usize, C)> {
        let refs: Vec<&OrdPoly<C>> = self.gb.iter().collect();
        let r = reduce_full(f, &refs, &self.order);
        r.terms.into_iter().map(|(m, c)| (self.index[&m], c)).collect()
    }

    /// Vector-space dimension; equals the number of complex points with multiplicity.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn nvars(&self) -> usize {
        self.order.arity()
    }

    /// Coordinates of the normal form of `f`.
    pub fn coords(&self, f: &Polynomial<C>) -> Vec<C> {
        let mut out = vec![C::zero(); self.dim()];
        for (i, c) in self.sparse_coords(&OrdPoly::from_poly(f, &self.order)) {
            out[i] = c;
        }
        out
    }

    pub fn one_vec(&self) -> Vec<C> {
        self.coords(&Polynomial::one(self.nvars()))
    }

    /// Coordinates of `z_var * v`.
    pub fn mul_var(&self, var: usize, v: &[C]) -> Vec<C> {
        let mut out = vec![C::zero(); self.dim()];
        for (j, a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (i, c) in &self.mult[var][j] {
                out[*i] = out[*i].clone() + a.clone() * c;
            }
        }
        out
    }

    /// Coordinates of `(sum_i a_i z_i) * v`.
    pub fn mul_linear(&self, form: &[C], v: &[C]) -> Vec<C> {
        let mut out = vec![C::zero(); self.dim()];
        for (var, a) in form.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(self.mul_var(var, v)) {
                *o = o.clone() + a.clone() * &x;
            }
        }
        out
    }

    fn power_echelon(&self, form: &[C]) -> (Echelon<C>, UniPoly<C>) {
        let mut ech = Echelon::new(self.dim());
        let mut v = self.one_vec();
        loop {
            let next = self.mul_linear(form, &v);
            if let Some(rel) = ech.insert(v) {
                return (ech, UniPoly::new(rel));
            }
            v = next;
        }
    }

    /// Monic minimal polynomial of the linear form `sum_i a_i z_i` acting on the quotient.
    pub fn min_poly_linear(&self, form: &[C]) -> UniPoly<C> {
        self.power_echelon(form).1
    }

    pub fn min_poly_var(&self, var: usize) -> UniPoly<C> {
        let mut form = vec![C::zero(); self.nvars()];
        form[var] = C::one();
        self.min_poly_linear(&form)
    }

    /// Shape-lemma representation for a separating linear form `u`: its
    /// minimal polynomial `m` and polynomials `g_i` with `z_i = g_i(u)` mod I.
    /// `None` when `deg m < dim`, i.e. `u` does not separate or I is not radical.
    pub fn shape_representation(&self, form: &[C]) -> Option<(UniPoly<C>, Vec<UniPoly<C>>)> {
        let (ech, m) = self.power_echelon(form);
        if m.degree() != Some(self.dim()) {
            return None;
        }
        let n = self.nvars();
        let mut gs = Vec::with_capacity(n);
        for var in 0..n {
            let zv = self.mul_var(var, &self.one_vec());
            gs.push(UniPoly::new(ech.express(zv)?));
        }
        Some((m, gs))
    }
}

/// Order change for a zero-dimensional basis.
pub fn fglm<C: Field>(g: &GroebnerBasis<C>, target: &MonomialOrder) -> Result<GroebnerBasis<C>, GroebnerError> {
    let n = g.nvars();
    if target.arity() != n {
        return Err(GroebnerError::ArityMismatch { expected: n, found: target.arity() });
    }
    let q = QuotientRing::new(g)?;
    if g.is_unit() {
        return Ok(GroebnerBasis::from_reduced(target.clone(), vec![Polynomial::one(n)]));
    }
    let mut ech = Echelon::new(q.dim());
    let mut new_basis: Vec<Monomial> = Vec::new();
    let mut lms: Vec<Monomial> = Vec::new();
    let mut out: Vec<Polynomial<C>> = Vec::new();
    let mut seen: HashSet<Monomial> = HashSet::new();
    let mut cands: Vec<(Monomial, Vec<C>)> = vec![(Monomial::one(n), q.one_vec())];
    seen.insert(Monomial::one(n));

    loop {
        cands.retain(|(m, _)| !lms.iter().any(|l| l.divides(m)));
        let Some(pos) = (0..cands.len()).min_by(|&a, &b| target.cmp(&cands[a].0, &cands[b].0)) else {
            break;
        };
        let (m, v) = cands.swap_remove(pos);
        match ech.insert(v.clone()) {
            None => {
                for var in 0..n {
                    let next = m.mul(&Monomial::var(n, var, 1));
                    if seen.insert(next.clone()) {
                        let nv = q.mul_var(var, &v);
                        cands.push((next, nv));
                    }
                }
                new_basis.push(m);
            }
            Some(rel) => {
                let mut p = Polynomial::term(m.clone(), C::one());
                for (b, c) in new_basis.iter().zip(&rel) {
                    p.add_term(b.clone(), c.clone());
                }
                lms.push(m);
                out.push(p);
            }
        }
    }
    Ok(GroebnerBasis::from_reduced(target.clone(), out))
}

/// Radical of a zero-dimensional ideal: the basis plus the square-free part
/// of every univariate eliminant that has repeated factors.
pub fn zero_dim_radical<C: Field>(g: &GroebnerBasis<C>) -> Result<Ideal<C>, GroebnerError> {
    let q = QuotientRing::new(g)?;
    let n = g.nvars();
    let mut gens = g.elements().to_vec();
    if g.is_unit() {
        return Ideal::new(n, gens);
    }
    for var in 0..n {
        let m = q.min_poly_var(var);
        let s = m.squarefree_part();
        if s.degree() < m.degree() {
            gens.push(s.to_poly(n, var));
        }
    }
    Ideal::new(n, gens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groebner::buchberger;
    use crate::polyring::text;
    use crate::Rational;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn ideal(gens: &[&str], vars: &[String]) -> Ideal<Rational> {
        let ps = gens.iter().map(|s| text::parse(s, vars).unwrap()).collect();
        Ideal::new(vars.len(), ps).unwrap()
    }

    #[test]
    fn quotient_dimension_counts_points() {
        let v = names(&["x", "y"]);
        let g = buchberger(&ideal(&["x^2 - 1", "y^2 - 4"], &v), &MonomialOrder::grevlex(2)).unwrap();
        let q = QuotientRing::new(&g).unwrap();
        assert_eq!(q.dim(), 4);
        let m = q.min_poly_linear(&[Rational::from_integer(1.into()), Rational::from_integer(3.into())]);
        assert_eq!(m.degree(), Some(4));
    }

    #[test]
    fn fglm_matches_direct_lex() {
        let v = names(&["x", "y", "z"]);
        let i = ideal(&["x^2 + y*z - 2", "y^2 - x*z + 1", "z^2 - x - y"], &v);
        let gr = buchberger(&i, &MonomialOrder::grevlex(3)).unwrap();
        let via = fglm(&gr, &MonomialOrder::lex(3)).unwrap();
        let direct = buchberger(&i, &MonomialOrder::lex(3)).unwrap();
        assert_eq!(via.elements(), direct.elements());
    }

    #[test]
    fn radical_drops_multiplicity() {
        let v = names(&["x", "y"]);
        let g = buchberger(&ideal(&["x^2", "y - 1"], &v), &MonomialOrder::lex(2)).unwrap();
        let r = buchberger(&zero_dim_radical(&g).unwrap(), &MonomialOrder::lex(2)).unwrap();
        let t: Vec<String> = r.elements().iter().map(|p| text::to_text(p, &v)).collect();
        assert_eq!(t, vec!["x", "y - 1"]);
    }

    #[test]
    fn not_zero_dimensional_rejected() {
        let v = names(&["x", "y"]);
        let g = buchberger(&ideal(&["x*y"], &v), &MonomialOrder::lex(2)).unwrap();
        assert_eq!(QuotientRing::new(&g).unwrap_err(), GroebnerError::NotZeroDimensional);
    }

    #[test]
    fn shape_lemma_recovers_coordinates() {
        let v = names(&["x", "y"]);
        let g = buchberger(&ideal(&["x^2 - 1", "x*y - 1"], &v), &MonomialOrder::grevlex(2)).unwrap();
        let q = QuotientRing::new(&g).unwrap();
        let (m, gs) = q.shape_representation(&[Rational::from_integer(0.into()), Rational::from_integer(1.into())]).unwrap();
        // u = y: m = y^2 - 1, x = y
        assert_eq!(m.coeffs().len(), 3);
        assert_eq!(gs[0].coeffs(), &[Rational::from_integer(0.into()), Rational::from_integer(1.into())]);
    }
}
