use std::cmp::Ordering;
use std::fmt;

use super::PolyError;

/// Exponent vector `z^a` over a fixed number of ring variables.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial { exps }
    }

    /// The constant monomial `1`.
    pub fn one(nvars: usize) -> Self {
        Monomial { exps: vec![0; nvars] }
    }

    /// `z_var^exp`.
    pub fn var(nvars: usize, var: usize, exp: u32) -> Self {
        let mut exps = vec![0; nvars];
        exps[var] = exp;
        Monomial { exps }
    }

    pub fn arity(&self) -> usize {
        self.exps.len()
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn exp(&self, var: usize) -> u32 {
        self.exps[var]
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.arity(), other.arity());
        Monomial {
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect(),
        }
    }

    /// True when `self` divides `other`.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if !other.divides(self) {
            return None;
        }
        Some(Monomial {
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| *a.max(b)).collect(),
        }
    }

    /// True when the two monomials share no variable.
    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// If this monomial is a pure power `z_i^t` with `t > 0`, returns `(i, t)`.
    pub fn pure_power(&self) -> Option<(usize, u32)> {
        let mut found = None;
        for (i, &e) in self.exps.iter().enumerate() {
            if e > 0 {
                if found.is_some() {
                    return None;
                }
                found = Some((i, e));
            }
        }
        found
    }

    /// Same exponents, placed in a ring with `extra` additional trailing variables.
    pub fn extend(&self, extra: usize) -> Monomial {
        let mut exps = self.exps.clone();
        exps.extend(std::iter::repeat(0).take(extra));
        Monomial { exps }
    }

    /// Drops the trailing variables from `keep` onwards; they must have exponent zero.
    pub fn truncate(&self, keep: usize) -> Option<Monomial> {
        if self.exps[keep..].iter().any(|&e| e != 0) {
            return None;
        }
        Some(Monomial { exps: self.exps[..keep].to_vec() })
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "z{:?}", self.exps)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderKind {
    Lex,
    Grevlex,
    /// The top-ranked variable first, then grevlex on the others.
    Elim,
}

/// A monomial order together with a ranking of the ring variables.
///
/// `perm[0]` is the most significant variable. With the identity ranking,
/// lex compares the leftmost differing exponent and grevlex breaks degree
/// ties on the rightmost one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonomialOrder {
    kind: OrderKind,
    perm: Vec<usize>,
}

impl MonomialOrder {
    pub fn lex(nvars: usize) -> Self {
        MonomialOrder { kind: OrderKind::Lex, perm: (0..nvars).collect() }
    }

    pub fn grevlex(nvars: usize) -> Self {
        MonomialOrder { kind: OrderKind::Grevlex, perm: (0..nvars).collect() }
    }

    pub fn new(kind: OrderKind, nvars: usize) -> Self {
        MonomialOrder { kind, perm: (0..nvars).collect() }
    }

    pub fn with_ranking(kind: OrderKind, perm: Vec<usize>) -> Result<Self, PolyError> {
        let mut seen = vec![false; perm.len()];
        for &v in &perm {
            if v >= perm.len() || seen[v] {
                return Err(PolyError::InvalidRanking);
            }
            seen[v] = true;
        }
        Ok(MonomialOrder { kind, perm })
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn arity(&self) -> usize {
        self.perm.len()
    }

    /// Variables from most to least significant.
    pub fn ranking(&self) -> &[usize] {
        &self.perm
    }

    /// Same kind and ranking, re-targeted to a ring of `nvars` variables with identity ranking.
    pub fn same_kind(&self, nvars: usize) -> Self {
        MonomialOrder::new(self.kind, nvars)
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// Compares without arity checks; callers guarantee matching arities.
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        debug_assert_eq!(a.arity(), self.arity());
        debug_assert_eq!(b.arity(), self.arity());
        let (ae, be) = (a.exps(), b.exps());
        match self.kind {
            OrderKind::Lex => {
                for &v in &self.perm {
                    match ae[v].cmp(&be[v]) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                Ordering::Equal
            }
            OrderKind::Elim => {
                let top = self.perm[0];
                ae[top].cmp(&be[top]).then_with(|| grevlex_tail(ae, be, &self.perm[1..]))
            }
            OrderKind::Grevlex => grevlex_tail(ae, be, &self.perm),
        }
    }
}

fn grevlex_tail(ae: &[u32], be: &[u32], perm: &[usize]) -> Ordering {
    let deg = |e: &[u32]| perm.iter().map(|&v| e[v]).sum::<u32>();
    match deg(ae).cmp(&deg(be)) {
        Ordering::Equal => {}
        o => return o,
    }
    for &v in perm.iter().rev() {
        match ae[v].cmp(&be[v]) {
            Ordering::Equal => continue,
            // smaller exponent in the last differing variable wins
            o => return o.reverse(),
        }
    }
    Ordering::Equal
}

/// Checked comparison of two monomials under `ord`.
pub fn monomial_cmp(a: &Monomial, b: &Monomial, ord: &MonomialOrder) -> Result<Ordering, PolyError> {
    for m in [a, b] {
        if m.arity() != ord.arity() {
            return Err(PolyError::ArityMismatch { expected: ord.arity(), found: m.arity() });
        }
    }
    Ok(ord.cmp(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(e: &[u32]) -> Monomial {
        Monomial::new(e.to_vec())
    }

    #[test]
    fn lex_and_grevlex_disagree_on_textbook_pair() {
        // z1^2 vs z1 z2^3
        let a = m(&[2, 0]);
        let b = m(&[1, 3]);
        assert_eq!(monomial_cmp(&a, &b, &MonomialOrder::lex(2)).unwrap(), Ordering::Greater);
        assert_eq!(monomial_cmp(&a, &b, &MonomialOrder::grevlex(2)).unwrap(), Ordering::Less);
    }

    #[test]
    fn reflexive() {
        let a = m(&[1, 4, 2]);
        for ord in [MonomialOrder::lex(3), MonomialOrder::grevlex(3)] {
            assert_eq!(ord.cmp(&a, &a), Ordering::Equal);
        }
    }

    #[test]
    fn grevlex_tie_break_on_last_variable() {
        // x*z vs y^2: equal degree, last differing exponent is z: 1 vs 0 -> y^2 bigger
        let ord = MonomialOrder::grevlex(3);
        assert_eq!(ord.cmp(&m(&[1, 0, 1]), &m(&[0, 2, 0])), Ordering::Less);
        assert_eq!(ord.cmp(&m(&[1, 1, 0]), &m(&[0, 2, 0])), Ordering::Greater);
    }

    #[test]
    fn ranking_moves_variable_to_front() {
        let ord = MonomialOrder::with_ranking(OrderKind::Lex, vec![2, 0, 1]).unwrap();
        assert_eq!(ord.cmp(&m(&[0, 0, 1]), &m(&[5, 5, 0])), Ordering::Greater);
        assert!(MonomialOrder::with_ranking(OrderKind::Lex, vec![0, 0, 1]).is_err());
    }

    #[test]
    fn arity_mismatch_is_reported() {
        let err = monomial_cmp(&m(&[1]), &m(&[1, 2]), &MonomialOrder::lex(2)).unwrap_err();
        assert_eq!(err, PolyError::ArityMismatch { expected: 2, found: 1 });
    }

    #[test]
    fn divisibility_and_lcm() {
        let a = m(&[1, 2, 0]);
        let b = m(&[2, 1, 1]);
        assert!(!a.divides(&b));
        assert_eq!(a.lcm(&b), m(&[2, 2, 1]));
        assert_eq!(b.div(&m(&[1, 1, 0])), Some(m(&[1, 0, 1])));
        assert_eq!(m(&[0, 3, 0]).pure_power(), Some((1, 3)));
        assert_eq!(a.pure_power(), None);
        assert!(m(&[1, 0, 0]).is_coprime(&m(&[0, 2, 1])));
    }
}
