use std::cmp::Ordering;

use crate::polyring::ordered::{reduce_full, OrdPoly};
use crate::polyring::{Field, Monomial, MonomialOrder, Polynomial};

use super::{Budget, GroebnerBasis, GroebnerError, Ideal};

struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
}

struct State<'a, C> {
    ord: &'a MonomialOrder,
    store: Vec<OrdPoly<C>>,
    active: Vec<usize>,
    pairs: Vec<Pair>,
}

impl<C: Field> State<'_, C> {
    fn lm(&self, i: usize) -> &Monomial {
        self.store[i].lm()
    }

    fn reduce(&self, f: &OrdPoly<C>) -> OrdPoly<C> {
        let divisors: Vec<&OrdPoly<C>> = self.active.iter().map(|&i| &self.store[i]).collect();
        reduce_full(f, &divisors, self.ord)
    }

    /// Gebauer–Möller installation of a new basis element.
    fn update(&mut self, h: usize) {
        let lm_h = self.lm(h).clone();
        let cands: Vec<usize> = self.active.clone();
        let lcms: Vec<Monomial> = cands.iter().map(|&g| lm_h.lcm(self.lm(g))).collect();
        let mut kept: Vec<usize> = Vec::new();
        for idx in 0..cands.len() {
            let g1 = cands[idx];
            let coprime = lm_h.is_coprime(self.lm(g1));
            let dominated = lcms[idx + 1..].iter().any(|l| l.divides(&lcms[idx]))
                || kept.iter().any(|&k| lcms[k].divides(&lcms[idx]));
            if coprime || !dominated {
                kept.push(idx);
            }
        }
        let new_pairs: Vec<Pair> = kept
            .into_iter()
            .filter(|&idx| !lm_h.is_coprime(self.lm(cands[idx])))
            .map(|idx| Pair { i: cands[idx], j: h, lcm: lcms[idx].clone() })
            .collect();

        let store = &self.store;
        self.pairs.retain(|p| {
            let keep_lcm = |other: usize| lm_h.lcm(store[other].lm()) != p.lcm;
            !(lm_h.divides(&p.lcm) && keep_lcm(p.i) && keep_lcm(p.j))
        });
        self.pairs.extend(new_pairs);
        self.active.retain(|&g| !lm_h.divides(store[g].lm()));
        self.active.push(h);
    }

    fn pop_pair(&mut self) -> Option<Pair> {
        if self.pairs.is_empty() {
            return None;
        }
        let ord = self.ord;
        let best = (0..self.pairs.len())
            .min_by(|&a, &b| {
                let (pa, pb) = (&self.pairs[a], &self.pairs[b]);
                pa.lcm
                    .degree()
                    .cmp(&pb.lcm.degree())
                    .then_with(|| ord.cmp(&pa.lcm, &pb.lcm))
                    .then_with(|| (pa.j, pa.i).cmp(&(pb.j, pb.i)))
            })
            .unwrap();
        Some(self.pairs.swap_remove(best))
    }
}

fn unit_basis<C: Field>(nvars: usize, ord: &MonomialOrder) -> GroebnerBasis<C> {
    GroebnerBasis::from_reduced(ord.clone(), vec![Polynomial::one(nvars)])
}

/// Reduced Gröbner basis of `ideal` under `ord`, within the given resource budget.
pub fn buchberger_with<C: Field>(
    ideal: &Ideal<C>,
    ord: &MonomialOrder,
    budget: &Budget,
) -> Result<GroebnerBasis<C>, GroebnerError> {
    let n = ideal.nvars();
    if ord.arity() != n {
        return Err(GroebnerError::ArityMismatch { expected: n, found: ord.arity() });
    }
    let mut st = State { ord, store: Vec::new(), active: Vec::new(), pairs: Vec::new() };
    let mut pairs_done = 0usize;
    let mut max_deg_seen = 0u32;

    let mut inputs: Vec<OrdPoly<C>> = ideal
        .generators()
        .iter()
        .map(|g| OrdPoly::from_poly(g, ord))
        .collect();
    // smaller leading monomials first keeps the initial interreduction cheap
    inputs.sort_by(|a, b| ord.cmp(a.lm(), b.lm()));

    let mut install = |st: &mut State<C>, f: OrdPoly<C>, pairs_done: usize| -> Result<bool, GroebnerError> {
        let h = st.reduce(&f);
        if h.is_zero() {
            return Ok(false);
        }
        let h = h.monic();
        if h.lm().is_one() {
            return Ok(true);
        }
        let deg = h.total_degree();
        max_deg_seen = max_deg_seen.max(deg);
        if deg > budget.max_degree {
            return Err(GroebnerError::ResourceExceeded {
                limit: "max_degree",
                basis_len: st.active.len(),
                pairs_processed: pairs_done,
                max_degree_seen: max_deg_seen,
            });
        }
        if st.active.len() >= budget.max_basis {
            return Err(GroebnerError::ResourceExceeded {
                limit: "max_basis",
                basis_len: st.active.len(),
                pairs_processed: pairs_done,
                max_degree_seen: max_deg_seen,
            });
        }
        st.store.push(h);
        let idx = st.store.len() - 1;
        st.update(idx);
        Ok(false)
    };

    for f in inputs {
        if install(&mut st, f, 0)? {
            return Ok(unit_basis(n, ord));
        }
    }
    while let Some(pair) = st.pop_pair() {
        pairs_done += 1;
        if pairs_done > budget.max_pairs {
            return Err(GroebnerError::ResourceExceeded {
                limit: "max_pairs",
                basis_len: st.active.len(),
                pairs_processed: pairs_done,
                max_degree_seen: 0,
            });
        }
        let s = OrdPoly::s_poly(&st.store[pair.i], &st.store[pair.j], ord);
        if s.is_zero() {
            continue;
        }
        if install(&mut st, s, pairs_done)? {
            return Ok(unit_basis(n, ord));
        }
    }

    Ok(GroebnerBasis::from_reduced(ord.clone(), interreduce(&st, n)))
}

/// Minimalizes and fully reduces the active set; output sorted by descending leading monomial.
fn interreduce<C: Field>(st: &State<C>, nvars: usize) -> Vec<Polynomial<C>> {
    let ord = st.ord;
    let mut minimal: Vec<&OrdPoly<C>> = Vec::new();
    for &i in &st.active {
        let f = &st.store[i];
        let redundant = st.active.iter().any(|&j| {
            j != i && {
                let g = &st.store[j];
                g.lm().divides(f.lm()) && (g.lm() != f.lm() || j < i)
            }
        });
        if !redundant {
            minimal.push(f);
        }
    }
    let mut out: Vec<OrdPoly<C>> = Vec::with_capacity(minimal.len());
    for (k, f) in minimal.iter().enumerate() {
        let others: Vec<&OrdPoly<C>> = minimal
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .map(|(_, g)| *g)
            .collect();
        out.push(reduce_full(f, &others, ord).monic());
    }
    out.sort_by(|a, b| ord.cmp(b.lm(), a.lm()));
    out.into_iter().map(|p| p.to_poly(nvars)).collect()
}

/// Descending-by-leading-monomial sort used for canonical element order.
pub(crate) fn sort_desc<C: Field>(elems: &mut [Polynomial<C>], ord: &MonomialOrder) {
    elems.sort_by(|a, b| match (a.leading_monomial(ord), b.leading_monomial(ord)) {
        (Ok(x), Ok(y)) => ord.cmp(y, x),
        _ => Ordering::Equal,
    });
}
