//! Gröbner bases: Buchberger with Gebauer–Möller pair pruning, saturation,
//! zero-dimensionality, FGLM order change and radicals of 0-dim ideals.

mod buchberger;
mod quotient;

use std::fmt::Display;
use std::str::FromStr;

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polyring::{text, Field, MonomialOrder, OrderKind, PolyError, Polynomial};

pub use buchberger::buchberger_with;
pub use quotient::{fglm, zero_dim_radical, QuotientRing};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroebnerError {
    #[error("resource budget exceeded ({limit}): basis size {basis_len}, {pairs_processed} pairs processed, max degree {max_degree_seen}")]
    ResourceExceeded {
        limit: &'static str,
        basis_len: usize,
        pairs_processed: usize,
        max_degree_seen: u32,
    },
    #[error("ideal is not zero-dimensional")]
    NotZeroDimensional,
    #[error("arity mismatch: expected {expected} variables, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Limits on a Buchberger run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_basis: usize,
    pub max_degree: u32,
    pub max_pairs: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_basis: 5000, max_degree: 60, max_pairs: 2_000_000 }
    }
}

/// Finite generating set in a fixed polynomial ring.
#[derive(Clone, Debug, PartialEq)]
pub struct Ideal<C> {
    nvars: usize,
    generators: Vec<Polynomial<C>>,
}

impl<C: Field> Ideal<C> {
    /// Zero generators are dropped.
    pub fn new(nvars: usize, generators: Vec<Polynomial<C>>) -> Result<Self, GroebnerError> {
        for g in &generators {
            if g.nvars() != nvars {
                return Err(GroebnerError::ArityMismatch { expected: nvars, found: g.nvars() });
            }
        }
        Ok(Ideal { nvars, generators: generators.into_iter().filter(|g| !g.is_zero()).collect() })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn generators(&self) -> &[Polynomial<C>] {
        &self.generators
    }

    pub fn is_unit_obviously(&self) -> bool {
        self.generators.iter().any(|g| g.is_constant())
    }
}

/// Whether the variety of a basis is finite; unknown when the basis is not reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroDim {
    Yes,
    No,
    Unknown,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroebnerBasis<C> {
    order: MonomialOrder,
    elements: Vec<Polynomial<C>>,
    reduced: bool,
    zero_dimensional: ZeroDim,
}

impl<C: Field> GroebnerBasis<C> {
    /// Wraps a basis already known to be reduced; sorts it into canonical order.
    pub(crate) fn from_reduced(order: MonomialOrder, mut elements: Vec<Polynomial<C>>) -> Self {
        buchberger::sort_desc(&mut elements, &order);
        let zd = if zero_dim_of(&elements, &order) { ZeroDim::Yes } else { ZeroDim::No };
        GroebnerBasis { order, elements, reduced: true, zero_dimensional: zd }
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn elements(&self) -> &[Polynomial<C>] {
        &self.elements
    }

    pub fn nvars(&self) -> usize {
        self.order.arity()
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn zero_dimensional(&self) -> ZeroDim {
        self.zero_dimensional
    }

    /// The basis is `{1}`: the variety is empty.
    pub fn is_unit(&self) -> bool {
        self.elements.len() == 1 && self.elements[0].is_constant()
    }

    pub fn to_ideal(&self) -> Ideal<C> {
        Ideal { nvars: self.nvars(), generators: self.elements.clone() }
    }

    pub fn normal_form(&self, f: &Polynomial<C>) -> Result<Polynomial<C>, GroebnerError> {
        Ok(crate::polyring::normal_form(f, &self.elements, &self.order)?)
    }

    pub fn contains(&self, f: &Polynomial<C>) -> Result<bool, GroebnerError> {
        Ok(self.normal_form(f)?.is_zero())
    }

    /// Krull dimension, from the largest set of variables no leading monomial lives in.
    pub fn dimension(&self) -> Option<usize> {
        if self.is_unit() {
            return None;
        }
        let n = self.nvars();
        let supports: Vec<u64> = self
            .elements
            .iter()
            .map(|g| {
                let lm = g.leading_monomial(&self.order).expect("nonzero");
                lm.exps().iter().enumerate().filter(|(_, &e)| e > 0).fold(0u64, |acc, (i, _)| acc | 1 << i)
            })
            .collect();
        assert!(n < 64, "dimension test limited to 63 variables");
        let mut best = 0;
        for set in 0u64..(1u64 << n) {
            let size = set.count_ones() as usize;
            if size > best && supports.iter().all(|&s| s & !set != 0) {
                best = size;
            }
        }
        Some(best)
    }

    /// A largest independent variable set (see [`dimension`](Self::dimension)).
    pub fn independent_variables(&self) -> Vec<usize> {
        let n = self.nvars();
        let supports: Vec<u64> = self
            .elements
            .iter()
            .map(|g| {
                let lm = g.leading_monomial(&self.order).expect("nonzero");
                lm.exps().iter().enumerate().filter(|(_, &e)| e > 0).fold(0u64, |acc, (i, _)| acc | 1 << i)
            })
            .collect();
        let mut best = 0u64;
        for set in 0u64..(1u64 << n) {
            if set.count_ones() > best.count_ones() && supports.iter().all(|&s| s & !set != 0) {
                best = set;
            }
        }
        (0..n).filter(|i| best & (1 << i) != 0).collect()
    }
}

fn zero_dim_of<C: Field>(elements: &[Polynomial<C>], ord: &MonomialOrder) -> bool {
    let n = ord.arity();
    let mut seen = vec![false; n];
    for g in elements {
        let lm = match g.leading_monomial(ord) {
            Ok(m) => m,
            Err(_) => continue,
        };
        if lm.is_one() {
            return true;
        }
        if let Some((v, _)) = lm.pure_power() {
            seen[v] = true;
        }
    }
    seen.into_iter().all(|s| s)
}

/// Reduced Gröbner basis under the default budget.
pub fn buchberger<C: Field>(ideal: &Ideal<C>, ord: &MonomialOrder) -> Result<GroebnerBasis<C>, GroebnerError> {
    buchberger_with(ideal, ord, &Budget::default())
}

pub fn ideal_sum<C: Field>(a: &Ideal<C>, b: &Ideal<C>) -> Result<Ideal<C>, GroebnerError> {
    if a.nvars != b.nvars {
        return Err(GroebnerError::ArityMismatch { expected: a.nvars, found: b.nvars });
    }
    let mut gens = a.generators.clone();
    gens.extend(b.generators.iter().cloned());
    Ideal::new(a.nvars, gens)
}

/// `I : h^∞`, by eliminating an auxiliary `y` from `I + <1 - y h>` under lex
/// with `y` ranked highest. The result is a lex basis in the original ring.
pub fn saturate_with<C: Field>(
    ideal: &Ideal<C>,
    h: &Polynomial<C>,
    budget: &Budget,
) -> Result<GroebnerBasis<C>, GroebnerError> {
    saturate_by(ideal, h, budget, OrderKind::Lex)
}

/// Saturation through a block order (`y` first, grevlex on the rest); the
/// result is the reduced grevlex basis of `I : h^inf`. Much cheaper than the
/// lex route once the generators have degree above two or three.
pub fn saturate_grevlex<C: Field>(
    ideal: &Ideal<C>,
    h: &Polynomial<C>,
    budget: &Budget,
) -> Result<GroebnerBasis<C>, GroebnerError> {
    saturate_by(ideal, h, budget, OrderKind::Elim)
}

fn saturate_by<C: Field>(
    ideal: &Ideal<C>,
    h: &Polynomial<C>,
    budget: &Budget,
    kind: OrderKind,
) -> Result<GroebnerBasis<C>, GroebnerError> {
    let n = ideal.nvars;
    if h.nvars() != n {
        return Err(GroebnerError::ArityMismatch { expected: n, found: h.nvars() });
    }
    let mut gens: Vec<Polynomial<C>> = ideal.generators.iter().map(|g| g.extend_vars(1)).collect();
    let y = Polynomial::var(n + 1, n);
    gens.push(&Polynomial::one(n + 1) - &(&y * &h.extend_vars(1)));
    let mut perm = vec![n];
    perm.extend(0..n);
    let ord = MonomialOrder::with_ranking(kind, perm)?;
    let gb = buchberger_with(&Ideal::new(n + 1, gens)?, &ord, budget)?;
    let kept: Vec<Polynomial<C>> = gb.elements.iter().filter_map(|g| g.truncate_vars(n)).collect();
    let target = match kind {
        OrderKind::Lex => MonomialOrder::lex(n),
        _ => MonomialOrder::grevlex(n),
    };
    Ok(GroebnerBasis::from_reduced(target, kept))
}

pub fn saturate<C: Field>(ideal: &Ideal<C>, h: &Polynomial<C>) -> Result<Ideal<C>, GroebnerError> {
    Ok(saturate_with(ideal, h, &Budget::default())?.to_ideal())
}

pub fn is_zero_dimensional<C: Field>(g: &GroebnerBasis<C>) -> bool {
    zero_dim_of(&g.elements, &g.order)
}

/// Serialized ideal: generator strings over named variables, plus an order tag.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealJson {
    pub vars: Vec<String>,
    pub order: OrderKind,
    pub generators: Vec<String>,
}

impl IdealJson {
    pub fn from_basis<C>(g: &GroebnerBasis<C>, vars: &[String]) -> Self
    where
        C: Field + Display + Signed,
    {
        IdealJson {
            vars: vars.to_vec(),
            order: g.order.kind(),
            generators: g.elements.iter().map(|p| text::to_text(p, vars)).collect(),
        }
    }

    pub fn from_ideal<C>(i: &Ideal<C>, vars: &[String], order: OrderKind) -> Self
    where
        C: Field + Display + Signed,
    {
        IdealJson {
            vars: vars.to_vec(),
            order,
            generators: i.generators.iter().map(|p| text::to_text(p, vars)).collect(),
        }
    }

    pub fn to_ideal<C: Field + FromStr>(&self) -> Result<Ideal<C>, GroebnerError> {
        let gens = self
            .generators
            .iter()
            .map(|s| text::parse(s, &self.vars))
            .collect::<Result<Vec<_>, _>>()?;
        Ideal::new(self.vars.len(), gens)
    }

    /// The order tag over the listed variables (identity ranking).
    pub fn monomial_order(&self) -> MonomialOrder {
        MonomialOrder::new(self.order, self.vars.len())
    }
}
