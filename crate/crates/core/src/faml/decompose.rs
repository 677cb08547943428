use serde::{Deserialize, Serialize};

use crate::groebner::{self, Budget, GroebnerBasis, GroebnerError, Ideal};
use crate::polyring::MonomialOrder;
use crate::{QPolynomial, Rational};

use super::ideal::{extra_splitters, psi_splitters, Formulation};
use super::problem::FactorProblem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeafStatus {
    ZeroDim,
    PositiveDim,
    Empty,
    Budget,
}

/// A leaf of the splitting tree. `label` has one character per splitter
/// applied: `0` for the sum branch (splitter vanishes), `1` for the saturation.
#[derive(Clone, Debug)]
pub struct DecompositionNode {
    pub label: String,
    pub status: LeafStatus,
    /// Reduced grevlex basis; for zero-dimensional leaves it generates the radical.
    pub gb: Option<GroebnerBasis<Rational>>,
    pub diagnostic: Option<String>,
}

impl DecompositionNode {
    /// Reduced lex basis of a zero-dimensional or empty leaf.
    pub fn lex_basis(&self) -> Option<Result<GroebnerBasis<Rational>, GroebnerError>> {
        let gb = self.gb.as_ref()?;
        let lex = MonomialOrder::lex(gb.nvars());
        match self.status {
            LeafStatus::ZeroDim | LeafStatus::Empty => Some(groebner::fglm(gb, &lex)),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DecomposeOptions {
    pub budget: Budget,
    pub formulation: Formulation,
    /// Extra splitters are tried on a leaf whose basis has a leading monomial above this degree.
    pub extra_degree_threshold: u32,
    /// Processing order of the unique-variance splitters (a permutation of `0..p`).
    pub psi_order: Option<Vec<usize>>,
    /// Sample points requested per positive-dimensional leaf.
    pub samples: usize,
    pub seed: u64,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions {
            budget: Budget::default(),
            formulation: Formulation::Eliminated,
            extra_degree_threshold: 6,
            psi_order: None,
            samples: 3,
            seed: 0,
        }
    }
}

struct Ctx<'a> {
    psi: Vec<QPolynomial>,
    extras: Vec<QPolynomial>,
    opts: &'a DecomposeOptions,
    grevlex: MonomialOrder,
}

fn budget_node(label: String, e: GroebnerError) -> DecompositionNode {
    DecompositionNode { label, status: LeafStatus::Budget, gb: None, diagnostic: Some(e.to_string()) }
}

fn empty_leaves(label: &str, remaining: usize, gb: &GroebnerBasis<Rational>) -> Vec<DecompositionNode> {
    let mut labels = vec![label.to_string()];
    for _ in 0..remaining {
        labels = labels.into_iter().flat_map(|l| [format!("{l}0"), format!("{l}1")]).collect();
    }
    labels
        .into_iter()
        .map(|label| DecompositionNode { label, status: LeafStatus::Empty, gb: Some(gb.clone()), diagnostic: None })
        .collect()
}

fn is_complex(gb: &GroebnerBasis<Rational>, threshold: u32) -> bool {
    gb.elements()
        .iter()
        .any(|g| g.leading_monomial(gb.order()).map(|m| m.degree() > threshold).unwrap_or(false))
}

impl Ctx<'_> {
    fn gb(&self, gens: Vec<QPolynomial>, nvars: usize) -> Result<GroebnerBasis<Rational>, GroebnerError> {
        groebner::buchberger_with(&Ideal::new(nvars, gens)?, &self.grevlex, &self.opts.budget)
    }

    fn split(
        &self,
        gb: &GroebnerBasis<Rational>,
        h: &QPolynomial,
    ) -> (Result<GroebnerBasis<Rational>, GroebnerError>, Result<GroebnerBasis<Rational>, GroebnerError>) {
        let n = gb.nvars();
        rayon::join(
            || {
                let mut gens = gb.elements().to_vec();
                gens.push(h.clone());
                self.gb(gens, n)
            },
            || {
                groebner::saturate_grevlex(&gb.to_ideal(), h, &self.opts.budget)
            },
        )
    }

    fn branch(&self, gb: GroebnerBasis<Rational>, label: String, depth: usize) -> Vec<DecompositionNode> {
        let p = self.psi.len();
        if gb.is_unit() {
            if depth == 0 {
                return empty_leaves(&label, 0, &gb);
            }
            return empty_leaves(&label, p.saturating_sub(depth), &gb);
        }
        let h = if depth < p {
            &self.psi[depth]
        } else {
            let extra = depth - p;
            if extra >= self.extras.len() || !is_complex(&gb, self.opts.extra_degree_threshold) {
                return vec![self.finish(gb, label)];
            }
            &self.extras[extra]
        };
        let (left, right) = self.split(&gb, h);
        let (l0, l1) = (format!("{label}0"), format!("{label}1"));
        let (mut a, b) = rayon::join(
            || match left {
                Ok(g) => self.branch(g, l0, depth + 1),
                Err(e) => vec![budget_node(l0, e)],
            },
            || match right {
                Ok(g) => self.branch(g, l1, depth + 1),
                Err(e) => vec![budget_node(l1, e)],
            },
        );
        a.extend(b);
        a
    }

    fn finish(&self, gb: GroebnerBasis<Rational>, label: String) -> DecompositionNode {
        if !groebner::is_zero_dimensional(&gb) {
            return DecompositionNode { label, status: LeafStatus::PositiveDim, gb: Some(gb), diagnostic: None };
        }
        let radical = groebner::zero_dim_radical(&gb).and_then(|rad| {
            if rad.generators().len() > gb.elements().len() {
                groebner::buchberger_with(&rad, &self.grevlex, &self.opts.budget)
            } else {
                Ok(gb.clone())
            }
        });
        match radical {
            Ok(r) => DecompositionNode { label, status: LeafStatus::ZeroDim, gb: Some(r), diagnostic: None },
            Err(e) => budget_node(label, e),
        }
    }
}

/// Splits `V(J)` along the unique-variance polynomials (then, for multi-factor
/// problems with hard leaves, along the extra splitters). Leaves come back
/// sorted by label; their varieties cover `V(J)`.
pub fn decompose(j: &Ideal<Rational>, prob: &FactorProblem, opts: &DecomposeOptions) -> Vec<DecompositionNode> {
    let mut psi = psi_splitters(prob, opts.formulation);
    if let Some(order) = &opts.psi_order {
        psi = order.iter().map(|&i| psi[i].clone()).collect();
    }
    let ctx = Ctx {
        psi,
        extras: extra_splitters(prob, opts.formulation),
        opts,
        grevlex: MonomialOrder::grevlex(j.nvars()),
    };
    let root = match ctx.gb(j.generators().to_vec(), j.nvars()) {
        Ok(g) => g,
        Err(e) => return vec![budget_node(String::new(), e)],
    };
    let mut leaves = ctx.branch(root, String::new(), 0);
    leaves.sort_by(|a, b| a.label.cmp(&b.label));
    leaves
}
