//! Exact sparse multivariate polynomials over a field, with lex and grevlex
//! monomial orders and multivariate division.

mod monomial;
pub(crate) mod ordered;
mod polynomial;
pub mod text;
mod univariate;

use thiserror::Error;

pub use monomial::{monomial_cmp, Monomial, MonomialOrder, OrderKind};
pub use polynomial::{Field, Polynomial};
pub use univariate::UniPoly;

use ordered::OrdPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("arity mismatch: expected {expected} variables, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("the zero polynomial has no leading monomial")]
    ZeroPolynomial,
    #[error("variable ranking is not a permutation")]
    InvalidRanking,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// Leading monomial of `f` under `ord`, with its coefficient.
pub fn leading_monomial<C: Field>(f: &Polynomial<C>, ord: &MonomialOrder) -> Result<(Monomial, C), PolyError> {
    f.leading_term(ord).map(|(m, c)| (m.clone(), c.clone()))
}

/// Remainder of `f` on multivariate division by `divisors`, in the given order.
///
/// No monomial of the result is divisible by a leading monomial of a divisor,
/// and `f - r` lies in the ideal the divisors generate.
pub fn normal_form<C: Field>(
    f: &Polynomial<C>,
    divisors: &[Polynomial<C>],
    ord: &MonomialOrder,
) -> Result<Polynomial<C>, PolyError> {
    let n = ord.arity();
    for p in std::iter::once(f).chain(divisors) {
        if p.nvars() != n {
            return Err(PolyError::ArityMismatch { expected: n, found: p.nvars() });
        }
    }
    let gs: Vec<OrdPoly<C>> = divisors
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| OrdPoly::from_poly(g, ord))
        .collect();
    let refs: Vec<&OrdPoly<C>> = gs.iter().collect();
    let r = ordered::reduce_full(&OrdPoly::from_poly(f, ord), &refs, ord);
    Ok(r.to_poly(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use proptest::prelude::*;

    fn parse(s: &str, vars: &[&str]) -> Polynomial<Rational> {
        let names: Vec<String> = vars.iter().map(|v| v.to_string()).collect();
        text::parse(s, &names).unwrap()
    }

    #[test]
    fn self_reduction_is_zero() {
        let f = parse("x^2*y - 3*y + 1/2", &["x", "y"]);
        let r = normal_form(&f, &[f.clone()], &MonomialOrder::grevlex(2)).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn substitution_remainder() {
        // x^2 - 1 mod (x - y), lex x > y  ->  y^2 - 1
        let f = parse("x^2 - 1", &["x", "y"]);
        let g = parse("x - y", &["x", "y"]);
        let r = normal_form(&f, &[g.clone()], &MonomialOrder::lex(2)).unwrap();
        assert_eq!(r, parse("y^2 - 1", &["x", "y"]));
        // oracle: (x - y)(x + y) + (y^2 - 1) re-expands to f
        let q = parse("x + y", &["x", "y"]);
        assert_eq!(&(&g * &q) + &r, f);
    }

    #[test]
    fn leading_monomial_of_constant_and_zero() {
        let c = Polynomial::constant(3, Rational::from_integer(5.into()));
        let (m, k) = leading_monomial(&c, &MonomialOrder::lex(3)).unwrap();
        assert!(m.is_one());
        assert_eq!(k, Rational::from_integer(5.into()));
        let z = Polynomial::<Rational>::zero(3);
        assert_eq!(leading_monomial(&z, &MonomialOrder::lex(3)).unwrap_err(), PolyError::ZeroPolynomial);
    }

    #[test]
    fn textbook_leading_monomials() {
        let f = parse("3*z1^2 + 2*z1*z2^3", &["z1", "z2"]);
        assert_eq!(f.leading_monomial(&MonomialOrder::lex(2)).unwrap().exps(), &[2, 0]);
        assert_eq!(f.leading_monomial(&MonomialOrder::grevlex(2)).unwrap().exps(), &[1, 3]);
    }

    #[test]
    fn arity_checked() {
        let f = parse("x", &["x"]);
        assert!(normal_form(&f, &[], &MonomialOrder::lex(2)).is_err());
    }

    fn arb_poly(nvars: usize) -> impl Strategy<Value = Polynomial<Rational>> {
        prop::collection::vec(
            (prop::collection::vec(0u32..3, nvars), -5i64..6, 1i64..4),
            0..5,
        )
        .prop_map(move |terms| {
            let mut p = Polynomial::zero(nvars);
            for (e, n, d) in terms {
                p.add_term(Monomial::new(e), Rational::new(n.into(), d.into()));
            }
            p
        })
    }

    fn arb_monomial(nvars: usize) -> impl Strategy<Value = Monomial> {
        prop::collection::vec(0u32..4, nvars).prop_map(Monomial::new)
    }

    proptest! {
        #[test]
        fn distributive(f in arb_poly(3), g in arb_poly(3), h in arb_poly(3)) {
            prop_assert_eq!(&(&f + &g) * &h, &(&f * &h) + &(&g * &h));
        }

        #[test]
        fn coefficients_stay_reduced(f in arb_poly(2), g in arb_poly(2)) {
            let prod = &(&f * &g) - &f;
            for (_, c) in prod.terms() {
                prop_assert!(!num_traits::Zero::is_zero(c));
                let reduced = Rational::new(c.numer().clone(), c.denom().clone());
                prop_assert_eq!(&reduced, c);
                prop_assert!(c.denom() > &0.into());
            }
        }

        #[test]
        fn order_axioms(a in arb_monomial(3), b in arb_monomial(3), c in arb_monomial(3), grevlex in any::<bool>()) {
            let ord = if grevlex { MonomialOrder::grevlex(3) } else { MonomialOrder::lex(3) };
            prop_assert_eq!(ord.cmp(&a, &b), ord.cmp(&b, &a).reverse());
            if ord.cmp(&a, &b).is_gt() && ord.cmp(&b, &c).is_gt() {
                prop_assert!(ord.cmp(&a, &c).is_gt());
            }
            if ord.cmp(&a, &b).is_gt() {
                prop_assert!(ord.cmp(&a.mul(&c), &b.mul(&c)).is_gt());
            }
            if ord.cmp(&a, &b).is_eq() {
                prop_assert_eq!(&a, &b);
            }
            prop_assert!(!ord.cmp(&Monomial::one(3), &a).is_gt());
        }

        #[test]
        fn normal_form_idempotent(f in arb_poly(3), g1 in arb_poly(3), g2 in arb_poly(3), grevlex in any::<bool>()) {
            let ord = if grevlex { MonomialOrder::grevlex(3) } else { MonomialOrder::lex(3) };
            let gs: Vec<_> = [g1, g2].into_iter().filter(|g| !g.is_zero()).collect();
            let r = normal_form(&f, &gs, &ord).unwrap();
            prop_assert_eq!(normal_form(&r, &gs, &ord).unwrap(), r.clone());
            for (m, _) in r.terms() {
                for g in &gs {
                    prop_assert!(!g.leading_monomial(&ord).unwrap().divides(m));
                }
            }
        }

        #[test]
        fn text_round_trip(f in arb_poly(3)) {
            let names = text::default_names(3);
            let s = text::to_text(&f, &names);
            prop_assert_eq!(text::parse::<Rational>(&s, &names).unwrap(), f);
        }
    }
}
