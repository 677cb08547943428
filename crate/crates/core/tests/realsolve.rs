mod common;

use std::collections::BTreeMap;

use common::{parse, q};
use exact_fa::groebner::{buchberger, Budget, Ideal};
use exact_fa::polyring::{text, MonomialOrder, UniPoly};
use exact_fa::realsolve::{
    isolate_real_roots, isolate_real_roots_to, slice_positive_dimensional, solve_triangular, SolveError,
};
use exact_fa::{QPolynomial, Rational};
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const XY: [&str; 2] = ["x", "y"];

fn lex_basis(gens: &[QPolynomial], n: usize) -> exact_fa::groebner::GroebnerBasis<Rational> {
    exact_fa::groebner::buchberger_with(&Ideal::new(n, gens.to_vec()).unwrap(), &MonomialOrder::lex(n), &Budget::default())
        .unwrap()
}

fn leaf(label: &str) -> Vec<QPolynomial> {
    #[derive(serde::Deserialize)]
    struct Fx {
        vars: Vec<String>,
        leaves: BTreeMap<String, Vec<String>>,
    }
    let fx: Fx = serde_json::from_str(include_str!("fixtures/heywood_lex_bases.json")).unwrap();
    fx.leaves[label].iter().map(|s| text::parse(s, &fx.vars).unwrap()).collect()
}

fn exact_points(pts: &[exact_fa::realsolve::RealPoint]) -> Vec<Vec<Rational>> {
    let mut v: Vec<Vec<Rational>> = pts
        .iter()
        .map(|p| (0..p.coords.len()).map(|i| p.exact(i).expect("rational coordinate").clone()).collect())
        .collect();
    v.sort();
    v
}

#[test]
fn cubic_with_one_real_root() {
    // l^3 + 5/27 l = l (l^2 + 5/27)
    let f = UniPoly::new(vec![q(0, 1), q(5, 27), q(0, 1), q(1, 1)]);
    let roots = isolate_real_roots(&f).unwrap();
    assert_eq!(roots.len(), 1);
    assert!(roots[0].lower <= q(0, 1) && q(0, 1) <= roots[0].upper);
}

#[test]
fn quadratic_roots_are_plus_minus_a_third() {
    let f = UniPoly::new(vec![q(-1, 9), q(0, 1), q(1, 1)]);
    let roots = isolate_real_roots(&f).unwrap();
    assert_eq!(roots.len(), 2);
    for (r, want) in roots.iter().zip([q(-1, 3), q(1, 3)]) {
        assert!(r.lower <= want && want <= r.upper);
        assert!(r.width() <= exact_fa::realsolve::default_width());
    }
}

#[test]
fn no_real_roots_and_zero_polynomial() {
    let f = UniPoly::new(vec![q(1, 1), q(0, 1), q(1, 1)]);
    assert!(isolate_real_roots(&f).unwrap().is_empty());
    assert_eq!(isolate_real_roots(&UniPoly::zero()).unwrap_err(), SolveError::ZeroPolynomial);
}

#[test]
fn repeated_roots_are_counted_once() {
    // (x - 1)^2 (x + 2)
    let f = UniPoly::linear_root(q(1, 1)).mul(&UniPoly::linear_root(q(1, 1))).mul(&UniPoly::linear_root(q(-2, 1)));
    let roots = isolate_real_roots(&f).unwrap();
    assert_eq!(roots.len(), 2);
}

#[test]
fn isolating_intervals_hold_one_sign_change() {
    let f = UniPoly::new(vec![q(-2, 1), q(0, 1), q(1, 1)]);
    let w = q(1, 1_000_000);
    for r in isolate_real_roots_to(&f, &w).unwrap() {
        assert!(r.width() <= w);
        assert!(!r.is_exact());
        let (a, b) = (f.eval(&r.lower), f.eval(&r.upper));
        assert!(!a.is_zero() && !b.is_zero());
        assert!((a < q(0, 1)) != (b < q(0, 1)));
    }
}

#[test]
fn coupled_sign_leaf() {
    let pts = solve_triangular(&lex_basis(&leaf("011"), 6)).unwrap();
    let want = vec![
        vec![q(0, 1), q(3, 4), q(8, 9), q(-1, 1), q(-1, 2), q(-1, 3)],
        vec![q(0, 1), q(3, 4), q(8, 9), q(1, 1), q(1, 2), q(1, 3)],
    ];
    assert_eq!(exact_points(&pts), want);
}

#[test]
fn interior_leaf_single_point() {
    let pts = solve_triangular(&lex_basis(&leaf("111"), 6)).unwrap();
    assert_eq!(exact_points(&pts), vec![vec![q(1, 1), q(1, 1), q(1, 1), q(0, 1), q(0, 1), q(0, 1)]]);
}

#[test]
fn diagonal_pair() {
    let g = lex_basis(&[parse("x - y", &XY), parse("y^2 - 1", &XY)], 2);
    let pts = solve_triangular(&g).unwrap();
    assert_eq!(exact_points(&pts), vec![vec![q(-1, 1), q(-1, 1)], vec![q(1, 1), q(1, 1)]]);
}

#[test]
fn irrational_points_meet_residual_bound() {
    let gens = [parse("x^2 + y^2 - 3", &XY), parse("x*y - 1", &XY)];
    let g = lex_basis(&gens, 2);
    let pts = solve_triangular(&g).unwrap();
    assert_eq!(pts.len(), 4);
    for p in &pts {
        let x = p.approx();
        for f in &gens {
            assert!(common::eval(f, &x).abs() < 1e-10);
        }
        assert!(p.residual_bound < q(1, 10_000_000_000));
    }
}

#[test]
fn slicing_a_line() {
    let g = buchberger(&Ideal::new(2, vec![parse("x - y", &XY)]).unwrap(), &MonomialOrder::grevlex(2)).unwrap();
    let pts = slice_positive_dimensional(&g, 3, 11).unwrap();
    assert_eq!(pts.len(), 3);
    for p in &pts {
        assert!(p.sample_only);
        assert_eq!(p.coords[0], p.coords[1]);
        assert!(p.residual_bound.is_zero());
    }
}

#[test]
fn slicing_a_real_point_variety() {
    // x^2 + y^2 has only the origin over the reals; either outcome is fine,
    // but nothing off the variety may come back
    let f = parse("x^2 + y^2", &XY);
    let g = buchberger(&Ideal::new(2, vec![f.clone()]).unwrap(), &MonomialOrder::grevlex(2)).unwrap();
    match slice_positive_dimensional(&g, 3, 5) {
        Ok(pts) => {
            for p in pts {
                assert!(common::eval(&f, &p.approx()).abs() < 1e-10);
            }
        }
        Err(e) => assert_eq!(e, SolveError::EmptySample),
    }
}

#[test]
fn slicing_rejects_unit_ideal() {
    let g = buchberger(&Ideal::new(2, vec![QPolynomial::one(2)]).unwrap(), &MonomialOrder::grevlex(2)).unwrap();
    assert!(matches!(slice_positive_dimensional(&g, 3, 0), Err(SolveError::Precondition(_))));
}

#[test]
fn point_json_has_exact_fields() {
    let g = lex_basis(&[parse("x - 1/2", &XY), parse("y^2 - 2", &XY)], 2);
    let pts = solve_triangular(&g).unwrap();
    let js = serde_json::to_value(pts[0].to_json(12)).unwrap();
    let s = js.to_string();
    assert!(s.contains("1/2"), "{s}");
    assert!(s.contains("0.5"), "{s}");
}

/// Real points of a square two-variable system by dense grid search with
/// Newton refinement from every grid node. Newton is only linear at the
/// multiple points these systems can have, so clusters within 1e-3 merge.
fn brute_force_count(gens: &[QPolynomial]) -> usize {
    let f64_poly = |p: &QPolynomial| -> Vec<(i32, i32, f64)> {
        p.terms()
            .map(|(m, c)| (m.exp(0) as i32, m.exp(1) as i32, exact_fa::realsolve::rational_to_f64(c)))
            .collect()
    };
    let ev = |t: &[(i32, i32, f64)], x: f64, y: f64| t.iter().map(|&(a, b, c)| c * x.powi(a) * y.powi(b)).sum::<f64>();
    let f: Vec<_> = gens.iter().map(f64_poly).collect();
    let fx: Vec<_> = gens.iter().map(|g| f64_poly(&g.derivative(0))).collect();
    let fy: Vec<_> = gens.iter().map(|g| f64_poly(&g.derivative(1))).collect();
    let mut found: Vec<(f64, f64)> = Vec::new();
    let steps = 120;
    let (lo, hi) = (-6.0, 6.0);
    let h = (hi - lo) / steps as f64;
    for i in 0..=steps {
        for j in 0..=steps {
            let (mut x, mut y) = (lo + i as f64 * h + 1e-3, lo + j as f64 * h - 2e-3);
            for _ in 0..40 {
                let (f0, f1) = (ev(&f[0], x, y), ev(&f[1], x, y));
                let (a, b, c, d) = (ev(&fx[0], x, y), ev(&fy[0], x, y), ev(&fx[1], x, y), ev(&fy[1], x, y));
                let det = a * d - b * c;
                if det.abs() < 1e-14 {
                    break;
                }
                x -= (f0 * d - f1 * b) / det;
                y -= (a * f1 - c * f0) / det;
                if !(x.is_finite() && y.is_finite()) || x.abs() > 100.0 || y.abs() > 100.0 {
                    break;
                }
            }
            let r = ev(&f[0], x, y).abs() + ev(&f[1], x, y).abs();
            if r < 1e-10 && !found.iter().any(|&(a, b)| (a - x).abs() + (b - y).abs() < 1e-3) {
                found.push((x, y));
            }
        }
    }
    found.len()
}

#[test]
fn point_counts_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut done = 0;
    while done < 6 {
        // two products of linear factors: real, simple, well separated intersections
        let lin = |rng: &mut ChaCha8Rng| {
            let mut p = QPolynomial::constant(2, q(rng.gen_range(-3..=3), 1));
            p.add_term(exact_fa::polyring::Monomial::var(2, 0, 1), q(rng.gen_range(1..=3), 1));
            p.add_term(exact_fa::polyring::Monomial::var(2, 1, 1), q(rng.gen_range(-3..=3), 1));
            p
        };
        let f = &lin(&mut rng) * &lin(&mut rng);
        let g = &lin(&mut rng) * &lin(&mut rng);
        let gens = vec![f, g];
        let gb = lex_basis(&gens, 2);
        if !exact_fa::groebner::is_zero_dimensional(&gb) || gb.is_unit() {
            continue;
        }
        let pts = solve_triangular(&gb).unwrap();
        assert_eq!(pts.len(), brute_force_count(&gens));
        done += 1;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn root_counts_match_grid_sign_changes(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, real) = common::random_univariate(&mut rng);
        let roots = isolate_real_roots(&p).unwrap();
        prop_assert_eq!(roots.len(), real);
        prop_assert_eq!(common::grid_sign_changes(&p, -4.37, 4.41, 20_000), real);
    }
}
