//! Independent oracles for the jet evaluator: high-order central finite
//! differences for smooth expressions, and exact monomial calculus for
//! random polynomials. Finite differences live only here, never in the
//! library.

use metallic_core::{eval_jet2, parse, Expr};
use proptest::prelude::*;

fn names(coords: &[&str]) -> Vec<String> {
    coords.iter().map(|c| c.to_string()).collect()
}

fn eval(e: &Expr, coords: &[String], p: &[f64]) -> f64 {
    metallic_core::eval_value(e, coords, p).unwrap()
}

/// Fourth-order central first derivative.
fn fd_grad(e: &Expr, coords: &[String], p: &[f64], i: usize, h: f64) -> f64 {
    let shift = |d: f64| {
        let mut q = p.to_vec();
        q[i] += d;
        eval(e, coords, &q)
    };
    (8.0 * (shift(h) - shift(-h)) - (shift(2.0 * h) - shift(-2.0 * h))) / (12.0 * h)
}

/// Fourth-order central second derivative (diagonal) and nested first
/// derivatives (mixed).
fn fd_hess(e: &Expr, coords: &[String], p: &[f64], i: usize, j: usize, h: f64) -> f64 {
    if i == j {
        let shift = |d: f64| {
            let mut q = p.to_vec();
            q[i] += d;
            eval(e, coords, &q)
        };
        (-shift(2.0 * h) + 16.0 * shift(h) - 30.0 * shift(0.0) + 16.0 * shift(-h)
            - shift(-2.0 * h))
            / (12.0 * h * h)
    } else {
        let grad_at = |d: f64| {
            let mut q = p.to_vec();
            q[j] += d;
            fd_grad(e, coords, &q, i, h)
        };
        (8.0 * (grad_at(h) - grad_at(-h)) - (grad_at(2.0 * h) - grad_at(-2.0 * h))) / (12.0 * h)
    }
}

#[test]
fn jets_match_finite_differences_on_smooth_corpus() {
    let corpus: [(&str, &[&str], &[f64]); 8] = [
        ("cosh(t)", &["t"], &[0.7]),
        ("exp(t) * sin(t)", &["t"], &[0.35]),
        ("sqrt(1 + x^2 + y^2)", &["x", "y"], &[0.4, -0.8]),
        ("log(2 + sin(x * y))", &["x", "y"], &[0.9, 0.3]),
        ("tanh(x - y^2)", &["x", "y"], &[-0.2, 0.55]),
        ("x / (1 + y^2)", &["x", "y"], &[1.1, -0.4]),
        ("sinh(x) * cos(y) + x^3 * y", &["x", "y"], &[0.25, 0.85]),
        ("exp(-(x^2 + y^2) / 2)", &["x", "y"], &[0.6, -0.3]),
    ];
    for (text, coords, point) in corpus {
        let coords = names(coords);
        let e = parse(text, &coords).unwrap();
        let jet = eval_jet2(&e, &coords, point).unwrap();
        let h = 1e-2;
        let scale = 1.0 + jet.value().abs();
        for i in 0..coords.len() {
            let fd = fd_grad(&e, &coords, point, i, h);
            assert!(
                (jet.gradient()[i] - fd).abs() <= 2e-7 * scale,
                "{text}: d/d{} jet {} vs fd {}",
                coords[i],
                jet.gradient()[i],
                fd
            );
            for j in i..coords.len() {
                let fd = fd_hess(&e, &coords, point, i, j, h);
                assert!(
                    (jet.hess(i, j) - fd).abs() <= 5e-6 * scale,
                    "{text}: d2/d{}d{} jet {} vs fd {}",
                    coords[i],
                    coords[j],
                    jet.hess(i, j),
                    fd
                );
            }
        }
    }
}

#[test]
fn cosh_jet_against_finite_differences_tightly() {
    let coords = names(&["t"]);
    let e = parse("cosh(t)", &coords).unwrap();
    let t = 0.7;
    let jet = eval_jet2(&e, &coords, &[t]).unwrap();
    // Closed forms to machine precision.
    assert!((jet.value() - t.cosh()).abs() <= 1e-14 * t.cosh());
    assert!((jet.gradient()[0] - t.sinh()).abs() <= 1e-14 * t.sinh());
    assert!((jet.hess(0, 0) - t.cosh()).abs() <= 1e-14 * t.cosh());
    // Independent finite-difference confirmation at its own accuracy.
    assert!((fd_grad(&e, &coords, &[t], 0, 1e-2) - t.sinh()).abs() <= 1e-8);
    assert!((fd_hess(&e, &coords, &[t], 0, 0, 1e-2) - t.cosh()).abs() <= 1e-7);
}

/// A polynomial as a list of monomials: coefficient and one exponent per
/// variable. Value, gradient, and Hessian follow from monomial calculus with
/// exact small-integer arithmetic.
#[derive(Debug, Clone)]
struct Poly {
    dim: usize,
    monomials: Vec<(f64, Vec<u32>)>,
}

impl Poly {
    fn text(&self) -> String {
        if self.monomials.is_empty() {
            return "0".to_string();
        }
        self.monomials
            .iter()
            .map(|(c, exps)| {
                let mut parts = vec![format!("{c}")];
                for (k, e) in exps.iter().enumerate() {
                    for _ in 0..*e {
                        parts.push(format!("x{}", k + 1));
                    }
                }
                parts.join(" * ")
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    fn value(&self, p: &[f64]) -> f64 {
        self.monomials
            .iter()
            .map(|(c, exps)| {
                c * exps
                    .iter()
                    .enumerate()
                    .map(|(k, e)| p[k].powi(*e as i32))
                    .product::<f64>()
            })
            .sum()
    }

    fn derivative(&self, var: usize) -> Poly {
        let monomials = self
            .monomials
            .iter()
            .filter(|(_, exps)| exps[var] > 0)
            .map(|(c, exps)| {
                let mut exps = exps.clone();
                let e = exps[var];
                exps[var] -= 1;
                (c * e as f64, exps)
            })
            .collect();
        Poly {
            dim: self.dim,
            monomials,
        }
    }
}

fn poly_strategy() -> impl Strategy<Value = (Poly, Vec<f64>)> {
    (1usize..=4)
        .prop_flat_map(|dim| {
            let monomial = (
                (-4i32..=4).prop_map(|c| c as f64),
                prop::collection::vec(0u32..=4, dim).prop_filter("degree <= 4", |exps| {
                    exps.iter().sum::<u32>() <= 4
                }),
            );
            (
                Just(dim),
                prop::collection::vec(monomial, 1..=6),
                prop::collection::vec(-1.5f64..1.5, dim),
            )
        })
        .prop_map(|(dim, monomials, point)| (Poly { dim, monomials }, point))
}

proptest! {
    /// Jets of random degree-≤4 polynomials agree with exact monomial
    /// calculus.
    #[test]
    fn polynomial_jets_match_monomial_calculus((poly, point) in poly_strategy()) {
        let coords: Vec<String> = (0..poly.dim).map(|k| format!("x{}", k + 1)).collect();
        let expr = parse(&poly.text(), &coords).unwrap();
        let jet = eval_jet2(&expr, &coords, &point).unwrap();

        let close = |a: f64, b: f64| (a - b).abs() <= 1e-13 * (1.0 + b.abs());
        prop_assert!(close(jet.value(), poly.value(&point)));
        for i in 0..poly.dim {
            let di = poly.derivative(i);
            prop_assert!(close(jet.gradient()[i], di.value(&point)));
            for j in i..poly.dim {
                prop_assert!(close(jet.hess(i, j), di.derivative(j).value(&point)));
            }
        }
    }

    /// Jets of f ∘ g equal the composition of the separate jets.
    #[test]
    fn chain_rule_composes_jets(
        outer_index in 0usize..5,
        (poly, point) in poly_strategy(),
    ) {
        let outer_texts = ["sin(u)", "exp(u / 4)", "u^3 + u", "tanh(u)", "cosh(u / 2)"];
        let u = ["u".to_string()];
        let outer = parse(outer_texts[outer_index], &u).unwrap();

        let coords: Vec<String> = (0..poly.dim).map(|k| format!("x{}", k + 1)).collect();
        let inner = parse(&poly.text(), &coords).unwrap();

        let composed = outer.substitute(&[("u".to_string(), inner.clone())]);
        let jet = eval_jet2(&composed, &coords, &point).unwrap();

        let gj = eval_jet2(&inner, &coords, &point).unwrap();
        let fj = eval_jet2(&outer, &u, &[gj.value()]).unwrap();
        let (f1, f2) = (fj.gradient()[0], fj.hess(0, 0));

        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + b.abs());
        prop_assert!(close(jet.value(), fj.value()));
        for i in 0..poly.dim {
            prop_assert!(close(jet.gradient()[i], f1 * gj.gradient()[i]));
            for j in i..poly.dim {
                let expected = f1 * gj.hess(i, j) + f2 * gj.gradient()[i] * gj.gradient()[j];
                prop_assert!(close(jet.hess(i, j), expected));
            }
        }
    }
}
