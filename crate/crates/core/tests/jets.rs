mod common;

use approx::assert_relative_eq;
use common::central;
use nullrig::expr::Expr;
use nullrig::jet::{self, Jet};
use proptest::prelude::*;

fn eval(src: &str, p: &[f64], order: usize) -> Jet {
    Expr::parse(src, &["x", "y", "z"]).unwrap().eval(&Jet::variables(p, order))
}

const FUNCS: &[&str] = &[
    "exp(x*y) - z/(1+x^2)",
    "sin(x)*cosh(y) + sqrt(2+z^2)",
    "ln(3+x+y^2)*tan(z/4)",
    "(x^2+y^2+1)^1.5 / (2+sinh(z))",
    "x^y",
];

#[test]
fn derivatives_match_finite_differences() {
    let p = [0.7, 1.3, -0.4];
    for src in FUNCS {
        let j = eval(src, &p, 2);
        let val = |q: &[f64]| vec![eval(src, q, 0).value()];
        let grad = |q: &[f64]| eval(src, q, 1).gradient();
        for k in 0..3 {
            let fd = central(val, &p, k, 1e-3)[0];
            assert_relative_eq!(j.partial(&[k]), fd, epsilon = 1e-9, max_relative = 1e-9);
            let fd2 = central(grad, &p, k, 1e-3);
            for (l, d) in fd2.iter().enumerate() {
                assert_relative_eq!(j.partial(&[k, l]), d, epsilon = 1e-8, max_relative = 1e-8);
            }
        }
    }
}

#[test]
fn layout_sizes_follow_binomials() {
    // number of monomials of degree <= d in n variables is C(n+d, d)
    assert_eq!(jet::layout(3, 2).len(), 10);
    assert_eq!(jet::layout(4, 3).len(), 35);
    assert_eq!(jet::layout(2, 0).len(), 1);
}

#[test]
fn compose_chains_expansions() {
    // f(a) = exp(a) expanded at a0 = x0*y0, then a = x*y substituted back
    let p = [0.4, 0.9];
    let v = Jet::variables(&p, 3);
    let a = &v[0] * &v[1];
    let f = Jet::variables(&[a.value()], 3)[0].exp();
    let composed = f.compose(std::slice::from_ref(&a));
    let direct = a.exp();
    for (x, y) in composed.coeffs().iter().zip(direct.coeffs()) {
        assert_relative_eq!(x, y, epsilon = 1e-13);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_and_quotient_rules(x in -2.0f64..2.0, y in -2.0f64..2.0, a in 0.5f64..3.0) {
        let v = Jet::variables(&[x, y], 2);
        let f = &v[0].sin() + a;
        let g = &v[1].cosh() * &v[0];
        let prod = &f * &g;
        for k in 0..2 {
            let expect = f.partial(&[k]) * g.value() + f.value() * g.partial(&[k]);
            prop_assert!((prod.partial(&[k]) - expect).abs() < 1e-12 * (1.0 + expect.abs()));
        }
        let q = &prod / &f;
        for (c1, c2) in q.coeffs().iter().zip(g.coeffs()) {
            prop_assert!((c1 - c2).abs() < 1e-11 * (1.0 + c2.abs()));
        }
    }

    #[test]
    fn exp_ln_and_sqrt_invert(x in 0.1f64..4.0, y in -1.0f64..1.0) {
        let v = Jet::variables(&[x, y], 3);
        let s = &(&v[0] * &v[0]) + &v[1].exp();
        let back = s.ln().exp();
        for (c1, c2) in back.coeffs().iter().zip(s.coeffs()) {
            prop_assert!((c1 - c2).abs() < 1e-10 * (1.0 + c2.abs()));
        }
        let r = s.sqrt();
        let sq = &r * &r;
        for (c1, c2) in sq.coeffs().iter().zip(s.coeffs()) {
            prop_assert!((c1 - c2).abs() < 1e-10 * (1.0 + c2.abs()));
        }
    }

    #[test]
    fn linear_solve_inverts_products(a in 1.0f64..3.0, b in -0.5f64..0.5, c in 1.0f64..3.0, x in -1.0f64..1.0) {
        let v = Jet::variables(&[x], 2);
        let m = vec![&v[0] + a, Jet::constant(b), Jet::constant(b), v[0].exp() + c];
        let rhs = vec![v[0].sin(), &v[0] * 2.0];
        let sol = jet::solve(&m, &rhs).unwrap();
        let back0 = &(&m[0] * &sol[0]) + &(&m[1] * &sol[1]);
        let back1 = &(&m[2] * &sol[0]) + &(&m[3] * &sol[1]);
        for (r, b) in [(&rhs[0], back0), (&rhs[1], back1)] {
            for (c1, c2) in r.coeffs().iter().zip(b.coeffs()) {
                prop_assert!((c1 - c2).abs() < 1e-11);
            }
        }
    }
}
