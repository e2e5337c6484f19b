use proptest::prelude::*;

use pndp::pndp::{suspend, SuspensionDim};
use pndp::symexpr::{Binding, Expr, Func, Node, Rational};

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-4i64..=4, 1i64..=3).prop_map(|(n, d)| Expr::from_node(Node::Const(Rational::new(n.into(), d.into())))),
        prop_oneof![Just("x"), Just("y")].prop_map(|s| Expr::from_node(Node::Sym(s.into()))),
    ]
}

/// Raw trees, built without the canonicalizing constructors, like parser
/// output.
fn tree() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 3, |inner| {
        let func = prop_oneof![
            Just(Func::Exp),
            Just(Func::Ln),
            Just(Func::Sin),
            Just(Func::Cos),
            Just(Func::Sqrt),
            Just(Func::Abs)
        ];
        prop_oneof![
            prop::collection::vec(inner.clone(), 1..4).prop_map(|v| Expr::from_node(Node::Add(v))),
            prop::collection::vec(inner.clone(), 1..4).prop_map(|v| Expr::from_node(Node::Mul(v))),
            (inner.clone(), -2i64..=3).prop_map(|(b, k)| Expr::from_node(Node::Pow(b, Expr::int(k)))),
            inner.clone().prop_map(|a| Expr::from_node(Node::Neg(a))),
            (func, inner).prop_map(|(f, a)| Expr::from_node(Node::Call(f, a))),
        ]
    })
}

fn point() -> impl Strategy<Value = Binding> {
    (0.2f64..2.0, 0.2f64..2.0).prop_map(|(x, y)| Binding::new().with("x", x).with("y", y))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn simplify_preserves_value(e in tree(), p in point()) {
        if let Ok(v) = e.evaluate(&p) {
            if v.is_finite() && v.abs() < 1e8 {
                let s = e.simplify();
                let w = s.evaluate(&p);
                prop_assert!(matches!(w, Ok(w) if close(v, w, 1e-9)), "{} -> {}: {} vs {:?}", e, s, v, w);
            }
        }
    }

    #[test]
    fn simplify_is_idempotent(e in tree()) {
        let s = e.simplify();
        prop_assert_eq!(s.simplify(), s);
    }

    #[test]
    fn print_parse_round_trip(e in tree()) {
        let text = e.to_string();
        let back = Expr::parse(&text).unwrap();
        prop_assert_eq!(&back, &e);
        prop_assert_eq!(back.to_string(), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn derivative_matches_central_difference(e in tree(), p in point()) {
        let h = 1e-5;
        let x = p.get("x").unwrap();
        let at = |v: f64| e.evaluate(&p.clone().with("x", v));
        let d = e.differentiate("x");
        if let (Ok(a), Ok(b), Ok(c), Ok(dv)) = (at(x + h), at(x - h), at(x), d.evaluate(&p)) {
            let fd = (a - b) / (2.0 * h);
            // stay away from kinks, branch points and steep regions
            let curv = (a - 2.0 * c + b).abs() / (h * h);
            if fd.is_finite() && curv < 1e3 && c.abs() < 1e3 && !e.to_string().contains("abs") {
                prop_assert!(close(dv, fd, 1e-4), "d/dx {} = {} at {:?}: {} vs {}", e, d, p, dv, fd);
            }
        }
    }

    #[test]
    fn suspension_composes(x in -50i64..50, a in -20i64..20, b in -20i64..20) {
        let s = SuspensionDim(x);
        prop_assert_eq!(suspend(s, a + b), suspend(suspend(s, a), b));
        prop_assert_eq!(suspend(suspend(s, 1), -1), s);
    }
}
