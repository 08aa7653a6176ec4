//! Print/reparse and symmetry properties of the expression language over
//! randomly generated source trees.

use biwarp_core::expr::{parse_expr, Point, VarSet};
use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("x1".to_string()),
        Just("x2".to_string()),
        Just("x3".to_string()),
        Just("pi".to_string()),
        (-9i32..=9).prop_map(|n| format!("({n})")),
        (1u32..=99).prop_map(|n| format!("{}.{:02}", n / 10, n % 10)),
    ]
}

fn expr_src() -> impl Strategy<Value = String> {
    leaf().prop_recursive(4, 48, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} - {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} * {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} / {b})")),
            inner.clone().prop_map(|a| format!("-({a})")),
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.clone().prop_map(|a| format!("cos({a})")),
            inner.clone().prop_map(|a| format!("tanh({a})")),
            (inner.clone(), 1u32..=3).prop_map(|(a, n)| format!("(({a}))^{n}")),
        ]
    })
}

const PROBES: [Point; 3] = [
    Point { x1: 0.3, x2: -0.7, x3: 1.1 },
    Point { x1: -1.2, x2: 0.4, x3: -0.5 },
    Point { x1: 2.0, x2: 1.0, x3: 0.0 },
];

proptest! {
    /// Printing is a fixpoint: parse → print → parse → print is stable.
    #[test]
    fn printed_form_reparses_to_itself(src in expr_src()) {
        let vars = VarSet::field();
        let e = parse_expr(&src, &vars).expect("generated source parses");
        let text = e.to_text();
        let e2 = parse_expr(&text, &vars)
            .unwrap_or_else(|err| panic!("printed form {text:?} fails to parse: {err}"));
        prop_assert_eq!(e2.to_text(), text);
    }

    /// Reparsing the printed form preserves values (or the failure) exactly.
    #[test]
    fn printed_form_evaluates_identically(src in expr_src()) {
        let vars = VarSet::field();
        let e = parse_expr(&src, &vars).expect("generated source parses");
        let e2 = parse_expr(&e.to_text(), &vars).expect("printed form parses");
        for p in PROBES {
            match (e.eval(p), e2.eval(p)) {
                (Ok(a), Ok(b)) => prop_assert_eq!(a.to_bits(), b.to_bits(), "{} vs {}", a, b),
                (Err(_), Err(_)) => {}
                (a, b) => prop_assert!(false, "eval disagreement: {a:?} vs {b:?}"),
            }
        }
    }

    /// Swapping x1 and x2 twice is the identity, and a single swap matches
    /// evaluation at the transposed point.
    #[test]
    fn x1_x2_swap_is_an_involution(src in expr_src()) {
        let vars = VarSet::field();
        let e = parse_expr(&src, &vars).expect("generated source parses");
        prop_assert_eq!(e.swap_x1_x2().swap_x1_x2().to_text(), e.to_text());
        let s = e.swap_x1_x2();
        for p in PROBES {
            let q = Point { x1: p.x2, x2: p.x1, x3: p.x3 };
            match (s.eval(p), e.eval(q)) {
                (Ok(a), Ok(b)) => prop_assert_eq!(a.to_bits(), b.to_bits()),
                (Err(_), Err(_)) => {}
                (a, b) => prop_assert!(false, "swap disagreement: {a:?} vs {b:?}"),
            }
        }
    }

    /// The symbolic derivative agrees with the forward-mode jet wherever
    /// both evaluate.
    #[test]
    fn symbolic_derivative_matches_jet(src in expr_src()) {
        let vars = VarSet::field();
        let e = parse_expr(&src, &vars).expect("generated source parses");
        for axis in 0..3 {
            let d = e.derivative(axis);
            for p in PROBES {
                if let (Ok(jet), Ok(dv)) = (e.jet1(p), d.eval(p)) {
                    let g = jet.grad[axis];
                    prop_assert!(
                        (g - dv).abs() <= 1e-9 * (1.0 + g.abs().max(dv.abs())),
                        "axis {axis}: jet {g} vs symbolic {dv} for {}",
                        e.to_text()
                    );
                }
            }
        }
    }
}
