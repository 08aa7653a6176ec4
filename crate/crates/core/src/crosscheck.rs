//! Randomized agreement sweeps between independent evaluation routes: exact
//! jets against finite differences on generated expressions, and the frame
//! formulas for the Killing operator against the coordinate finite-difference
//! route on generated metric/field configurations. All generation is driven
//! by a seeded ChaCha stream, so every sweep is reproducible.

use crate::defaults::{FD_STEP_FIRST, FD_STEP_SECOND};
use crate::expr::{fd_derivative, parse_expr, EvalError, FdOrder, Point, ScalarExpr, VarSet};
use crate::geometry::MetricSpec;
use crate::killing::{
    fd_lie_derivative, lie_derivative_components, sms_residuals, FrameField, KillingError,
};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Worst relative deviations between jet and finite-difference derivatives
/// over a sweep of generated expressions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AgreementReport {
    pub n_cases: usize,
    pub max_rel_dev_order1: f64,
    pub max_rel_dev_order2: f64,
    pub seed: u64,
}

/// Worst deviations between the two Killing-operator routes (and between
/// the two algebraic arrangements of the frame formulas) over a sweep of
/// generated configurations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoPathReport {
    pub n_cases: usize,
    pub max_rel_dev: f64,
    pub max_link_dev: f64,
    pub seed: u64,
}

fn coeff(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..=hi)
}

fn atom(rng: &mut ChaCha8Rng) -> String {
    let var = ["x1", "x2", "x3"][rng.random_range(0..3)];
    match rng.random_range(0..8) {
        0 => var.to_string(),
        1 => format!("{var}^2"),
        2 => format!("sin({} * {var})", coeff(rng, -1.5, 1.5)),
        3 => format!("cos({} * {var})", coeff(rng, -1.5, 1.5)),
        4 => format!("exp({} * {var})", coeff(rng, -1.0, 1.0)),
        5 => format!("tanh({} * {var})", coeff(rng, -2.0, 2.0)),
        // Arguments stay positive for |var| ≤ 1.
        6 => format!("log(3 + {var})"),
        _ => format!("sqrt(2 + {var}^2)"),
    }
}

/// A generated three-variable expression: a short sum of scaled products of
/// smooth atoms, total-domain-safe on [-1, 1]³.
pub fn random_field_expr(rng: &mut ChaCha8Rng) -> ScalarExpr {
    let n_terms = rng.random_range(2..=3);
    let mut terms = Vec::with_capacity(n_terms);
    for _ in 0..n_terms {
        let mut c = coeff(rng, -2.0, 2.0);
        if c.abs() < 0.1 {
            c = 0.1f64.copysign(c);
        }
        let mut factors = vec![format!("({c})")];
        for _ in 0..rng.random_range(1..=2) {
            factors.push(atom(rng));
        }
        terms.push(factors.join(" * "));
    }
    parse_expr(&terms.join(" + "), &VarSet::field()).expect("generated expression parses")
}

/// A generated warp: smooth and bounded away from zero on [-1, 1].
pub fn random_warp_expr(rng: &mut ChaCha8Rng) -> ScalarExpr {
    let src = match rng.random_range(0..6) {
        0 => format!("exp({} * t)", coeff(rng, -1.5, 1.5)),
        1 => format!("{} + {} * sin(t)", coeff(rng, 1.5, 3.0), coeff(rng, -0.5, 0.5)),
        2 => format!("1 / cosh({} * t)", coeff(rng, 0.3, 1.5)),
        3 => format!("{} + t^2", coeff(rng, 0.5, 2.0)),
        4 => format!("{} * exp({} * sin(t))", coeff(rng, 0.5, 2.0), coeff(rng, -1.0, 1.0)),
        _ => format!("2 + tanh({} * t)", coeff(rng, -2.0, 2.0)),
    };
    parse_expr(&src, &VarSet::warp()).expect("generated warp parses")
}

/// A generated metric: two random warps and k3 with |k3| in [0.2, 2].
pub fn random_metric(rng: &mut ChaCha8Rng) -> MetricSpec {
    let f1 = random_warp_expr(rng);
    let f2 = random_warp_expr(rng);
    let mag = coeff(rng, 0.2, 2.0);
    let k3 = if rng.random_bool(0.5) { mag } else { -mag };
    MetricSpec::new(f1, f2, k3).expect("generated k3 is nonzero")
}

/// A generated frame field with three random components.
pub fn random_field(rng: &mut ChaCha8Rng) -> FrameField {
    FrameField::new(
        random_field_expr(rng),
        random_field_expr(rng),
        random_field_expr(rng),
    )
}

/// A generated point strictly inside the unit box (margin for FD stencils).
pub fn random_point(rng: &mut ChaCha8Rng) -> Point {
    Point::new(
        coeff(rng, -0.9, 0.9),
        coeff(rng, -0.9, 0.9),
        coeff(rng, -0.9, 0.9),
    )
}

fn rel_dev(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + a.abs())
}

/// Compare jet derivatives against central finite differences on `n_cases`
/// generated expressions: first-order on three-variable expressions and
/// both orders on univariate warps.
pub fn expr_agreement_sweep(n_cases: usize, seed: u64) -> Result<AgreementReport, EvalError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d1 = 0.0f64;
    let mut d2 = 0.0f64;
    for _ in 0..n_cases {
        let e = random_field_expr(&mut rng);
        let p = random_point(&mut rng);
        let jet = e.jet1(p)?;
        for axis in 0..3 {
            let fd = fd_derivative(&e, p, axis, FdOrder::First, FD_STEP_FIRST)?;
            d1 = d1.max(rel_dev(jet.grad[axis], fd));
        }
        let w = random_warp_expr(&mut rng);
        let t = rng.random_range(-0.9..=0.9);
        let j2 = w.jet2(t)?;
        let p3 = Point::new(0.0, 0.0, t);
        let fd1 = fd_derivative(&w, p3, 2, FdOrder::First, FD_STEP_FIRST)?;
        let fd2 = fd_derivative(&w, p3, 2, FdOrder::Second, FD_STEP_SECOND)?;
        d1 = d1.max(rel_dev(j2.d1, fd1));
        d2 = d2.max(rel_dev(j2.d2, fd2));
    }
    Ok(AgreementReport {
        n_cases,
        max_rel_dev_order1: d1,
        max_rel_dev_order2: d2,
        seed,
    })
}

/// Compare the exact-jet frame route against the coordinate FD route for
/// the Lie-derivative components on `n_cases` generated configurations, and
/// the two algebraic arrangements of the frame formulas against each other.
pub fn killing_two_path_sweep(n_cases: usize, seed: u64) -> Result<TwoPathReport, KillingError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_rel_dev = 0.0f64;
    let mut max_link_dev = 0.0f64;
    for _ in 0..n_cases {
        let m = random_metric(&mut rng);
        let v = random_field(&mut rng);
        let p = random_point(&mut rng);
        let exact = lie_derivative_components(&m, &v, p)?.as_array();
        let fd = fd_lie_derivative(&m, &v, p)?.as_array();
        let r = sms_residuals(&m, &v, p)?;
        let k3 = m.k3();
        let linked = [2.0 * r[0], 2.0 * r[1], 2.0 * k3 * r[2], r[3], r[4], r[5]];
        for i in 0..6 {
            max_rel_dev = max_rel_dev.max(rel_dev(exact[i], fd[i]));
            max_link_dev = max_link_dev.max(rel_dev(exact[i], linked[i]));
        }
    }
    Ok(TwoPathReport { n_cases, max_rel_dev, max_link_dev, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::defaults::{CROSS_CASES, SEED, TOL_CROSS_PATH, TOL_LINK};

    #[test]
    fn expression_routes_agree() {
        let report = expr_agreement_sweep(CROSS_CASES, SEED).unwrap();
        assert_eq!(report.n_cases, CROSS_CASES);
        assert!(report.max_rel_dev_order1 <= 1e-6, "{report:?}");
        assert!(report.max_rel_dev_order2 <= 1e-6, "{report:?}");
    }

    #[test]
    fn killing_routes_agree() {
        let report = killing_two_path_sweep(CROSS_CASES, SEED).unwrap();
        assert!(report.max_rel_dev <= TOL_CROSS_PATH, "{report:?}");
        assert!(report.max_link_dev <= TOL_LINK, "{report:?}");
    }

    #[test]
    fn sweeps_are_reproducible() {
        let a = expr_agreement_sweep(25, 7).unwrap();
        let b = expr_agreement_sweep(25, 7).unwrap();
        assert_eq!(a, b);
        let c = killing_two_path_sweep(25, 7).unwrap();
        let d = killing_two_path_sweep(25, 7).unwrap();
        assert_eq!(c, d);
        // A different stream explores different cases.
        let e = expr_agreement_sweep(25, 8).unwrap();
        assert_ne!(a.max_rel_dev_order1, e.max_rel_dev_order1);
    }

    #[test]
    fn generated_warps_stay_away_from_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        for _ in 0..20 {
            let w = random_warp_expr(&mut rng);
            for i in 0..=40 {
                let t = -1.0 + 2.0 * (i as f64) / 40.0;
                let v = w.eval(Point::new(0.0, 0.0, t)).unwrap();
                assert!(v.abs() > 0.1, "warp {} = {v} at t = {t}", w.to_text());
            }
        }
    }

    #[test]
    fn generated_fields_evaluate_on_the_unit_box() {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        for _ in 0..20 {
            let f = random_field(&mut rng);
            let p = random_point(&mut rng);
            let vals = f.values(p).unwrap();
            assert!(vals.iter().all(|v| v.is_finite()));
        }
    }
}
