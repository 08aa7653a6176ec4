//! Central finite differences over plain evaluation. This path deliberately
//! shares no code with the jet propagation, so the two can check each other.

use super::{eval, EvalError, Point, ScalarExpr};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FdOrder {
    First,
    Second,
}

/// Central-difference derivative of `e` along a coordinate axis at `p`.
///
/// First order uses (f(p+h) − f(p−h)) / 2h, second order the three-point
/// stencil (f(p+h) − 2f(p) + f(p−h)) / h². The error is O(h²) in exact
/// arithmetic; see the crate defaults for step sizes that balance this
/// against rounding.
pub fn fd_derivative(
    e: &ScalarExpr,
    p: Point,
    axis: usize,
    order: FdOrder,
    h: f64,
) -> Result<f64, EvalError> {
    assert!(h > 0.0, "finite-difference step must be positive");
    let x = p.coord(axis);
    let fp = eval(e, p.with_coord(axis, x + h))?;
    let fm = eval(e, p.with_coord(axis, x - h))?;
    Ok(match order {
        FdOrder::First => (fp - fm) / (2.0 * h),
        FdOrder::Second => {
            let f0 = eval(e, p)?;
            (fp - 2.0 * f0 + fm) / (h * h)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::defaults::{FD_STEP_FIRST, FD_STEP_SECOND};
    use crate::expr::{parse_expr, VarSet};

    #[test]
    fn first_derivative_of_exp_at_one() {
        let e = parse_expr("exp(t)", &VarSet::warp()).unwrap();
        let p = Point::new(0.0, 0.0, 1.0);
        let d = fd_derivative(&e, p, 2, FdOrder::First, FD_STEP_FIRST).unwrap();
        assert!((d - std::f64::consts::E).abs() < 1e-9);
    }

    #[test]
    fn second_derivative_of_sin() {
        let e = parse_expr("sin(t)", &VarSet::warp()).unwrap();
        let t = 0.7;
        let p = Point::new(0.0, 0.0, t);
        let d = fd_derivative(&e, p, 2, FdOrder::Second, FD_STEP_SECOND).unwrap();
        assert!((d + t.sin()).abs() < 1e-6);
    }

    #[test]
    fn partials_along_each_axis() {
        let e = parse_expr("x1^2 * x2 + x3", &VarSet::field()).unwrap();
        let p = Point::new(1.5, -2.0, 0.3);
        let d1 = fd_derivative(&e, p, 0, FdOrder::First, FD_STEP_FIRST).unwrap();
        let d2 = fd_derivative(&e, p, 1, FdOrder::First, FD_STEP_FIRST).unwrap();
        let d3 = fd_derivative(&e, p, 2, FdOrder::First, FD_STEP_FIRST).unwrap();
        assert!((d1 - 2.0 * 1.5 * -2.0).abs() < 1e-8);
        assert!((d2 - 1.5 * 1.5).abs() < 1e-9);
        assert!((d3 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn domain_errors_propagate_from_stencil_points() {
        // log is defined at the center but the left stencil point crosses 0.
        let e = parse_expr("log(t)", &VarSet::warp()).unwrap();
        let p = Point::new(0.0, 0.0, 5e-6);
        let err = fd_derivative(&e, p, 2, FdOrder::First, FD_STEP_FIRST).unwrap_err();
        assert_eq!(err.kind, crate::expr::EvalErrorKind::LogNonPositive);
    }
}
