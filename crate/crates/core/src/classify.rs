//! Numerical detection of the warp-pair conditions that unlock each
//! closed-form Killing family: constancy of the warps themselves, of their
//! ratio and logarithmic derivatives, of the coupled quotients f1f2′/f2²
//! and f1′f2/f1², and of the curvature-type quantities (fᵢ″fᵢ − fᵢ′²)/fᵢ⁴.

use crate::defaults::ZERO_WARP;
use crate::expr::{EvalError, ScalarExpr};
use crate::families::FamilyId;

/// Whether a sampled quantity is constant on the interval, with its mean
/// value and observed spread (max − min). Constancy means
/// spread ≤ tol·(1 + |value|).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionEstimate {
    pub is_constant: bool,
    pub value: f64,
    pub spread: f64,
    pub n_samples: usize,
}

/// The nine condition estimates for a warp pair on an x³ interval.
#[derive(Clone, Debug)]
pub struct WarpClassification {
    /// f1 itself constant.
    pub f1_const: ConditionEstimate,
    /// f2 itself constant.
    pub f2_const: ConditionEstimate,
    /// f1/f2 constant.
    pub ratio_const: ConditionEstimate,
    /// f1′/f1 constant (f1 exponential).
    pub logder1_const: ConditionEstimate,
    /// f2′/f2 constant (f2 exponential).
    pub logder2_const: ConditionEstimate,
    /// f1·f2′/f2² constant (unlocks x¹-dependence of V³).
    pub cond_f1f2p: ConditionEstimate,
    /// f1′·f2/f1² constant (unlocks x²-dependence of V³).
    pub cond_f1pf2: ConditionEstimate,
    /// (f1″f1 − f1′²)/f1⁴ constant.
    pub k1_const: ConditionEstimate,
    /// (f2″f2 − f2′²)/f2⁴ constant.
    pub k2_const: ConditionEstimate,
    pub interval: (f64, f64),
    pub tol: f64,
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum ClassifyError {
    #[error("need an interval with t_min < t_max, got [{0}, {1}]")]
    BadInterval(f64, f64),
    #[error("need at least 3 samples, got {0}")]
    TooFewSamples(usize),
    #[error("warp f{which} vanishes at sample t = {t}")]
    ZeroWarpSample { which: u8, t: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn estimate(samples: &[f64], tol: f64) -> ConditionEstimate {
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &s in samples {
        lo = lo.min(s);
        hi = hi.max(s);
    }
    let spread = hi - lo;
    ConditionEstimate {
        is_constant: spread <= tol * (1.0 + mean.abs()),
        value: mean,
        spread,
        n_samples: n,
    }
}

/// Sample both warps (with second-order jets) at `n` equispaced points of
/// `interval` and estimate each condition.
pub fn classify_warps(
    f1: &ScalarExpr,
    f2: &ScalarExpr,
    interval: (f64, f64),
    n: usize,
    tol: f64,
) -> Result<WarpClassification, ClassifyError> {
    let (lo, hi) = interval;
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(ClassifyError::BadInterval(lo, hi));
    }
    if n < 3 {
        return Err(ClassifyError::TooFewSamples(n));
    }
    assert!(tol > 0.0, "tolerance must be positive");

    let mut cols: [Vec<f64>; 9] = Default::default();
    for i in 0..n {
        let t = lo + (hi - lo) * (i as f64) / ((n - 1) as f64);
        let j1 = f1.jet2(t)?;
        let j2 = f2.jet2(t)?;
        if j1.value.abs() < ZERO_WARP {
            return Err(ClassifyError::ZeroWarpSample { which: 1, t });
        }
        if j2.value.abs() < ZERO_WARP {
            return Err(ClassifyError::ZeroWarpSample { which: 2, t });
        }
        let (v1, d1, s1) = (j1.value, j1.d1, j1.d2);
        let (v2, d2, s2) = (j2.value, j2.d1, j2.d2);
        cols[0].push(v1);
        cols[1].push(v2);
        cols[2].push(v1 / v2);
        cols[3].push(d1 / v1);
        cols[4].push(d2 / v2);
        cols[5].push(v1 * d2 / (v2 * v2));
        cols[6].push(d1 * v2 / (v1 * v1));
        cols[7].push((s1 * v1 - d1 * d1) / (v1 * v1 * v1 * v1));
        cols[8].push((s2 * v2 - d2 * d2) / (v2 * v2 * v2 * v2));
    }
    Ok(WarpClassification {
        f1_const: estimate(&cols[0], tol),
        f2_const: estimate(&cols[1], tol),
        ratio_const: estimate(&cols[2], tol),
        logder1_const: estimate(&cols[3], tol),
        logder2_const: estimate(&cols[4], tol),
        cond_f1f2p: estimate(&cols[5], tol),
        cond_f1pf2: estimate(&cols[6], tol),
        k1_const: estimate(&cols[7], tol),
        k2_const: estimate(&cols[8], tol),
        interval,
        tol,
    })
}

impl WarpClassification {
    /// f1/f2 constant and equal to 1 within tolerance.
    pub fn warps_equal(&self) -> bool {
        self.ratio_const.is_constant && (self.ratio_const.value - 1.0).abs() <= self.tol * 2.0
    }

    /// Both log-derivatives constant and equal within tolerance.
    pub fn equal_exponents(&self) -> bool {
        self.logder1_const.is_constant
            && self.logder2_const.is_constant
            && (self.logder1_const.value - self.logder2_const.value).abs()
                <= self.tol * (1.0 + self.logder1_const.value.abs())
    }
}

/// Every closed-form family whose warp hypothesis this pair satisfies on
/// the sampled interval, with a one-line rationale per id. Ordered by id.
/// The fixed-metric demonstration families (EX1–EX6) are not candidates:
/// their warps are part of the family definition.
pub fn applicable_families(cls: &WarpClassification, k3: f64) -> Vec<(FamilyId, String)> {
    assert!(k3 != 0.0 && k3.is_finite(), "k3 must be a nonzero real constant");
    let tol = cls.tol;
    let mut out: Vec<(FamilyId, String)> = Vec::new();
    let mut push = |id: FamilyId, why: String| out.push((id, why));

    let f1c = cls.f1_const.is_constant;
    let f2c = cls.f2_const.is_constant;
    let equal = cls.warps_equal();
    let k1 = cls.k1_const;
    let k2 = cls.k2_const;

    // Branch of the curvature-type constant: zero / negative / positive.
    let sign = |e: ConditionEstimate| -> i8 {
        if !e.is_constant {
            2 // not constant at all
        } else if e.value.abs() <= tol {
            0
        } else if e.value < 0.0 {
            -1
        } else {
            1
        }
    };

    push(FamilyId::T1A, "holds for any warp pair".into());
    if f1c {
        push(FamilyId::T1B, format!("f1 is constant ({})", cls.f1_const.value));
        match sign(k2) {
            0 => push(
                FamilyId::T1Ca,
                "f1 constant and (f2''f2 - f2'^2)/f2^4 = 0 (f2 exponential)".into(),
            ),
            -1 => push(
                FamilyId::T1Cb,
                format!("f1 constant and (f2''f2 - f2'^2)/f2^4 = {} < 0", k2.value),
            ),
            1 => push(
                FamilyId::T1Cc,
                format!("f1 constant and (f2''f2 - f2'^2)/f2^4 = {} > 0", k2.value),
            ),
            _ => {}
        }
    }
    if equal {
        push(FamilyId::C1A, "f1 = f2".into());
        if f1c {
            push(FamilyId::C1B, "f1 = f2 constant".into());
            push(FamilyId::C1C, "f1 = f2 constant".into());
        }
    }

    push(FamilyId::T2A, "holds for any warp pair".into());
    if f2c {
        push(FamilyId::T2B, format!("f2 is constant ({})", cls.f2_const.value));
        match sign(k1) {
            0 => push(
                FamilyId::T2Ca,
                "f2 constant and (f1''f1 - f1'^2)/f1^4 = 0 (f1 exponential)".into(),
            ),
            -1 => push(
                FamilyId::T2Cb,
                format!("f2 constant and (f1''f1 - f1'^2)/f1^4 = {} < 0", k1.value),
            ),
            1 => push(
                FamilyId::T2Cc,
                format!("f2 constant and (f1''f1 - f1'^2)/f1^4 = {} > 0", k1.value),
            ),
            _ => {}
        }
    }
    if equal {
        push(FamilyId::C2A, "f1 = f2".into());
        if f1c {
            push(FamilyId::C2B, "f1 = f2 constant".into());
            push(FamilyId::C2C, "f1 = f2 constant".into());
        }
    }

    push(FamilyId::T3A, "holds for any warp pair".into());
    if cls.logder1_const.is_constant && cls.logder2_const.is_constant {
        push(
            FamilyId::T3B,
            format!(
                "both warps exponential (f1'/f1 = {}, f2'/f2 = {})",
                cls.logder1_const.value, cls.logder2_const.value
            ),
        );
    }
    if cls.ratio_const.is_constant {
        push(
            FamilyId::T3C,
            format!("f1/f2 constant ({})", cls.ratio_const.value),
        );
    }
    if cls.equal_exponents() {
        push(
            FamilyId::T3D,
            format!(
                "both warps exponential with a common exponent ({})",
                cls.logder1_const.value
            ),
        );
    }
    if equal {
        push(FamilyId::C3A, "f1 = f2".into());
        if cls.logder1_const.is_constant {
            push(
                FamilyId::C3B,
                format!("f1 = f2 exponential (f'/f = {})", cls.logder1_const.value),
            );
        }
    }

    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::defaults::{CLASSIFY_SAMPLES, FD_STEP_FIRST, FD_STEP_SECOND, TOL_CLASSIFY};
    use crate::expr::{fd_derivative, parse_expr, FdOrder, Point, VarSet};

    fn warp(src: &str) -> ScalarExpr {
        parse_expr(src, &VarSet::warp()).unwrap()
    }

    fn classify(f1: &str, f2: &str, interval: (f64, f64)) -> WarpClassification {
        classify_warps(&warp(f1), &warp(f2), interval, CLASSIFY_SAMPLES, TOL_CLASSIFY).unwrap()
    }

    #[test]
    fn coupled_quotient_on_power_pair() {
        // f1 = t, f2 = 3t²: f1′f2/f1² = 3t²/t² = 3 on any interval away from 0.
        let cls = classify("t", "3 * t^2", (1.0, 2.0));
        assert!(cls.cond_f1pf2.is_constant);
        assert!((cls.cond_f1pf2.value - 3.0).abs() < 1e-12);
        assert!(!cls.cond_f1f2p.is_constant); // f1f2′/f2² = 2/(3t) varies
        assert!(!cls.f1_const.is_constant);
        assert!(!cls.ratio_const.is_constant);
    }

    #[test]
    fn proportional_exponentials() {
        let cls = classify("exp(t)", "2 * exp(t)", (-1.0, 1.0));
        assert!(cls.ratio_const.is_constant);
        assert!((cls.ratio_const.value - 0.5).abs() < 1e-12);
        assert!(cls.logder1_const.is_constant && cls.logder2_const.is_constant);
        assert!((cls.logder1_const.value - 1.0).abs() < 1e-12);
        assert!((cls.logder2_const.value - 1.0).abs() < 1e-12);
        assert!(cls.equal_exponents());
        assert!(cls.k1_const.is_constant && cls.k1_const.value.abs() < 1e-12);
        assert!(!cls.warps_equal());
    }

    #[test]
    fn reciprocal_cosh_has_negative_curvature_constant() {
        let cls = classify("1", "1 / cosh(t)", (-1.0, 1.0));
        assert!(cls.k2_const.is_constant);
        assert!((cls.k2_const.value + 1.0).abs() < 1e-10);
        assert!(cls.k2_const.spread <= 1e-10);
        assert!(cls.f1_const.is_constant);
        assert!(!cls.f2_const.is_constant);
    }

    #[test]
    fn positive_curvature_witness() {
        // f = 1/(√k·t) gives (f″f − f′²)/f⁴ = k; here k = 2.25.
        let cls = classify("1", "1 / (1.5 * t)", (0.5, 1.5));
        assert!(cls.k2_const.is_constant);
        assert!((cls.k2_const.value - 2.25).abs() < 1e-9);
    }

    #[test]
    fn euclidean_rule_table() {
        let cls = classify("1", "1", (-1.0, 1.0));
        let ids: Vec<FamilyId> =
            applicable_families(&cls, 1.0).into_iter().map(|(id, _)| id).collect();
        use FamilyId::*;
        assert_eq!(
            ids,
            vec![T1A, T1B, T1Ca, C1A, C1B, C1C, T2A, T2B, T2Ca, C2A, C2B, C2C, T3A, T3B, T3C, T3D, C3A, C3B]
        );
    }

    #[test]
    fn distinct_exponentials_rule_table() {
        let cls = classify("exp(t)", "exp(2*t)", (-1.0, 1.0));
        let ids: Vec<FamilyId> =
            applicable_families(&cls, 1.0).into_iter().map(|(id, _)| id).collect();
        use FamilyId::*;
        assert_eq!(ids, vec![T1A, T2A, T3A, T3B]);
    }

    #[test]
    fn constant_with_reciprocal_cosh_rule_table() {
        let cls = classify("1", "1 / cosh(t)", (-1.0, 1.0));
        let ids: Vec<FamilyId> =
            applicable_families(&cls, 1.0).into_iter().map(|(id, _)| id).collect();
        use FamilyId::*;
        assert_eq!(ids, vec![T1A, T1B, T1Cb, T2A, T3A]);
    }

    #[test]
    fn estimates_agree_with_finite_differences() {
        // Reconstruct each sampled quantity from plain evaluations and
        // central differences of the warps; the jet-based classification
        // must agree to FD accuracy.
        let f1 = warp("2 + 0.5 * sin(t)");
        let f2 = warp("exp(0.3 * t)");
        let cls = classify_warps(&f1, &f2, (-1.0, 1.0), 5, TOL_CLASSIFY).unwrap();
        let mut cond_samples = Vec::new();
        for i in 0..5 {
            let t = -1.0 + 2.0 * (i as f64) / 4.0;
            let p = Point::new(0.0, 0.0, t);
            let v1 = f1.eval(p).unwrap();
            let v2 = f2.eval(p).unwrap();
            let d1 = fd_derivative(&f1, p, 2, FdOrder::First, FD_STEP_FIRST).unwrap();
            let d2 = fd_derivative(&f2, p, 2, FdOrder::First, FD_STEP_FIRST).unwrap();
            let s2 = fd_derivative(&f2, p, 2, FdOrder::Second, FD_STEP_SECOND).unwrap();
            cond_samples.push((v1 / v2, d1 * v2 / (v1 * v1), (s2 * v2 - d2 * d2) / v2.powi(4)));
        }
        let ratio_mean = cond_samples.iter().map(|s| s.0).sum::<f64>() / 5.0;
        let cond_mean = cond_samples.iter().map(|s| s.1).sum::<f64>() / 5.0;
        let k2_mean = cond_samples.iter().map(|s| s.2).sum::<f64>() / 5.0;
        assert!((cls.ratio_const.value - ratio_mean).abs() <= 1e-9);
        assert!((cls.cond_f1pf2.value - cond_mean).abs() <= 1e-6);
        assert!((cls.k2_const.value - k2_mean).abs() <= 1e-5);
    }

    #[test]
    fn zero_warp_sample_is_reported() {
        let err = classify_warps(&warp("t"), &warp("1"), (-1.0, 1.0), 41, TOL_CLASSIFY);
        match err {
            Err(ClassifyError::ZeroWarpSample { which: 1, t }) => assert!(t.abs() < 1e-12),
            other => panic!("expected zero-warp error, got {other:?}"),
        }
    }

    #[test]
    fn interval_and_sample_validation() {
        let f = warp("1");
        assert!(matches!(
            classify_warps(&f, &f, (1.0, 1.0), 41, TOL_CLASSIFY),
            Err(ClassifyError::BadInterval(_, _))
        ));
        assert!(matches!(
            classify_warps(&f, &f, (0.0, 1.0), 2, TOL_CLASSIFY),
            Err(ClassifyError::TooFewSamples(2))
        ));
    }

    #[test]
    fn scaling_robustness() {
        // Scaling either warp by a constant must not change which
        // conditions hold, only the constant values.
        for (a, b) in [(0.5, 2.0), (2.0, 0.5), (3.0, 3.0)] {
            let f1 = format!("{a} * exp(t)");
            let f2 = format!("{b} * exp(2*t)");
            let cls = classify(&f1, &f2, (-1.0, 1.0));
            assert!(cls.logder1_const.is_constant);
            assert!(cls.logder2_const.is_constant);
            assert!(cls.k1_const.is_constant && cls.k1_const.value.abs() < 1e-9);
            assert!(cls.k2_const.is_constant && cls.k2_const.value.abs() < 1e-9);
            assert!(!cls.ratio_const.is_constant);
            assert!(!cls.f1_const.is_constant);
        }
    }

    #[test]
    fn implication_closure_on_assorted_pairs() {
        // Structural implications among the estimates: ratio-constant pairs
        // share every one-warp property; warps_equal implies ratio_const;
        // constant warps imply zero log-derivative and zero curvature.
        let pool = [
            "1", "2.5", "exp(t)", "exp(2*t)", "2*exp(t)", "1/cosh(t)", "2 + sin(t)",
        ];
        for f1 in pool {
            for f2 in pool {
                let cls = classify(f1, f2, (-1.0, 1.0));
                if cls.warps_equal() {
                    assert!(cls.ratio_const.is_constant, "{f1} vs {f2}");
                }
                if cls.f1_const.is_constant {
                    assert!(
                        cls.logder1_const.is_constant
                            && cls.logder1_const.value.abs() < 1e-9,
                        "{f1}"
                    );
                    assert!(cls.k1_const.is_constant && cls.k1_const.value.abs() < 1e-9);
                }
                if cls.f2_const.is_constant {
                    assert!(cls.logder2_const.is_constant);
                    assert!(cls.k2_const.is_constant && cls.k2_const.value.abs() < 1e-9);
                }
                if cls.equal_exponents() {
                    assert!(
                        cls.logder1_const.is_constant && cls.logder2_const.is_constant
                    );
                }
            }
        }
    }
}
