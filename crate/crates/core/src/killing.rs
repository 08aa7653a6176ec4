//! The Killing operator: Lie-derivative components of the metric along a
//! vector field given in frame components, evaluated on two independent
//! routes (exact jets through the frame formulas; finite differences of the
//! coordinate metric), residual aggregation over grids, and the structural
//! check on V³.

use crate::classify::{classify_warps, ClassifyError};
use crate::defaults::{CLASSIFY_SAMPLES, FD_STEP_FIRST, GRID_BOX, GRID_COUNTS};
use crate::expr::{parse_expr, EvalError, ParseError, Point, ScalarExpr, VarSet};
use crate::geometry::{GeometryError, MetricSpec};

use std::fmt;

#[derive(Clone, Debug, thiserror::Error)]
pub enum KillingError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}

/// A vector field V = V¹E₁ + V²E₂ + V³E₃ in frame components, each a
/// closed-form expression of (x¹, x², x³). Coordinate components are
/// (V¹f1, V²f2, V³k3).
#[derive(Clone, Debug)]
pub struct FrameField {
    v1: ScalarExpr,
    v2: ScalarExpr,
    v3: ScalarExpr,
}

#[derive(Clone, Debug, thiserror::Error)]
#[error("field component V{which}: {source}")]
pub struct FieldParseError {
    pub which: u8,
    #[source]
    pub source: ParseError,
}

impl FrameField {
    pub fn new(v1: ScalarExpr, v2: ScalarExpr, v3: ScalarExpr) -> Self {
        assert_eq!(v1.vars().len(), 3, "field components take (x1, x2, x3)");
        assert_eq!(v2.vars().len(), 3, "field components take (x1, x2, x3)");
        assert_eq!(v3.vars().len(), 3, "field components take (x1, x2, x3)");
        FrameField { v1, v2, v3 }
    }

    pub fn parse(v1: &str, v2: &str, v3: &str) -> Result<Self, FieldParseError> {
        let vars = VarSet::field();
        let mk = |src: &str, which: u8| {
            parse_expr(src, &vars).map_err(|source| FieldParseError { which, source })
        };
        Ok(FrameField::new(mk(v1, 1)?, mk(v2, 2)?, mk(v3, 3)?))
    }

    pub fn zero() -> Self {
        FrameField::parse("0", "0", "0").expect("constant components")
    }

    pub fn v1(&self) -> &ScalarExpr {
        &self.v1
    }

    pub fn v2(&self) -> &ScalarExpr {
        &self.v2
    }

    pub fn v3(&self) -> &ScalarExpr {
        &self.v3
    }

    pub fn component(&self, i: usize) -> &ScalarExpr {
        match i {
            0 => &self.v1,
            1 => &self.v2,
            2 => &self.v3,
            _ => panic!("component index out of range: {i}"),
        }
    }

    /// Frame component values at p.
    pub fn values(&self, p: Point) -> Result<[f64; 3], EvalError> {
        Ok([self.v1.eval(p)?, self.v2.eval(p)?, self.v3.eval(p)?])
    }

    /// The field with the roles of the first two axes exchanged: components
    /// V¹ and V² swap and every component reads (x², x¹, x³). Together with
    /// swapping the warps this maps solutions of the system onto solutions.
    pub fn mirror_swap(&self) -> FrameField {
        FrameField {
            v1: self.v2.swap_x1_x2(),
            v2: self.v1.swap_x1_x2(),
            v3: self.v3.swap_x1_x2(),
        }
    }
}

/// The six independent frame components of (£_V g).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LieDerivComponents {
    pub l11: f64,
    pub l22: f64,
    pub l33: f64,
    pub l12: f64,
    pub l23: f64,
    pub l31: f64,
}

impl LieDerivComponents {
    pub const NAMES: [&'static str; 6] = ["L11", "L22", "L33", "L12", "L23", "L31"];

    pub fn as_array(self) -> [f64; 6] {
        [self.l11, self.l22, self.l33, self.l12, self.l23, self.l31]
    }

    pub fn max_abs(self) -> f64 {
        self.as_array().iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[derive(Clone, Copy, Debug, thiserror::Error)]
pub enum GridError {
    #[error("grid axis {axis}: lower bound {lo} is not strictly below upper bound {hi}")]
    BadBounds { axis: usize, lo: f64, hi: f64 },
    #[error("grid axis {axis}: need at least 2 points, got {count}")]
    BadCount { axis: usize, count: usize },
}

/// A rectangular evaluation grid: per-axis bounds and point counts. Points
/// are enumerated in a fixed row-major order (x¹ slowest, x³ fastest).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    bounds: [[f64; 2]; 3],
    counts: [usize; 3],
}

impl GridSpec {
    pub fn new(bounds: [[f64; 2]; 3], counts: [usize; 3]) -> Result<Self, GridError> {
        for axis in 0..3 {
            let [lo, hi] = bounds[axis];
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(GridError::BadBounds { axis, lo, hi });
            }
            if counts[axis] < 2 {
                return Err(GridError::BadCount { axis, count: counts[axis] });
            }
        }
        Ok(GridSpec { bounds, counts })
    }

    /// Same box with different point counts.
    pub fn with_counts(mut self, counts: [usize; 3]) -> Result<Self, GridError> {
        for (axis, &count) in counts.iter().enumerate() {
            if count < 2 {
                return Err(GridError::BadCount { axis, count });
            }
        }
        self.counts = counts;
        Ok(self)
    }

    pub fn bounds(&self) -> [[f64; 2]; 3] {
        self.bounds
    }

    pub fn counts(&self) -> [usize; 3] {
        self.counts
    }

    pub fn n_points(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn x3_interval(&self) -> (f64, f64) {
        (self.bounds[2][0], self.bounds[2][1])
    }

    pub fn center(&self) -> Point {
        Point::new(
            0.5 * (self.bounds[0][0] + self.bounds[0][1]),
            0.5 * (self.bounds[1][0] + self.bounds[1][1]),
            0.5 * (self.bounds[2][0] + self.bounds[2][1]),
        )
    }

    pub fn points(&self) -> Vec<Point> {
        let coord = |axis: usize, i: usize| {
            let [lo, hi] = self.bounds[axis];
            lo + (hi - lo) * (i as f64) / ((self.counts[axis] - 1) as f64)
        };
        let mut out = Vec::with_capacity(self.n_points());
        for i1 in 0..self.counts[0] {
            for i2 in 0..self.counts[1] {
                for i3 in 0..self.counts[2] {
                    out.push(Point::new(coord(0, i1), coord(1, i2), coord(2, i3)));
                }
            }
        }
        out
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::new(GRID_BOX, GRID_COUNTS).expect("default grid is valid")
    }
}

/// Aggregated residual of the six Lie-derivative components over a grid.
#[derive(Clone, Copy, Debug)]
pub struct ResidualReport {
    pub max_abs: f64,
    pub rms: f64,
    pub per_component_max: [f64; 6],
    pub worst_point: Point,
    pub n_points: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct KillingVerdict {
    pub killing: bool,
    pub report: ResidualReport,
}

/// Structure of V³ for a Killing field: it never depends on x³, and a
/// dependence on x¹ resp. x² forces constancy of f1f2′/f2² resp. f1′f2/f1².
#[derive(Clone, Debug, PartialEq)]
pub enum Prop1Case {
    V3Constant,
    V3OfX1 { cond_f1f2p: f64 },
    V3OfX2 { cond_f1pf2: f64 },
    V3OfX1X2 { cond_f1f2p: f64, cond_f1pf2: f64 },
    Violation { reason: String },
}

impl Prop1Case {
    pub fn is_violation(&self) -> bool {
        matches!(self, Prop1Case::Violation { .. })
    }
}

impl fmt::Display for Prop1Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prop1Case::V3Constant => write!(f, "V3 constant"),
            Prop1Case::V3OfX1 { cond_f1f2p } => {
                write!(f, "V3 = V3(x1) with f1*f2'/f2^2 = {cond_f1f2p}")
            }
            Prop1Case::V3OfX2 { cond_f1pf2 } => {
                write!(f, "V3 = V3(x2) with f1'*f2/f1^2 = {cond_f1pf2}")
            }
            Prop1Case::V3OfX1X2 { cond_f1f2p, cond_f1pf2 } => write!(
                f,
                "V3 = V3(x1,x2) with f1*f2'/f2^2 = {cond_f1f2p}, f1'*f2/f1^2 = {cond_f1pf2}"
            ),
            Prop1Case::Violation { reason } => write!(f, "violation: {reason}"),
        }
    }
}

/// The six frame components of £_V g at p, through the frame formulas with
/// exact jets:
///
/// ```text
/// L11 = 2{E1(V¹) − k3(f1′/f1)V³}     L12 = E1(V²) + E2(V¹)
/// L22 = 2{E2(V²) − k3(f2′/f2)V³}     L23 = E2(V³) + E3(V²) + k3(f2′/f2)V²
/// L33 = 2·E3(V³)                     L31 = E3(V¹) + E1(V³) + k3(f1′/f1)V¹
/// ```
///
/// with E1 = f1∂₁, E2 = f2∂₂, E3 = k3∂₃.
pub fn lie_derivative_components(
    m: &MetricSpec,
    field: &FrameField,
    p: Point,
) -> Result<LieDerivComponents, KillingError> {
    let (w1, w2) = m.warp_jets(p.x3)?;
    let k3 = m.k3();
    let (f1, f2) = (w1.value, w2.value);
    let lam1 = k3 * w1.d1 / w1.value;
    let lam2 = k3 * w2.d1 / w2.value;
    let j1 = field.v1.jet1(p)?;
    let j2 = field.v2.jet1(p)?;
    let j3 = field.v3.jet1(p)?;
    Ok(LieDerivComponents {
        l11: 2.0 * (f1 * j1.grad[0] - lam1 * j3.value),
        l22: 2.0 * (f2 * j2.grad[1] - lam2 * j3.value),
        l33: 2.0 * (k3 * j3.grad[2]),
        l12: f1 * j2.grad[0] + f2 * j1.grad[1],
        l23: f2 * j3.grad[1] + k3 * j2.grad[2] + lam2 * j2.value,
        l31: k3 * j1.grad[2] + f1 * j3.grad[0] + lam1 * j1.value,
    })
}

/// The equivalent first-order system, as six residuals:
///
/// ```text
/// r1 = f1·∂₁V¹ − k3(f1′/f1)V³        r4 = f1·∂₁V² + f2·∂₂V¹
/// r2 = f2·∂₂V² − k3(f2′/f2)V³        r5 = f2·∂₂V³ + k3·∂₃V² + k3(f2′/f2)V²
/// r3 = ∂₃V³                          r6 = k3·∂₃V¹ + f1·∂₁V³ + k3(f1′/f1)V¹
/// ```
///
/// Related to the Lie-derivative components by
/// (L11, L22, L33, L12, L23, L31) = (2r1, 2r2, 2k3·r3, r4, r5, r6).
pub fn sms_residuals(
    m: &MetricSpec,
    field: &FrameField,
    p: Point,
) -> Result<[f64; 6], KillingError> {
    let (w1, w2) = m.warp_jets(p.x3)?;
    let k3 = m.k3();
    let j1 = field.v1.jet1(p)?;
    let j2 = field.v2.jet1(p)?;
    let j3 = field.v3.jet1(p)?;
    let r1 = w1.value * j1.grad[0] - k3 * (w1.d1 / w1.value) * j3.value;
    let r2 = w2.value * j2.grad[1] - k3 * (w2.d1 / w2.value) * j3.value;
    let r3 = j3.grad[2];
    let r4 = w1.value * j2.grad[0] + w2.value * j1.grad[1];
    let r5 = w2.value * j3.grad[1] + k3 * j2.grad[2] + k3 * (w2.d1 / w2.value) * j2.value;
    let r6 = k3 * j1.grad[2] + w1.value * j3.grad[0] + k3 * (w1.d1 / w1.value) * j1.value;
    Ok([r1, r2, r3, r4, r5, r6])
}

/// Independent oracle for [`lie_derivative_components`]: the coordinate
/// formula (£_V g)_{ij} = Vᶜ∂_c g_{ij} + g_{cj}∂_i Vᶜ + g_{ic}∂_j Vᶜ with
/// every derivative taken by central finite differences of plain values (no
/// jets anywhere on this path), then converted to frame components.
pub fn fd_lie_derivative(
    m: &MetricSpec,
    field: &FrameField,
    p: Point,
) -> Result<LieDerivComponents, KillingError> {
    let h = FD_STEP_FIRST;
    let coord_comps = |q: Point| -> Result<[f64; 3], KillingError> {
        let (s1, s2, s3) = m.frame_scalars(q.x3)?;
        Ok([
            field.v1.eval(q)? * s1,
            field.v2.eval(q)? * s2,
            field.v3.eval(q)? * s3,
        ])
    };
    let vc0 = coord_comps(p)?;
    let g0 = m.metric_at(p)?.diag();
    // dv[a][c] = ∂_a Vᶜ, dg[a][i] = ∂_a g_{ii}
    let mut dv = [[0.0; 3]; 3];
    let mut dg = [[0.0; 3]; 3];
    for a in 0..3 {
        let x = p.coord(a);
        let pp = p.with_coord(a, x + h);
        let pm = p.with_coord(a, x - h);
        let vp = coord_comps(pp)?;
        let vm = coord_comps(pm)?;
        let gp = m.metric_at(pp)?.diag();
        let gm = m.metric_at(pm)?.diag();
        for c in 0..3 {
            dv[a][c] = (vp[c] - vm[c]) / (2.0 * h);
            dg[a][c] = (gp[c] - gm[c]) / (2.0 * h);
        }
    }
    let mut lie = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            // The metric is diagonal: the advection term only hits i = j,
            // and g_{cj}∂_iVᶜ collapses to g_{jj}∂_iVʲ.
            let advect: f64 = if i == j {
                (0..3).map(|c| vc0[c] * dg[c][i]).sum()
            } else {
                0.0
            };
            lie[i][j] = advect + g0[j] * dv[i][j] + g0[i] * dv[j][i];
        }
    }
    let (s1, s2, s3) = m.frame_scalars(p.x3)?;
    let s = [s1, s2, s3];
    let frame = |i: usize, j: usize| s[i] * s[j] * lie[i][j];
    Ok(LieDerivComponents {
        l11: frame(0, 0),
        l22: frame(1, 1),
        l33: frame(2, 2),
        l12: frame(0, 1),
        l23: frame(1, 2),
        l31: frame(2, 0),
    })
}

/// A field evaluable only pointwise (no expression tree), e.g. the bracket
/// of two expression-backed fields.
pub trait PointwiseFrameField {
    fn frame_components(&self, p: Point) -> Result<[f64; 3], KillingError>;
}

impl PointwiseFrameField for FrameField {
    fn frame_components(&self, p: Point) -> Result<[f64; 3], KillingError> {
        Ok(self.values(p)?)
    }
}

/// Lie-derivative components for a pointwise field: same frame formulas as
/// [`lie_derivative_components`], the field derivatives taken by central
/// finite differences with step `h`.
pub fn fd_frame_lie_derivative(
    m: &MetricSpec,
    field: &impl PointwiseFrameField,
    p: Point,
    h: f64,
) -> Result<LieDerivComponents, KillingError> {
    let (w1, w2) = m.warp_jets(p.x3)?;
    let k3 = m.k3();
    let (f1, f2) = (w1.value, w2.value);
    let lam1 = k3 * w1.d1 / w1.value;
    let lam2 = k3 * w2.d1 / w2.value;
    let v0 = field.frame_components(p)?;
    // dv[a][c] = ∂_a Vᶜ (frame components, coordinate derivatives)
    let mut dv = [[0.0; 3]; 3];
    for (a, row) in dv.iter_mut().enumerate() {
        let x = p.coord(a);
        let vp = field.frame_components(p.with_coord(a, x + h))?;
        let vm = field.frame_components(p.with_coord(a, x - h))?;
        for c in 0..3 {
            row[c] = (vp[c] - vm[c]) / (2.0 * h);
        }
    }
    Ok(LieDerivComponents {
        l11: 2.0 * (f1 * dv[0][0] - lam1 * v0[2]),
        l22: 2.0 * (f2 * dv[1][1] - lam2 * v0[2]),
        l33: 2.0 * (k3 * dv[2][2]),
        l12: f1 * dv[0][1] + f2 * dv[1][0],
        l23: f2 * dv[1][2] + k3 * dv[2][1] + lam2 * v0[1],
        l31: k3 * dv[2][0] + f1 * dv[0][2] + lam1 * v0[0],
    })
}

fn aggregate<F>(grid: &GridSpec, mut eval: F) -> Result<ResidualReport, KillingError>
where
    F: FnMut(Point) -> Result<LieDerivComponents, KillingError>,
{
    let pts = grid.points();
    let mut per = [0.0f64; 6];
    let mut max_abs = 0.0f64;
    let mut worst = pts[0];
    let mut sum_sq = 0.0f64;
    for &p in &pts {
        let l = eval(p)?;
        for (k, v) in l.as_array().into_iter().enumerate() {
            let a = v.abs();
            if a > per[k] {
                per[k] = a;
            }
            if a > max_abs {
                max_abs = a;
                worst = p;
            }
            sum_sq += v * v;
        }
    }
    Ok(ResidualReport {
        max_abs,
        rms: (sum_sq / (6.0 * pts.len() as f64)).sqrt(),
        per_component_max: per,
        worst_point: worst,
        n_points: pts.len(),
    })
}

/// Sweep the grid and aggregate |£_V g| over all six components.
pub fn killing_residual(
    m: &MetricSpec,
    field: &FrameField,
    grid: &GridSpec,
) -> Result<ResidualReport, KillingError> {
    aggregate(grid, |p| lie_derivative_components(m, field, p))
}

/// Residual sweep for a pointwise field (finite-difference derivatives).
pub fn fd_killing_residual(
    m: &MetricSpec,
    field: &impl PointwiseFrameField,
    grid: &GridSpec,
    h: f64,
) -> Result<ResidualReport, KillingError> {
    aggregate(grid, |p| fd_frame_lie_derivative(m, field, p, h))
}

/// Verdict: Killing iff the grid max-abs residual is within `tol`.
pub fn is_killing(
    m: &MetricSpec,
    field: &FrameField,
    grid: &GridSpec,
    tol: f64,
) -> Result<KillingVerdict, KillingError> {
    assert!(tol > 0.0, "tolerance must be positive");
    let report = killing_residual(m, field, grid)?;
    Ok(KillingVerdict { killing: report.max_abs <= tol, report })
}

/// Classify the structure of V³ over the grid: which coordinates it
/// actually depends on (by exact jets), whether the forbidden x³-dependence
/// occurs, and whether the warp-constancy condition unlocked by each
/// admissible dependence holds on the grid's x³ interval.
pub fn check_prop1_structure(
    m: &MetricSpec,
    field: &FrameField,
    grid: &GridSpec,
    tol: f64,
) -> Result<Prop1Case, KillingError> {
    assert!(tol > 0.0, "tolerance must be positive");
    let mut dmax = [0.0f64; 3];
    for p in grid.points() {
        let j3 = field.v3.jet1(p)?;
        for (a, m) in dmax.iter_mut().enumerate() {
            *m = m.max(j3.grad[a].abs());
        }
    }
    if dmax[2] > tol {
        return Ok(Prop1Case::Violation { reason: "V3 depends on x3".into() });
    }
    let needs_x1 = dmax[0] > tol;
    let needs_x2 = dmax[1] > tol;
    if !needs_x1 && !needs_x2 {
        return Ok(Prop1Case::V3Constant);
    }
    let cls = classify_warps(m.f1(), m.f2(), grid.x3_interval(), CLASSIFY_SAMPLES, tol)?;
    let ii_ok = cls.cond_f1f2p.is_constant;
    let iii_ok = cls.cond_f1pf2.is_constant;
    Ok(match (needs_x1, needs_x2) {
        (true, false) => {
            if ii_ok {
                Prop1Case::V3OfX1 { cond_f1f2p: cls.cond_f1f2p.value }
            } else {
                Prop1Case::Violation {
                    reason: "V3 depends on x1 but f1*f2'/f2^2 is not constant".into(),
                }
            }
        }
        (false, true) => {
            if iii_ok {
                Prop1Case::V3OfX2 { cond_f1pf2: cls.cond_f1pf2.value }
            } else {
                Prop1Case::Violation {
                    reason: "V3 depends on x2 but f1'*f2/f1^2 is not constant".into(),
                }
            }
        }
        (true, true) => {
            if ii_ok && iii_ok {
                Prop1Case::V3OfX1X2 {
                    cond_f1f2p: cls.cond_f1f2p.value,
                    cond_f1pf2: cls.cond_f1pf2.value,
                }
            } else {
                Prop1Case::Violation {
                    reason:
                        "V3 depends on x1 and x2 but the warp constancy conditions fail"
                            .into(),
                }
            }
        }
        (false, false) => unreachable!(),
    })
}
