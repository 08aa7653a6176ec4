//! Verification and exploration toolkit for Killing vector fields on ℝ³
//! equipped with the diagonal metric
//!
//! ```text
//! g = f1(x³)⁻² dx¹⊗dx¹ + f2(x³)⁻² dx²⊗dx² + k3⁻² dx³⊗dx³
//! ```
//!
//! where the warps f1, f2 are smooth nowhere-zero functions of x³ alone and
//! k3 is a nonzero constant. The crate provides:
//!
//! - [`expr`]: a closed-form expression language with exact forward-mode
//!   derivatives and a finite-difference oracle;
//! - [`geometry`]: the orthonormal frame, its connection coefficients, and
//!   coordinate Christoffel symbols computed two independent ways;
//! - [`killing`]: the Killing operator in frame components, evaluated both
//!   through exact jets and through finite differences of the metric;
//! - [`families`]: constructors for the known solution families, with
//!   parameter validation and canonical witnesses;
//! - [`classify`]: numeric detection of the warp conditions that decide
//!   which families a metric admits;
//! - [`dynamics`]: flow and geodesic integration diagnostics tied to the
//!   isometry property;
//! - [`crosscheck`]: randomized agreement sweeps between the independent
//!   evaluation routes.

pub mod classify;
pub mod crosscheck;
pub mod defaults;
pub mod dynamics;
pub mod expr;
pub mod families;
pub mod geometry;
pub mod killing;

pub use classify::{
    applicable_families, classify_warps, ClassifyError, ConditionEstimate,
    WarpClassification,
};
pub use crosscheck::{
    expr_agreement_sweep, killing_two_path_sweep, AgreementReport, TwoPathReport,
};
pub use dynamics::{
    conserved_series, coordinate_velocity, integrate_flow, integrate_geodesic,
    isometry_defect, lie_bracket, speed_series, BracketField, BracketValue,
    ConservedSeries, DynamicsError, IsometryDefectReport, Trajectory,
};
pub use expr::{
    eval, eval_jet1, eval_jet2_univariate, fd_derivative, parse_expr, EvalError,
    EvalErrorKind, FdOrder, FieldJet, ParseError, ParseErrorKind, Point, ScalarExpr,
    VarSet, WarpJet,
};
pub use families::{
    build_family, default_instance, default_params, example_instance, FamilyError,
    FamilyId, FamilyInstance, FamilyParams, ParamReq, ParamSpec, WarpSlots,
};
pub use geometry::{FrameConnection, GeometryError, MetricMatrix, MetricSpec};
pub use killing::{
    check_prop1_structure, fd_killing_residual, fd_lie_derivative, is_killing,
    killing_residual, lie_derivative_components, sms_residuals, FieldParseError,
    FrameField, GridSpec, KillingError, KillingVerdict, LieDerivComponents,
    PointwiseFrameField, Prop1Case, ResidualReport,
};
