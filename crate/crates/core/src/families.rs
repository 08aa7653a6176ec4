//! Closed-form families of Killing fields for the warped diagonal metric.
//!
//! Each family id names one branch of the classification: the `T1*` ids fix
//! the first frame component to a constant, `T2*` the second, `T3*` the
//! third; `C1*`/`C2*`/`C3*` are the corresponding equal-warp (f1 = f2)
//! specializations, and `EX1`–`EX6` are fixed-metric demonstration
//! configurations. A constructor takes the family parameters (plus user
//! warps where the branch leaves them free), validates every constraint,
//! and returns a ready-to-check metric/field pair together with a validity
//! box on which the closed form is defined.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::classify::{classify_warps, ClassifyError};
use crate::defaults::{CLASSIFY_SAMPLES, GRID_COUNTS, TOL_CLASSIFY};
use crate::expr::{parse_expr, Point, ScalarExpr, VarSet};
use crate::geometry::{GeometryError, MetricSpec};
use crate::killing::{FrameField, GridSpec};

/// Identifiers of the closed-form families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[allow(clippy::upper_case_acronyms)]
pub enum FamilyId {
    T1A,
    T1B,
    T1Ca,
    T1Cb,
    T1Cc,
    C1A,
    C1B,
    C1C,
    T2A,
    T2B,
    T2Ca,
    T2Cb,
    T2Cc,
    C2A,
    C2B,
    C2C,
    T3A,
    T3B,
    T3C,
    T3D,
    C3A,
    C3B,
    EX1,
    EX2,
    EX3,
    EX4,
    EX5,
    EX6,
}

impl FamilyId {
    pub const ALL: [FamilyId; 28] = [
        FamilyId::T1A,
        FamilyId::T1B,
        FamilyId::T1Ca,
        FamilyId::T1Cb,
        FamilyId::T1Cc,
        FamilyId::C1A,
        FamilyId::C1B,
        FamilyId::C1C,
        FamilyId::T2A,
        FamilyId::T2B,
        FamilyId::T2Ca,
        FamilyId::T2Cb,
        FamilyId::T2Cc,
        FamilyId::C2A,
        FamilyId::C2B,
        FamilyId::C2C,
        FamilyId::T3A,
        FamilyId::T3B,
        FamilyId::T3C,
        FamilyId::T3D,
        FamilyId::C3A,
        FamilyId::C3B,
        FamilyId::EX1,
        FamilyId::EX2,
        FamilyId::EX3,
        FamilyId::EX4,
        FamilyId::EX5,
        FamilyId::EX6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyId::T1A => "T1A",
            FamilyId::T1B => "T1B",
            FamilyId::T1Ca => "T1Ca",
            FamilyId::T1Cb => "T1Cb",
            FamilyId::T1Cc => "T1Cc",
            FamilyId::C1A => "C1A",
            FamilyId::C1B => "C1B",
            FamilyId::C1C => "C1C",
            FamilyId::T2A => "T2A",
            FamilyId::T2B => "T2B",
            FamilyId::T2Ca => "T2Ca",
            FamilyId::T2Cb => "T2Cb",
            FamilyId::T2Cc => "T2Cc",
            FamilyId::C2A => "C2A",
            FamilyId::C2B => "C2B",
            FamilyId::C2C => "C2C",
            FamilyId::T3A => "T3A",
            FamilyId::T3B => "T3B",
            FamilyId::T3C => "T3C",
            FamilyId::T3D => "T3D",
            FamilyId::C3A => "C3A",
            FamilyId::C3B => "C3B",
            FamilyId::EX1 => "EX1",
            FamilyId::EX2 => "EX2",
            FamilyId::EX3 => "EX3",
            FamilyId::EX4 => "EX4",
            FamilyId::EX5 => "EX5",
            FamilyId::EX6 => "EX6",
        }
    }

    /// The family obtained by exchanging the roles of the first two axes
    /// (and the warps with them), when there is one.
    pub fn mirror(self) -> Option<FamilyId> {
        Some(match self {
            FamilyId::T1A => FamilyId::T2A,
            FamilyId::T1B => FamilyId::T2B,
            FamilyId::T1Ca => FamilyId::T2Ca,
            FamilyId::T1Cb => FamilyId::T2Cb,
            FamilyId::T1Cc => FamilyId::T2Cc,
            FamilyId::C1A => FamilyId::C2A,
            FamilyId::C1B => FamilyId::C2B,
            FamilyId::C1C => FamilyId::C2C,
            FamilyId::T2A => FamilyId::T1A,
            FamilyId::T2B => FamilyId::T1B,
            FamilyId::T2Ca => FamilyId::T1Ca,
            FamilyId::T2Cb => FamilyId::T1Cb,
            FamilyId::T2Cc => FamilyId::T1Cc,
            FamilyId::C2A => FamilyId::C1A,
            FamilyId::C2B => FamilyId::C1B,
            FamilyId::C2C => FamilyId::C1C,
            FamilyId::EX1 => FamilyId::EX2,
            FamilyId::EX2 => FamilyId::EX1,
            _ => return None,
        })
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyId {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, FamilyError> {
        let want = s.to_ascii_uppercase();
        FamilyId::ALL
            .into_iter()
            .find(|id| id.name().to_ascii_uppercase() == want)
            .ok_or_else(|| FamilyError::UnknownId(s.to_string()))
    }
}

/// Requirement on one scalar parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ParamReq {
    Free,
    NonZero,
    Positive,
    Negative,
    Fixed(f64),
}

impl fmt::Display for ParamReq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamReq::Free => write!(f, "free"),
            ParamReq::NonZero => write!(f, "nonzero"),
            ParamReq::Positive => write!(f, "> 0"),
            ParamReq::Negative => write!(f, "< 0"),
            ParamReq::Fixed(v) => write!(f, "= {v} (fixed)"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ParamSpec {
    pub name: &'static str,
    pub req: ParamReq,
    pub default: f64,
    pub what: &'static str,
}

const fn ps(name: &'static str, req: ParamReq, default: f64, what: &'static str) -> ParamSpec {
    ParamSpec { name, req, default, what }
}

const K3: ParamSpec = ps("k3", ParamReq::NonZero, 1.0, "third metric constant");
const K3_FIXED: ParamSpec = ps("k3", ParamReq::Fixed(1.0), 1.0, "third metric constant");

/// Which warps the family lets the caller supply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WarpSlots {
    /// f1 and f2 both free.
    Both,
    /// One shared warp f = f1 = f2.
    Single,
    /// Only f1 free; f2 is determined by the parameters.
    F1Only,
    /// Only f2 free; f1 is determined by the parameters.
    F2Only,
    /// Both warps are determined by the parameters.
    None,
}

/// Parameter values (by name) plus optional user warps for the free slots.
/// `warp1` feeds the f1 slot (or the shared warp), `warp2` the f2 slot.
#[derive(Clone, Debug, Default)]
pub struct FamilyParams {
    values: BTreeMap<String, f64>,
    warp1: Option<ScalarExpr>,
    warp2: Option<ScalarExpr>,
}

impl FamilyParams {
    pub fn new() -> Self {
        FamilyParams::default()
    }

    pub fn set(mut self, name: &str, value: f64) -> Self {
        self.values.insert(name.to_string(), value);
        self
    }

    pub fn with_warp1(mut self, warp: ScalarExpr) -> Self {
        assert_eq!(warp.vars().len(), 1, "warps are univariate in x3");
        self.warp1 = Some(warp);
        self
    }

    pub fn with_warp2(mut self, warp: ScalarExpr) -> Self {
        assert_eq!(warp.vars().len(), 1, "warps are univariate in x3");
        self.warp2 = Some(warp);
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(|s| s.as_str())
    }

    pub fn warp1(&self) -> Option<&ScalarExpr> {
        self.warp1.as_ref()
    }

    pub fn warp2(&self) -> Option<&ScalarExpr> {
        self.warp2.as_ref()
    }
}

/// A constructed family member: the metric, the field, the box on which the
/// closed form is defined, and a one-line description of the closed form.
#[derive(Clone, Debug)]
pub struct FamilyInstance {
    pub id: FamilyId,
    pub params: FamilyParams,
    pub metric: MetricSpec,
    pub field: FrameField,
    pub validity: GridSpec,
    pub provenance: String,
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum FamilyError {
    #[error("unknown family id `{0}`")]
    UnknownId(String),
    #[error("{id}: missing parameter `{name}`")]
    MissingParam { id: FamilyId, name: &'static str },
    #[error("{id}: unknown parameter `{name}` (expected: {expected})")]
    UnknownParam { id: FamilyId, name: String, expected: String },
    #[error("{id}: parameter `{name}` = {value} is not finite")]
    NotFinite { id: FamilyId, name: &'static str, value: f64 },
    #[error("{id}: parameter `{name}` must be nonzero")]
    MustBeNonZero { id: FamilyId, name: &'static str },
    #[error("{id}: parameter `{name}` = {value} violates requirement {req}")]
    SignViolation { id: FamilyId, name: &'static str, value: f64, req: ParamReq },
    #[error("{id}: constraint violated: {what}")]
    ConstraintViolation { id: FamilyId, what: String },
    #[error("{id}: family does not take a user warp in slot f{which}")]
    UnsupportedWarp { id: FamilyId, which: u8 },
    #[error("{id}: user warp f{which} rejected: {why}")]
    WarpMismatch { id: FamilyId, which: u8, why: String },
    #[error("example index {0} out of range 1..=6")]
    BadExampleIndex(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}

/// Full parameter contract for a family, in declaration order.
pub fn list_required_params(id: FamilyId) -> Vec<ParamSpec> {
    use ParamReq::{Free, Negative, NonZero, Positive};
    match id {
        FamilyId::T1A => vec![ps("c", Free, 1.0, "coefficient of E2"), K3],
        FamilyId::T1B => vec![
            ps("c1", NonZero, 1.0, "constant first component"),
            ps("c2", Free, 1.0, "coefficient of E2"),
            ps("k1", NonZero, 2.0, "constant value of f1"),
            K3,
        ],
        FamilyId::T1Ca => vec![
            ps("c1", Free, 1.0, "constant first component"),
            ps("a", Free, 1.0, "third component / slope of the x2-linear factor"),
            ps("b", Free, 1.0, "offset of the x2-linear factor"),
            ps("cbar", Free, 1.0, "exponential rate of f2"),
            ps("ctilde", NonZero, 1.0, "scale of f2"),
            ps("k1", NonZero, 2.0, "constant value of f1"),
            K3,
        ],
        FamilyId::T1Cb => vec![
            ps("c1", Free, 1.0, "constant first component"),
            ps("a1", Free, 1.0, "growing-mode coefficient"),
            ps("a2", Free, 1.0, "decaying-mode coefficient"),
            ps("k", Negative, -1.0, "value of (f2''f2 - f2'^2)/f2^4"),
            ps("b", Positive, 1.0, "rate of the canonical sech warp"),
            ps("k1", NonZero, 2.0, "constant value of f1"),
            K3,
        ],
        FamilyId::T1Cc => vec![
            ps("c1", Free, 1.0, "constant first component"),
            ps("a1", Free, 1.0, "cosine-mode coefficient"),
            ps("a2", Free, 1.0, "sine-mode coefficient"),
            ps("k", Positive, 1.0, "value of (f2''f2 - f2'^2)/f2^4"),
            ps("k1", NonZero, 2.0, "constant value of f1"),
            K3,
        ],
        FamilyId::C1A => vec![ps("c", Free, 1.0, "coefficient of E2"), K3],
        FamilyId::C1B => vec![
            ps("c1", NonZero, 1.0, "constant first component"),
            ps("c2", Free, 1.0, "coefficient of E2"),
            ps("k1", NonZero, 2.0, "constant value of f"),
            K3,
        ],
        FamilyId::C1C => vec![
            ps("c1", Free, 1.0, "constant first component"),
            ps("a1", Free, 1.0, "screw rate"),
            ps("a2", Free, 1.0, "second-component offset"),
            ps("a3", Free, 1.0, "third-component offset"),
            ps("k1", NonZero, 2.0, "constant value of f"),
            K3,
        ],
        FamilyId::T2A => vec![ps("c", Free, 1.0, "coefficient of E1"), K3],
        FamilyId::T2B => vec![
            ps("c1", Free, 1.0, "coefficient of E1"),
            ps("c2", NonZero, 1.0, "constant second component"),
            ps("k2", NonZero, 2.0, "constant value of f2"),
            K3,
        ],
        FamilyId::T2Ca => vec![
            ps("c2", Free, 1.0, "constant second component"),
            ps("a", Free, 1.0, "third component / slope of the x1-linear factor"),
            ps("b", Free, 1.0, "offset of the x1-linear factor"),
            ps("cbar", Free, 1.0, "exponential rate of f1"),
            ps("ctilde", NonZero, 1.0, "scale of f1"),
            ps("k2", NonZero, 2.0, "constant value of f2"),
            K3,
        ],
        FamilyId::T2Cb => vec![
            ps("c2", Free, 1.0, "constant second component"),
            ps("a1", Free, 1.0, "growing-mode coefficient"),
            ps("a2", Free, 1.0, "decaying-mode coefficient"),
            ps("k", Negative, -1.0, "value of (f1''f1 - f1'^2)/f1^4"),
            ps("b", Positive, 1.0, "rate of the canonical sech warp"),
            ps("k2", NonZero, 2.0, "constant value of f2"),
            K3,
        ],
        FamilyId::T2Cc => vec![
            ps("c2", Free, 1.0, "constant second component"),
            ps("a1", Free, 1.0, "cosine-mode coefficient"),
            ps("a2", Free, 1.0, "sine-mode coefficient"),
            ps("k", Positive, 1.0, "value of (f1''f1 - f1'^2)/f1^4"),
            ps("k2", NonZero, 2.0, "constant value of f2"),
            K3,
        ],
        FamilyId::C2A => vec![ps("c", Free, 1.0, "coefficient of E1"), K3],
        FamilyId::C2B => vec![
            ps("c1", Free, 1.0, "coefficient of E1"),
            ps("c2", NonZero, 1.0, "constant second component"),
            ps("k1", NonZero, 2.0, "constant value of f"),
            K3,
        ],
        FamilyId::C2C => vec![
            ps("c2", Free, 1.0, "constant second component"),
            ps("a1", Free, 1.0, "screw rate"),
            ps("a2", Free, 1.0, "first-component offset"),
            ps("a3", Free, 1.0, "third-component offset"),
            ps("k1", NonZero, 2.0, "constant value of f"),
            K3,
        ],
        FamilyId::T3A => vec![
            ps("c1", Free, 1.0, "coefficient of E1"),
            ps("c2", Free, 1.0, "coefficient of E2"),
            K3,
        ],
        FamilyId::T3B => vec![
            ps("c", NonZero, 1.0, "constant third component"),
            ps("c1", NonZero, 1.0, "scale of f1"),
            ps("c2", NonZero, 1.0, "scale of f2"),
            ps("cbar1", Free, 1.0, "exponential rate of f1"),
            ps("cbar2", Free, 2.0, "exponential rate of f2"),
            ps("chat1", Free, 0.0, "first-component numerator offset"),
            ps("chat2", Free, 0.0, "second-component numerator offset"),
            K3,
        ],
        FamilyId::T3C => vec![
            ps("c1", Free, 1.0, "first-component numerator offset"),
            ps("c2", Free, 1.0, "second-component numerator offset"),
            ps("k0", NonZero, 1.0, "rotation coefficient"),
            ps("c0", NonZero, 1.0, "constant ratio f2/f1"),
            K3,
        ],
        FamilyId::T3D => vec![
            ps("c", NonZero, 1.0, "constant third component"),
            ps("c1", NonZero, 1.0, "scale of f1"),
            ps("c2", NonZero, 2.0, "scale of f2"),
            ps("k0", NonZero, 1.0, "rotation coefficient"),
            ps("cbar", Free, 1.0, "common exponential rate of the warps"),
            ps("chat1", Free, 0.0, "first-component numerator offset"),
            ps("chat2", Free, 0.0, "second-component numerator offset"),
            ps("tau1", Free, 0.0, "additive drift (needs cbar = 0)"),
            ps("tau2", Free, 0.0, "additive drift (needs cbar = 0)"),
            K3,
        ],
        FamilyId::C3A => vec![
            ps("c1", Free, 1.0, "first-component numerator offset"),
            ps("c2", Free, 1.0, "second-component numerator offset"),
            ps("k0", Free, 1.0, "rotation coefficient"),
            K3,
        ],
        FamilyId::C3B => vec![
            ps("c", NonZero, 1.0, "constant third component"),
            ps("c0", NonZero, 1.0, "scale of the shared warp"),
            ps("k0", Free, 1.0, "rotation coefficient"),
            ps("cbar", Free, 1.0, "exponential rate of the shared warp"),
            ps("chat1", Free, 0.0, "first-component numerator offset"),
            ps("chat2", Free, 0.0, "second-component numerator offset"),
            ps("tau1", Free, 0.0, "additive drift (needs cbar = 0)"),
            ps("tau2", Free, 0.0, "additive drift (needs cbar = 0)"),
            K3,
        ],
        FamilyId::EX1 | FamilyId::EX2 => vec![
            ps("c", NonZero, 1.0, "field coefficient"),
            ps("a1", NonZero, 1.0, "exponential rate of f1"),
            ps("a2", NonZero, 2.0, "exponential rate of f2"),
            K3_FIXED,
        ],
        FamilyId::EX3 => vec![
            ps("c", NonZero, 1.0, "constant third component"),
            ps("a1", NonZero, 1.0, "exponential rate of f1"),
            ps("a2", NonZero, 2.0, "exponential rate of f2"),
            K3_FIXED,
        ],
        FamilyId::EX4 => vec![
            ps("c", NonZero, 1.0, "constant third component"),
            ps("a1", NonZero, 1.0, "scale of f1"),
            ps("a2", NonZero, 2.0, "scale of f2"),
            K3_FIXED,
        ],
        FamilyId::EX5 => vec![
            ps("c", NonZero, 1.0, "constant third component"),
            ps("k", NonZero, 1.0, "scale of the shared warp"),
            ps("k0", Free, 1.0, "rotation coefficient"),
            K3_FIXED,
        ],
        FamilyId::EX6 => vec![
            ps("c", NonZero, 1.0, "constant third component"),
            ps("k", NonZero, 1.0, "exponential rate of the shared warp"),
            ps("k0", Free, 1.0, "rotation coefficient"),
            K3_FIXED,
        ],
    }
}

/// Which warp slots the family exposes.
pub fn warp_slots(id: FamilyId) -> WarpSlots {
    use FamilyId::*;
    match id {
        T1A | T2A | T3A => WarpSlots::Both,
        T1B | T1Ca | T1Cb | T1Cc => WarpSlots::F2Only,
        T2B | T2Ca | T2Cb | T2Cc | T3C => WarpSlots::F1Only,
        C1A | C2A | C3A => WarpSlots::Single,
        C1B | C1C | C2B | C2C | T3B | T3D | C3B | EX1 | EX2 | EX3 | EX4 | EX5 | EX6 => {
            WarpSlots::None
        }
    }
}

/// One-line description of the closed form and its warp hypothesis.
pub fn summary(id: FamilyId) -> &'static str {
    match id {
        FamilyId::T1A => "V = (0, c/f2, 0); holds for every warp pair",
        FamilyId::T1B => "V = (c1, c2/f2, 0); requires constant f1 = k1",
        FamilyId::T1Ca => {
            "V = (c1, (k3*cbar/ctilde)*(a*x2 + b)*e^(-cbar*x3), a); requires constant f1 and exponential f2 = ctilde*e^(cbar*x3)"
        }
        FamilyId::T1Cb => {
            "V = (c1, -(sqrt(-k)/k)*(f2'/f2^2)*(a1*e^(s*x2) - a2*e^(-s*x2)), a1*e^(s*x2) + a2*e^(-s*x2)) with s = k3*sqrt(-k); requires constant f1 and (f2''f2 - f2'^2)/f2^4 = k < 0"
        }
        FamilyId::T1Cc => {
            "V = (c1, (sqrt(k)/k)*(f2'/f2^2)*(a1*sin(s*x2) - a2*cos(s*x2)), a1*cos(s*x2) + a2*sin(s*x2)) with s = k3*sqrt(k); requires constant f1 and (f2''f2 - f2'^2)/f2^4 = k > 0"
        }
        FamilyId::C1A => "V = (0, c/f, 0) on f1 = f2 = f",
        FamilyId::C1B => "V = (c1, c2/f, 0) on constant f1 = f2 = k1",
        FamilyId::C1C => {
            "V = (c1, -(k1*a1/k3)*x3 + a2, a1*x2 + a3) on constant f1 = f2 = k1"
        }
        FamilyId::T2A => "V = (c/f1, 0, 0); holds for every warp pair",
        FamilyId::T2B => "V = (c1/f1, c2, 0); requires constant f2 = k2",
        FamilyId::T2Ca => {
            "V = ((k3*cbar/ctilde)*(a*x1 + b)*e^(-cbar*x3), c2, a); requires constant f2 and exponential f1 = ctilde*e^(cbar*x3)"
        }
        FamilyId::T2Cb => {
            "V = (-(sqrt(-k)/k)*(f1'/f1^2)*(a1*e^(s*x1) - a2*e^(-s*x1)), c2, a1*e^(s*x1) + a2*e^(-s*x1)) with s = k3*sqrt(-k); requires constant f2 and (f1''f1 - f1'^2)/f1^4 = k < 0"
        }
        FamilyId::T2Cc => {
            "V = ((sqrt(k)/k)*(f1'/f1^2)*(a1*sin(s*x1) - a2*cos(s*x1)), c2, a1*cos(s*x1) + a2*sin(s*x1)) with s = k3*sqrt(k); requires constant f2 and (f1''f1 - f1'^2)/f1^4 = k > 0"
        }
        FamilyId::C2A => "V = (c/f, 0, 0) on f1 = f2 = f",
        FamilyId::C2B => "V = (c1/f, c2, 0) on constant f1 = f2 = k1",
        FamilyId::C2C => {
            "V = (-(k1*a1/k3)*x3 + a2, c2, a1*x1 + a3) on constant f1 = f2 = k1"
        }
        FamilyId::T3A => "V = (c1/f1, c2/f2, 0); holds for every warp pair",
        FamilyId::T3B => {
            "V = ((k3*c*cbar1*x1 + chat1)/f1, (k3*c*cbar2*x2 + chat2)/f2, c) on f1 = c1*e^(cbar1*x3), f2 = c2*e^(cbar2*x3)"
        }
        FamilyId::T3C => {
            "V = ((k0/f2)*x2 + c1/f1, -(k0/f1)*x1 + c2/f2, 0); requires constant ratio f2 = c0*f1"
        }
        FamilyId::T3D => {
            "V = ((k0/f2)*x2 + (k3*c*cbar*x1 + chat1)/f1 + tau1, -(k0/f1)*x1 + (k3*c*cbar*x2 + chat2)/f2 + tau2, c) on fi = ci*e^(cbar*x3); constraint cbar*(tau1^2 + tau2^2) = 0"
        }
        FamilyId::C3A => "V = ((k0*x2 + c1)/f, (-k0*x1 + c2)/f, 0) on f1 = f2 = f",
        FamilyId::C3B => {
            "V = ((k0*x2 + k3*c*cbar*x1 + chat1)/(c0*e^(cbar*x3)) + tau1, (-k0*x1 + k3*c*cbar*x2 + chat2)/(c0*e^(cbar*x3)) + tau2, c) on f = c0*e^(cbar*x3); constraint cbar*(tau1^2 + tau2^2) = 0"
        }
        FamilyId::EX1 => {
            "demonstration: V = c*d/dx2 (frame (0, c/f2, 0)) on f1 = e^(a1*x3), f2 = e^(a2*x3), a1 != a2, k3 = 1"
        }
        FamilyId::EX2 => {
            "demonstration: V = c*d/dx1 (frame (c/f1, 0, 0)) on f1 = e^(a1*x3), f2 = e^(a2*x3), a1 != a2, k3 = 1"
        }
        FamilyId::EX3 => {
            "demonstration: V = (a1*c*x1*e^(-a1*x3), a2*c*x2*e^(-a2*x3), c) on f1 = e^(a1*x3), f2 = e^(a2*x3), a1 != a2, k3 = 1"
        }
        FamilyId::EX4 => {
            "demonstration: V = ((x2/a2 + c*x1/a1)*e^(-x3), (-x1/a1 + c*x2/a2)*e^(-x3), c) on f1 = a1*e^(x3), f2 = a2*e^(x3), a1 != a2, k3 = 1"
        }
        FamilyId::EX5 => {
            "demonstration: V = ((c*x1 + k0*x2)*e^(-x3)/k, (c*x2 - k0*x1)*e^(-x3)/k, c) on f1 = f2 = k*e^(x3), k3 = 1"
        }
        FamilyId::EX6 => {
            "demonstration: V = ((k*c*x1 + k0*x2)*e^(-k*x3), (k*c*x2 - k0*x1)*e^(-k*x3), c) on f1 = f2 = e^(k*x3), k3 = 1"
        }
    }
}

/// Fully populated default parameters for a family (no user warps).
pub fn default_params(id: FamilyId) -> FamilyParams {
    let mut p = FamilyParams::new();
    for spec in list_required_params(id) {
        p = p.set(spec.name, spec.default);
    }
    p
}

/// Build the family member with all defaults.
pub fn default_instance(id: FamilyId) -> Result<FamilyInstance, FamilyError> {
    build_family(id, &default_params(id))
}

/// The n-th demonstration configuration (n in 1..=6) with its canonical
/// parameter values.
pub fn example_instance(n: usize) -> Result<FamilyInstance, FamilyError> {
    let id = match n {
        1 => FamilyId::EX1,
        2 => FamilyId::EX2,
        3 => FamilyId::EX3,
        4 => FamilyId::EX4,
        5 => FamilyId::EX5,
        6 => FamilyId::EX6,
        _ => return Err(FamilyError::BadExampleIndex(n)),
    };
    default_instance(id)
}

fn lit(v: f64) -> String {
    format!("({v})")
}

fn warp_expr(src: &str) -> ScalarExpr {
    parse_expr(src, &VarSet::warp()).expect("generated warp text parses")
}

fn field_expr(src: &str) -> ScalarExpr {
    parse_expr(src, &VarSet::field()).expect("generated field text parses")
}

fn wrap(e: &ScalarExpr) -> String {
    format!("({})", e.text_with_names(&["x3"]))
}

fn box_default() -> GridSpec {
    GridSpec::default()
}

fn box_positive_x3() -> GridSpec {
    GridSpec::new([[-1.0, 1.0], [-1.0, 1.0], [0.5, 1.5]], GRID_COUNTS)
        .expect("static box is valid")
}

/// Check that a user warp is the exponential ctilde·e^(cbar·x3) declared by
/// the parameters.
fn require_exponential(
    id: FamilyId,
    which: u8,
    f: &ScalarExpr,
    ctilde: f64,
    cbar: f64,
    interval: (f64, f64),
) -> Result<(), FamilyError> {
    let cls = classify_warps(f, f, interval, CLASSIFY_SAMPLES, TOL_CLASSIFY)?;
    let ld = cls.logder1_const;
    if !ld.is_constant {
        return Err(FamilyError::WarpMismatch {
            id,
            which,
            why: format!(
                "f'/f is not constant on [{}, {}] (spread {:.3e}); an exponential warp is required",
                interval.0, interval.1, ld.spread
            ),
        });
    }
    if (ld.value - cbar).abs() > TOL_CLASSIFY * (1.0 + cbar.abs()) {
        return Err(FamilyError::WarpMismatch {
            id,
            which,
            why: format!("exponential rate {} does not match cbar = {cbar}", ld.value),
        });
    }
    let at0 = f
        .eval(Point::new(0.0, 0.0, 0.0))
        .map_err(|e| FamilyError::WarpMismatch { id, which, why: e.to_string() })?;
    if (at0 - ctilde).abs() > TOL_CLASSIFY * (1.0 + ctilde.abs()) {
        return Err(FamilyError::WarpMismatch {
            id,
            which,
            why: format!("value {at0} at x3 = 0 does not match ctilde = {ctilde}"),
        });
    }
    Ok(())
}

/// Check that a user warp has constant (f''f - f'^2)/f^4 equal to k.
fn require_curvature_constant(
    id: FamilyId,
    which: u8,
    f: &ScalarExpr,
    k: f64,
    interval: (f64, f64),
) -> Result<(), FamilyError> {
    let cls = classify_warps(f, f, interval, CLASSIFY_SAMPLES, TOL_CLASSIFY)?;
    let est = cls.k1_const;
    if !est.is_constant {
        return Err(FamilyError::WarpMismatch {
            id,
            which,
            why: format!(
                "(f''f - f'^2)/f^4 is not constant on [{}, {}] (spread {:.3e})",
                interval.0, interval.1, est.spread
            ),
        });
    }
    if (est.value - k).abs() > TOL_CLASSIFY * (1.0 + k.abs()) {
        return Err(FamilyError::WarpMismatch {
            id,
            which,
            why: format!("(f''f - f'^2)/f^4 = {} does not match k = {k}", est.value),
        });
    }
    Ok(())
}

struct Built {
    f1: ScalarExpr,
    f2: ScalarExpr,
    v: [String; 3],
    validity: GridSpec,
}

/// Construct a family member after validating parameter names, values, the
/// family's relational constraints, and any user warps.
pub fn build_family(id: FamilyId, params: &FamilyParams) -> Result<FamilyInstance, FamilyError> {
    let specs = list_required_params(id);

    for name in params.names() {
        if !specs.iter().any(|s| s.name == name) {
            return Err(FamilyError::UnknownParam {
                id,
                name: name.to_string(),
                expected: specs.iter().map(|s| s.name).collect::<Vec<_>>().join(", "),
            });
        }
    }
    let mut vals: BTreeMap<&'static str, f64> = BTreeMap::new();
    for spec in &specs {
        let v = params
            .get(spec.name)
            .ok_or(FamilyError::MissingParam { id, name: spec.name })?;
        if !v.is_finite() {
            return Err(FamilyError::NotFinite { id, name: spec.name, value: v });
        }
        match spec.req {
            ParamReq::Free => {}
            ParamReq::NonZero => {
                if v == 0.0 {
                    return Err(FamilyError::MustBeNonZero { id, name: spec.name });
                }
            }
            ParamReq::Positive => {
                if v <= 0.0 {
                    return Err(FamilyError::SignViolation {
                        id,
                        name: spec.name,
                        value: v,
                        req: spec.req,
                    });
                }
            }
            ParamReq::Negative => {
                if v >= 0.0 {
                    return Err(FamilyError::SignViolation {
                        id,
                        name: spec.name,
                        value: v,
                        req: spec.req,
                    });
                }
            }
            ParamReq::Fixed(want) => {
                if v != want {
                    return Err(FamilyError::SignViolation {
                        id,
                        name: spec.name,
                        value: v,
                        req: spec.req,
                    });
                }
            }
        }
        vals.insert(spec.name, v);
    }
    let g = |name: &str| vals[name];

    match id {
        FamilyId::EX1 | FamilyId::EX2 | FamilyId::EX3 | FamilyId::EX4 => {
            if g("a1") == g("a2") {
                return Err(FamilyError::ConstraintViolation {
                    id,
                    what: "a1 and a2 must differ".into(),
                });
            }
        }
        FamilyId::T3D | FamilyId::C3B
            if g("cbar") != 0.0 && (g("tau1") != 0.0 || g("tau2") != 0.0) =>
        {
            return Err(FamilyError::ConstraintViolation {
                id,
                what: "cbar*(tau1^2 + tau2^2) = 0 requires tau1 = tau2 = 0 when cbar != 0"
                    .into(),
            });
        }
        _ => {}
    }

    let slots = warp_slots(id);
    let warp1_ok = matches!(slots, WarpSlots::Both | WarpSlots::Single | WarpSlots::F1Only);
    let warp2_ok = matches!(slots, WarpSlots::Both | WarpSlots::F2Only);
    if params.warp1().is_some() && !warp1_ok {
        return Err(FamilyError::UnsupportedWarp { id, which: 1 });
    }
    if params.warp2().is_some() && !warp2_ok {
        return Err(FamilyError::UnsupportedWarp { id, which: 2 });
    }

    let k3 = g("k3");
    let user1 = params.warp1().cloned();
    let user2 = params.warp2().cloned();
    let f1_or = |dflt: &str| user1.clone().unwrap_or_else(|| warp_expr(dflt));
    let f2_or = |dflt: &str| user2.clone().unwrap_or_else(|| warp_expr(dflt));

    let built = match id {
        FamilyId::T1A => {
            let f2 = f2_or("exp(2*t)");
            Built {
                v: ["0".into(), format!("{} / {}", lit(g("c")), wrap(&f2)), "0".into()],
                f1: f1_or("exp(t)"),
                f2,
                validity: box_default(),
            }
        }
        FamilyId::T1B => {
            let f2 = f2_or("exp(2*t)");
            Built {
                v: [
                    lit(g("c1")),
                    format!("{} / {}", lit(g("c2")), wrap(&f2)),
                    "0".into(),
                ],
                f1: warp_expr(&lit(g("k1"))),
                f2,
                validity: box_default(),
            }
        }
        FamilyId::T1Ca | FamilyId::T2Ca => {
            let (ctilde, cbar) = (g("ctilde"), g("cbar"));
            let validity = box_default();
            let dflt = format!("{} * exp({} * t)", lit(ctilde), lit(cbar));
            let fvar = if id == FamilyId::T1Ca { f2_or(&dflt) } else { f1_or(&dflt) };
            let which = if id == FamilyId::T1Ca { 2 } else { 1 };
            let overridden =
                if id == FamilyId::T1Ca { user2.is_some() } else { user1.is_some() };
            if overridden {
                require_exponential(id, which, &fvar, ctilde, cbar, validity.x3_interval())?;
            }
            let axis = if id == FamilyId::T1Ca { "x2" } else { "x1" };
            let linear = format!(
                "({} * {} / {}) * ({} * {} + {}) * exp(-{} * x3)",
                lit(k3),
                lit(cbar),
                lit(ctilde),
                lit(g("a")),
                axis,
                lit(g("b")),
                lit(cbar)
            );
            let konst = if id == FamilyId::T1Ca { g("c1") } else { g("c2") };
            let (v1, v2) = if id == FamilyId::T1Ca {
                (lit(konst), linear)
            } else {
                (linear, lit(konst))
            };
            let kname = if id == FamilyId::T1Ca { g("k1") } else { g("k2") };
            let (f1, f2) = if id == FamilyId::T1Ca {
                (warp_expr(&lit(kname)), fvar)
            } else {
                (fvar, warp_expr(&lit(kname)))
            };
            Built { f1, f2, v: [v1, v2, lit(g("a"))], validity }
        }
        FamilyId::T1Cb | FamilyId::T2Cb | FamilyId::T1Cc | FamilyId::T2Cc => {
            let k = g("k");
            let oscillatory = matches!(id, FamilyId::T1Cc | FamilyId::T2Cc);
            let sqk = k.abs().sqrt();
            let s = k3 * sqk;
            let validity = if oscillatory { box_positive_x3() } else { box_default() };
            let dflt = if oscillatory {
                format!("1 / ({} * t)", lit(sqk))
            } else {
                format!("({} / {}) * (1 / cosh({} * t))", lit(g("b")), lit(sqk), lit(g("b")))
            };
            let on_f2 = matches!(id, FamilyId::T1Cb | FamilyId::T1Cc);
            let fvar = if on_f2 { f2_or(&dflt) } else { f1_or(&dflt) };
            let which = if on_f2 { 2 } else { 1 };
            let overridden = if on_f2 { user2.is_some() } else { user1.is_some() };
            if overridden {
                require_curvature_constant(id, which, &fvar, k, validity.x3_interval())?;
            }
            let d = fvar.derivative(2);
            let wratio = format!("({}) / ({})^2", d.text_with_names(&["x3"]), fvar.text_with_names(&["x3"]));
            let axis = if on_f2 { "x2" } else { "x1" };
            let (mode_diff, mode_sum) = if oscillatory {
                (
                    format!(
                        "{} * sin({} * {axis}) - {} * cos({} * {axis})",
                        lit(g("a1")),
                        lit(s),
                        lit(g("a2")),
                        lit(s)
                    ),
                    format!(
                        "{} * cos({} * {axis}) + {} * sin({} * {axis})",
                        lit(g("a1")),
                        lit(s),
                        lit(g("a2")),
                        lit(s)
                    ),
                )
            } else {
                (
                    format!(
                        "{} * exp({} * {axis}) - {} * exp(-{} * {axis})",
                        lit(g("a1")),
                        lit(s),
                        lit(g("a2")),
                        lit(s)
                    ),
                    format!(
                        "{} * exp({} * {axis}) + {} * exp(-{} * {axis})",
                        lit(g("a1")),
                        lit(s),
                        lit(g("a2")),
                        lit(s)
                    ),
                )
            };
            let prefactor = if oscillatory {
                format!("({} / {})", lit(sqk), lit(k))
            } else {
                format!("-({} / {})", lit(sqk), lit(k))
            };
            let varying = format!("{prefactor} * ({wratio}) * ({mode_diff})");
            let konst = lit(if on_f2 { g("c1") } else { g("c2") });
            let kname = if on_f2 { g("k1") } else { g("k2") };
            let (v1, v2) = if on_f2 { (konst, varying) } else { (varying, konst) };
            let (f1, f2) = if on_f2 {
                (warp_expr(&lit(kname)), fvar)
            } else {
                (fvar, warp_expr(&lit(kname)))
            };
            Built { f1, f2, v: [v1, v2, mode_sum], validity }
        }
        FamilyId::C1A => {
            let f = f1_or("exp(t)");
            Built {
                v: ["0".into(), format!("{} / {}", lit(g("c")), wrap(&f)), "0".into()],
                f1: f.clone(),
                f2: f,
                validity: box_default(),
            }
        }
        FamilyId::C1B => {
            let f = warp_expr(&lit(g("k1")));
            Built {
                v: [
                    lit(g("c1")),
                    format!("{} / {}", lit(g("c2")), wrap(&f)),
                    "0".into(),
                ],
                f1: f.clone(),
                f2: f,
                validity: box_default(),
            }
        }
        FamilyId::C1C | FamilyId::C2C => {
            let f = warp_expr(&lit(g("k1")));
            let screw = format!(
                "-(({} * {}) / {}) * x3 + {}",
                lit(g("k1")),
                lit(g("a1")),
                lit(k3),
                lit(g("a2"))
            );
            let (v1, v2, v3) = if id == FamilyId::C1C {
                (lit(g("c1")), screw, format!("{} * x2 + {}", lit(g("a1")), lit(g("a3"))))
            } else {
                (screw, lit(g("c2")), format!("{} * x1 + {}", lit(g("a1")), lit(g("a3"))))
            };
            Built { f1: f.clone(), f2: f, v: [v1, v2, v3], validity: box_default() }
        }
        FamilyId::T2A => {
            let f1 = f1_or("exp(t)");
            Built {
                v: [format!("{} / {}", lit(g("c")), wrap(&f1)), "0".into(), "0".into()],
                f1,
                f2: f2_or("exp(2*t)"),
                validity: box_default(),
            }
        }
        FamilyId::T2B => {
            let f1 = f1_or("exp(t)");
            Built {
                v: [
                    format!("{} / {}", lit(g("c1")), wrap(&f1)),
                    lit(g("c2")),
                    "0".into(),
                ],
                f1,
                f2: warp_expr(&lit(g("k2"))),
                validity: box_default(),
            }
        }
        FamilyId::C2A => {
            let f = f1_or("exp(t)");
            Built {
                v: [format!("{} / {}", lit(g("c")), wrap(&f)), "0".into(), "0".into()],
                f1: f.clone(),
                f2: f,
                validity: box_default(),
            }
        }
        FamilyId::C2B => {
            let f = warp_expr(&lit(g("k1")));
            Built {
                v: [
                    format!("{} / {}", lit(g("c1")), wrap(&f)),
                    lit(g("c2")),
                    "0".into(),
                ],
                f1: f.clone(),
                f2: f,
                validity: box_default(),
            }
        }
        FamilyId::T3A => {
            let f1 = f1_or("exp(t)");
            let f2 = f2_or("exp(2*t)");
            Built {
                v: [
                    format!("{} / {}", lit(g("c1")), wrap(&f1)),
                    format!("{} / {}", lit(g("c2")), wrap(&f2)),
                    "0".into(),
                ],
                f1,
                f2,
                validity: box_default(),
            }
        }
        FamilyId::T3B => {
            let (c, c1, c2) = (g("c"), g("c1"), g("c2"));
            let (cbar1, cbar2) = (g("cbar1"), g("cbar2"));
            let f1 = warp_expr(&format!("{} * exp({} * t)", lit(c1), lit(cbar1)));
            let f2 = warp_expr(&format!("{} * exp({} * t)", lit(c2), lit(cbar2)));
            let comp = |axis: &str, cbar: f64, chat: f64, scale: f64| {
                format!(
                    "({} * {} * {} * {axis} + {}) / ({} * exp({} * x3))",
                    lit(k3),
                    lit(c),
                    lit(cbar),
                    lit(chat),
                    lit(scale),
                    lit(cbar)
                )
            };
            Built {
                v: [
                    comp("x1", cbar1, g("chat1"), c1),
                    comp("x2", cbar2, g("chat2"), c2),
                    lit(c),
                ],
                f1,
                f2,
                validity: box_default(),
            }
        }
        FamilyId::T3C => {
            let f1 = f1_or("exp(t)");
            let f2 = warp_expr(&format!("{} * {}", lit(g("c0")), wrap(&f1)));
            Built {
                v: [
                    format!(
                        "({} / {}) * x2 + {} / {}",
                        lit(g("k0")),
                        wrap(&f2),
                        lit(g("c1")),
                        wrap(&f1)
                    ),
                    format!(
                        "-({} / {}) * x1 + {} / {}",
                        lit(g("k0")),
                        wrap(&f1),
                        lit(g("c2")),
                        wrap(&f2)
                    ),
                    "0".into(),
                ],
                f1,
                f2,
                validity: box_default(),
            }
        }
        FamilyId::T3D => {
            let (c, c1, c2, cbar) = (g("c"), g("c1"), g("c2"), g("cbar"));
            let f1 = warp_expr(&format!("{} * exp({} * t)", lit(c1), lit(cbar)));
            let f2 = warp_expr(&format!("{} * exp({} * t)", lit(c2), lit(cbar)));
            let e3 = format!("exp({} * x3)", lit(cbar));
            let comp = |rot: &str, axis: &str, scale_rot: f64, scale_lin: f64, chat: f64, tau: f64| {
                format!(
                    "{rot}({} / ({} * {e3})) * {} + ({} * {} * {} * {axis} + {}) / ({} * {e3}) + {}",
                    lit(g("k0")),
                    lit(scale_rot),
                    if axis == "x1" { "x2" } else { "x1" },
                    lit(k3),
                    lit(c),
                    lit(cbar),
                    lit(chat),
                    lit(scale_lin),
                    lit(tau)
                )
            };
            Built {
                v: [
                    comp("", "x1", c2, c1, g("chat1"), g("tau1")),
                    comp("-", "x2", c1, c2, g("chat2"), g("tau2")),
                    lit(c),
                ],
                f1,
                f2,
                validity: box_default(),
            }
        }
        FamilyId::C3A => {
            let f = f1_or("exp(t)");
            Built {
                v: [
                    format!("({} * x2 + {}) / {}", lit(g("k0")), lit(g("c1")), wrap(&f)),
                    format!("(-{} * x1 + {}) / {}", lit(g("k0")), lit(g("c2")), wrap(&f)),
                    "0".into(),
                ],
                f1: f.clone(),
                f2: f,
                validity: box_default(),
            }
        }
        FamilyId::C3B => {
            let (c, c0, cbar) = (g("c"), g("c0"), g("cbar"));
            let f = warp_expr(&format!("{} * exp({} * t)", lit(c0), lit(cbar)));
            let eneg = format!("exp(-{} * x3)", lit(cbar));
            let comp = |sign: &str, this: &str, other: &str, chat: f64, tau: f64| {
                format!(
                    "(1 / {}) * ({sign}{} * {other} + {} * {} * {} * {this} + {}) * {eneg} + {}",
                    lit(c0),
                    lit(g("k0")),
                    lit(k3),
                    lit(c),
                    lit(cbar),
                    lit(chat),
                    lit(tau)
                )
            };
            Built {
                v: [
                    comp("", "x1", "x2", g("chat1"), g("tau1")),
                    comp("-", "x2", "x1", g("chat2"), g("tau2")),
                    lit(c),
                ],
                f1: f.clone(),
                f2: f,
                validity: box_default(),
            }
        }
        FamilyId::EX1 | FamilyId::EX2 => {
            let (a1, a2, c) = (g("a1"), g("a2"), g("c"));
            let f1 = warp_expr(&format!("exp({} * t)", lit(a1)));
            let f2 = warp_expr(&format!("exp({} * t)", lit(a2)));
            let (v1, v2) = if id == FamilyId::EX1 {
                ("0".to_string(), format!("{} / exp({} * x3)", lit(c), lit(a2)))
            } else {
                (format!("{} / exp({} * x3)", lit(c), lit(a1)), "0".to_string())
            };
            Built { f1, f2, v: [v1, v2, "0".into()], validity: box_default() }
        }
        FamilyId::EX3 => {
            let (a1, a2, c) = (g("a1"), g("a2"), g("c"));
            let comp = |a: f64, axis: &str| {
                format!("{} * {} * {axis} * exp(-{} * x3)", lit(a), lit(c), lit(a))
            };
            Built {
                f1: warp_expr(&format!("exp({} * t)", lit(a1))),
                f2: warp_expr(&format!("exp({} * t)", lit(a2))),
                v: [comp(a1, "x1"), comp(a2, "x2"), lit(c)],
                validity: box_default(),
            }
        }
        FamilyId::EX4 => {
            let (a1, a2, c) = (g("a1"), g("a2"), g("c"));
            Built {
                f1: warp_expr(&format!("{} * exp(t)", lit(a1))),
                f2: warp_expr(&format!("{} * exp(t)", lit(a2))),
                v: [
                    format!("(x2 / {} + {} * x1 / {}) * exp(-x3)", lit(a2), lit(c), lit(a1)),
                    format!("(-x1 / {} + {} * x2 / {}) * exp(-x3)", lit(a1), lit(c), lit(a2)),
                    lit(c),
                ],
                validity: box_default(),
            }
        }
        FamilyId::EX5 => {
            let (k, c, k0) = (g("k"), g("c"), g("k0"));
            let f = warp_expr(&format!("{} * exp(t)", lit(k)));
            Built {
                f1: f.clone(),
                f2: f,
                v: [
                    format!(
                        "(1 / {}) * ({} * x1 + {} * x2) * exp(-x3)",
                        lit(k),
                        lit(c),
                        lit(k0)
                    ),
                    format!(
                        "(1 / {}) * ({} * x2 - {} * x1) * exp(-x3)",
                        lit(k),
                        lit(c),
                        lit(k0)
                    ),
                    lit(c),
                ],
                validity: box_default(),
            }
        }
        FamilyId::EX6 => {
            let (k, c, k0) = (g("k"), g("c"), g("k0"));
            let f = warp_expr(&format!("exp({} * t)", lit(k)));
            Built {
                f1: f.clone(),
                f2: f,
                v: [
                    format!(
                        "({} * {} * x1 + {} * x2) * exp(-{} * x3)",
                        lit(k),
                        lit(c),
                        lit(k0),
                        lit(k)
                    ),
                    format!(
                        "({} * {} * x2 - {} * x1) * exp(-{} * x3)",
                        lit(k),
                        lit(c),
                        lit(k0),
                        lit(k)
                    ),
                    lit(c),
                ],
                validity: box_default(),
            }
        }
    };

    let metric = MetricSpec::new(built.f1, built.f2, k3)?;
    let field = FrameField::new(
        field_expr(&built.v[0]),
        field_expr(&built.v[1]),
        field_expr(&built.v[2]),
    );
    Ok(FamilyInstance {
        id,
        params: params.clone(),
        metric,
        field,
        validity: built.validity,
        provenance: summary(id).to_string(),
    })
}
