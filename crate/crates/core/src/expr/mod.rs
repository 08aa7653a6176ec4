//! A small closed-form expression language over a fixed variable set, with
//! exact forward-mode derivatives and an independent finite-difference
//! oracle.
//!
//! Grammar (no implicit multiplication, `^` right-associative, unary minus
//! binds looser than `^` so `-x1^2` means −(x1²)):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | primary ('^' factor)?
//! primary := literal | variable | function '(' expr ')' | '(' expr ')'
//! ```
//!
//! Functions: exp, log, sin, cos, tan, sinh, cosh, tanh, sqrt. Constants:
//! `pi`, `e`. Variables come from the declared set: either the field set
//! {x1, x2, x3} or the univariate warp set {t}, where `t` and `x3` name the
//! same coordinate. There is no `sech`; write `1/cosh(t)`.
//!
//! `^` with an integer-literal exponent (magnitude ≤ 2²⁰) compiles to
//! repeated multiplication and accepts any base; any other exponent takes
//! the real-power route `exp(e·log(b))`, which requires a positive base.

mod fd;
mod jet;
mod lexer;
mod parser;

pub use fd::{fd_derivative, FdOrder};
pub use jet::{FieldJet, WarpJet};

pub(crate) use jet::Scalar;

use std::fmt;

/// A point of ℝ³ in the standard coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x1: 0.0, x2: 0.0, x3: 0.0 };

    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Point { x1, x2, x3 }
    }

    pub fn coord(&self, axis: usize) -> f64 {
        match axis {
            0 => self.x1,
            1 => self.x2,
            2 => self.x3,
            _ => panic!("coordinate axis out of range: {axis}"),
        }
    }

    pub fn with_coord(mut self, axis: usize, v: f64) -> Self {
        match axis {
            0 => self.x1 = v,
            1 => self.x2 = v,
            2 => self.x3 = v,
            _ => panic!("coordinate axis out of range: {axis}"),
        }
        self
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Point::new(a[0], a[1], a[2])
    }

    pub fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite() && self.x3.is_finite()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x1, self.x2, self.x3)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Slot {
    names: &'static [&'static str],
    axis: usize,
}

/// The variable set an expression is parsed against. Two sets exist: the
/// field set {x1, x2, x3} and the univariate warp set {t}. In both, `t` and
/// `x3` are two names for the third coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarSet {
    slots: Vec<Slot>,
}

impl VarSet {
    /// {x1, x2, x3} for vector-field components.
    pub fn field() -> Self {
        VarSet {
            slots: vec![
                Slot { names: &["x1"], axis: 0 },
                Slot { names: &["x2"], axis: 1 },
                Slot { names: &["x3", "t"], axis: 2 },
            ],
        }
    }

    /// {t} (alias x3) for univariate warps.
    pub fn warp() -> Self {
        VarSet {
            slots: vec![Slot { names: &["t", "x3"], axis: 2 }],
        }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    fn slot_named(&self, name: &str) -> Option<usize> {
        self.slots
            .iter()
            .position(|s| s.names.contains(&name))
    }

    fn axis(&self, slot: usize) -> usize {
        self.slots[slot].axis
    }

    fn primary_names(&self) -> Vec<&'static str> {
        self.slots.iter().map(|s| s.names[0]).collect()
    }

    fn coords(&self, p: Point) -> Vec<f64> {
        self.slots.iter().map(|s| p.coord(s.axis)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Node {
    Num(f64),
    ConstPi,
    ConstE,
    Var(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    PowInt(Box<Node>, i32),
    Call(Func, Box<Node>),
}

/// An immutable expression tree over a declared variable set. Evaluation is
/// a pure function of the point; the same IEEE operations run in all three
/// evaluation modes, so their value channels agree exactly.
#[derive(Clone, Debug)]
pub struct ScalarExpr {
    vars: VarSet,
    root: Node,
}

/// Parse `source` against the declared variable set.
pub fn parse_expr(source: &str, vars: &VarSet) -> Result<ScalarExpr, ParseError> {
    let root = parser::parse(source, vars)?;
    Ok(ScalarExpr { vars: vars.clone(), root })
}

/// Evaluate at a point. For warp expressions the single variable reads the
/// point's x³.
pub fn eval(e: &ScalarExpr, p: Point) -> Result<f64, EvalError> {
    e.eval(p)
}

/// Evaluate with an exact coordinate gradient.
pub fn eval_jet1(e: &ScalarExpr, p: Point) -> Result<FieldJet, EvalError> {
    e.jet1(p)
}

/// Evaluate a univariate expression with exact first and second derivatives.
pub fn eval_jet2_univariate(e: &ScalarExpr, t: f64) -> Result<WarpJet, EvalError> {
    e.jet2(t)
}

impl ScalarExpr {
    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn eval(&self, p: Point) -> Result<f64, EvalError> {
        let coords = self.vars.coords(p);
        self.eval_scalar::<f64>(&coords, &coords)
    }

    pub fn jet1(&self, p: Point) -> Result<FieldJet, EvalError> {
        let coords = self.vars.coords(p);
        let inputs: Vec<FieldJet> = coords
            .iter()
            .enumerate()
            .map(|(slot, &v)| FieldJet::variable(v, self.vars.axis(slot)))
            .collect();
        self.eval_scalar(&inputs, &coords)
    }

    /// Requires a univariate expression (the warp set).
    pub fn jet2(&self, t: f64) -> Result<WarpJet, EvalError> {
        assert_eq!(
            self.vars.len(),
            1,
            "second-order jets are defined for univariate expressions only"
        );
        self.eval_scalar(&[WarpJet::variable(t)], &[t])
    }

    fn eval_scalar<S: Scalar>(&self, inputs: &[S], pt: &[f64]) -> Result<S, EvalError> {
        eval_node(&self.root, inputs, pt, &self.vars)
    }

    /// Render with the variable set's primary names; `parse_expr` of the
    /// result evaluates identically.
    pub fn to_text(&self) -> String {
        self.text_with_names(&self.vars.primary_names())
    }

    /// Render with caller-chosen variable names (one per slot), e.g. a warp
    /// printed with `x3` for embedding into a field component.
    pub fn text_with_names(&self, names: &[&str]) -> String {
        assert_eq!(names.len(), self.vars.len());
        let mut out = String::new();
        print_node(&self.root, names, &mut out, 0);
        out
    }

    /// Exact derivative tree along a coordinate axis (0 → x¹, 1 → x²,
    /// 2 → x³ ≡ t). Zero and one factors introduced by the chain rule are
    /// folded away, which can only enlarge the domain.
    pub fn derivative(&self, axis: usize) -> ScalarExpr {
        ScalarExpr {
            vars: self.vars.clone(),
            root: d_node(&self.root, &self.vars, axis),
        }
    }

    /// The same expression with the roles of x¹ and x² exchanged. Requires
    /// the field variable set.
    pub fn swap_x1_x2(&self) -> ScalarExpr {
        let s1 = self
            .vars
            .slots
            .iter()
            .position(|s| s.axis == 0)
            .expect("field variable set");
        let s2 = self
            .vars
            .slots
            .iter()
            .position(|s| s.axis == 1)
            .expect("field variable set");
        fn walk(n: &Node, s1: usize, s2: usize) -> Node {
            match n {
                Node::Var(i) if *i == s1 => Node::Var(s2),
                Node::Var(i) if *i == s2 => Node::Var(s1),
                Node::Num(_) | Node::ConstPi | Node::ConstE | Node::Var(_) => n.clone(),
                Node::Neg(u) => Node::Neg(Box::new(walk(u, s1, s2))),
                Node::Add(a, b) => {
                    Node::Add(Box::new(walk(a, s1, s2)), Box::new(walk(b, s1, s2)))
                }
                Node::Sub(a, b) => {
                    Node::Sub(Box::new(walk(a, s1, s2)), Box::new(walk(b, s1, s2)))
                }
                Node::Mul(a, b) => {
                    Node::Mul(Box::new(walk(a, s1, s2)), Box::new(walk(b, s1, s2)))
                }
                Node::Div(a, b) => {
                    Node::Div(Box::new(walk(a, s1, s2)), Box::new(walk(b, s1, s2)))
                }
                Node::Pow(a, b) => {
                    Node::Pow(Box::new(walk(a, s1, s2)), Box::new(walk(b, s1, s2)))
                }
                Node::PowInt(a, k) => Node::PowInt(Box::new(walk(a, s1, s2)), *k),
                Node::Call(f, a) => Node::Call(*f, Box::new(walk(a, s1, s2))),
            }
        }
        ScalarExpr {
            vars: self.vars.clone(),
            root: walk(&self.root, s1, s2),
        }
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

// ---------------------------------------------------------------------------
// Errors

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("malformed numeric literal `{0}`")]
    BadNumber(String),
    #[error("numeric literal `{0}` does not fit a finite double")]
    OverflowNumber(String),
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: String, found: String },
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("function `{0}` takes exactly one parenthesized argument")]
    FunctionArity(String),
}

/// A positioned syntax error; `pos` is a byte offset into the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub pos: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at offset {}: {}", self.pos, self.kind)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalErrorKind {
    #[error("division by zero")]
    DivisionByZero,
    #[error("log of a non-positive argument")]
    LogNonPositive,
    #[error("sqrt of a negative argument")]
    SqrtNegative,
    #[error("power with a non-integer exponent requires a positive base")]
    PowNonPositiveBase,
}

/// A domain error naming the offending subexpression and the point at which
/// evaluation failed.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalError {
    pub kind: EvalErrorKind,
    pub subexpr: String,
    pub point: Vec<f64>,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "domain error: {} in `{}` at (", self.kind, self.subexpr)?;
        for (i, v) in self.point.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl std::error::Error for EvalError {}

// ---------------------------------------------------------------------------
// Evaluation

fn domain_error(
    kind: EvalErrorKind,
    node: &Node,
    vars: &VarSet,
    pt: &[f64],
) -> EvalError {
    let mut subexpr = String::new();
    print_node(node, &vars.primary_names(), &mut subexpr, 0);
    EvalError { kind, subexpr, point: pt.to_vec() }
}

fn eval_node<S: Scalar>(
    node: &Node,
    inputs: &[S],
    pt: &[f64],
    vars: &VarSet,
) -> Result<S, EvalError> {
    Ok(match node {
        Node::Num(v) => S::lift(*v),
        Node::ConstPi => S::lift(std::f64::consts::PI),
        Node::ConstE => S::lift(std::f64::consts::E),
        Node::Var(i) => inputs[*i],
        Node::Neg(u) => eval_node(u, inputs, pt, vars)?.neg(),
        Node::Add(a, b) => {
            eval_node(a, inputs, pt, vars)?.add(eval_node(b, inputs, pt, vars)?)
        }
        Node::Sub(a, b) => {
            eval_node(a, inputs, pt, vars)?.sub(eval_node(b, inputs, pt, vars)?)
        }
        Node::Mul(a, b) => {
            eval_node(a, inputs, pt, vars)?.mul(eval_node(b, inputs, pt, vars)?)
        }
        Node::Div(a, b) => {
            let d = eval_node(b, inputs, pt, vars)?;
            if d.value() == 0.0 {
                return Err(domain_error(EvalErrorKind::DivisionByZero, node, vars, pt));
            }
            eval_node(a, inputs, pt, vars)?.div(d)
        }
        Node::PowInt(b, k) => {
            let base = eval_node(b, inputs, pt, vars)?;
            let mut acc = S::lift(1.0);
            for _ in 0..k.unsigned_abs() {
                acc = acc.mul(base);
            }
            if *k < 0 {
                if acc.value() == 0.0 {
                    return Err(domain_error(
                        EvalErrorKind::DivisionByZero,
                        node,
                        vars,
                        pt,
                    ));
                }
                acc = S::lift(1.0).div(acc);
            }
            acc
        }
        Node::Pow(a, b) => {
            let base = eval_node(a, inputs, pt, vars)?;
            if base.value() <= 0.0 {
                return Err(domain_error(
                    EvalErrorKind::PowNonPositiveBase,
                    node,
                    vars,
                    pt,
                ));
            }
            let exponent = eval_node(b, inputs, pt, vars)?;
            exponent.mul(base.ln()).exp()
        }
        Node::Call(f, a) => {
            let u = eval_node(a, inputs, pt, vars)?;
            match f {
                Func::Exp => u.exp(),
                Func::Log => {
                    if u.value() <= 0.0 {
                        return Err(domain_error(
                            EvalErrorKind::LogNonPositive,
                            node,
                            vars,
                            pt,
                        ));
                    }
                    u.ln()
                }
                Func::Sin => u.sin(),
                Func::Cos => u.cos(),
                Func::Tan => u.tan(),
                Func::Sinh => u.sinh(),
                Func::Cosh => u.cosh(),
                Func::Tanh => u.tanh(),
                Func::Sqrt => {
                    if u.value() < 0.0 {
                        return Err(domain_error(
                            EvalErrorKind::SqrtNegative,
                            node,
                            vars,
                            pt,
                        ));
                    }
                    u.sqrt()
                }
            }
        }
    })
}

// ---------------------------------------------------------------------------
// Printing

/// Precedence levels: 1 add/sub, 2 mul/div, 3 unary minus, 4 power, 5 atoms.
/// Negative literals print with a leading minus, so they carry the unary
/// minus level.
fn prec(n: &Node) -> u8 {
    match n {
        Node::Add(..) | Node::Sub(..) => 1,
        Node::Mul(..) | Node::Div(..) => 2,
        Node::Neg(..) => 3,
        Node::Pow(..) | Node::PowInt(..) => 4,
        Node::Num(v) if v.is_sign_negative() => 3,
        Node::Num(_) | Node::ConstPi | Node::ConstE | Node::Var(_) | Node::Call(..) => 5,
    }
}

fn print_node(n: &Node, names: &[&str], out: &mut String, ctx: u8) {
    let me = prec(n);
    let wrap = me < ctx;
    if wrap {
        out.push('(');
    }
    match n {
        Node::Num(v) => out.push_str(&format!("{v}")),
        Node::ConstPi => out.push_str("pi"),
        Node::ConstE => out.push('e'),
        Node::Var(i) => out.push_str(names[*i]),
        Node::Neg(u) => {
            out.push('-');
            print_node(u, names, out, 3);
        }
        Node::Add(a, b) => {
            print_node(a, names, out, 1);
            out.push_str(" + ");
            // The right operand takes a stricter context so the reparse
            // rebuilds the same association and evaluates identically.
            print_node(b, names, out, 2);
        }
        Node::Sub(a, b) => {
            print_node(a, names, out, 1);
            out.push_str(" - ");
            print_node(b, names, out, 2);
        }
        Node::Mul(a, b) => {
            print_node(a, names, out, 2);
            out.push_str(" * ");
            print_node(b, names, out, 3);
        }
        Node::Div(a, b) => {
            print_node(a, names, out, 2);
            out.push_str(" / ");
            print_node(b, names, out, 3);
        }
        Node::Pow(a, b) => {
            print_node(a, names, out, 5);
            out.push('^');
            print_node(b, names, out, 4);
        }
        Node::PowInt(a, k) => {
            print_node(a, names, out, 5);
            out.push('^');
            if *k < 0 {
                out.push('(');
                out.push_str(&k.to_string());
                out.push(')');
            } else {
                out.push_str(&k.to_string());
            }
        }
        Node::Call(f, a) => {
            out.push_str(f.name());
            out.push('(');
            print_node(a, names, out, 0);
            out.push(')');
        }
    }
    if wrap {
        out.push(')');
    }
}

// ---------------------------------------------------------------------------
// Symbolic derivative

fn num(v: f64) -> Node {
    Node::Num(v)
}

fn is_zero(n: &Node) -> bool {
    matches!(n, Node::Num(v) if *v == 0.0)
}

fn is_one(n: &Node) -> bool {
    matches!(n, Node::Num(v) if *v == 1.0)
}

fn sc_neg(a: Node) -> Node {
    match a {
        Node::Num(v) => Node::Num(-v),
        Node::Neg(u) => *u,
        other => Node::Neg(Box::new(other)),
    }
}

fn sc_add(a: Node, b: Node) -> Node {
    if is_zero(&a) {
        return b;
    }
    if is_zero(&b) {
        return a;
    }
    if let (Node::Num(x), Node::Num(y)) = (&a, &b) {
        return num(x + y);
    }
    Node::Add(Box::new(a), Box::new(b))
}

fn sc_sub(a: Node, b: Node) -> Node {
    if is_zero(&b) {
        return a;
    }
    if is_zero(&a) {
        return sc_neg(b);
    }
    if let (Node::Num(x), Node::Num(y)) = (&a, &b) {
        return num(x - y);
    }
    Node::Sub(Box::new(a), Box::new(b))
}

fn sc_mul(a: Node, b: Node) -> Node {
    if is_zero(&a) || is_zero(&b) {
        return num(0.0);
    }
    if is_one(&a) {
        return b;
    }
    if is_one(&b) {
        return a;
    }
    if let (Node::Num(x), Node::Num(y)) = (&a, &b) {
        return num(x * y);
    }
    Node::Mul(Box::new(a), Box::new(b))
}

fn sc_div(a: Node, b: Node) -> Node {
    if is_zero(&a) {
        return num(0.0);
    }
    if is_one(&b) {
        return a;
    }
    Node::Div(Box::new(a), Box::new(b))
}

fn d_node(n: &Node, vars: &VarSet, axis: usize) -> Node {
    match n {
        Node::Num(_) | Node::ConstPi | Node::ConstE => num(0.0),
        Node::Var(i) => num(if vars.axis(*i) == axis { 1.0 } else { 0.0 }),
        Node::Neg(u) => sc_neg(d_node(u, vars, axis)),
        Node::Add(a, b) => sc_add(d_node(a, vars, axis), d_node(b, vars, axis)),
        Node::Sub(a, b) => sc_sub(d_node(a, vars, axis), d_node(b, vars, axis)),
        Node::Mul(a, b) => sc_add(
            sc_mul(d_node(a, vars, axis), (**b).clone()),
            sc_mul((**a).clone(), d_node(b, vars, axis)),
        ),
        Node::Div(a, b) => sc_div(
            sc_sub(
                sc_mul(d_node(a, vars, axis), (**b).clone()),
                sc_mul((**a).clone(), d_node(b, vars, axis)),
            ),
            Node::PowInt(b.clone(), 2),
        ),
        Node::PowInt(a, k) => {
            if *k == 0 {
                return num(0.0);
            }
            sc_mul(
                sc_mul(num(f64::from(*k)), Node::PowInt(a.clone(), k - 1)),
                d_node(a, vars, axis),
            )
        }
        Node::Pow(a, b) => {
            // d(a^b) = a^b · (b′·log a + b·a′/a)
            sc_mul(
                n.clone(),
                sc_add(
                    sc_mul(
                        d_node(b, vars, axis),
                        Node::Call(Func::Log, a.clone()),
                    ),
                    sc_mul(
                        (**b).clone(),
                        sc_div(d_node(a, vars, axis), (**a).clone()),
                    ),
                ),
            )
        }
        Node::Call(f, a) => {
            let da = d_node(a, vars, axis);
            match f {
                Func::Exp => sc_mul(Node::Call(Func::Exp, a.clone()), da),
                Func::Log => sc_div(da, (**a).clone()),
                Func::Sin => sc_mul(Node::Call(Func::Cos, a.clone()), da),
                Func::Cos => sc_neg(sc_mul(Node::Call(Func::Sin, a.clone()), da)),
                Func::Tan => sc_mul(
                    sc_add(
                        num(1.0),
                        Node::PowInt(Box::new(Node::Call(Func::Tan, a.clone())), 2),
                    ),
                    da,
                ),
                Func::Sinh => sc_mul(Node::Call(Func::Cosh, a.clone()), da),
                Func::Cosh => sc_mul(Node::Call(Func::Sinh, a.clone()), da),
                Func::Tanh => sc_mul(
                    sc_sub(
                        num(1.0),
                        Node::PowInt(Box::new(Node::Call(Func::Tanh, a.clone())), 2),
                    ),
                    da,
                ),
                Func::Sqrt => sc_div(
                    da,
                    sc_mul(num(2.0), Node::Call(Func::Sqrt, a.clone())),
                ),
            }
        }
    }
}
