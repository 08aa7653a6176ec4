use super::lexer::{lex, Tok};
use super::{Func, Node, ParseError, ParseErrorKind, VarSet};

/// Integer-literal exponents up to this magnitude compile to repeated
/// multiplication; larger ones fall back to the real-power route (which
/// requires a positive base at evaluation time).
const MAX_INT_EXPONENT: f64 = 1_048_576.0;

const FUNCS: [(&str, Func); 9] = [
    ("exp", Func::Exp),
    ("log", Func::Log),
    ("sin", Func::Sin),
    ("cos", Func::Cos),
    ("tan", Func::Tan),
    ("sinh", Func::Sinh),
    ("cosh", Func::Cosh),
    ("tanh", Func::Tanh),
    ("sqrt", Func::Sqrt),
];

fn func_named(name: &str) -> Option<Func> {
    FUNCS.iter().find(|(n, _)| *n == name).map(|(_, f)| *f)
}

pub(super) fn parse(src: &str, vars: &VarSet) -> Result<Node, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks: &toks, i: 0, vars };
    let node = p.expr()?;
    p.expect_eof()?;
    Ok(node)
}

struct Parser<'a> {
    toks: &'a [(Tok, usize)],
    i: usize,
    vars: &'a VarSet,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn pos(&self) -> usize {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        ParseError {
            pos: self.pos(),
            kind: ParseErrorKind::Unexpected {
                expected: expected.to_string(),
                found: self.peek().describe(),
            },
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("an operator or end of input"))
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Node::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Node::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    // Unary minus binds looser than `^`, so `-x^2` is −(x²); `^` itself is
    // right-associative through the recursion into `factor`.
    fn factor(&mut self) -> Result<Node, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Node::Neg(Box::new(self.factor()?)));
        }
        let base = self.primary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exponent = self.factor()?;
            return Ok(lower_pow(base, exponent));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Node, ParseError> {
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Node::Num(v))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.bump();
                Ok(inner)
            }
            Tok::Ident(name) => {
                let at = self.pos();
                self.bump();
                if *self.peek() == Tok::LParen {
                    let Some(f) = func_named(&name) else {
                        return Err(ParseError {
                            pos: at,
                            kind: ParseErrorKind::UnknownIdentifier(name),
                        });
                    };
                    self.bump();
                    let arg = self.expr()?;
                    if *self.peek() != Tok::RParen {
                        return Err(self.unexpected("`)` closing the argument"));
                    }
                    self.bump();
                    return Ok(Node::Call(f, Box::new(arg)));
                }
                if let Some(slot) = self.vars.slot_named(&name) {
                    return Ok(Node::Var(slot));
                }
                match name.as_str() {
                    "pi" => Ok(Node::ConstPi),
                    "e" => Ok(Node::ConstE),
                    _ if func_named(&name).is_some() => Err(ParseError {
                        pos: at,
                        kind: ParseErrorKind::FunctionArity(name),
                    }),
                    _ => Err(ParseError {
                        pos: at,
                        kind: ParseErrorKind::UnknownIdentifier(name),
                    }),
                }
            }
            _ => Err(self.unexpected(
                "a literal, variable, function call, `-`, or `(`",
            )),
        }
    }
}

/// Route `base ^ exponent` to repeated multiplication when the exponent is a
/// (possibly negated) integer literal.
fn lower_pow(base: Node, exponent: Node) -> Node {
    if let Some(n) = int_literal(&exponent) {
        return Node::PowInt(Box::new(base), n);
    }
    Node::Pow(Box::new(base), Box::new(exponent))
}

fn int_literal(n: &Node) -> Option<i32> {
    match n {
        Node::Num(v) if v.fract() == 0.0 && v.abs() <= MAX_INT_EXPONENT => {
            Some(*v as i32)
        }
        Node::Neg(inner) => int_literal(inner).map(|k| -k),
        _ => None,
    }
}
