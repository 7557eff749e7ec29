//! Univariate expression language.
//!
//! [`Expression::parse`] builds an immutable syntax tree and compiles it to a
//! flat stack program. Evaluation is available at a plain point
//! ([`Expression::eval`]) or as a derivative [`Jet`] up to order 3
//! ([`Expression::jet`]).

mod jet;
mod parse;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use smallvec::SmallVec;
use thiserror::Error;

use crate::Scalar;
pub use jet::{Jet, MAX_ORDER};
use jet::Taylor;
pub use parse::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Ln,
    Sqrt,
    Sin,
    Cos,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constant {
    E,
    Pi,
}

impl Constant {
    fn value<T: Scalar>(self) -> T {
        match self {
            Constant::E => T::E(),
            Constant::Pi => T::PI(),
        }
    }
}

/// Syntax tree node.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Number(f64),
    Var,
    Const(Constant),
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

impl Node {
    fn is_leaf(&self) -> bool {
        matches!(self, Node::Number(_) | Node::Var | Node::Const(_))
    }

    fn depends_on_x(&self) -> bool {
        match self {
            Node::Var => true,
            Node::Number(_) | Node::Const(_) => false,
            Node::Neg(a) | Node::Call(_, a) => a.depends_on_x(),
            Node::Binary(_, a, b) => a.depends_on_x() || b.depends_on_x(),
        }
    }

    fn write_operand(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_leaf() {
            write!(f, "{self}")
        } else {
            write!(f, "({self})")
        }
    }
}

/// Canonical text: every non-leaf operand is parenthesized, so re-parsing the
/// output yields a structurally equal tree.
impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Number(v) => write!(f, "{v}"),
            Node::Var => f.write_str("x"),
            Node::Const(Constant::E) => f.write_str("e"),
            Node::Const(Constant::Pi) => f.write_str("pi"),
            Node::Neg(a) => {
                f.write_str("-")?;
                a.write_operand(f)
            }
            Node::Binary(op, a, b) => {
                a.write_operand(f)?;
                f.write_str(op.symbol())?;
                b.write_operand(f)
            }
            Node::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    LogOfNonPositive,
    SqrtOfNegative,
    /// Derivative requested where the function is not differentiable (sqrt at 0).
    SingularDerivative,
    DivisionByZero,
    PowerOfNonPositive,
    NonFinite,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("domain error at x = {at}: {kind:?}")]
    Domain { kind: DomainKind, at: f64 },
    #[error("derivative order {0} exceeds the supported maximum of 3")]
    OrderTooHigh(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Instr {
    Num(f64),
    Var,
    Const(Constant),
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    /// `^` with a constant integer exponent; the exponent is not on the stack.
    PowInt(i32),
    /// `^` with a constant non-integer exponent; the exponent is not on the stack.
    PowConst(f64),
    Pow,
    Call(Func),
}

fn compile(node: &Node, out: &mut Vec<Instr>) {
    match node {
        Node::Number(v) => out.push(Instr::Num(*v)),
        Node::Var => out.push(Instr::Var),
        Node::Const(c) => out.push(Instr::Const(*c)),
        Node::Neg(a) => {
            compile(a, out);
            out.push(Instr::Neg);
        }
        Node::Binary(BinOp::Pow, base, exp) if !exp.depends_on_x() => {
            let mut sub = Vec::new();
            compile(exp, &mut sub);
            match run_scalar::<f64>(&sub, 0.0) {
                Ok(r) if r.fract() == 0.0 && r.abs() <= i32::MAX as f64 => {
                    compile(base, out);
                    out.push(Instr::PowInt(r as i32));
                }
                Ok(r) => {
                    compile(base, out);
                    out.push(Instr::PowConst(r));
                }
                Err(_) => {
                    compile(base, out);
                    out.extend(sub);
                    out.push(Instr::Pow);
                }
            }
        }
        Node::Binary(op, a, b) => {
            compile(a, out);
            compile(b, out);
            out.push(match op {
                BinOp::Add => Instr::Add,
                BinOp::Sub => Instr::Sub,
                BinOp::Mul => Instr::Mul,
                BinOp::Div => Instr::Div,
                BinOp::Pow => Instr::Pow,
            });
        }
        Node::Call(func, a) => {
            compile(a, out);
            out.push(Instr::Call(*func));
        }
    }
}

fn dom(kind: DomainKind, at: f64) -> EvalError {
    EvalError::Domain { kind, at }
}

fn run_scalar<T: Scalar>(prog: &[Instr], x: T) -> Result<T, EvalError> {
    let at = x.as_f64();
    let mut st: SmallVec<[T; 16]> = SmallVec::new();
    for ins in prog {
        let v = match *ins {
            Instr::Num(v) => T::lit(v),
            Instr::Var => x,
            Instr::Const(c) => c.value(),
            Instr::Neg => -st.pop().unwrap(),
            Instr::PowInt(n) => {
                let a = st.pop().unwrap();
                if n < 0 && a == T::zero() {
                    return Err(dom(DomainKind::DivisionByZero, at));
                }
                a.powi(n)
            }
            Instr::PowConst(r) => {
                let a = st.pop().unwrap();
                if a < T::zero() || (a == T::zero() && r <= 0.0) || a.is_nan() {
                    return Err(dom(DomainKind::PowerOfNonPositive, at));
                }
                a.powf(T::lit(r))
            }
            Instr::Call(func) => {
                let a = st.pop().unwrap();
                match func {
                    Func::Exp => a.exp(),
                    Func::Ln => {
                        if !(a > T::zero()) {
                            return Err(dom(DomainKind::LogOfNonPositive, at));
                        }
                        a.ln()
                    }
                    Func::Sqrt => {
                        if a < T::zero() || a.is_nan() {
                            return Err(dom(DomainKind::SqrtOfNegative, at));
                        }
                        a.sqrt()
                    }
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                }
            }
            Instr::Add | Instr::Sub | Instr::Mul | Instr::Div | Instr::Pow => {
                let b = st.pop().unwrap();
                let a = st.pop().unwrap();
                match *ins {
                    Instr::Add => a + b,
                    Instr::Sub => a - b,
                    Instr::Mul => a * b,
                    Instr::Div => {
                        if b == T::zero() {
                            return Err(dom(DomainKind::DivisionByZero, at));
                        }
                        a / b
                    }
                    _ => {
                        if a == T::zero() && b > T::zero() {
                            T::zero()
                        } else if !(a > T::zero()) {
                            return Err(dom(DomainKind::PowerOfNonPositive, at));
                        } else {
                            a.powf(b)
                        }
                    }
                }
            }
        };
        st.push(v);
    }
    let v = st.pop().expect("non-empty program");
    if !v.is_finite() {
        return Err(dom(DomainKind::NonFinite, at));
    }
    Ok(v)
}

fn run_taylor<T: Scalar>(prog: &[Instr], x: T, n: usize) -> Result<Taylor<T>, EvalError> {
    let at = x.as_f64();
    let mut st: SmallVec<[Taylor<T>; 16]> = SmallVec::new();
    for ins in prog {
        let v = match *ins {
            Instr::Num(v) => Taylor::constant(T::lit(v), n),
            Instr::Var => Taylor::variable(x, n),
            Instr::Const(c) => Taylor::constant(c.value(), n),
            Instr::Neg => st.pop().unwrap().neg(),
            Instr::PowInt(k) => st.pop().unwrap().powi(k, at)?,
            Instr::PowConst(r) => st.pop().unwrap().powf(T::lit(r), at)?,
            Instr::Call(func) => {
                let a = st.pop().unwrap();
                match func {
                    Func::Exp => a.exp(),
                    Func::Ln => a.ln(at)?,
                    Func::Sqrt => a.sqrt(at)?,
                    Func::Sin => a.sin_cos().0,
                    Func::Cos => a.sin_cos().1,
                }
            }
            Instr::Add | Instr::Sub | Instr::Mul | Instr::Div | Instr::Pow => {
                let b = st.pop().unwrap();
                let a = st.pop().unwrap();
                match *ins {
                    Instr::Add => a.add(b),
                    Instr::Sub => a.sub(b),
                    Instr::Mul => a.mul(b),
                    Instr::Div => a.div(b, at)?,
                    _ => a.pow(b, at)?,
                }
            }
        };
        st.push(v);
    }
    let v = st.pop().expect("non-empty program");
    if v.c[..=n].iter().any(|c| !c.is_finite()) {
        return Err(dom(DomainKind::NonFinite, at));
    }
    Ok(v)
}

/// Immutable parsed expression in the variable `x`.
///
/// Cloning is cheap: the tree and compiled program are shared.
#[derive(Debug, Clone)]
pub struct Expression {
    root: Arc<Node>,
    source: Arc<str>,
    program: Arc<[Instr]>,
}

impl Expression {
    pub fn parse(source: &str) -> Result<Self, ParseError> {
        let root = parse::parse_node(source)?;
        Ok(Self::build(root, source.into()))
    }

    /// Wraps an already-built tree; the source text is its canonical rendering.
    pub fn from_node(root: Node) -> Self {
        let text = root.to_string();
        Self::build(root, text.into())
    }

    fn build(root: Node, source: Arc<str>) -> Self {
        let mut prog = Vec::new();
        compile(&root, &mut prog);
        Expression { root: Arc::new(root), source, program: prog.into() }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// The text this expression was parsed from.
    pub fn source_text(&self) -> &str {
        &self.source
    }

    /// Canonical fully-parenthesized rendering.
    pub fn serialize(&self) -> String {
        self.root.to_string()
    }

    pub fn eval<T: Scalar>(&self, x: T) -> Result<T, EvalError> {
        run_scalar(&self.program, x)
    }

    /// Value and derivatives through `order` (at most 3) at `x`.
    pub fn jet<T: Scalar>(&self, x: T, order: usize) -> Result<Jet<T>, EvalError> {
        if order > MAX_ORDER {
            return Err(EvalError::OrderTooHigh(order));
        }
        let t = run_taylor(&self.program, x, order)?;
        Ok(Jet::from_taylor(&t))
    }

    /// `self^n` as a new expression.
    pub fn powi(&self, n: i32) -> Self {
        Self::from_node(Node::Binary(
            BinOp::Pow,
            Box::new(self.root().clone()),
            Box::new(Node::Number(n as f64)),
        ))
    }

    /// Product of all factors; `None` for an empty slice.
    pub fn product(factors: &[Expression]) -> Option<Self> {
        let mut it = factors.iter();
        let first = it.next()?.root().clone();
        let node = it.fold(first, |acc, f| {
            Node::Binary(BinOp::Mul, Box::new(acc), Box::new(f.root().clone()))
        });
        Some(Self::from_node(node))
    }

    /// `self + c` as a new expression.
    pub fn plus_constant(&self, c: f64) -> Self {
        let rhs = if c < 0.0 { Node::Neg(Box::new(Node::Number(-c))) } else { Node::Number(c) };
        Self::from_node(Node::Binary(BinOp::Add, Box::new(self.root().clone()), Box::new(rhs)))
    }
}

/// Free-function form of [`Expression::parse`].
pub fn parse(source: &str) -> Result<Expression, ParseError> {
    Expression::parse(source)
}

/// Free-function form of [`Expression::jet`].
pub fn eval_jet<T: Scalar>(e: &Expression, x: T, order: usize) -> Result<Jet<T>, EvalError> {
    e.jet(x, order)
}

/// Structural equality of the trees; source text is ignored.
impl PartialEq for Expression {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl FromStr for Expression {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}
