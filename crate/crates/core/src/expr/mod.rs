//! Closed-form expressions of one real variable.
//!
//! The grammar (see [`parse`]) covers rational and decimal literals, the
//! variable `x`, the arithmetic operators, and `exp`, `ln`, `sin`, `cos`,
//! `sqrt`, `abs`. Evaluation is overloaded on jets so that a single pass
//! produces every derivative up to the jet order; a parallel exact-rational
//! path exists for polynomial expressions.

mod eval;
mod parse;

pub use eval::{eval, eval_jet, eval_jet_exact, CompiledExpr, EvalError, EvalOptions};
pub use parse::{parse, ParseError};

use num::traits::Signed;

use crate::Q;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Exp,
    Ln,
    Sin,
    Cos,
    Sqrt,
    Abs,
}

impl UnaryOp {
    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Exp => "exp",
            UnaryOp::Ln => "ln",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Sqrt => "sqrt",
            UnaryOp::Abs => "abs",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// Expression tree over the single bound variable `x`.
///
/// Constant nodes hold nonnegative rationals; negative constants are
/// represented as `Neg(Const(..))` so that printing and re-parsing
/// round-trips structurally.
#[derive(Debug, Clone, PartialEq)]
pub enum ExprAst {
    Const(Q),
    Var,
    Unary(UnaryOp, Box<ExprAst>),
    Binary(BinaryOp, Box<ExprAst>, Box<ExprAst>),
}

impl ExprAst {
    pub fn constant(value: Q) -> ExprAst {
        if value.is_negative() {
            ExprAst::Unary(UnaryOp::Neg, Box::new(ExprAst::Const(-value)))
        } else {
            ExprAst::Const(value)
        }
    }

    pub fn int(value: i64) -> ExprAst {
        ExprAst::constant(crate::qi(value))
    }

    pub fn var() -> ExprAst {
        ExprAst::Var
    }

    pub fn unary(op: UnaryOp, inner: ExprAst) -> ExprAst {
        ExprAst::Unary(op, Box::new(inner))
    }

    pub fn binary(op: BinaryOp, lhs: ExprAst, rhs: ExprAst) -> ExprAst {
        ExprAst::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn add(lhs: ExprAst, rhs: ExprAst) -> ExprAst {
        ExprAst::binary(BinaryOp::Add, lhs, rhs)
    }

    pub fn sub(lhs: ExprAst, rhs: ExprAst) -> ExprAst {
        ExprAst::binary(BinaryOp::Sub, lhs, rhs)
    }

    pub fn mul(lhs: ExprAst, rhs: ExprAst) -> ExprAst {
        ExprAst::binary(BinaryOp::Mul, lhs, rhs)
    }

    pub fn div(lhs: ExprAst, rhs: ExprAst) -> ExprAst {
        // A quotient of two constants is a constant; this keeps rational
        // literals like `2/3` printable and re-parsable as a single node.
        if let (ExprAst::Const(a), ExprAst::Const(b)) = (&lhs, &rhs) {
            if !num::traits::Zero::is_zero(b) {
                return ExprAst::Const(a / b);
            }
        }
        ExprAst::binary(BinaryOp::Div, lhs, rhs)
    }

    pub fn pow(lhs: ExprAst, rhs: ExprAst) -> ExprAst {
        ExprAst::binary(BinaryOp::Pow, lhs, rhs)
    }

    pub fn neg(inner: ExprAst) -> ExprAst {
        ExprAst::unary(UnaryOp::Neg, inner)
    }

    /// Structural substitution of `inner` for the variable: the tree of
    /// `self ∘ inner`.
    pub fn compose(&self, inner: &ExprAst) -> ExprAst {
        match self {
            ExprAst::Const(c) => ExprAst::Const(c.clone()),
            ExprAst::Var => inner.clone(),
            ExprAst::Unary(op, a) => ExprAst::unary(*op, a.compose(inner)),
            ExprAst::Binary(op, a, b) => {
                ExprAst::binary(*op, a.compose(inner), b.compose(inner))
            }
        }
    }

    /// Symbolic derivative with respect to the variable.
    ///
    /// `abs` differentiates to `u·u'/abs(u)`, which correctly raises a
    /// domain error at the kink when evaluated. No simplification is
    /// performed beyond dropping structural zeros for constants.
    pub fn derivative(&self) -> ExprAst {
        use BinaryOp::*;
        use ExprAst as E;
        match self {
            E::Const(_) => E::int(0),
            E::Var => E::int(1),
            E::Unary(op, a) => {
                let da = a.derivative();
                match op {
                    UnaryOp::Neg => E::neg(da),
                    UnaryOp::Exp => E::mul(E::unary(UnaryOp::Exp, (**a).clone()), da),
                    UnaryOp::Ln => E::div(da, (**a).clone()),
                    UnaryOp::Sin => E::mul(E::unary(UnaryOp::Cos, (**a).clone()), da),
                    UnaryOp::Cos => {
                        E::neg(E::mul(E::unary(UnaryOp::Sin, (**a).clone()), da))
                    }
                    UnaryOp::Sqrt => E::div(
                        da,
                        E::mul(E::int(2), E::unary(UnaryOp::Sqrt, (**a).clone())),
                    ),
                    UnaryOp::Abs => E::div(
                        E::mul((**a).clone(), da),
                        E::unary(UnaryOp::Abs, (**a).clone()),
                    ),
                }
            }
            E::Binary(op, a, b) => {
                let da = a.derivative();
                let db = b.derivative();
                match op {
                    Add => E::add(da, db),
                    Sub => E::sub(da, db),
                    Mul => E::add(
                        E::mul(da, (**b).clone()),
                        E::mul((**a).clone(), db),
                    ),
                    Div => E::div(
                        E::sub(
                            E::mul(da, (**b).clone()),
                            E::mul((**a).clone(), db),
                        ),
                        E::mul((**b).clone(), (**b).clone()),
                    ),
                    Pow => match &**b {
                        // d(u^c) = c u^(c-1) u'
                        E::Const(c) => E::mul(
                            E::mul(
                                ExprAst::constant(c.clone()),
                                E::pow(
                                    (**a).clone(),
                                    ExprAst::constant(c.clone() - crate::qi(1)),
                                ),
                            ),
                            da,
                        ),
                        // d(u^v) = u^v (v' ln u + v u' / u)
                        _ => E::mul(
                            E::pow((**a).clone(), (**b).clone()),
                            E::add(
                                E::mul(db, E::unary(UnaryOp::Ln, (**a).clone())),
                                E::div(E::mul((**b).clone(), da), (**a).clone()),
                            ),
                        ),
                    },
                }
            }
        }
    }

    /// True when the tree uses only ring operations and integer powers, so
    /// exact rational evaluation applies.
    pub fn is_polynomial(&self) -> bool {
        match self {
            ExprAst::Const(_) | ExprAst::Var => true,
            ExprAst::Unary(UnaryOp::Neg, a) => a.is_polynomial(),
            ExprAst::Unary(_, _) => false,
            ExprAst::Binary(BinaryOp::Pow, a, b) => {
                a.is_polynomial()
                    && matches!(&**b, ExprAst::Const(c) if c.is_integer() && !c.is_negative())
            }
            ExprAst::Binary(BinaryOp::Div, a, b) => {
                a.is_polynomial() && matches!(&**b, ExprAst::Const(_))
            }
            ExprAst::Binary(_, a, b) => a.is_polynomial() && b.is_polynomial(),
        }
    }
}

// Printing uses explicit precedence levels so that parse(print(ast))
// reproduces the tree.
fn prec(ast: &ExprAst) -> u8 {
    match ast {
        ExprAst::Binary(BinaryOp::Add | BinaryOp::Sub, _, _) => 1,
        ExprAst::Binary(BinaryOp::Mul | BinaryOp::Div, _, _) => 2,
        // A non-integer constant prints as `p/q`, which reads back through
        // the division rule, so it carries division precedence.
        ExprAst::Const(c) if !c.is_integer() => 2,
        ExprAst::Unary(UnaryOp::Neg, _) => 3,
        ExprAst::Binary(BinaryOp::Pow, _, _) => 4,
        _ => 5,
    }
}

fn fmt_at(ast: &ExprAst, min_prec: u8, out: &mut String) {
    let own = prec(ast);
    let parens = own < min_prec;
    if parens {
        out.push('(');
    }
    match ast {
        ExprAst::Const(c) => {
            if c.is_integer() {
                out.push_str(&c.numer().to_string());
            } else {
                out.push_str(&format!("{}/{}", c.numer(), c.denom()));
            }
        }
        ExprAst::Var => out.push('x'),
        ExprAst::Unary(UnaryOp::Neg, a) => {
            out.push('-');
            // The operand binds at least as tightly as exponentiation, so
            // -x^2 round-trips as the negation of the power.
            fmt_at(a, 4, out);
        }
        ExprAst::Unary(op, a) => {
            out.push_str(op.name());
            out.push('(');
            fmt_at(a, 0, out);
            out.push(')');
        }
        ExprAst::Binary(op, a, b) => {
            // Left-associative operators need the right operand one level
            // tighter; exponentiation is the mirror image.
            let (sym, lp, rp) = match op {
                BinaryOp::Add => ("+", 1, 2),
                BinaryOp::Sub => ("-", 1, 2),
                BinaryOp::Mul => ("*", 2, 3),
                BinaryOp::Div => ("/", 2, 3),
                BinaryOp::Pow => ("^", 5, 4),
            };
            fmt_at(a, lp, out);
            out.push_str(sym);
            fmt_at(b, rp, out);
        }
    }
    if parens {
        out.push(')');
    }
}

impl std::fmt::Display for ExprAst {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut s = String::new();
        fmt_at(self, 0, &mut s);
        f.write_str(&s)
    }
}
