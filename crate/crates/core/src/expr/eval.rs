//! Evaluation of expression trees: plain, jet-overloaded, and exact.

use num::traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use super::{BinaryOp, ExprAst, UnaryOp};
use crate::jets::{q_to_f64, Jet, JetError};
use crate::Q;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("logarithm of a non-positive value {0}")]
    LnDomain(f64),
    #[error("square root of a negative value {0}")]
    SqrtDomain(f64),
    #[error("abs is not differentiable at a base value within tolerance of 0")]
    AbsAtZero,
    #[error("division by a value within tolerance of zero ({0:e})")]
    DivNearZero(f64),
    #[error("negative base {0} raised to a non-integer power")]
    PowDomain(f64),
    #[error("operation `{0}` is not supported in exact rational mode")]
    ExactUnsupported(&'static str),
    #[error("exact mode requires constant integer exponents")]
    ExactExponent,
    #[error("jet error: {0}")]
    Jet(#[from] JetError),
}

/// Knobs for numeric evaluation.
#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    /// Divisors with absolute value at or below this are treated as zero.
    pub division_tolerance: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { division_tolerance: 1e-12 }
    }
}

/// Expression tree with constants pre-converted to `f64`, for hot loops.
#[derive(Debug, Clone)]
pub struct CompiledExpr {
    root: CNode,
}

#[derive(Debug, Clone)]
enum CNode {
    Const(f64),
    Var,
    Unary(UnaryOp, Box<CNode>),
    Binary(BinaryOp, Box<CNode>, Box<CNode>),
    /// Integer power, split out so the common `x^n` case avoids `powf`.
    PowInt(Box<CNode>, i32),
}

impl CompiledExpr {
    pub fn new(ast: &ExprAst) -> Self {
        CompiledExpr { root: compile(ast) }
    }

    pub fn eval(&self, x: f64, opts: &EvalOptions) -> Result<f64, EvalError> {
        eval_node(&self.root, x, opts)
    }
}

fn compile(ast: &ExprAst) -> CNode {
    match ast {
        ExprAst::Const(c) => CNode::Const(q_to_f64(c)),
        ExprAst::Var => CNode::Var,
        ExprAst::Unary(op, a) => CNode::Unary(*op, Box::new(compile(a))),
        ExprAst::Binary(BinaryOp::Pow, a, b) => {
            if let Some(n) = constant_integer_exponent(b) {
                if let Ok(n32) = i32::try_from(n) {
                    return CNode::PowInt(Box::new(compile(a)), n32);
                }
            }
            CNode::Binary(BinaryOp::Pow, Box::new(compile(a)), Box::new(compile(b)))
        }
        ExprAst::Binary(op, a, b) => {
            CNode::Binary(*op, Box::new(compile(a)), Box::new(compile(b)))
        }
    }
}

/// Recognizes exponents of the shape `n` or `-n` for integer `n`.
fn constant_integer_exponent(ast: &ExprAst) -> Option<i64> {
    match ast {
        ExprAst::Const(c) if c.is_integer() => c.numer().to_i64(),
        ExprAst::Unary(UnaryOp::Neg, inner) => {
            constant_integer_exponent(inner).map(|n| -n)
        }
        _ => None,
    }
}

fn eval_node(node: &CNode, x: f64, opts: &EvalOptions) -> Result<f64, EvalError> {
    Ok(match node {
        CNode::Const(c) => *c,
        CNode::Var => x,
        CNode::Unary(op, a) => {
            let v = eval_node(a, x, opts)?;
            match op {
                UnaryOp::Neg => -v,
                UnaryOp::Exp => v.exp(),
                UnaryOp::Ln => {
                    if v <= 0.0 {
                        return Err(EvalError::LnDomain(v));
                    }
                    v.ln()
                }
                UnaryOp::Sin => v.sin(),
                UnaryOp::Cos => v.cos(),
                UnaryOp::Sqrt => {
                    if v < 0.0 {
                        return Err(EvalError::SqrtDomain(v));
                    }
                    v.sqrt()
                }
                UnaryOp::Abs => v.abs(),
            }
        }
        CNode::PowInt(a, n) => {
            let v = eval_node(a, x, opts)?;
            if *n < 0 && v.abs() <= opts.division_tolerance {
                return Err(EvalError::DivNearZero(v));
            }
            v.powi(*n)
        }
        CNode::Binary(op, a, b) => {
            let lhs = eval_node(a, x, opts)?;
            let rhs = eval_node(b, x, opts)?;
            match op {
                BinaryOp::Add => lhs + rhs,
                BinaryOp::Sub => lhs - rhs,
                BinaryOp::Mul => lhs * rhs,
                BinaryOp::Div => {
                    if rhs.abs() <= opts.division_tolerance {
                        return Err(EvalError::DivNearZero(rhs));
                    }
                    lhs / rhs
                }
                BinaryOp::Pow => {
                    if lhs < 0.0 && rhs.fract() != 0.0 {
                        return Err(EvalError::PowDomain(lhs));
                    }
                    lhs.powf(rhs)
                }
            }
        }
    })
}

/// Plain scalar evaluation at `x`.
pub fn eval(ast: &ExprAst, x: f64, opts: &EvalOptions) -> Result<f64, EvalError> {
    CompiledExpr::new(ast).eval(x, opts)
}

/// Taylor-mode evaluation: the output jet is the order-`q` expansion of the
/// expression composed with the input jet's function, at the input base.
pub fn eval_jet(ast: &ExprAst, input: &Jet<f64>, opts: &EvalOptions) -> Result<Jet<f64>, EvalError> {
    let q = input.order();
    let base = *input.base();
    Ok(match ast {
        ExprAst::Const(c) => Jet::constant(base, q_to_f64(c), q),
        ExprAst::Var => input.clone(),
        ExprAst::Unary(op, a) => {
            let u = eval_jet(a, input, opts)?;
            match op {
                UnaryOp::Neg => u.neg(),
                UnaryOp::Exp => u.exp(),
                UnaryOp::Ln => {
                    if *u.value() <= 0.0 {
                        return Err(EvalError::LnDomain(*u.value()));
                    }
                    u.ln()
                }
                UnaryOp::Sin => u.sin_cos().0,
                UnaryOp::Cos => u.sin_cos().1,
                UnaryOp::Sqrt => {
                    if *u.value() < 0.0 {
                        return Err(EvalError::SqrtDomain(*u.value()));
                    }
                    if *u.value() == 0.0 && q >= 1 {
                        return Err(EvalError::DivNearZero(0.0));
                    }
                    u.sqrt()
                }
                UnaryOp::Abs => {
                    // |u| is smooth wherever u does not vanish; refuse to
                    // pick a one-sided derivative at the kink.
                    if q >= 1 && u.value().abs() <= opts.division_tolerance {
                        return Err(EvalError::AbsAtZero);
                    }
                    if *u.value() < 0.0 {
                        u.neg()
                    } else {
                        u
                    }
                }
            }
        }
        ExprAst::Binary(op, a, b) => {
            match op {
                BinaryOp::Add => {
                    let ua = eval_jet(a, input, opts)?;
                    let ub = eval_jet(b, input, opts)?;
                    ua.add(&ub)?
                }
                BinaryOp::Sub => {
                    let ua = eval_jet(a, input, opts)?;
                    let ub = eval_jet(b, input, opts)?;
                    ua.sub(&ub)?
                }
                BinaryOp::Mul => {
                    let ua = eval_jet(a, input, opts)?;
                    let ub = eval_jet(b, input, opts)?;
                    ua.mul(&ub)?
                }
                BinaryOp::Div => {
                    let ua = eval_jet(a, input, opts)?;
                    let ub = eval_jet(b, input, opts)?;
                    if ub.value().abs() <= opts.division_tolerance {
                        return Err(EvalError::DivNearZero(*ub.value()));
                    }
                    ua.div(&ub)?
                }
                BinaryOp::Pow => {
                    let ua = eval_jet(a, input, opts)?;
                    if let Some(n) = constant_integer_exponent(b) {
                        if n < 0 && ua.value().abs() <= opts.division_tolerance {
                            return Err(EvalError::DivNearZero(*ua.value()));
                        }
                        ua.powi(n)?
                    } else {
                        // u^v = exp(v ln u) needs a positive base.
                        let ub = eval_jet(b, input, opts)?;
                        if *ua.value() <= 0.0 {
                            return Err(EvalError::PowDomain(*ua.value()));
                        }
                        ub.mul(&ua.ln())?.exp()
                    }
                }
            }
        }
    })
}

/// Exact-rational Taylor-mode evaluation for polynomial expressions.
///
/// Supported nodes: constants, the variable, negation, `+ - *`, division,
/// and powers with constant integer exponents. Transcendental functions
/// report [`EvalError::ExactUnsupported`].
pub fn eval_jet_exact(ast: &ExprAst, input: &Jet<Q>) -> Result<Jet<Q>, EvalError> {
    let q = input.order();
    let base = input.base().clone();
    Ok(match ast {
        ExprAst::Const(c) => Jet::constant(base, c.clone(), q),
        ExprAst::Var => input.clone(),
        ExprAst::Unary(UnaryOp::Neg, a) => eval_jet_exact(a, input)?.neg(),
        ExprAst::Unary(op, _) => return Err(EvalError::ExactUnsupported(op.name())),
        ExprAst::Binary(op, a, b) => match op {
            BinaryOp::Add => {
                let ua = eval_jet_exact(a, input)?;
                let ub = eval_jet_exact(b, input)?;
                ua.add(&ub)?
            }
            BinaryOp::Sub => {
                let ua = eval_jet_exact(a, input)?;
                let ub = eval_jet_exact(b, input)?;
                ua.sub(&ub)?
            }
            BinaryOp::Mul => {
                let ua = eval_jet_exact(a, input)?;
                let ub = eval_jet_exact(b, input)?;
                ua.mul(&ub)?
            }
            BinaryOp::Div => {
                let ua = eval_jet_exact(a, input)?;
                let ub = eval_jet_exact(b, input)?;
                if ub.value().is_zero() {
                    return Err(EvalError::DivNearZero(0.0));
                }
                ua.div(&ub)?
            }
            BinaryOp::Pow => {
                let n = constant_integer_exponent(b).ok_or(EvalError::ExactExponent)?;
                let ua = eval_jet_exact(a, input)?;
                if n < 0 && ua.value().is_zero() {
                    return Err(EvalError::DivNearZero(0.0));
                }
                exact_powi(&ua, n)?
            }
        },
    })
}

fn exact_powi(jet: &Jet<Q>, n: i64) -> Result<Jet<Q>, EvalError> {
    let q = jet.order();
    let base = jet.base().clone();
    if n == 0 {
        return Ok(Jet::constant(base, crate::qi(1), q));
    }
    let mut acc = Jet::constant(base.clone(), crate::qi(1), q);
    let mut pow = jet.clone();
    let mut e = n.unsigned_abs();
    loop {
        if e & 1 == 1 {
            acc = acc.mul(&pow)?;
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        pow = pow.mul(&pow)?;
    }
    if n < 0 {
        let one = Jet::constant(base, crate::qi(1), q);
        Ok(one.div(&acc)?)
    } else {
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::{qi, qr};

    fn opts() -> EvalOptions {
        EvalOptions::default()
    }

    #[test]
    fn square_of_identity_jet() {
        let ast = parse("x^2").unwrap();
        let input = Jet::identity(3.0, 4);
        let out = eval_jet(&ast, &input, &opts()).unwrap();
        assert_eq!(out.derivs(), &[9.0, 6.0, 2.0, 0.0, 0.0]);
    }

    #[test]
    fn exponential_taylor_coefficients() {
        let ast = parse("exp(x)").unwrap();
        let input = Jet::identity(0.0, 4);
        let out = eval_jet(&ast, &input, &opts()).unwrap();
        let c = out.taylor_coeffs();
        let expect = [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0];
        for (a, b) in c.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn geometric_series_derivatives() {
        let ast = parse("x/(1-x)").unwrap();
        let input = Jet::identity(0.0, 3);
        let out = eval_jet(&ast, &input, &opts()).unwrap();
        assert_eq!(out.derivs(), &[0.0, 1.0, 2.0, 6.0]);
    }

    #[test]
    fn order_zero_jet_matches_plain_evaluation() {
        let ast = parse("exp(sin(x) + x^2) - sqrt(x + 2)").unwrap();
        for &x in &[0.0, 0.5, 1.3, -1.1] {
            let direct = eval(&ast, x, &opts()).unwrap();
            let jet = eval_jet(&ast, &Jet::identity(x, 0), &opts()).unwrap();
            assert_eq!(*jet.value(), direct);
        }
    }

    #[test]
    fn ln_of_nonpositive_value_is_a_domain_error() {
        let ast = parse("ln(x)").unwrap();
        assert!(matches!(
            eval(&ast, -1.0, &opts()),
            Err(EvalError::LnDomain(_))
        ));
    }

    #[test]
    fn division_near_zero_respects_tolerance() {
        let ast = parse("1/x").unwrap();
        assert!(matches!(
            eval(&ast, 1e-13, &opts()),
            Err(EvalError::DivNearZero(_))
        ));
        let loose = EvalOptions { division_tolerance: 1e-15 };
        assert!(eval(&ast, 1e-13, &loose).is_ok());
    }

    #[test]
    fn abs_at_zero_refuses_derivatives_but_evaluates() {
        let ast = parse("abs(x)").unwrap();
        assert_eq!(eval(&ast, 0.0, &opts()).unwrap(), 0.0);
        let jet = Jet::identity(0.0, 2);
        assert!(matches!(
            eval_jet(&ast, &jet, &opts()),
            Err(EvalError::AbsAtZero)
        ));
        let away = Jet::identity(-2.0, 2);
        let out = eval_jet(&ast, &away, &opts()).unwrap();
        assert_eq!(out.derivs(), &[2.0, -1.0, 0.0]);
    }

    #[test]
    fn exact_mode_matches_rational_arithmetic() {
        let ast = parse("x^3 - x/2 + 1/3").unwrap();
        let input: Jet<Q> = Jet::identity(qr(1, 2), 3);
        let out = eval_jet_exact(&ast, &input).unwrap();
        // p(1/2) = 1/8 - 1/4 + 1/3 = 5/24
        assert_eq!(*out.value(), qr(5, 24));
        // p'(1/2) = 3/4 - 1/2 = 1/4
        assert_eq!(*out.deriv(1), qr(1, 4));
        assert_eq!(*out.deriv(2), qi(3));
        assert_eq!(*out.deriv(3), qi(6));
    }

    #[test]
    fn exact_mode_rejects_transcendentals() {
        let ast = parse("exp(x)").unwrap();
        let input: Jet<Q> = Jet::identity(qi(0), 2);
        assert!(matches!(
            eval_jet_exact(&ast, &input),
            Err(EvalError::ExactUnsupported(_))
        ));
    }

    #[test]
    fn chain_rule_through_jet_composition() {
        // Evaluating g on the jet of h equals evaluating g∘h, exactly for
        // polynomials.
        let g = parse("x^2 + 3*x").unwrap();
        let h = parse("1 - 2*x^2").unwrap();
        let input: Jet<Q> = Jet::identity(qr(1, 3), 4);
        let inner = eval_jet_exact(&h, &input).unwrap();
        let outer_then_inner = eval_jet_exact(&g, &inner).unwrap();
        let composed = eval_jet_exact(&g.compose(&h), &input).unwrap();
        assert_eq!(outer_then_inner, composed);
    }
}
