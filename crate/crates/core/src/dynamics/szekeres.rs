//! The vector-field derivative recursion and flow verification.
//!
//! For a flow `φ_t` generated by a field `v` with `f' = 1/v`, the higher
//! derivatives of `v` satisfy
//!
//! ```text
//! v⁽ⁿ⁾(x) · v(x)^{n-1} = -f⁽ⁿ⁺¹⁾(x)/(f'(x))^{n+1}
//!                        + Q_n( f''/(f')², …, f⁽ⁿ⁾/(f')ⁿ )
//! ```
//!
//! where `Q_n` is an integer polynomial produced by the recursion
//!
//! ```text
//! Q_1 = 0,
//! Q_{n+1}(u_1 … u_n) = 2 u_1 u_n + (n-1) u_1 Q_n
//!                      + Σ_k ∂Q_n/∂u_k (u_{k+1} - (k+1) u_1 u_k).
//! ```

use num::traits::ToPrimitive;
use serde::Serialize;

use super::{DynError, LocalDiffeo};
use crate::expr::{eval_jet, CompiledExpr, EvalOptions, ExprAst};
use crate::jets::Jet;
use crate::multipoly::MultiPoly;
use crate::Z;

/// Integer polynomial `Q_n` in the variables `u_1 … u_{n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct QPolynomial {
    pub n: usize,
    poly: MultiPoly<Z>,
}

impl QPolynomial {
    pub fn poly(&self) -> &MultiPoly<Z> {
        &self.poly
    }

    pub fn degree(&self) -> i64 {
        self.poly.total_degree().unwrap_or(0)
    }

    /// Evaluates at `u[0] = u_1, …, u[n-2] = u_{n-1}`.
    pub fn eval(&self, u: &[f64]) -> f64 {
        assert!(u.len() + 1 >= self.n, "need n-1 arguments");
        // Variable id k holds u_k; id 0 is unused.
        let mut point = vec![0.0; self.n.max(2)];
        for (k, val) in u.iter().enumerate() {
            point[k + 1] = *val;
        }
        self.poly
            .eval_f64(&point, |c| c.to_f64().expect("coefficient fits in f64"))
    }

    /// Human-readable rendering like `2*u1^2`.
    pub fn render(&self) -> String {
        if self.poly.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (mono, coeff) in self.poly.terms() {
            let mut s = String::new();
            let c = coeff.to_string();
            if c != "1" || mono.is_empty() {
                s.push_str(&c);
            }
            for (idx, (v, e)) in mono.iter().enumerate() {
                if idx > 0 || (c != "1" || mono.is_empty()) {
                    s.push('*');
                }
                s.push_str(&format!("u{v}"));
                if *e != 1 {
                    s.push_str(&format!("^{e}"));
                }
            }
            parts.push(s);
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

/// Builds `Q_n` by the recursion from `Q_1 = 0`.
pub fn q_polynomial(n: usize) -> QPolynomial {
    assert!(n >= 1);
    let mut poly: MultiPoly<Z> = MultiPoly::zero();
    let u = |k: usize| MultiPoly::<Z>::var(k as u16);
    for m in 1..n {
        // poly currently holds Q_m; build Q_{m+1}.
        let mut next = u(1).mul(&u(m)).scale(&Z::from(2));
        next = next.add(&u(1).mul(&poly).scale(&Z::from(m as i64 - 1)));
        for k in 1..m {
            let dq = poly.partial(k as u16);
            if dq.is_zero() {
                continue;
            }
            let shift = u(k + 1).sub(&u(1).mul(&u(k)).scale(&Z::from(k as i64 + 1)));
            next = next.add(&dq.mul(&shift));
        }
        poly = next;
    }
    QPolynomial { n, poly }
}

#[derive(Debug, Clone, Serialize)]
pub struct SzekeresReport {
    pub order: usize,
    pub q_polynomial: String,
    pub samples: Vec<(f64, f64)>,
    pub max_residual: f64,
}

/// Checks the derivative identity for a closed-form field `v` at sample
/// points, with `f' = 1/v` and all derivatives obtained from jets.
pub fn verify_szekeres_identity(
    v: &ExprAst,
    n: usize,
    xs: &[f64],
) -> Result<SzekeresReport, DynError> {
    assert!(n >= 1);
    let opts = EvalOptions::default();
    let qn = q_polynomial(n);
    let mut samples = Vec::with_capacity(xs.len());
    let mut max_residual: f64 = 0.0;
    for &x in xs {
        let v_jet = eval_jet(v, &Jet::identity(x, n), &opts)?;
        if v_jet.value().abs() <= opts.division_tolerance {
            return Err(DynError::Invalid(format!(
                "field vanishes at sample point {x}"
            )));
        }
        // w = 1/v is the derivative of the rectifying coordinate: its k-th
        // derivative is f^(k+1).
        let one = Jet::constant(x, 1.0, n);
        let w = one.div(&v_jet)?;
        let fp = *w.value();
        let lhs = v_jet.deriv(n) * v_jet.value().powi(n as i32 - 1);
        let mut u = Vec::with_capacity(n.saturating_sub(1));
        for j in 1..n {
            u.push(w.deriv(j) / fp.powi(j as i32 + 1));
        }
        let rhs = -w.deriv(n) / fp.powi(n as i32 + 1) + qn.eval(&u);
        let residual = (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0);
        samples.push((x, residual));
        max_residual = max_residual.max(residual);
    }
    Ok(SzekeresReport {
        order: n,
        q_polynomial: qn.render(),
        samples,
        max_residual,
    })
}

/// Integrates `dx/dt = v(x)` from `x0` over time `t` with adaptive
/// fourth-order stepping controlled to the given tolerance.
pub fn integrate_flow(
    v: &CompiledExpr,
    x0: f64,
    t: f64,
    tol: f64,
) -> Result<f64, DynError> {
    let opts = EvalOptions::default();
    let rhs = |x: f64| -> Result<f64, DynError> { Ok(v.eval(x, &opts)?) };
    let mut x = x0;
    let mut remaining = t;
    let dir = if t >= 0.0 { 1.0 } else { -1.0 };
    let mut h: f64 = dir * t.abs().min(0.1).max(1e-6);
    let mut steps = 0usize;
    while remaining.abs() > 1e-15 {
        if steps > 2_000_000 {
            return Err(DynError::FlowFailed("step budget exhausted".into()));
        }
        if h.abs() > remaining.abs() {
            h = remaining;
        }
        // One full step against two half steps estimates the local error.
        let full = rk4_step(&rhs, x, h)?;
        let half = rk4_step(&rhs, x, 0.5 * h)?;
        let two_half = rk4_step(&rhs, half, 0.5 * h)?;
        let err = (two_half - full).abs() / 15.0;
        let scale = tol * (1.0 + x.abs());
        if err <= scale || h.abs() <= 1e-12 {
            // Richardson-extrapolated value.
            x = two_half + (two_half - full) / 15.0;
            remaining -= h;
            if err < 0.01 * scale {
                h *= 2.0;
            }
            steps += 1;
        } else {
            h *= 0.5;
            if h.abs() < 1e-14 {
                return Err(DynError::FlowFailed(format!(
                    "step underflow near x = {x}"
                )));
            }
        }
    }
    Ok(x)
}

fn rk4_step(
    rhs: &impl Fn(f64) -> Result<f64, DynError>,
    x: f64,
    h: f64,
) -> Result<f64, DynError> {
    let k1 = rhs(x)?;
    let k2 = rhs(x + 0.5 * h * k1)?;
    let k3 = rhs(x + 0.5 * h * k2)?;
    let k4 = rhs(x + h * k3)?;
    Ok(x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowReport {
    /// Max over samples of `|φ_1(x) - φ(x)|`.
    pub time_one_residual: f64,
    /// Max over sample pairs of `|φ_s(φ_t(x)) - φ_{s+t}(x)|`.
    pub group_law_residual: f64,
    /// `|v(0)|`, when 0 is in the closure of the test window.
    pub v_at_zero: Option<f64>,
    /// `|v'(0)|`, checked when `φ'(0) = 1` within 1e-8.
    pub v_prime_at_zero: Option<f64>,
    pub integration_tolerance: f64,
}

/// Verifies that `phi` is the time-one map of the flow of `v`, that the
/// flow satisfies the one-parameter group law on sample times, and the
/// tangency conditions of the field at the origin.
pub fn flow_check(
    phi: &LocalDiffeo,
    v: &ExprAst,
    x_samples: &[f64],
    t_samples: &[f64],
) -> Result<FlowReport, DynError> {
    let tol = 1e-10;
    let compiled = CompiledExpr::new(v);
    let opts = EvalOptions::default();

    let mut time_one_residual: f64 = 0.0;
    for &x in x_samples {
        let flowed = integrate_flow(&compiled, x, 1.0, tol)?;
        let direct = phi.value(x)?;
        time_one_residual = time_one_residual.max((flowed - direct).abs());
    }

    let mut group_law_residual: f64 = 0.0;
    for &s in t_samples {
        for &t in t_samples {
            for &x in x_samples {
                let through = integrate_flow(&compiled, integrate_flow(&compiled, x, t, tol)?, s, tol)?;
                let direct = integrate_flow(&compiled, x, s + t, tol)?;
                group_law_residual = group_law_residual.max((through - direct).abs());
            }
        }
    }

    let v_at_zero = compiled.eval(0.0, &opts).ok().map(f64::abs);
    let v_prime_at_zero = match phi.jet_at(0.0, 1) {
        Ok(jet) if (jet.deriv(1) - 1.0).abs() <= 1e-8 => {
            let dv = eval_jet(v, &Jet::identity(0.0, 1), &opts)?;
            Some(dv.deriv(1).abs())
        }
        _ => None,
    };

    Ok(FlowReport {
        time_one_residual,
        group_law_residual,
        v_at_zero,
        v_prime_at_zero,
        integration_tolerance: tol,
    })
}
