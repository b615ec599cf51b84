//! Numerical probe of the Reeb holonomy construction.
//!
//! The holonomy generator of the compact leaf is `φ(x) = f⁻¹(f(x) + 1)` for
//! a profile `f` that is flat at 0 and blows up at 1. The probe follows the
//! orbit points `x_{0,n} = f⁻¹(n)` and tabulates
//!
//! * the normalized derivative ratios `f⁽ᵏ⁾/(f')ᵏ`, which must decay to 0,
//! * `ln f'(x_{0,n})`, which must grow without bound, and
//! * `ln f'(x_{0,n}) / f(x_{0,n})`, which must decay to 0.
//!
//! Together these are the quantitative ingredients of the contradiction
//! that makes the holonomy obstruction non-trivial.

use serde::Serialize;

use super::solve::invert_monotone_bounded;
use super::DynError;
use crate::expr::{eval, eval_jet, CompiledExpr, EvalOptions, ExprAst};
use crate::jets::Jet;

#[derive(Debug, Clone, Serialize)]
pub struct ReebRow {
    /// The profile level `f(x_{0,n}) = n`.
    pub n: f64,
    pub x0: f64,
    /// `f⁽ᵏ⁾/(f')ᵏ` for k = 2, 3, 4.
    pub ratios: [f64; 3],
    pub ln_fprime: f64,
    pub ln_fprime_over_f: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReebProbeReport {
    /// Rows at integer levels n = 1 … n_max.
    pub rows: Vec<ReebRow>,
    /// Geometric extension at levels 10, 100, …, as far as representable.
    pub geometric_rows: Vec<ReebRow>,
    /// The table stopped early because of floating-point overflow.
    pub truncated: bool,
    /// `f(0)` as evaluated.
    pub value_at_zero: f64,
}

/// Validates the profile and tabulates the probe quantities.
///
/// Preconditions checked numerically: `f(0) = 0`, strict increase on
/// sampled points of `(0, 1)`, and blow-up toward 1. Floating-point
/// overflow near 1 truncates the table rather than failing.
pub fn reeb_probe(profile: &ExprAst, n_max: u32) -> Result<ReebProbeReport, DynError> {
    let opts = EvalOptions::default();
    let compiled = CompiledExpr::new(profile);
    let dcompiled = CompiledExpr::new(&profile.derivative());

    let value_at_zero = eval(profile, 0.0, &opts)?;
    if value_at_zero.abs() > 1e-9 {
        return Err(DynError::Invalid(format!(
            "profile must vanish at 0, got {value_at_zero}"
        )));
    }
    let mut prev = value_at_zero;
    for i in 1..=20 {
        let x = 0.045 * i as f64;
        let v = compiled.eval(x, &opts)?;
        if v <= prev {
            return Err(DynError::Invalid(format!(
                "profile is not strictly increasing near {x}"
            )));
        }
        prev = v;
    }
    let near_one = compiled.eval(1.0 - 1e-6, &opts).unwrap_or(f64::INFINITY);
    if near_one < 1e3 {
        return Err(DynError::Invalid(
            "profile does not blow up toward 1".into(),
        ));
    }

    let f = |x: f64| compiled.eval(x, &opts).ok();
    let df = |x: f64| dcompiled.eval(x, &opts).ok();

    let mut rows = Vec::new();
    let mut truncated = false;
    for n in 1..=n_max {
        match probe_level(profile, &f, &df, n as f64, &opts) {
            Ok(row) => rows.push(row),
            Err(_) => {
                truncated = true;
                break;
            }
        }
    }

    let mut geometric_rows = Vec::new();
    let mut level = 10.0f64;
    while level < 1e300 {
        match probe_level(profile, &f, &df, level, &opts) {
            Ok(row) => geometric_rows.push(row),
            Err(_) => {
                truncated = true;
                break;
            }
        }
        level *= 10.0;
    }

    Ok(ReebProbeReport { rows, geometric_rows, truncated, value_at_zero })
}

fn probe_level(
    profile: &ExprAst,
    f: &dyn Fn(f64) -> Option<f64>,
    df: &dyn Fn(f64) -> Option<f64>,
    level: f64,
    opts: &EvalOptions,
) -> Result<ReebRow, DynError> {
    let x0 = invert_monotone_bounded(f, Some(df), level, 0.0, 1.0, true)?;
    let jet = eval_jet(profile, &Jet::identity(x0, 4), opts)?;
    if !jet.is_finite() {
        return Err(DynError::FlowFailed("derivative overflow".into()));
    }
    let fp = *jet.deriv(1);
    if !(fp.is_finite() && fp > 0.0) {
        return Err(DynError::NotRegularAt(x0));
    }
    let ratios = [
        jet.deriv(2) / fp.powi(2),
        jet.deriv(3) / fp.powi(3),
        jet.deriv(4) / fp.powi(4),
    ];
    if ratios.iter().any(|r| !r.is_finite()) {
        return Err(DynError::FlowFailed("ratio overflow".into()));
    }
    Ok(ReebRow {
        n: level,
        x0,
        ratios,
        ln_fprime: fp.ln(),
        ln_fprime_over_f: fp.ln() / level,
    })
}

/// The profile shipped with the test suite: `exp(1/(1-x²)) - e`.
pub fn sample_profile() -> ExprAst {
    crate::expr::parse("exp(1/(1 - x^2)) - exp(1)").expect("fixed source")
}
