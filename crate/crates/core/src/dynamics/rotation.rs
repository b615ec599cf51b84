//! Rotation numbers of circle-map lifts and Diophantine diagnostics.

use serde::Serialize;

use super::{DynError, LocalDiffeo};

/// Birkhoff estimate of the rotation number.
#[derive(Debug, Clone, Serialize)]
pub struct RotationEstimate {
    /// Mean displacement `(F^n(z) - z) / n` before reduction.
    pub raw: f64,
    /// Reduced into the half-open interval `(0, 1]`.
    pub reduced: f64,
    /// Deterministic bound `1/n` valid for lifts of circle homeomorphisms.
    pub error_bound: f64,
    pub iterations: u64,
    pub seed: f64,
}

/// Reduction into `(0, 1]`: integers map to 1.
pub fn reduce_mod1_upper(x: f64) -> f64 {
    let frac = x - x.floor();
    if frac == 0.0 {
        1.0
    } else {
        frac
    }
}

/// Estimates the rotation number of a lift by iterating it.
///
/// The estimate `(F^n(z) - z)/n` is within `1/n` of the limit for a lift of
/// a circle homeomorphism. The map is verified to satisfy the lift property
/// before iterating.
pub fn rotation_number(
    phi: &LocalDiffeo,
    iterations: u64,
    seed: f64,
) -> Result<RotationEstimate, DynError> {
    if iterations < 1 {
        return Err(DynError::Invalid("iterations must be at least 1".into()));
    }
    if !phi.is_circle_lift() {
        return Err(DynError::NotACircleLift);
    }
    let mut z = seed;
    for _ in 0..iterations {
        z = phi.value(z)?;
    }
    let raw = (z - seed) / iterations as f64;
    Ok(RotationEstimate {
        raw,
        reduced: reduce_mod1_upper(raw),
        error_bound: 1.0 / iterations as f64,
        iterations,
        seed,
    })
}

/// One continued-fraction convergent with its quality diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct Convergent {
    pub p: i64,
    pub q: i64,
    pub error: f64,
    /// `-ln|α - p/q| / ln q - 2`, when `q >= 2` and the error is resolvable
    /// in double precision.
    pub exponent: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiophantineReport {
    pub alpha: f64,
    pub denominator_cap: u64,
    pub convergents: Vec<Convergent>,
    /// Least-squares slope of `-ln(error)` against `ln q` minus 2, clamped
    /// at zero: the empirical irrationality excess.
    pub fitted_exponent: f64,
    /// Envelope constant: `min q^{2+β} |α - p/q|` over usable convergents.
    pub envelope_constant: f64,
    /// Raised when a late convergent still shows a large per-convergent
    /// exponent, the signature of very fast rational approximation.
    pub liouville_suspect: bool,
    /// The expansion hit a rational value at working precision.
    pub terminated_rational: bool,
}

/// Floor below which `|α - p/q|` is dominated by the precision of `α`.
fn precision_floor(alpha: f64) -> f64 {
    100.0 * f64::EPSILON * (1.0 + alpha.abs())
}

/// Continued-fraction expansion of `alpha` with denominators up to `cap`,
/// with an empirical Diophantine exponent fitted over the convergents.
pub fn diophantine_exponent(alpha: f64, cap: u64) -> Result<DiophantineReport, DynError> {
    if cap < 2 {
        return Err(DynError::Invalid("denominator cap must be at least 2".into()));
    }
    let mut convergents: Vec<Convergent> = Vec::new();
    let mut terminated = false;

    let (mut h_prev, mut h) = (1i64, alpha.floor() as i64);
    let (mut k_prev, mut k) = (0i64, 1i64);
    let mut x = alpha - alpha.floor();
    push_convergent(alpha, h, k, &mut convergents);
    for _ in 0..64 {
        if x.abs() < 1e-15 {
            terminated = true;
            break;
        }
        x = 1.0 / x;
        let a = x.floor();
        x -= a;
        let a = a as i64;
        let h_next = match a.checked_mul(h).and_then(|v| v.checked_add(h_prev)) {
            Some(v) => v,
            None => break,
        };
        let k_next = match a.checked_mul(k).and_then(|v| v.checked_add(k_prev)) {
            Some(v) => v,
            None => break,
        };
        if k_next as u64 > cap {
            break;
        }
        h_prev = h;
        h = h_next;
        k_prev = k;
        k = k_next;
        push_convergent(alpha, h, k, &mut convergents);
    }

    let usable: Vec<&Convergent> = convergents
        .iter()
        .filter(|c| c.q >= 2 && c.error > precision_floor(alpha))
        .collect();
    if usable.len() < 3 {
        return Err(DynError::RationalAlpha(alpha));
    }

    // Least squares on -ln(error) = (2 + β) ln q + const.
    let pts: Vec<(f64, f64)> = usable
        .iter()
        .map(|c| ((c.q as f64).ln(), -c.error.ln()))
        .collect();
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|(x, _)| x).sum();
    let sy: f64 = pts.iter().map(|(_, y)| y).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let fitted_exponent = (slope - 2.0).max(0.0);

    let envelope_constant = usable
        .iter()
        .map(|c| (c.q as f64).powf(2.0 + fitted_exponent) * c.error)
        .fold(f64::INFINITY, f64::min);

    // Fast-approximation flag: a convergent with denominator at least 50
    // whose own exponent still exceeds 0.9.
    let liouville_suspect = usable
        .iter()
        .any(|c| c.q >= 50 && c.exponent.is_some_and(|e| e >= 0.9));

    Ok(DiophantineReport {
        alpha,
        denominator_cap: cap,
        convergents,
        fitted_exponent,
        envelope_constant,
        liouville_suspect,
        terminated_rational: terminated,
    })
}

fn push_convergent(alpha: f64, p: i64, q: i64, out: &mut Vec<Convergent>) {
    let error = (alpha - p as f64 / q as f64).abs();
    let exponent = if q >= 2 && error > precision_floor(alpha) {
        Some(-error.ln() / (q as f64).ln() - 2.0)
    } else {
        None
    };
    out.push(Convergent { p, q, error, exponent });
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjugacyReport {
    pub alpha: f64,
    pub max_residual: f64,
    pub samples: usize,
}

/// Distance on the circle: `x` reduced to the nearest integer.
fn circle_distance(x: f64) -> f64 {
    let frac = x - x.round();
    frac.abs()
}

/// Checks `f(φ(z)) = f(z) + α (mod 1)` on a sample grid; `f` and `φ` are
/// lifts.
pub fn verify_conjugacy(
    phi: &LocalDiffeo,
    f: &LocalDiffeo,
    alpha: f64,
    samples: usize,
) -> Result<ConjugacyReport, DynError> {
    if !phi.is_circle_lift() || !f.is_circle_lift() {
        return Err(DynError::NotACircleLift);
    }
    let mut max_residual: f64 = 0.0;
    for i in 0..samples {
        let z = i as f64 / samples as f64;
        let lhs = f.value(phi.value(z)?)?;
        let rhs = f.value(z)? + alpha;
        max_residual = max_residual.max(circle_distance(lhs - rhs));
    }
    Ok(ConjugacyReport { alpha, max_residual, samples })
}

/// Lift of the rigid rotation by `alpha`.
pub fn rigid_rotation(alpha: f64) -> LocalDiffeo {
    use crate::expr::ExprAst;
    let ast = ExprAst::add(
        ExprAst::var(),
        ExprAst::constant(crate::Q::from_float(alpha).expect("finite")),
    );
    LocalDiffeo::circle_lift(ast).expect("translation is a lift")
}
