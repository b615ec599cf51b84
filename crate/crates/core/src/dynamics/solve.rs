//! Root bracketing for strictly monotone functions.

use super::DynError;

/// Evaluation callback: `None` stands for "not evaluable here", which the
/// bracketing logic treats as an overflow on the far side.
pub type MonotoneEval<'a> = &'a dyn Fn(f64) -> Option<f64>;

/// Solves `f(x) = target` for strictly monotone `f` on the open interval
/// `(lo, hi)` by bisection down to width `1e-14 · scale`, followed by two
/// derivative refinement steps when a derivative callback is supplied.
///
/// Evaluation failures and non-finite values are interpreted as the
/// function having blown past the target on the side it is heading to,
/// which is what happens at a blow-up endpoint.
pub fn invert_monotone_bounded(
    f: MonotoneEval,
    df: Option<MonotoneEval>,
    target: f64,
    lo: f64,
    hi: f64,
    increasing: bool,
) -> Result<f64, DynError> {
    let mut lo = lo;
    let mut hi = hi;
    if !(lo < hi) {
        return Err(DynError::EmptyBracket);
    }
    let scale = 1.0f64.max(lo.abs()).max(hi.abs());
    let width_goal = 1e-14 * scale;
    let mut iterations = 0;
    while hi - lo > width_goal && iterations < 200 {
        let mid = 0.5 * (lo + hi);
        let above = match f(mid) {
            Some(v) if v.is_finite() => v > target,
            // Blow-up: the value is past the target on the increasing end.
            _ => increasing,
        };
        if above == increasing {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    let mut x = 0.5 * (lo + hi);
    if let Some(df) = df {
        for _ in 0..2 {
            let (Some(v), Some(d)) = (f(x), df(x)) else { break };
            if !v.is_finite() || !d.is_finite() || d == 0.0 {
                break;
            }
            let step = (v - target) / d;
            let next = x - step;
            if next > lo && next < hi {
                x = next;
            }
        }
    }
    // Reject silent convergence to a bracket endpoint when the target lies
    // outside the function's range over the interval.
    match f(x) {
        Some(v) if (v - target).abs() <= 1e-6 * 1.0f64.max(target.abs()) => Ok(x),
        _ => Err(DynError::InversionFailed),
    }
}

/// Solves `f(x) = target` for a strictly monotone `f` defined on the whole
/// line, bracketing outward from an initial guess and then refining with
/// safeguarded Newton steps. Built for tight loops: a good initial guess
/// converges in a handful of evaluations.
pub fn invert_monotone_unbounded(
    f: MonotoneEval,
    df: Option<MonotoneEval>,
    target: f64,
    guess: f64,
    increasing: bool,
) -> Result<f64, DynError> {
    let eval = |x: f64| f(x).filter(|v| v.is_finite());
    // Expand a bracket around the guess.
    let mut step = 0.5 * (1.0 + guess.abs() * 1e-3);
    let mut lo = guess - step;
    let mut hi = guess + step;
    let sign = if increasing { 1.0 } else { -1.0 };
    let mut expansions = 0;
    loop {
        let flo = eval(lo).ok_or(DynError::InversionFailed)?;
        let fhi = eval(hi).ok_or(DynError::InversionFailed)?;
        let lo_below = sign * (flo - target) < 0.0;
        let hi_above = sign * (fhi - target) > 0.0;
        if lo_below && hi_above {
            break;
        }
        if !lo_below {
            lo -= step;
        }
        if !hi_above {
            hi += step;
        }
        step *= 2.0;
        expansions += 1;
        if expansions > 80 {
            return Err(DynError::InversionFailed);
        }
    }
    let scale = 1.0f64.max(lo.abs()).max(hi.abs());
    let tol = 1e-14 * scale;
    let mut x = 0.5 * (lo + hi);
    for _ in 0..120 {
        let v = eval(x).ok_or(DynError::InversionFailed)?;
        let r = v - target;
        if r.abs() <= tol {
            return Ok(x);
        }
        if sign * r > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let mut next = None;
        if let Some(df) = df {
            if let Some(d) = df(x).filter(|d| d.is_finite() && *d != 0.0) {
                let candidate = x - r / d;
                if candidate > lo && candidate < hi {
                    next = Some(candidate);
                }
            }
        }
        x = next.unwrap_or(0.5 * (lo + hi));
        if hi - lo <= tol {
            break;
        }
    }
    match eval(x) {
        Some(v) if (v - target).abs() <= 1e-6 * 1.0f64.max(target.abs()) => Ok(x),
        _ => Err(DynError::InversionFailed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounded_inversion_of_a_blowup_profile() {
        // f(x) = exp(1/(1-x^2)) - e on (0,1); solve f = 5.
        let f = |x: f64| {
            let d = 1.0 - x * x;
            if d <= 0.0 {
                None
            } else {
                Some((1.0 / d).exp() - std::f64::consts::E)
            }
        };
        let x = invert_monotone_bounded(&f, None, 5.0, 0.0, 1.0, true).unwrap();
        assert!((f(x).unwrap() - 5.0).abs() < 1e-9);
    }

    #[test]
    fn bounded_inversion_with_newton_refinement() {
        let f = |x: f64| Some(x * x * x + x);
        let df = |x: f64| Some(3.0 * x * x + 1.0);
        let x = invert_monotone_bounded(&f, Some(&df), 2.0, 0.0, 2.0, true).unwrap();
        assert!((x - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_inversion_of_a_lift() {
        let eps = 0.1;
        let f = |z: f64| Some(z + eps * (2.0 * std::f64::consts::PI * z).sin());
        let df =
            |z: f64| Some(1.0 + eps * 2.0 * std::f64::consts::PI * (2.0 * std::f64::consts::PI * z).cos());
        for target in [-3.7, 0.0, 0.4, 12.9] {
            let x = invert_monotone_unbounded(&f, Some(&df), target, target, true).unwrap();
            assert!((f(x).unwrap() - target).abs() < 1e-12);
        }
    }

    #[test]
    fn decreasing_function_inversion() {
        let f = |x: f64| Some(1.0 - x * x * x);
        let x = invert_monotone_bounded(&f, None, 0.5, 0.0, 1.0, false).unwrap();
        assert!((x - 0.5f64.powf(1.0 / 3.0)).abs() < 1e-10);
    }
}
