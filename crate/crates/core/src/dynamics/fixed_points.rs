//! Locating and classifying fixed points of interval maps.

use serde::Serialize;

use super::{DynError, Interval, LocalDiffeo};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FixedPointClass {
    /// `|φ'| != 1` at the point.
    Hyperbolic,
    /// `|φ'| = 1` within tolerance.
    NonHyperbolic,
}

#[derive(Debug, Clone, Serialize)]
pub struct FixedPointRecord {
    pub point: f64,
    pub derivative: f64,
    pub class: FixedPointClass,
    /// No fixed point observed on `(point - r, point)` down to the reported
    /// resolution. `None` when the side leaves the domain.
    pub left_semi_isolated: Option<bool>,
    /// Same on `(point, point + r)`.
    pub right_semi_isolated: Option<bool>,
    /// Smallest side offset examined; isolation claims are relative to it.
    pub resolution: f64,
}

/// Scans `φ(x) - x` on a uniform grid over `window`, bracketing sign
/// changes and detecting plateaus of fixed points.
///
/// Sign-change roots are refined by bisection to `tol`. Runs of grid points
/// with `|φ(x) - x| <= tol` are reported through their boundary points.
/// Semi-isolation is probed by sampling a geometric sequence approaching
/// the point on each side and is always "observed at resolution", never a
/// proof.
pub fn classify_fixed_points(
    phi: &LocalDiffeo,
    window: Interval,
    grid_points: usize,
    tol: f64,
) -> Result<Vec<FixedPointRecord>, DynError> {
    assert!(grid_points >= 3);
    let xs = window.samples(grid_points, 0.0, None);
    let mut displacement = Vec::with_capacity(xs.len());
    for &x in &xs {
        let g = phi.value(x).map(|y| y - x);
        displacement.push(g.ok());
    }

    let mut points: Vec<f64> = Vec::new();
    let flat = |d: Option<f64>| d.is_some_and(|v| v.abs() <= tol);

    // Sign-change brackets between consecutive non-flat samples.
    for i in 0..xs.len() - 1 {
        let (Some(a), Some(b)) = (displacement[i], displacement[i + 1]) else {
            continue;
        };
        if a.abs() <= tol || b.abs() <= tol {
            continue;
        }
        if a.signum() != b.signum() {
            let root = bisect_root(phi, xs[i], xs[i + 1], tol)?;
            points.push(root);
        }
    }

    // Maximal runs of flat samples: an interior run flanked by opposite
    // signs is a root passing through zero; same-sign flanks indicate a
    // tangency, reported at the run's center; a run reaching the window
    // edge is a fixed-point plateau whose interior boundary gets refined.
    let mut i = 0;
    while i < xs.len() {
        if flat(displacement[i]) {
            let start = i;
            while i + 1 < xs.len() && flat(displacement[i + 1]) {
                i += 1;
            }
            let end = i;
            let left = (start > 0).then(|| displacement[start - 1]).flatten();
            let right = (end + 1 < xs.len()).then(|| displacement[end + 1]).flatten();
            match (left, right) {
                (Some(a), Some(b)) if a.signum() != b.signum() => {
                    points.push(bisect_root(phi, xs[start - 1], xs[end + 1], tol)?);
                }
                (Some(_), Some(_)) => {
                    points.push(0.5 * (xs[start] + xs[end]));
                }
                (Some(_), None) => {
                    points.push(edge_of_plateau(phi, xs[start - 1], xs[end], tol)?);
                }
                (None, Some(_)) => {
                    points.push(edge_of_plateau(phi, xs[end + 1], xs[start], tol)?);
                }
                // A run bounded only by evaluation failures or the window
                // has no observable edge to report.
                (None, None) => {}
            }
        }
        i += 1;
    }

    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    points.dedup_by(|a, b| (*a - *b).abs() <= tol.max(1e-12));

    let mut records = Vec::new();
    for point in points {
        let derivative = phi.derivative(point)?;
        let class = if (derivative.abs() - 1.0).abs() <= tol {
            FixedPointClass::NonHyperbolic
        } else {
            FixedPointClass::Hyperbolic
        };
        let span = (window.hi - window.lo).min(1.0);
        let (left, resolution) = probe_side(phi, point, -span, tol);
        let (right, _) = probe_side(phi, point, span, tol);
        records.push(FixedPointRecord {
            point,
            derivative,
            class,
            left_semi_isolated: left,
            right_semi_isolated: right,
            resolution,
        });
    }
    Ok(records)
}

fn bisect_root(
    phi: &LocalDiffeo,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<f64, DynError> {
    let g = |x: f64| phi.value(x).map(|y| y - x);
    let mut glo = g(lo)?;
    for _ in 0..200 {
        if hi - lo <= tol * 1e-2 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let gm = g(mid)?;
        if gm == 0.0 {
            return Ok(mid);
        }
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Finds where a plateau of fixed points begins, bisecting between an
/// off-plateau sample and the run's deep interior sample.
///
/// When the plateau's interior consists of exact zeros of `φ(x) - x` (an
/// identity branch, or a map flat enough that the displacement underflows),
/// the strict-zero predicate localizes the observable boundary of the fixed
/// set; otherwise the tolerance band is used. Evaluation failures inside
/// the bracket count as the off side.
fn edge_of_plateau(
    phi: &LocalDiffeo,
    mut off: f64,
    mut on: f64,
    tol: f64,
) -> Result<f64, DynError> {
    let exact = (phi.value(on)? - on) == 0.0;
    let band = if exact { 0.0 } else { tol };
    for _ in 0..100 {
        if (on - off).abs() <= 1e-14 * (1.0 + on.abs()) {
            break;
        }
        let mid = 0.5 * (on + off);
        match phi.value(mid) {
            Ok(y) if (y - mid).abs() <= band => on = mid,
            _ => off = mid,
        }
    }
    Ok(on)
}

/// Samples `φ(x) - x` at `point + direction · 2^{-j}`, coarse to fine; the
/// side is reported fixed-point-free when every resolvable sample keeps one
/// strict sign.
///
/// An exact zero at the very first evaluable offset is read as a genuine
/// fixed point next to `point` (an identity branch); an exact zero after a
/// decaying run of nonzero values is the resolution floor of the
/// displacement and stops the descent without spoiling the verdict.
fn probe_side(
    phi: &LocalDiffeo,
    point: f64,
    direction: f64,
    _tol: f64,
) -> (Option<bool>, f64) {
    let mut seen_any = false;
    let mut sign = 0.0f64;
    let mut isolated = true;
    let mut finest = direction.abs();
    for j in 1..=40 {
        let offset = direction * 2f64.powi(-j);
        let x = point + offset;
        if !phi.domain().contains(x) {
            continue;
        }
        match phi.value(x) {
            Ok(y) => {
                let g = y - x;
                if g == 0.0 {
                    if !seen_any {
                        // Fixed from the coarsest evaluable scale onward.
                        return (Some(false), offset.abs());
                    }
                    break;
                }
                finest = offset.abs();
                if sign == 0.0 {
                    sign = g.signum();
                } else if g.signum() != sign {
                    // A sign change this close means another root.
                    isolated = false;
                }
                seen_any = true;
            }
            Err(_) => continue,
        }
    }
    if !seen_any {
        (None, finest)
    } else {
        (Some(isolated), finest)
    }
}
