//! Numeric evaluation of the canonical forms on jet-space tangent vectors,
//! and the pullback-invariance check under prolonged diffeomorphisms.
//!
//! A frame is an order-`q` jet based at 0 with coordinates
//! `(z_0, …, z_q)`. For a tangent vector `δ` at the frame, the level-`k`
//! canonical form evaluates to
//!
//! ```text
//! θ_k(δ) = -(d/du)|₀ [ k-th derivative of (P⁻¹ ∘ (P + u·D)) at 0 ]
//! ```
//!
//! where `P` is the frame's Taylor polynomial and `D` the polynomial with
//! derivative stack `δ`. Because the curve is polynomial in `u`, the
//! derivative is computed exactly: it equals the `k`-th derivative of
//! `(P⁻¹)'(P(t)) · D(t)` at `t = 0`.

use super::FramesError;
use crate::dynamics::LocalDiffeo;
use crate::jets::{prolong, Dual, Jet};

/// Evaluates `θ_k` at a regular frame on a jet-space tangent vector.
///
/// `tangent[p]` perturbs the coordinate `z_p`. Requires `k <= q - 1`.
pub fn theta_numeric(k: usize, frame: &Jet<f64>, tangent: &[f64]) -> Result<f64, FramesError> {
    if !frame.is_regular() {
        return Err(FramesError::NotRegular);
    }
    let q = frame.order();
    if k + 1 > q {
        return Err(FramesError::OrderTooSmall { k, q });
    }
    if tangent.len() != q + 1 {
        return Err(FramesError::TangentLength {
            got: tangent.len(),
            want: q + 1,
        });
    }
    let inverse = frame.revert()?;
    // (P⁻¹)' as a jet of order q-1 at the frame value.
    let inverse_prime = inverse.derivative_jet()?;
    let w = Jet::compose(&inverse_prime, &frame.truncate(q - 1))?;
    let direction = Jet::new(0.0, tangent[..q].to_vec())?;
    let product = w.mul(&direction)?;
    Ok(-product.deriv(k))
}

/// Pushes the frame and a tangent vector through the prolonged action of
/// `h`, using dual-number coefficients so the directional derivative is
/// exact for the polynomial prolongation formulas.
pub fn push_frame_tangent(
    h: &LocalDiffeo,
    frame: &Jet<f64>,
    tangent: &[f64],
) -> Result<(Jet<f64>, Vec<f64>), FramesError> {
    let q = frame.order();
    let z0 = *frame.value();
    // The prolonged action at order q needs h's derivatives to order q;
    // its linearization in the frame value direction needs one more.
    let h_jet = h
        .jet_at(z0, q + 1)
        .map_err(|e| FramesError::MapEvaluation(e.to_string()))?;
    if !h_jet.is_regular() {
        return Err(FramesError::NotRegular);
    }
    let dual_frame = Jet::new(
        Dual::constant(0.0),
        frame
            .derivs()
            .iter()
            .zip(tangent)
            .map(|(v, d)| Dual::new(*v, *d))
            .collect(),
    )?;
    // Re-expand h's jet at the dual-valued base point z0 + ε δ0 and
    // truncate back to order q.
    let h_dual = Jet::new(
        Dual::constant(z0),
        h_jet.derivs().iter().map(|v| Dual::constant(*v)).collect(),
    )?;
    let offset = Dual::new(0.0, tangent[0]);
    let h_at_moving_base = h_dual.reexpand(&offset).truncate(q);
    let moved = prolong(&h_at_moving_base, &dual_frame)?;
    let new_frame = Jet::new(0.0, moved.derivs().iter().map(|d| d.re).collect())?;
    let new_tangent: Vec<f64> = moved.derivs().iter().map(|d| d.eps).collect();
    Ok((new_frame, new_tangent))
}

/// Max over coordinate tangent directions of the pullback defect
/// `|θ_k(dh̃(δ)) at h̃(frame) - θ_k(δ) at frame|`, normalized by the value
/// magnitude.
pub fn check_invariance(
    h: &LocalDiffeo,
    k: usize,
    frame: &Jet<f64>,
) -> Result<f64, FramesError> {
    let q = frame.order();
    let mut worst: f64 = 0.0;
    for dir in 0..=q {
        let mut tangent = vec![0.0; q + 1];
        tangent[dir] = 1.0;
        let here = theta_numeric(k, frame, &tangent)?;
        let (moved_frame, moved_tangent) = push_frame_tangent(h, frame, &tangent)?;
        let there = theta_numeric(k, &moved_frame, &moved_tangent)?;
        let defect = (there - here).abs() / 1.0f64.max(here.abs());
        worst = worst.max(defect);
    }
    Ok(worst)
}

/// Converts a frame jet to normalized chart values `(y_0 … y_q)`.
pub fn frame_to_y_point(frame: &Jet<f64>) -> Result<Vec<f64>, FramesError> {
    if !frame.is_regular() {
        return Err(FramesError::NotRegular);
    }
    let z = frame.derivs();
    let mut y = vec![0.0; z.len()];
    y[0] = z[0];
    y[1] = z[1];
    for p in 2..z.len() {
        y[p] = z[p] / z[1].powi(p as i32);
    }
    Ok(y)
}

/// Pushes a raw-coordinate tangent into the normalized chart:
/// `dy_p = dz_p / z_1^p - p z_p z_1^{-p-1} dz_1` for `p >= 2`.
pub fn frame_tangent_to_y(frame: &Jet<f64>, tangent: &[f64]) -> Result<Vec<f64>, FramesError> {
    if !frame.is_regular() {
        return Err(FramesError::NotRegular);
    }
    let z = frame.derivs();
    let mut out = vec![0.0; z.len()];
    out[0] = tangent[0];
    if z.len() > 1 {
        out[1] = tangent[1];
    }
    for p in 2..z.len() {
        let zp = z[p];
        let z1 = z[1];
        out[p] = tangent[p] / z1.powi(p as i32)
            - (p as f64) * zp * z1.powi(-(p as i32) - 1) * tangent[1];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Interval;
    use crate::expr::parse;
    use crate::frames::form::theta;

    fn identity_frame(q: usize) -> Jet<f64> {
        Jet::identity(0.0, q)
    }

    #[test]
    fn theta0_on_value_direction_at_identity_frame() {
        let frame = identity_frame(4);
        let mut tangent = vec![0.0; 5];
        tangent[0] = 1.0;
        let v = theta_numeric(0, &frame, &tangent).unwrap();
        assert!((v + 1.0).abs() < 1e-12);
    }

    #[test]
    fn theta1_on_value_direction_vanishes_at_identity_frame() {
        let frame = identity_frame(4);
        let mut tangent = vec![0.0; 5];
        tangent[0] = 1.0;
        let v = theta_numeric(1, &frame, &tangent).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn zero_tangent_evaluates_to_zero() {
        let frame = Jet::new(0.0, vec![0.4, 1.3, -0.2, 0.8, 0.1, 0.6]).unwrap();
        for k in 0..=3 {
            let v = theta_numeric(k, &frame, &[0.0; 6]).unwrap();
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn numeric_evaluation_matches_symbolic_forms() {
        let frame = Jet::new(0.0, vec![0.3, 1.7, -0.9, 0.5, 1.1, -0.4]).unwrap();
        let y_point = frame_to_y_point(&frame).unwrap();
        for k in 0..=3 {
            let symbolic = theta(k);
            for dir in 0..=frame.order() {
                let mut tangent = vec![0.0; frame.order() + 1];
                tangent[dir] = 1.0;
                let numeric = theta_numeric(k, &frame, &tangent).unwrap();
                let y_tangent = frame_tangent_to_y(&frame, &tangent).unwrap();
                let sym = symbolic.eval_one_form(&y_point, &y_tangent);
                assert!(
                    (numeric - sym).abs() <= 1e-9 * 1.0f64.max(sym.abs()),
                    "k = {k}, direction {dir}: {numeric} vs {sym}"
                );
            }
        }
    }

    #[test]
    fn identity_map_gives_zero_defect() {
        let h = LocalDiffeo::identity(Interval::real_line());
        let frame = Jet::new(0.0, vec![0.2, 1.4, 0.7, -0.3, 0.9, 0.1]).unwrap();
        for k in 0..=3 {
            let defect = check_invariance(&h, k, &frame).unwrap();
            assert!(defect < 1e-13, "k = {k}: {defect}");
        }
    }

    #[test]
    fn linear_map_preserves_canonical_forms() {
        let h = LocalDiffeo::explicit(parse("2*x").unwrap(), Interval::real_line());
        let frame = Jet::new(0.0, vec![0.6, 0.8, -1.1, 0.4, 0.2, 0.5]).unwrap();
        for k in 0..=3 {
            let defect = check_invariance(&h, k, &frame).unwrap();
            assert!(defect < 1e-9, "k = {k}: {defect}");
        }
    }

    #[test]
    fn moebius_like_map_preserves_canonical_forms() {
        let h = LocalDiffeo::explicit(
            parse("x/(1-x)").unwrap(),
            Interval::new(-0.8, 0.8),
        );
        let frame = Jet::new(0.0, vec![0.1, 1.2, 0.5, -0.6, 0.3, 0.7]).unwrap();
        for k in 0..=3 {
            let defect = check_invariance(&h, k, &frame).unwrap();
            assert!(defect < 1e-9, "k = {k}: {defect}");
        }
    }

    #[test]
    fn finite_difference_cross_check() {
        // Independent route: numerically differentiate the composition
        // u ↦ P⁻¹(P + u·D) with Richardson-extrapolated central
        // differences on re-expanded polynomial jets.
        let frame = Jet::new(0.0, vec![0.3, 1.7, -0.9, 0.5, 1.1, -0.4]).unwrap();
        let q = frame.order();
        let tangent = [0.3, -0.2, 0.8, 0.4, -0.5, 0.6];
        let composed_deriv = |u: f64| -> Vec<f64> {
            let moved = Jet::new(
                0.0,
                frame
                    .derivs()
                    .iter()
                    .zip(tangent.iter())
                    .map(|(a, d)| a + u * d)
                    .collect(),
            )
            .unwrap();
            // Jet of P⁻¹ at the moved value: re-expand P at the preimage,
            // then revert.
            let preimage = {
                // Newton on the polynomial P(t) = moved value.
                let target = *moved.value();
                let mut t = 0.0;
                for _ in 0..60 {
                    let p = frame.eval_poly(&t) - target;
                    let dp = frame.derivative_jet().unwrap().eval_poly(&t);
                    t -= p / dp;
                }
                t
            };
            let p_at_preimage = frame.reexpand(&preimage);
            let inv = p_at_preimage.revert().unwrap();
            Jet::compose(&inv, &moved).unwrap().derivs().to_vec()
        };
        for k in 0..=3 {
            let h = 1e-4;
            let d1 = composed_deriv(h);
            let m1 = composed_deriv(-h);
            let d2 = composed_deriv(2.0 * h);
            let m2 = composed_deriv(-2.0 * h);
            // Richardson: (8(f(h)-f(-h)) - (f(2h)-f(-2h))) / 12h
            let fd = (8.0 * (d1[k] - m1[k]) - (d2[k] - m2[k])) / (12.0 * h);
            let exact = theta_numeric(k, &frame, &tangent).unwrap();
            assert!(
                (exact + fd).abs() < 1e-8 * 1.0f64.max(fd.abs()),
                "k = {k}: exact {exact} vs fd {}",
                -fd
            );
        }
    }
}
