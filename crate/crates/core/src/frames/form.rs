//! Differential forms on frame-bundle charts with exact polynomial
//! (Laurent in `y_1`) coefficients, the canonical 1-forms, their structure
//! identities, and fiber integration.

use std::collections::BTreeMap;


use super::FramesError;
use crate::jets::q_to_f64;
use crate::multipoly::MultiPoly;
use crate::{qi, Q};

/// Which coordinate chart a form lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    /// Normalized frame coordinates `y_0, y_1, y_2, …`.
    Y,
    /// Quotient coordinates `x_0, x_1 = ln|y_1|, x_2, …`.
    X,
}

type Coefficient = MultiPoly<Q>;

/// Exterior form: strictly increasing tuples of coordinate indices mapped
/// to coefficient polynomials. Mixed degrees are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordForm {
    pub chart: Chart,
    terms: BTreeMap<Vec<u16>, Coefficient>,
}

impl CoordForm {
    pub fn zero(chart: Chart) -> Self {
        CoordForm { chart, terms: BTreeMap::new() }
    }

    /// A single term `coeff · d v_{i_1} ∧ … ∧ d v_{i_k}`; indices may come
    /// in any order and contribute the permutation sign.
    pub fn term(chart: Chart, indices: &[u16], coeff: Coefficient) -> Self {
        let mut form = CoordForm::zero(chart);
        form.add_term(indices, coeff);
        form
    }

    /// The 0-form `coeff`.
    pub fn function(chart: Chart, coeff: Coefficient) -> Self {
        CoordForm::term(chart, &[], coeff)
    }

    fn add_term(&mut self, indices: &[u16], coeff: Coefficient) {
        if coeff.is_zero() {
            return;
        }
        let Some((sorted, sign)) = sort_indices(indices) else {
            return;
        };
        let signed = if sign < 0 { coeff.neg() } else { coeff };
        match self.terms.entry(sorted) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(signed);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&signed);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u16>, &Coefficient)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.chart, other.chart, "chart mismatch");
        let mut out = self.clone();
        for (t, c) in &other.terms {
            out.add_term(t, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        CoordForm {
            chart: self.chart,
            terms: self
                .terms
                .iter()
                .map(|(t, c)| (t.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn wedge(&self, other: &Self) -> Self {
        assert_eq!(self.chart, other.chart, "chart mismatch");
        let mut out = CoordForm::zero(self.chart);
        for (ta, ca) in &self.terms {
            for (tb, cb) in &other.terms {
                let mut joined = Vec::with_capacity(ta.len() + tb.len());
                joined.extend_from_slice(ta);
                joined.extend_from_slice(tb);
                out.add_term(&joined, ca.mul(cb));
            }
        }
        out
    }

    /// Exterior derivative via symbolic partial differentiation of each
    /// coefficient in every chart variable it uses.
    pub fn exterior_derivative(&self) -> Self {
        let mut out = CoordForm::zero(self.chart);
        for (tuple, coeff) in &self.terms {
            let top = coeff.max_var().unwrap_or(0);
            for v in 0..=top {
                let dv = coeff.partial(v);
                if dv.is_zero() {
                    continue;
                }
                let mut extended = Vec::with_capacity(tuple.len() + 1);
                extended.push(v);
                extended.extend_from_slice(tuple);
                out.add_term(&extended, dv);
            }
        }
        out
    }

    /// Rewrites a form from the `y` chart into the `x` chart, where
    /// `x_1 = ln y_1` on the positive branch: `dy_1 = y_1 dx_1` and every
    /// other differential renames in place. Fails unless all powers of
    /// `y_1` cancel, as they do for the forms that descend to the quotient.
    pub fn to_x_chart(&self) -> Result<Self, FramesError> {
        if self.chart != Chart::Y {
            return Err(FramesError::WrongChart);
        }
        let mut out = CoordForm::zero(Chart::X);
        for (tuple, coeff) in &self.terms {
            let has_dy1 = tuple.contains(&1);
            let converted = if has_dy1 {
                coeff.mul(&MultiPoly::var(1))
            } else {
                coeff.clone()
            };
            if !converted.independent_of(1) {
                return Err(FramesError::NotProjectable(format!(
                    "coefficient of d{tuple:?} keeps a factor of y1"
                )));
            }
            out.add_term(tuple, converted);
        }
        Ok(out)
    }

    /// Fiber integration along the circle direction `x_1`:
    ///
    /// ```text
    /// π_*(ω) = 0 when ω has no dx_1 factor,
    /// π_*(dx_1 ∧ ω) = -( ∫₀¹ ω dx_1 ).
    /// ```
    ///
    /// Coefficients must be polynomial in `x_1`.
    pub fn gysin(&self) -> Result<Self, FramesError> {
        if self.chart != Chart::X {
            return Err(FramesError::WrongChart);
        }
        let mut out = CoordForm::zero(Chart::X);
        for (tuple, coeff) in &self.terms {
            let Some(pos) = tuple.iter().position(|&i| i == 1) else {
                continue;
            };
            // dx_T = (-1)^pos dx_1 ∧ dx_{T \ 1}.
            let mut rest = tuple.clone();
            rest.remove(pos);
            let integrated = coeff
                .integrate01(1)
                .map_err(FramesError::NotProjectable)?;
            let sign = if pos % 2 == 0 { -1 } else { 1 };
            out.add_term(&rest, integrated.scale(&qi(sign)));
        }
        Ok(out)
    }

    /// Evaluates a 1-form on a tangent vector at a chart point. `point[i]`
    /// and `tangent[i]` are indexed by coordinate id.
    pub fn eval_one_form(&self, point: &[f64], tangent: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (tuple, coeff) in &self.terms {
            assert_eq!(tuple.len(), 1, "not a 1-form");
            let idx = tuple[0] as usize;
            if idx < tangent.len() {
                acc += coeff.eval_f64(point, q_to_f64) * tangent[idx];
            }
        }
        acc
    }
}

fn sort_indices(indices: &[u16]) -> Option<(Vec<u16>, i64)> {
    let mut v = indices.to_vec();
    let mut sign = 1i64;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    for w in v.windows(2) {
        if w[0] == w[1] {
            return None;
        }
    }
    Some((v, sign))
}

fn y(var: u16) -> Coefficient {
    MultiPoly::var(var)
}

fn y_pow(var: u16, e: i32) -> Coefficient {
    MultiPoly::var_pow(var, e)
}

/// The canonical 1-form of level `k` in normalized frame coordinates, for
/// `k <= 3`:
///
/// ```text
/// θ_0 = -dy_0 / y_1
/// θ_1 = -dy_1 / y_1 + y_2 dy_0
/// θ_2 = -y_1 dy_2 + y_1 (y_3 - 2 y_2²) dy_0
/// θ_3 = -y_1² dy_3 + 3 y_2 y_1² dy_2 + y_1² (y_4 + 6 y_2³ - 6 y_2 y_3) dy_0
/// ```
pub fn theta(k: usize) -> CoordForm {
    match k {
        0 => CoordForm::term(Chart::Y, &[0], y_pow(1, -1).neg()),
        1 => CoordForm::term(Chart::Y, &[1], y_pow(1, -1).neg())
            .add(&CoordForm::term(Chart::Y, &[0], y(2))),
        2 => CoordForm::term(Chart::Y, &[2], y(1).neg()).add(&CoordForm::term(
            Chart::Y,
            &[0],
            y(1).mul(&y(3).sub(&y_pow(2, 2).scale(&qi(2)))),
        )),
        3 => {
            let y1sq = y_pow(1, 2);
            CoordForm::term(Chart::Y, &[3], y1sq.neg())
                .add(&CoordForm::term(
                    Chart::Y,
                    &[2],
                    y(2).mul(&y1sq).scale(&qi(3)),
                ))
                .add(&CoordForm::term(
                    Chart::Y,
                    &[0],
                    y1sq.mul(
                        &y(4)
                            .add(&y_pow(2, 3).scale(&qi(6)))
                            .sub(&y(2).mul(&y(3)).scale(&qi(6))),
                    ),
                ))
        }
        _ => panic!("closed forms are implemented for k <= 3"),
    }
}

/// `θ_0 ∧ θ_1 ∧ θ_2`, the top characteristic form.
pub fn gvl_form() -> CoordForm {
    theta(0).wedge(&theta(1)).wedge(&theta(2))
}

/// `θ_2 ∧ θ_0`, the curvature form.
pub fn cl1_form() -> CoordForm {
    theta(2).wedge(&theta(0))
}

/// One verified identity with its symbolic residual.
#[derive(Debug, Clone, serde::Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub holds: bool,
    pub residual: String,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
    /// Global sign relating fiber integration and the exterior derivative
    /// on the tested span: `π_*(dω) = sign · d(π_*ω)`.
    pub gysin_chain_sign: i8,
    pub all_hold: bool,
}

fn check(name: &str, difference: CoordForm) -> IdentityCheck {
    IdentityCheck {
        name: name.into(),
        holds: difference.is_zero(),
        residual: if difference.is_zero() {
            "0".into()
        } else {
            format!("{difference:?}")
        },
    }
}

/// Verifies the structure identities of the canonical forms on the exact
/// symbolic representation.
pub fn structure_identities() -> IdentityReport {
    let t0 = theta(0);
    let t1 = theta(1);
    let t2 = theta(2);
    let t3 = theta(3);

    let mut checks = Vec::new();
    checks.push(check(
        "d theta0 = theta1 ^ theta0",
        t0.exterior_derivative().sub(&t1.wedge(&t0)),
    ));
    checks.push(check(
        "d theta1 = theta2 ^ theta0",
        t1.exterior_derivative().sub(&t2.wedge(&t0)),
    ));
    // Maurer-Cartan mirror at level 2: d θ_2 = θ_3 ∧ θ_0 + 2 θ_2 ∧ θ_1 +
    // θ_1 ∧ θ_2, which collapses to θ_3 ∧ θ_0 + θ_2 ∧ θ_1.
    let mc2 = t3
        .wedge(&t0)
        .add(&t2.wedge(&t1).add(&t2.wedge(&t1)).add(&t1.wedge(&t2)));
    checks.push(check(
        "d theta2 = sum C(2,k) theta_{3-k} ^ theta_k",
        t2.exterior_derivative().sub(&mc2),
    ));
    checks.push(check(
        "theta0 ^ theta1 ^ theta2 = theta1 ^ d theta1",
        gvl_form().sub(&t1.wedge(&t1.exterior_derivative())),
    ));

    // Quotient-chart normal forms.
    let gvl_x = gvl_form().to_x_chart().expect("descends");
    let minus_dx012 = CoordForm::term(Chart::X, &[0, 1, 2], MultiPoly::one().neg());
    checks.push(check("gvl = -dx0 ^ dx1 ^ dx2", gvl_x.sub(&minus_dx012)));

    let cl1_x = cl1_form().to_x_chart().expect("descends");
    let dx2_dx0 = CoordForm::term(Chart::X, &[2, 0], MultiPoly::one());
    checks.push(check("cl1 = dx2 ^ dx0", cl1_x.sub(&dx2_dx0)));

    checks.push(check(
        "gysin(theta0 ^ theta1 ^ theta2) = theta2 ^ theta0",
        gvl_x.gysin().expect("polynomial").sub(&cl1_x),
    ));

    let gysin_chain_sign = gysin_chain_sign();
    let all_hold = checks.iter().all(|c| c.holds) && gysin_chain_sign != 0;
    IdentityReport { checks, gysin_chain_sign, all_hold }
}

/// Determines the global sign `ε` with `π_*(dω) = ε · d(π_*ω)` over a span
/// of forms with coefficients free of `x_1` (the ones that live on the
/// quotient); returns 0 if no single sign works.
pub fn gysin_chain_sign() -> i8 {
    let coeffs = [
        MultiPoly::one(),
        MultiPoly::var(0),
        MultiPoly::var(2),
        MultiPoly::var(0).mul(&MultiPoly::var(2)),
        MultiPoly::var_pow(2, 2),
        MultiPoly::var_pow(0, 2),
    ];
    let tuples: [&[u16]; 6] = [&[0], &[1], &[2], &[0, 1], &[1, 2], &[0, 2]];
    let mut sign: Option<i8> = None;
    for coeff in &coeffs {
        for tuple in tuples {
            let omega = CoordForm::term(Chart::X, tuple, coeff.clone());
            let lhs = omega.exterior_derivative().gysin().expect("polynomial");
            let rhs = omega.gysin().expect("polynomial").exterior_derivative();
            if lhs.is_zero() && rhs.is_zero() {
                continue;
            }
            let candidate = if lhs.sub(&rhs).is_zero() {
                1
            } else if lhs.add(&rhs).is_zero() {
                -1
            } else {
                return 0;
            };
            match sign {
                None => sign = Some(candidate),
                Some(s) if s != candidate => return 0,
                _ => {}
            }
        }
    }
    sign.unwrap_or(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta0_is_minus_dy0_over_y1() {
        let t0 = theta(0);
        let expect = CoordForm::term(Chart::Y, &[0], y_pow(1, -1).neg());
        assert_eq!(t0, expect);
    }

    #[test]
    fn theta1_at_identity_frame_on_dy1_direction() {
        // θ_1(∂/∂y_1) = -1/y_1 = -1 at the identity frame.
        let point = [0.0, 1.0, 0.0, 0.0, 0.0];
        let mut tangent = [0.0; 5];
        tangent[1] = 1.0;
        assert_eq!(theta(1).eval_one_form(&point, &tangent), -1.0);
    }

    #[test]
    fn theta2_at_flat_frame_is_minus_dy2() {
        // y_1 = 1, y_2 = y_3 = 0 leaves only the -y_1 dy_2 term.
        let point = [0.3, 1.0, 0.0, 0.0, 0.0];
        for (idx, expect) in [(0, 0.0), (1, 0.0), (2, -1.0), (3, 0.0)] {
            let mut tangent = [0.0; 5];
            tangent[idx as usize] = 1.0;
            assert_eq!(theta(2).eval_one_form(&point, &tangent), expect, "dy{idx}");
        }
    }

    #[test]
    fn structure_identities_all_hold() {
        let report = structure_identities();
        for c in &report.checks {
            assert!(c.holds, "{} failed: {}", c.name, c.residual);
        }
        assert_eq!(report.gysin_chain_sign, -1);
    }

    #[test]
    fn gysin_drops_forms_without_the_fiber_direction() {
        let omega = CoordForm::term(Chart::X, &[2, 0], MultiPoly::one());
        assert!(omega.gysin().unwrap().is_zero());
    }

    #[test]
    fn gysin_of_dx1_wedge_dx0() {
        // π_*(dx_1 ∧ dx_0) = -dx_0.
        let omega = CoordForm::term(Chart::X, &[1, 0], MultiPoly::one());
        let expect = CoordForm::term(Chart::X, &[0], MultiPoly::one().neg());
        assert_eq!(omega.gysin().unwrap(), expect);
    }

    #[test]
    fn gysin_integrates_polynomial_coefficients() {
        // π_*(x_1² dx_1 ∧ dx_2) = -(1/3) dx_2.
        let omega = CoordForm::term(Chart::X, &[1, 2], MultiPoly::var_pow(1, 2));
        let expect =
            CoordForm::term(Chart::X, &[2], MultiPoly::constant(crate::qr(-1, 3)));
        assert_eq!(omega.gysin().unwrap(), expect);
    }

    #[test]
    fn x_chart_conversion_requires_cancellation() {
        // θ_0 alone keeps a 1/y_1 and cannot descend; neither does
        // θ_0 ∧ θ_1, whose coefficient of dy_0 ∧ dy_1 is 1/y_1².
        assert!(theta(0).to_x_chart().is_err());
        assert!(theta(0).wedge(&theta(1)).to_x_chart().is_err());
        // The curvature dθ_1 = dy_2 ∧ dy_0 has no y_1 at all.
        let curv = theta(1).exterior_derivative().to_x_chart().unwrap();
        assert_eq!(
            curv,
            CoordForm::term(Chart::X, &[2, 0], MultiPoly::one())
        );
    }

    #[test]
    fn wedge_collapses_repeated_differentials() {
        let a = CoordForm::term(Chart::Y, &[0], MultiPoly::one());
        assert!(a.wedge(&a).is_zero());
    }
}
