//! Frame-bundle coordinate charts.
//!
//! A regular jet carries the raw coordinates `(z_0, z_1, z_2, …)`. The
//! normalized chart divides out powers of `z_1`,
//!
//! ```text
//! y_0 = z_0,  y_1 = z_1,  y_p = z_p / z_1^p   (p >= 2),
//! ```
//!
//! and the chart on the orthogonal quotient replaces `y_1` by `x_1 =
//! ln|y_1|`, forgetting its sign,
//!
//! ```text
//! x_0 = y_0,  x_1 = ln|y_1|,  x_p = y_p   (p >= 2).
//! ```

use super::{prolong, Jet, JetError};

/// Normalized frame coordinates `(y_0, y_1, y_2, …)` with `y_1 != 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameCoordsY {
    coords: Vec<f64>,
}

/// Quotient frame coordinates `(x_0, x_1, x_2, …)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameCoordsX {
    coords: Vec<f64>,
}

impl FrameCoordsY {
    pub fn new(coords: Vec<f64>) -> Result<Self, JetError> {
        if coords.len() < 2 {
            return Err(JetError::Empty);
        }
        if coords[1] == 0.0 || !coords[1].is_finite() {
            return Err(JetError::NotRegular);
        }
        Ok(FrameCoordsY { coords })
    }

    pub fn from_jet(jet: &Jet<f64>) -> Result<Self, JetError> {
        if !jet.is_regular() {
            return Err(JetError::NotRegular);
        }
        let z = jet.derivs();
        let mut coords = vec![0.0; z.len()];
        coords[0] = z[0];
        coords[1] = z[1];
        for p in 2..z.len() {
            coords[p] = z[p] / z[1].powi(p as i32);
        }
        Ok(FrameCoordsY { coords })
    }

    /// Bijective back onto regular jets (based at 0).
    pub fn to_jet(&self) -> Jet<f64> {
        let y = &self.coords;
        let mut derivs = vec![0.0; y.len()];
        derivs[0] = y[0];
        derivs[1] = y[1];
        for p in 2..y.len() {
            derivs[p] = y[p] * y[1].powi(p as i32);
        }
        Jet::new(0.0, derivs).expect("non-empty")
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn order(&self) -> usize {
        self.coords.len() - 1
    }

    /// Scale action `(y_0, λ y_1, y_2, …)` of the multiplicative group.
    pub fn gl1_action(&self, lambda: f64) -> Result<Self, JetError> {
        if lambda == 0.0 {
            return Err(JetError::NotRegular);
        }
        let mut coords = self.coords.clone();
        coords[1] *= lambda;
        Ok(FrameCoordsY { coords })
    }

    /// Projection to the quotient chart; the sign of `y_1` is forgotten.
    pub fn to_x(&self) -> FrameCoordsX {
        let mut coords = self.coords.clone();
        coords[1] = self.coords[1].abs().ln();
        FrameCoordsX { coords }
    }
}

impl FrameCoordsX {
    pub fn new(coords: Vec<f64>) -> Result<Self, JetError> {
        if coords.len() < 2 {
            return Err(JetError::Empty);
        }
        Ok(FrameCoordsX { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn order(&self) -> usize {
        self.coords.len() - 1
    }

    /// Section of the quotient choosing the positive `y_1` branch.
    pub fn to_y(&self) -> FrameCoordsY {
        let mut coords = self.coords.clone();
        coords[1] = self.coords[1].exp();
        FrameCoordsY { coords }
    }
}

/// Scale action on raw jet coordinates: `(z_0, λ z_1, λ² z_2, …)`.
pub fn gl1_action_z(jet: &Jet<f64>, lambda: f64) -> Result<Jet<f64>, JetError> {
    if lambda == 0.0 {
        return Err(JetError::NotRegular);
    }
    let derivs = jet
        .derivs()
        .iter()
        .enumerate()
        .map(|(p, d)| d * lambda.powi(p as i32))
        .collect();
    Jet::new(*jet.base(), derivs)
}

/// Lifted action of a diffeomorphism on the quotient chart.
///
/// `h` is the derivative stack of the diffeomorphism at `x_0`, of order at
/// least the coordinate order. The low coordinates follow the closed
/// formulas
///
/// ```text
/// β_0 = h(x_0)
/// β_1 = x_1 + ln|h'(x_0)|
/// β_2 = x_2 / h' + h'' / h'^2
/// β_3 = x_3 / h'^2 + 3 h'' x_2 / h'^3 + h''' / h'^3
/// ```
///
/// and the remaining ones are obtained by conjugating the prolonged action
/// through the chart maps, which agrees with the closed formulas wherever
/// both apply.
pub fn lift_s2(h: &Jet<f64>, coords: &FrameCoordsX) -> Result<FrameCoordsX, JetError> {
    let q = coords.order();
    if h.order() < q {
        return Err(JetError::OrderMismatch(h.order(), q));
    }
    if !h.is_regular() {
        return Err(JetError::NotRegular);
    }
    let x = coords.coords();
    let hp = *h.deriv(1);
    let mut out = vec![0.0; q + 1];
    out[0] = *h.value();
    out[1] = x[1] + hp.abs().ln();
    if q >= 2 {
        let hpp = *h.deriv(2);
        out[2] = x[2] / hp + hpp / (hp * hp);
    }
    if q >= 3 {
        let hpp = *h.deriv(2);
        let hppp = *h.deriv(3);
        out[3] = x[3] / (hp * hp) + 3.0 * hpp * x[2] / hp.powi(3) + hppp / hp.powi(3);
    }
    if q >= 4 {
        let z = coords.to_y().to_jet();
        let moved = prolong(&h.truncate(q), &z)?;
        let image = FrameCoordsY::from_jet(&moved)?.to_x();
        out[4..=q].copy_from_slice(&image.coords()[4..=q]);
    }
    Ok(FrameCoordsX { coords: out })
}
