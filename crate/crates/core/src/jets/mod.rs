//! Truncated jet arithmetic and the frame-bundle coordinate calculus.
//!
//! A [`Jet`] records a base point together with the derivative stack
//! `d_0 … d_q` of a function at that point. All arithmetic is performed on
//! the equivalent truncated Taylor coefficients, so composition, reversion
//! and the prolonged action on frame coordinates are a handful of
//! convolution loops. Everything is generic over the coefficient field:
//! `f64` for numeric work, [`crate::Q`] for exact runs, and [`Dual`] for
//! pushing tangent vectors through polynomial maps.

mod charts;
pub mod scalar;

pub use charts::{gl1_action_z, lift_s2, FrameCoordsX, FrameCoordsY};
pub use scalar::{q_to_f64, Dual, RingScalar, Scalar};

use thiserror::Error;

/// Hard cap on jet orders; factorials up to this order stay inside `i64`.
pub const MAX_ORDER: usize = 20;

/// Default jet order for frame computations.
pub const DEFAULT_ORDER: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JetError {
    #[error("jet orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("outer base does not match inner value")]
    BaseMismatch,
    #[error("jet is not regular (vanishing first derivative)")]
    NotRegular,
    #[error("division by a jet with vanishing value")]
    ZeroDivision,
    #[error("jet order {0} exceeds the supported maximum {max}", max = MAX_ORDER)]
    OrderTooLarge(usize),
    #[error("empty derivative stack")]
    Empty,
}

/// Order-`q` jet of a real function: base point plus derivatives `d_0 … d_q`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet<T: Scalar> {
    base: T,
    derivs: Vec<T>,
}

/// Composability tolerance for floating-point base checks.
const BASE_TOL: f64 = 1e-8;

impl<T: Scalar> Jet<T> {
    /// Builds a jet from its base point and derivative stack `d_0 … d_q`.
    pub fn new(base: T, derivs: Vec<T>) -> Result<Self, JetError> {
        if derivs.is_empty() {
            return Err(JetError::Empty);
        }
        if derivs.len() - 1 > MAX_ORDER {
            return Err(JetError::OrderTooLarge(derivs.len() - 1));
        }
        Ok(Jet { base, derivs })
    }

    /// Jet of the identity map at `point`: value `point`, first derivative 1.
    pub fn identity(point: T, order: usize) -> Self {
        let mut derivs = vec![T::zero(); order + 1];
        derivs[0] = point.clone();
        if order >= 1 {
            derivs[1] = T::one();
        }
        Jet { base: point, derivs }
    }

    /// Jet of a constant function at `base`.
    pub fn constant(base: T, value: T, order: usize) -> Self {
        let mut derivs = vec![T::zero(); order + 1];
        derivs[0] = value;
        Jet { base, derivs }
    }

    pub fn order(&self) -> usize {
        self.derivs.len() - 1
    }

    pub fn base(&self) -> &T {
        &self.base
    }

    /// The value `d_0` at the base point.
    pub fn value(&self) -> &T {
        &self.derivs[0]
    }

    /// The `p`-th derivative at the base point.
    pub fn deriv(&self, p: usize) -> &T {
        &self.derivs[p]
    }

    pub fn derivs(&self) -> &[T] {
        &self.derivs
    }

    /// Regular means the first derivative is a unit; only regular jets may
    /// be reverted or used as frame coordinates.
    pub fn is_regular(&self) -> bool {
        self.order() >= 1 && self.derivs[1].is_unit()
    }

    /// Taylor coefficients `d_p / p!`.
    pub fn taylor_coeffs(&self) -> Vec<T> {
        let mut fact = 1i64;
        self.derivs
            .iter()
            .enumerate()
            .map(|(p, d)| {
                if p > 0 {
                    fact *= p as i64;
                }
                d.clone() / T::from_int(fact)
            })
            .collect()
    }

    /// Inverse of [`Jet::taylor_coeffs`].
    pub fn from_taylor_coeffs(base: T, coeffs: Vec<T>) -> Result<Self, JetError> {
        if coeffs.is_empty() {
            return Err(JetError::Empty);
        }
        if coeffs.len() - 1 > MAX_ORDER {
            return Err(JetError::OrderTooLarge(coeffs.len() - 1));
        }
        let mut fact = 1i64;
        let derivs = coeffs
            .into_iter()
            .enumerate()
            .map(|(p, c)| {
                if p > 0 {
                    fact *= p as i64;
                }
                c * T::from_int(fact)
            })
            .collect();
        Ok(Jet { base, derivs })
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order());
        Jet {
            base: self.base.clone(),
            derivs: self.derivs[..=order].to_vec(),
        }
    }

    /// Jet of the derivative function: order drops by one, base unchanged.
    pub fn derivative_jet(&self) -> Result<Self, JetError> {
        if self.order() == 0 {
            return Err(JetError::Empty);
        }
        Ok(Jet {
            base: self.base.clone(),
            derivs: self.derivs[1..].to_vec(),
        })
    }

    fn check_same_shape(&self, other: &Self) -> Result<(), JetError> {
        if self.order() != other.order() {
            return Err(JetError::OrderMismatch(self.order(), other.order()));
        }
        if !self.base.close_to(&other.base, BASE_TOL) {
            return Err(JetError::BaseMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, JetError> {
        self.check_same_shape(other)?;
        let derivs = self
            .derivs
            .iter()
            .zip(&other.derivs)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        Ok(Jet { base: self.base.clone(), derivs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, JetError> {
        self.check_same_shape(other)?;
        let derivs = self
            .derivs
            .iter()
            .zip(&other.derivs)
            .map(|(a, b)| a.clone() - b.clone())
            .collect();
        Ok(Jet { base: self.base.clone(), derivs })
    }

    pub fn neg(&self) -> Self {
        Jet {
            base: self.base.clone(),
            derivs: self.derivs.iter().map(|a| -a.clone()).collect(),
        }
    }

    pub fn scale(&self, k: &T) -> Self {
        Jet {
            base: self.base.clone(),
            derivs: self.derivs.iter().map(|a| a.clone() * k.clone()).collect(),
        }
    }

    pub fn add_scalar(&self, k: &T) -> Self {
        let mut derivs = self.derivs.clone();
        derivs[0] = derivs[0].clone() + k.clone();
        Jet { base: self.base.clone(), derivs }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, JetError> {
        self.check_same_shape(other)?;
        let a = self.taylor_coeffs();
        let b = other.taylor_coeffs();
        let q = self.order();
        let mut c = vec![T::zero(); q + 1];
        for i in 0..=q {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..=(q - i) {
                c[i + j] = c[i + j].clone() + a[i].clone() * b[j].clone();
            }
        }
        Jet::from_taylor_coeffs(self.base.clone(), c)
    }

    pub fn div(&self, other: &Self) -> Result<Self, JetError> {
        self.check_same_shape(other)?;
        if !other.derivs[0].is_unit() {
            return Err(JetError::ZeroDivision);
        }
        let a = self.taylor_coeffs();
        let b = other.taylor_coeffs();
        let q = self.order();
        // c solves a = b * c term by term.
        let mut c = vec![T::zero(); q + 1];
        for n in 0..=q {
            let mut acc = a[n].clone();
            for k in 1..=n {
                acc = acc - b[k].clone() * c[n - k].clone();
            }
            c[n] = acc / b[0].clone();
        }
        Jet::from_taylor_coeffs(self.base.clone(), c)
    }

    /// Taylor expansion of `outer ∘ inner`, truncated at the common order.
    ///
    /// Requires `outer.base == inner.value()`.
    pub fn compose(outer: &Self, inner: &Self) -> Result<Self, JetError> {
        if outer.order() != inner.order() {
            return Err(JetError::OrderMismatch(outer.order(), inner.order()));
        }
        if !outer.base.close_to(inner.value(), BASE_TOL) {
            return Err(JetError::BaseMismatch);
        }
        let q = outer.order();
        let a = outer.taylor_coeffs();
        // Inner series with the constant term removed: substitution variable.
        let mut s = inner.taylor_coeffs();
        s[0] = T::zero();
        // Horner evaluation of a(s) in the truncated-polynomial ring.
        let mut result = vec![T::zero(); q + 1];
        result[0] = a[q].clone();
        for p in (0..q).rev() {
            result = poly_mul_trunc(&result, &s, q);
            result[0] = result[0].clone() + a[p].clone();
        }
        Jet::from_taylor_coeffs(inner.base.clone(), result)
    }

    /// Compositional inverse, truncated at the jet order.
    ///
    /// The returned jet is based at `self.value()` and takes the value
    /// `self.base()`, so `compose(self, revert(self))` is the identity jet
    /// up to the order. Uses Newton iteration on truncated series.
    pub fn revert(&self) -> Result<Self, JetError> {
        if !self.is_regular() {
            return Err(JetError::NotRegular);
        }
        let q = self.order();
        let mut u = self.taylor_coeffs();
        u[0] = T::zero();
        // u'(w): coefficients of the derivative of the series u.
        let mut du = vec![T::zero(); q + 1];
        for p in 1..=q {
            du[p - 1] = u[p].clone() * T::from_int(p as i64);
        }
        // Initial guess g(w) = w / u_1.
        let mut g = vec![T::zero(); q + 1];
        g[1] = T::one() / u[1].clone();
        let iters = (usize::BITS - q.leading_zeros()) as usize + 2;
        for _ in 0..iters {
            // g <- g - (u(g) - id) / u'(g)
            let ug = compose_series(&u, &g, q);
            let dug = compose_series(&du, &g, q);
            let mut residual = ug;
            residual[1] = residual[1].clone() - T::one();
            let correction = div_series(&residual, &dug, q)?;
            for p in 0..=q {
                g[p] = g[p].clone() - correction[p].clone();
            }
        }
        let mut coeffs = g;
        coeffs[0] = self.base.clone();
        Jet::from_taylor_coeffs(self.derivs[0].clone(), coeffs)
    }

    /// Re-expands the truncating Taylor polynomial at `base + offset`.
    ///
    /// The jet is treated as its own degree-`q` polynomial, so this is exact
    /// (no truncation error) and works for dual-number offsets.
    pub fn reexpand(&self, offset: &T) -> Self {
        let q = self.order();
        let a = self.taylor_coeffs();
        // Taylor shift: b_k = sum_{m>=k} C(m,k) a_m offset^(m-k).
        let mut binom = vec![vec![T::zero(); q + 1]; q + 1];
        for m in 0..=q {
            binom[m][0] = T::one();
            for k in 1..=m {
                binom[m][k] = if k == m {
                    T::one()
                } else {
                    binom[m - 1][k - 1].clone() + binom[m - 1][k].clone()
                };
            }
        }
        let mut pows = vec![T::one(); q + 1];
        for p in 1..=q {
            pows[p] = pows[p - 1].clone() * offset.clone();
        }
        let mut b = vec![T::zero(); q + 1];
        for k in 0..=q {
            let mut acc = T::zero();
            for m in k..=q {
                acc = acc + binom[m][k].clone() * a[m].clone() * pows[m - k].clone();
            }
            b[k] = acc;
        }
        Jet::from_taylor_coeffs(self.base.clone() + offset.clone(), b)
            .expect("shape preserved")
    }

    /// Evaluates the truncating Taylor polynomial at `base + offset`.
    pub fn eval_poly(&self, offset: &T) -> T {
        let a = self.taylor_coeffs();
        let mut acc = T::zero();
        for c in a.iter().rev() {
            acc = acc * offset.clone() + c.clone();
        }
        acc
    }
}

/// Image of a frame under the map induced by a diffeomorphism.
///
/// `h` is the derivative stack of the diffeomorphism at the frame's value
/// `z_0`, and `frame` is a regular jet with coordinates `(z_0, z_1, …)`. The
/// result carries the coordinates `(α_0, α_1, …)` of the transformed frame,
/// which is exactly the Faà di Bruno composition of the Taylor polynomials.
pub fn prolong<T: Scalar>(h: &Jet<T>, frame: &Jet<T>) -> Result<Jet<T>, JetError> {
    if !frame.is_regular() {
        return Err(JetError::NotRegular);
    }
    if !h.is_regular() {
        return Err(JetError::NotRegular);
    }
    Jet::compose(h, frame)
}

fn poly_mul_trunc<T: Scalar>(a: &[T], b: &[T], q: usize) -> Vec<T> {
    let mut c = vec![T::zero(); q + 1];
    for i in 0..=q {
        if a[i].is_zero() {
            continue;
        }
        for j in 0..=(q - i) {
            c[i + j] = c[i + j].clone() + a[i].clone() * b[j].clone();
        }
    }
    c
}

/// Substitutes series `g` (no constant term) into series `a`.
fn compose_series<T: Scalar>(a: &[T], g: &[T], q: usize) -> Vec<T> {
    debug_assert!(g[0].is_zero());
    let mut result = vec![T::zero(); q + 1];
    result[0] = a[q].clone();
    for p in (0..q).rev() {
        result = poly_mul_trunc(&result, g, q);
        result[0] = result[0].clone() + a[p].clone();
    }
    result
}

fn div_series<T: Scalar>(a: &[T], b: &[T], q: usize) -> Result<Vec<T>, JetError> {
    if !b[0].is_unit() {
        return Err(JetError::ZeroDivision);
    }
    let mut c = vec![T::zero(); q + 1];
    for n in 0..=q {
        let mut acc = a[n].clone();
        for k in 1..=n {
            acc = acc - b[k].clone() * c[n - k].clone();
        }
        c[n] = acc / b[0].clone();
    }
    Ok(c)
}

impl Jet<f64> {
    /// All derivatives finite?
    pub fn is_finite(&self) -> bool {
        self.base.is_finite() && self.derivs.iter().all(|d| d.is_finite())
    }

    pub fn exp(&self) -> Self {
        let a = self.taylor_coeffs();
        let q = self.order();
        let mut e = vec![0.0; q + 1];
        e[0] = a[0].exp();
        for n in 1..=q {
            let mut acc = 0.0;
            for k in 1..=n {
                acc += k as f64 * a[k] * e[n - k];
            }
            e[n] = acc / n as f64;
        }
        Jet::from_taylor_coeffs(self.base, e).expect("shape preserved")
    }

    /// Natural logarithm; the caller must ensure the value is positive.
    pub fn ln(&self) -> Self {
        let a = self.taylor_coeffs();
        let q = self.order();
        let mut l = vec![0.0; q + 1];
        l[0] = a[0].ln();
        for n in 1..=q {
            let mut acc = n as f64 * a[n];
            for k in 1..n {
                acc -= k as f64 * l[k] * a[n - k];
            }
            l[n] = acc / (n as f64 * a[0]);
        }
        Jet::from_taylor_coeffs(self.base, l).expect("shape preserved")
    }

    pub fn sin_cos(&self) -> (Self, Self) {
        let a = self.taylor_coeffs();
        let q = self.order();
        let mut s = vec![0.0; q + 1];
        let mut c = vec![0.0; q + 1];
        s[0] = a[0].sin();
        c[0] = a[0].cos();
        for n in 1..=q {
            let mut sa = 0.0;
            let mut ca = 0.0;
            for k in 1..=n {
                sa += k as f64 * a[k] * c[n - k];
                ca += k as f64 * a[k] * s[n - k];
            }
            s[n] = sa / n as f64;
            c[n] = -ca / n as f64;
        }
        (
            Jet::from_taylor_coeffs(self.base, s).expect("shape preserved"),
            Jet::from_taylor_coeffs(self.base, c).expect("shape preserved"),
        )
    }

    /// Square root; the caller must ensure the value is positive.
    pub fn sqrt(&self) -> Self {
        let a = self.taylor_coeffs();
        let q = self.order();
        let mut s = vec![0.0; q + 1];
        s[0] = a[0].sqrt();
        for n in 1..=q {
            let mut acc = a[n];
            for k in 1..n {
                acc -= s[k] * s[n - k];
            }
            s[n] = acc / (2.0 * s[0]);
        }
        Jet::from_taylor_coeffs(self.base, s).expect("shape preserved")
    }

    /// Integer power by repeated multiplication; negative exponents invert.
    pub fn powi(&self, n: i64) -> Result<Self, JetError> {
        let q = self.order();
        if n == 0 {
            return Ok(Jet::constant(self.base, 1.0, q));
        }
        let positive = n.unsigned_abs();
        let mut acc = Jet::constant(self.base, 1.0, q);
        let mut base = self.clone();
        let mut e = positive;
        loop {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul(&base)?;
        }
        if n < 0 {
            let one = Jet::constant(self.base, 1.0, q);
            one.div(&acc)
        } else {
            Ok(acc)
        }
    }
}
