//! Coefficient rings for jet and polynomial arithmetic.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::traits::{One, Signed, ToPrimitive, Zero};

use crate::{Q, Z};

/// Ring operations shared by every coefficient type (floats, rationals,
/// big integers, dual numbers).
pub trait RingScalar:
    Clone
    + PartialEq
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn is_zero(&self) -> bool;
}

/// Field operations needed by jet composition and reversion.
pub trait Scalar: RingScalar + Div<Output = Self> {
    /// True when the value may appear as a divisor or a leading jet
    /// coefficient.
    fn is_unit(&self) -> bool;

    /// Comparison used by composability checks. Exact fields ignore `tol`.
    fn close_to(&self, other: &Self, tol: f64) -> bool;
}

impl RingScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_int(n: i64) -> Self {
        n as f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}

impl Scalar for f64 {
    fn is_unit(&self) -> bool {
        *self != 0.0 && self.is_finite()
    }
    fn close_to(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol * (1.0 + self.abs().max(other.abs()))
    }
}

impl RingScalar for Q {
    fn zero() -> Self {
        <Q as Zero>::zero()
    }
    fn one() -> Self {
        <Q as One>::one()
    }
    fn from_int(n: i64) -> Self {
        Q::from_integer(Z::from(n))
    }
    fn is_zero(&self) -> bool {
        <Q as Zero>::is_zero(self)
    }
}

impl Scalar for Q {
    fn is_unit(&self) -> bool {
        !<Q as Zero>::is_zero(self)
    }
    fn close_to(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
}

impl RingScalar for Z {
    fn zero() -> Self {
        <Z as Zero>::zero()
    }
    fn one() -> Self {
        <Z as One>::one()
    }
    fn from_int(n: i64) -> Self {
        Z::from(n)
    }
    fn is_zero(&self) -> bool {
        <Z as Zero>::is_zero(self)
    }
}

/// First-order dual number `re + eps·ε` with `ε² = 0`.
///
/// Running jet composition with dual coefficients propagates a directional
/// derivative through the prolonged action, which is how tangent vectors are
/// pushed forward without finite differencing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual {
    pub re: f64,
    pub eps: f64,
}

impl Dual {
    pub fn new(re: f64, eps: f64) -> Self {
        Dual { re, eps }
    }

    pub fn constant(re: f64) -> Self {
        Dual { re, eps: 0.0 }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual::new(self.re + o.re, self.eps + o.eps)
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual::new(self.re - o.re, self.eps - o.eps)
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual::new(self.re * o.re, self.re * o.eps + self.eps * o.re)
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        let v = self.re / o.re;
        Dual::new(v, (self.eps - v * o.eps) / o.re)
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual::new(-self.re, -self.eps)
    }
}

impl RingScalar for Dual {
    fn zero() -> Self {
        Dual::new(0.0, 0.0)
    }
    fn one() -> Self {
        Dual::new(1.0, 0.0)
    }
    fn from_int(n: i64) -> Self {
        Dual::constant(n as f64)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.eps == 0.0
    }
}

impl Scalar for Dual {
    fn is_unit(&self) -> bool {
        self.re != 0.0 && self.re.is_finite()
    }
    fn close_to(&self, other: &Self, tol: f64) -> bool {
        self.re.close_to(&other.re, tol) && self.eps.close_to(&other.eps, tol)
    }
}

/// Lossy conversion to `f64` for reporting.
pub fn q_to_f64(x: &Q) -> f64 {
    let num = x.numer();
    let den = x.denom();
    match (num.to_f64(), den.to_f64()) {
        (Some(n), Some(d)) if d != 0.0 && n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Fall back to a scaled division for huge operands.
            let digits = den.abs().to_string().len() as i32 - 9;
            let scale = Z::from(10u32).pow(digits.max(0) as u32);
            let n = (num / &scale).to_f64().unwrap_or(f64::NAN);
            let d = (den / &scale).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}
