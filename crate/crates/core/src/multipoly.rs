//! Sparse multivariate Laurent polynomials over an arbitrary coefficient
//! ring. Variables are identified by small integer ids; exponents may be
//! negative, which differentiation handles in the usual way.

use std::collections::BTreeMap;

use crate::jets::RingScalar;

/// A monomial: sorted `(variable id, exponent)` pairs, exponents nonzero.
pub type Monomial = Vec<(u16, i32)>;

#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly<C: RingScalar> {
    terms: BTreeMap<Monomial, C>,
}

impl<C: RingScalar> Default for MultiPoly<C> {
    fn default() -> Self {
        MultiPoly { terms: BTreeMap::new() }
    }
}

impl<C: RingScalar> MultiPoly<C> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert(Vec::new(), c);
        }
        p
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    /// The monomial `var^exp`.
    pub fn var_pow(var: u16, exp: i32) -> Self {
        let mut p = Self::zero();
        let mono = if exp == 0 { Vec::new() } else { vec![(var, exp)] };
        p.terms.insert(mono, C::one());
        p
    }

    pub fn var(var: u16) -> Self {
        Self::var_pow(var, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree (sum of exponents, counting negative ones), or `None`
    /// for the zero polynomial.
    pub fn total_degree(&self) -> Option<i64> {
        self.terms
            .keys()
            .map(|m| m.iter().map(|(_, e)| *e as i64).sum())
            .max()
    }

    fn insert(&mut self, mono: Monomial, coeff: C) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, k: &C) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.clone() * k.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.insert(merge_monomials(ma, mb), ca.clone() * cb.clone());
            }
        }
        out
    }

    /// Partial derivative with respect to `var`.
    pub fn partial(&self, var: u16) -> Self {
        let mut out = Self::zero();
        for (mono, coeff) in &self.terms {
            if let Some(pos) = mono.iter().position(|(v, _)| *v == var) {
                let e = mono[pos].1;
                let mut m = mono.clone();
                if e == 1 {
                    m.remove(pos);
                } else {
                    m[pos].1 = e - 1;
                }
                out.insert(m, coeff.clone() * C::from_int(e as i64));
            }
        }
        out
    }

    /// Evaluates with `f64` variable assignments, `point[id]` per variable.
    pub fn eval_f64(&self, point: &[f64], to_f64: impl Fn(&C) -> f64) -> f64 {
        let mut acc = 0.0;
        for (mono, coeff) in &self.terms {
            let mut term = to_f64(coeff);
            for (v, e) in mono {
                term *= point[*v as usize].powi(*e);
            }
            acc += term;
        }
        acc
    }

    /// Largest variable id in use.
    pub fn max_var(&self) -> Option<u16> {
        self.terms
            .keys()
            .flat_map(|m| m.iter().map(|(v, _)| *v))
            .max()
    }

    /// True when no term uses `var`.
    pub fn independent_of(&self, var: u16) -> bool {
        self.terms
            .keys()
            .all(|m| m.iter().all(|(v, _)| *v != var))
    }
}

fn merge_monomials(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out: Monomial = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let e = a[i].1 + b[j].1;
                if e != 0 {
                    out.push((a[i].0, e));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

impl MultiPoly<crate::Q> {
    /// Definite integral over `var ∈ [0, 1]`; requires every exponent of
    /// `var` to be nonnegative. The variable disappears from the result.
    pub fn integrate01(&self, var: u16) -> Result<Self, String> {
        let mut out = Self::zero();
        for (mono, coeff) in &self.terms {
            match mono.iter().position(|(v, _)| *v == var) {
                None => out.insert(mono.clone(), coeff.clone()),
                Some(pos) => {
                    let e = mono[pos].1;
                    if e < 0 {
                        return Err(format!(
                            "cannot integrate negative power {e} of variable {var}"
                        ));
                    }
                    let mut m = mono.clone();
                    m.remove(pos);
                    out.insert(m, coeff / crate::qi(e as i64 + 1));
                }
            }
        }
        Ok(out)
    }
}
