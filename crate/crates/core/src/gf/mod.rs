//! Exterior algebra on the generators `c_0, c_1, c_2, …` of the
//! formal-vector-field complex, with its differential
//!
//! ```text
//! d c_r = Σ_{k=0}^{r} C(r,k) c_{r-k+1} ∧ c_k
//! ```
//!
//! extended by the graded Leibniz rule, the weight grading
//! `wt(c_r) = r - 1`, and exact cohomology of the finite
//! (degree, weight) slices by rational linear algebra.

pub mod linalg;
mod slice;

pub use slice::{
    cohomology_dim, duminy_cohomology, slice, CohomologySummary, ComplexSlice,
    DuminyReport, Flavor, WeightCohomology,
};

use std::collections::BTreeMap;
use std::fmt;

use num::traits::{Signed, Zero};

use crate::{qi, Q, Z};

/// Element of the exterior algebra: a map from strictly increasing index
/// tuples to nonzero rational coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExteriorCochain {
    terms: BTreeMap<Vec<u32>, Q>,
}

impl ExteriorCochain {
    pub fn zero() -> Self {
        ExteriorCochain::default()
    }

    /// The scalar `1` viewed as the empty monomial.
    pub fn one() -> Self {
        ExteriorCochain::monomial(&[], qi(1))
    }

    /// The generator `c_r`.
    pub fn generator(r: u32) -> Self {
        ExteriorCochain::monomial(&[r], qi(1))
    }

    /// A single monomial `coeff · c_{i_1} ∧ … ∧ c_{i_d}`.
    ///
    /// The indices may be listed in any order; sorting them introduces the
    /// sign of the permutation, and a repeated index collapses to zero.
    pub fn monomial(indices: &[u32], coeff: Q) -> Self {
        let mut out = ExteriorCochain::zero();
        if coeff.is_zero() {
            return out;
        }
        if let Some((sorted, sign)) = sort_with_sign(indices) {
            out.terms.insert(sorted, coeff * qi(sign));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Q)> {
        self.terms.iter().map(|(t, c)| (t.as_slice(), c))
    }

    pub fn coefficient(&self, tuple: &[u32]) -> Q {
        self.terms.get(tuple).cloned().unwrap_or_else(|| qi(0))
    }

    fn insert(&mut self, tuple: Vec<u32>, coeff: Q) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(tuple) {
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
        for (t, c) in &other.terms {
            out.insert(t.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (t, c) in &other.terms {
            out.insert(t.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, k: &Q) -> Self {
        if k.is_zero() {
            return ExteriorCochain::zero();
        }
        ExteriorCochain {
            terms: self
                .terms
                .iter()
                .map(|(t, c)| (t.clone(), c.clone() * k.clone()))
                .collect(),
        }
    }

    /// Graded-anticommutative product.
    pub fn wedge(&self, other: &Self) -> Self {
        let mut out = ExteriorCochain::zero();
        for (ta, ca) in &self.terms {
            for (tb, cb) in &other.terms {
                let mut joined = Vec::with_capacity(ta.len() + tb.len());
                joined.extend_from_slice(ta);
                joined.extend_from_slice(tb);
                if let Some((sorted, sign)) = sort_with_sign(&joined) {
                    out.insert(sorted, ca.clone() * cb.clone() * qi(sign));
                }
            }
        }
        out
    }

    /// The differential, degree +1 and weight-preserving.
    pub fn differential(&self) -> Self {
        let mut out = ExteriorCochain::zero();
        for (tuple, coeff) in &self.terms {
            for (pos, &r) in tuple.iter().enumerate() {
                // Leibniz sign for reaching slot `pos` through 1-forms.
                let leibniz = if pos % 2 == 0 { 1 } else { -1 };
                for (pair, binom) in generator_differential(r) {
                    let mut expanded = Vec::with_capacity(tuple.len() + 1);
                    expanded.extend_from_slice(&tuple[..pos]);
                    expanded.extend_from_slice(&pair);
                    expanded.extend_from_slice(&tuple[pos + 1..]);
                    if let Some((sorted, sign)) = sort_with_sign(&expanded) {
                        let c = coeff.clone()
                            * Q::from_integer(binom)
                            * qi(leibniz * sign);
                        out.insert(sorted, c);
                    }
                }
            }
        }
        out
    }

    /// Homogeneous degree when all terms agree.
    pub fn degree(&self) -> Option<usize> {
        let mut degrees = self.terms.keys().map(|t| t.len());
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    /// Extracts the part of the given weight.
    pub fn weight_part(&self, weight: i64) -> Self {
        ExteriorCochain {
            terms: self
                .terms
                .iter()
                .filter(|(t, _)| monomial_weight(t) == weight)
                .map(|(t, c)| (t.clone(), c.clone()))
                .collect(),
        }
    }

    /// Weights present among the terms.
    pub fn weights(&self) -> Vec<i64> {
        let mut ws: Vec<i64> = self.terms.keys().map(|t| monomial_weight(t)).collect();
        ws.sort_unstable();
        ws.dedup();
        ws
    }
}

/// `wt(c_{i_1} ∧ … ∧ c_{i_d}) = Σ (i_j - 1)`.
pub fn monomial_weight(tuple: &[u32]) -> i64 {
    tuple.iter().map(|&i| i as i64 - 1).sum()
}

/// Sorts indices into strictly increasing order, returning the permutation
/// sign, or `None` when an index repeats.
fn sort_with_sign(indices: &[u32]) -> Option<(Vec<u32>, i64)> {
    let mut v = indices.to_vec();
    let mut sign = 1i64;
    // Insertion sort with transposition counting; tuples are tiny.
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

/// Terms of `d c_r` as (index pair, binomial coefficient), before
/// canonical reordering.
fn generator_differential(r: u32) -> Vec<([u32; 2], Z)> {
    let mut out = Vec::with_capacity(r as usize + 1);
    for k in 0..=r {
        out.push(([r - k + 1, k], binomial(r, k)));
    }
    out
}

fn binomial(n: u32, k: u32) -> Z {
    let mut acc = Z::from(1);
    for i in 0..k.min(n - k) {
        acc = acc * Z::from(n - i) / Z::from(i + 1);
    }
    acc
}

impl fmt::Display for ExteriorCochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (tuple, coeff) in &self.terms {
            if tuple.is_empty() {
                if first {
                    write!(f, "{coeff}")?;
                } else if coeff.is_negative() {
                    write!(f, " - {}", -coeff.clone())?;
                } else {
                    write!(f, " + {coeff}")?;
                }
                first = false;
                continue;
            }
            let mono = tuple
                .iter()
                .map(|i| format!("c{i}"))
                .collect::<Vec<_>>()
                .join("∧");
            if first {
                first = false;
                if coeff == &qi(1) {
                    write!(f, "{mono}")?;
                } else if coeff == &qi(-1) {
                    write!(f, "-{mono}")?;
                } else {
                    write!(f, "{coeff}·{mono}")?;
                }
            } else if coeff == &qi(1) {
                write!(f, " + {mono}")?;
            } else if coeff == &qi(-1) {
                write!(f, " - {mono}")?;
            } else if coeff.is_negative() {
                write!(f, " - {}·{mono}", -coeff.clone())?;
            } else {
                write!(f, " + {coeff}·{mono}")?;
            }
        }
        Ok(())
    }
}
