//! Exact rational linear algebra for the small boundary matrices.
//!
//! Ranks go through fraction-free (Bareiss) elimination over big integers,
//! after clearing row denominators. Kernels and reduction mod an image use
//! reduced row echelon form over the rationals; both routes agree and the
//! test suite checks them against each other.

use num::traits::{Signed, Zero};

use crate::{Q, Z};

/// Dense rational matrix, row major. Rows may be empty (0×n or m×0).
pub type QMatrix = Vec<Vec<Q>>;

pub fn n_rows(m: &QMatrix) -> usize {
    m.len()
}

pub fn n_cols(m: &QMatrix) -> usize {
    m.first().map(|r| r.len()).unwrap_or(0)
}

/// Rank by fraction-free Gaussian elimination on an integer copy.
pub fn rank(m: &QMatrix) -> usize {
    let rows = n_rows(m);
    let cols = n_cols(m);
    if rows == 0 || cols == 0 {
        return 0;
    }
    // Clear denominators row by row; row scaling preserves rank.
    let mut a: Vec<Vec<Z>> = m
        .iter()
        .map(|row| {
            let lcm = row.iter().fold(Z::from(1), |acc, x| {
                if x.is_zero() {
                    acc
                } else {
                    num::integer::lcm(acc, x.denom().clone())
                }
            });
            row.iter()
                .map(|x| x.numer() * (&lcm / x.denom()))
                .collect()
        })
        .collect();

    let mut rank = 0;
    let mut prev_pivot = Z::from(1);
    let mut row = 0;
    for col in 0..cols {
        // Find a pivot at or below `row`.
        let pivot_row = (row..rows).find(|&r| !a[r][col].is_zero());
        let Some(p) = pivot_row else { continue };
        a.swap(row, p);
        let pivot = a[row][col].clone();
        for r in row + 1..rows {
            for c in col + 1..cols {
                let val = (&a[r][c] * &pivot - &a[r][col] * &a[row][c]) / &prev_pivot;
                a[r][c] = val;
            }
            a[r][col] = Z::zero();
        }
        prev_pivot = pivot;
        rank += 1;
        row += 1;
        if row == rows {
            break;
        }
    }
    rank
}

/// In-place reduced row echelon form; returns the pivot columns.
pub fn rref(m: &mut QMatrix) -> Vec<usize> {
    let rows = n_rows(m);
    let cols = n_cols(m);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row >= rows {
            break;
        }
        let pivot_row = (row..rows).find(|&r| !m[r][col].is_zero());
        let Some(p) = pivot_row else { continue };
        m.swap(row, p);
        let inv = m[row][col].clone();
        for c in col..cols {
            m[row][c] = &m[row][c] / &inv;
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..cols {
                    let delta = &factor * &m[row][c];
                    m[r][c] = &m[r][c] - delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// Basis of the right kernel `{v : M v = 0}`.
pub fn nullspace(m: &QMatrix) -> Vec<Vec<Q>> {
    let cols = n_cols(m);
    if n_rows(m) == 0 || cols == 0 {
        // Every coordinate vector is in the kernel of an empty map.
        return (0..cols)
            .map(|j| {
                let mut v = vec![Q::zero(); cols];
                v[j] = Q::from_integer(Z::from(1));
                v
            })
            .collect();
    }
    let mut reduced = m.clone();
    let pivots = rref(&mut reduced);
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![Q::zero(); cols];
        v[free] = Q::from_integer(Z::from(1));
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -reduced[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Picks the members of `candidates` that are independent modulo the column
/// span of `image` (all vectors of length `dim`). Returns their indices.
pub fn independent_mod_image(
    dim: usize,
    image: &[Vec<Q>],
    candidates: &[Vec<Q>],
) -> Vec<usize> {
    // Columns accumulate left to right; a candidate survives when it
    // raises the rank of the accumulated matrix.
    let mut cols: Vec<Vec<Q>> = image.to_vec();
    let mut current_rank = rank_of_columns(dim, &cols);
    let mut kept = Vec::new();
    for (idx, cand) in candidates.iter().enumerate() {
        cols.push(cand.clone());
        let r = rank_of_columns(dim, &cols);
        if r > current_rank {
            current_rank = r;
            kept.push(idx);
        } else {
            cols.pop();
        }
    }
    kept
}

fn rank_of_columns(dim: usize, cols: &[Vec<Q>]) -> usize {
    if cols.is_empty() || dim == 0 {
        return 0;
    }
    let matrix: QMatrix = (0..dim)
        .map(|r| cols.iter().map(|c| c[r].clone()).collect())
        .collect();
    rank(&matrix)
}

/// Normalizes a rational vector so its first nonzero entry is +1.
pub fn normalize_leading(v: &[Q]) -> Vec<Q> {
    match v.iter().find(|x| !x.is_zero()) {
        None => v.to_vec(),
        Some(lead) => {
            let scale = if lead.is_negative() {
                -lead.clone()
            } else {
                lead.clone()
            };
            v.iter().map(|x| x / &scale).collect()
        }
    }
}
