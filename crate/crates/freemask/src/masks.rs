//! Deterministic 0/1 mask matrices, their density statistics, and the
//! partition weight that decides whether a masked model keeps the unmasked
//! limiting moments.

use crate::combinat::{self, PairPartition};
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Default cap on elementary terms for `mask_partition_weight`.
pub const WEIGHT_TERM_BUDGET: u64 = 100_000_000;

/// Dense 0/1 matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl MaskMatrix {
    pub fn from_entries(rows: usize, cols: usize, data: Vec<u8>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::domain("mask dimensions must be positive"));
        }
        if data.len() != rows * cols {
            return Err(Error::domain(format!(
                "mask data length {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        if data.iter().any(|&v| v > 1) {
            return Err(Error::domain("mask entries must be 0 or 1"));
        }
        Ok(MaskMatrix { rows, cols, data })
    }

    /// All-ones mask.
    pub fn full(rows: usize, cols: usize) -> Result<Self> {
        MaskMatrix::from_entries(rows, cols, vec![1; rows * cols])
    }

    /// Entries are independent Bernoulli(q); the draw is fixed by `seed`, so
    /// the mask is deterministic once built.
    pub fn bernoulli(rows: usize, cols: usize, q: f64, seed: u64) -> Result<Self> {
        if !(q.is_finite() && (0.0..=1.0).contains(&q)) {
            return Err(Error::domain(format!("Bernoulli parameter q = {q} must lie in [0, 1]")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..rows * cols)
            .map(|_| u8::from(rng.random::<f64>() < q))
            .collect();
        MaskMatrix::from_entries(rows, cols, data)
    }

    /// Square mask that zeroes the diagonal band |i - j| <= w and keeps the
    /// rest.
    pub fn band_removed(n: usize, w: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("mask dimensions must be positive"));
        }
        let mut data = vec![1u8; n * n];
        for i in 0..n {
            for j in 0..n {
                if i.abs_diff(j) <= w {
                    data[i * n + j] = 0;
                }
            }
        }
        MaskMatrix::from_entries(n, n, data)
    }

    /// Square mask with the trailing round(frac * n) columns zeroed.
    pub fn kill_columns(n: usize, frac: f64) -> Result<Self> {
        if !(frac.is_finite() && (0.0..=1.0).contains(&frac)) {
            return Err(Error::domain(format!("column fraction {frac} must lie in [0, 1]")));
        }
        if n == 0 {
            return Err(Error::domain("mask dimensions must be positive"));
        }
        let dead = ((frac * n as f64).round() as usize).min(n);
        let mut data = vec![1u8; n * n];
        for i in 0..n {
            for j in n - dead..n {
                data[i * n + j] = 0;
            }
        }
        MaskMatrix::from_entries(n, n, data)
    }

    /// Parity mask keeping entries with i + j even. Requires even n so the
    /// density is exactly 1/2; the output is symmetric.
    pub fn checkerboard(n: usize) -> Result<Self> {
        if n == 0 || n % 2 != 0 {
            return Err(Error::domain(format!(
                "checkerboard needs a positive even size, got {n}"
            )));
        }
        let data = (0..n * n)
            .map(|idx| u8::from((idx / n + idx % n) % 2 == 0))
            .collect();
        MaskMatrix::from_entries(n, n, data)
    }

    /// Zeroes the top-left round(alpha * rows) x round(beta * cols) block.
    pub fn block_zero(rows: usize, cols: usize, alpha: f64, beta: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta)] {
            if !(v.is_finite() && (0.0..=1.0).contains(&v)) {
                return Err(Error::domain(format!("{name} = {v} must lie in [0, 1]")));
            }
        }
        if rows == 0 || cols == 0 {
            return Err(Error::domain("mask dimensions must be positive"));
        }
        let r0 = ((alpha * rows as f64).round() as usize).min(rows);
        let c0 = ((beta * cols as f64).round() as usize).min(cols);
        let mut data = vec![1u8; rows * cols];
        for i in 0..r0 {
            for j in 0..c0 {
                data[i * cols + j] = 0;
            }
        }
        MaskMatrix::from_entries(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.cols + j]
    }

    pub fn entries(&self) -> &[u8] {
        &self.data
    }

    /// Fraction of kept entries.
    pub fn density(&self) -> f64 {
        let ones: u64 = self.data.iter().map(|&v| v as u64).sum();
        ones as f64 / (self.rows * self.cols) as f64
    }

    fn row_sum(&self, i: usize) -> u64 {
        self.data[i * self.cols..(i + 1) * self.cols]
            .iter()
            .map(|&v| v as u64)
            .sum()
    }

    fn col_sum(&self, j: usize) -> u64 {
        (0..self.rows).map(|i| self.get(i, j) as u64).sum()
    }
}

/// Density summary of a mask at a given epsilon: how many rows and columns
/// keep at least a (1 - epsilon) fraction of their entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityReport {
    pub density: f64,
    pub epsilon: f64,
    pub row_set_size: usize,
    pub col_set_size: usize,
}

/// Counts rows with mean >= 1 - epsilon and columns with mean >= 1 - epsilon.
pub fn epsilon_sets(d: &MaskMatrix, epsilon: f64) -> Result<DensityReport> {
    if !(epsilon.is_finite() && epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::domain(format!("epsilon = {epsilon} must lie in (0, 1)")));
    }
    let row_set_size = (0..d.rows)
        .filter(|&i| d.row_sum(i) as f64 / d.cols as f64 >= 1.0 - epsilon)
        .count();
    let col_set_size = (0..d.cols)
        .filter(|&j| d.col_sum(j) as f64 / d.rows as f64 >= 1.0 - epsilon)
        .count();
    Ok(DensityReport {
        density: d.density(),
        epsilon,
        row_set_size,
        col_set_size,
    })
}

/// Normalized partition weight of a mask under a non-crossing pair partition.
///
/// Positions 1..2k are assigned indices that must be constant on each
/// gamma-pi orbit, leaving one free index per orbit (k+1 of them). The weight
/// is the average over all assignments of the product of mask entries over
/// the pairs. For a square mask every orbit ranges over the side length and a
/// pair (r, s) with r < s reads entry (value(r), value(s)); the normalization
/// is n^(k+1). For a rectangular p x n mask, orbits made of odd positions
/// range over rows [p], the others over columns [n] (non-crossing pairs
/// always join an odd and an even position, so each pair reads entry
/// (odd value, even value)); the normalization is p^u n^(k+1-u).
///
/// A weight that stays near 1 as the matrix grows is the mask-side condition
/// for keeping the unmasked limit; full masks give exactly 1.
pub fn mask_partition_weight(d: &MaskMatrix, pi: &PairPartition) -> Result<f64> {
    mask_partition_weight_with_budget(d, pi, WEIGHT_TERM_BUDGET)
}

/// Same as `mask_partition_weight` with an explicit cap on the number of
/// index assignments (elementary terms).
pub fn mask_partition_weight_with_budget(
    d: &MaskMatrix,
    pi: &PairPartition,
    budget: u64,
) -> Result<f64> {
    if !combinat::is_noncrossing(pi) {
        return Err(Error::domain(format!(
            "partition {pi} is crossing; the weight is defined over non-crossing partitions"
        )));
    }
    let orbits = combinat::gamma_pi_orbits(pi);
    let k = pi.k();
    debug_assert_eq!(orbits.len(), k + 1);

    // orbit id for every position
    let mut orbit_of = vec![0usize; 2 * k + 1];
    for (oi, orbit) in orbits.iter().enumerate() {
        for &pos in orbit {
            orbit_of[pos] = oi;
        }
    }

    // index range per orbit
    let ranges: Vec<usize> = if d.is_square() {
        vec![d.cols; orbits.len()]
    } else {
        orbits
            .iter()
            .map(|orbit| {
                if orbit.iter().all(|&pos| pos % 2 == 1) {
                    d.rows
                } else if orbit.iter().all(|&pos| pos % 2 == 0) {
                    d.cols
                } else {
                    // unreachable for non-crossing partitions
                    0
                }
            })
            .collect()
    };
    if ranges.iter().any(|&r| r == 0) {
        return Err(Error::domain(
            "rectangular weight needs parity-pure orbits; partition is not non-crossing",
        ));
    }

    let mut terms: u128 = 1;
    for &r in &ranges {
        terms = terms.saturating_mul(r as u128);
    }
    if terms > budget as u128 {
        return Err(Error::size_limit(format!(
            "weight needs {terms} terms, budget is {budget}"
        )));
    }

    // (row orbit, col orbit) per pair
    let pair_terms: Vec<(usize, usize)> = pi
        .pairs()
        .iter()
        .map(|&(r, s)| {
            if d.is_square() {
                (orbit_of[r], orbit_of[s])
            } else if r % 2 == 1 {
                (orbit_of[r], orbit_of[s])
            } else {
                (orbit_of[s], orbit_of[r])
            }
        })
        .collect();

    // every term is 0 or 1, so accumulate an exact integer count; the outer
    // orbit parallelizes without affecting the result
    let count: u64 = (0..ranges[0])
        .into_par_iter()
        .map(|v0| {
            let mut vals = vec![0usize; ranges.len()];
            vals[0] = v0;
            let mut local: u64 = 0;
            loop {
                let mut prod = 1u8;
                for &(ro, co) in &pair_terms {
                    prod &= d.get(vals[ro], vals[co]);
                    if prod == 0 {
                        break;
                    }
                }
                local += prod as u64;
                // odometer over orbits 1..; orbit 0 is fixed to v0
                let mut digit = ranges.len() - 1;
                loop {
                    if digit == 0 {
                        return local;
                    }
                    vals[digit] += 1;
                    if vals[digit] < ranges[digit] {
                        break;
                    }
                    vals[digit] = 0;
                    digit -= 1;
                }
            }
        })
        .sum();

    let norm: f64 = ranges.iter().map(|&r| r as f64).product();
    Ok(count as f64 / norm)
}
