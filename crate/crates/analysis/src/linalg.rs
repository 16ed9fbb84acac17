//! Exact linear algebra over the rationals and integers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Solves the square system `a x = b` by rational Gaussian elimination.
/// Returns `None` when `a` is singular.
pub fn solve_exact(
    mut a: Vec<Vec<BigRational>>,
    mut b: Vec<BigRational>,
) -> Option<Vec<BigRational>> {
    let size = b.len();
    debug_assert!(a.len() == size && a.iter().all(|row| row.len() == size));
    for col in 0..size {
        let pivot = (col..size).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in col + 1..size {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &a[col][col];
            for c in col..size {
                let delta = &factor * &a[col][c];
                a[r][c] -= delta;
            }
            let delta = &factor * &b[col];
            b[r] -= delta;
        }
    }
    let mut x = vec![BigRational::zero(); size];
    for r in (0..size).rev() {
        let mut acc = b[r].clone();
        for c in r + 1..size {
            acc -= &a[r][c] * &x[c];
        }
        x[r] = acc / &a[r][r];
    }
    Some(x)
}

/// Integer nullspace basis information from fraction-free Gauss-Jordan elimination.
#[derive(Clone, Debug)]
pub struct NullSpace {
    pub rank: usize,
    pub columns: usize,
    /// An integer generator of the nullspace when it is one-dimensional.
    pub generator: Option<Vec<BigInt>>,
}

impl NullSpace {
    pub fn nullity(&self) -> usize {
        self.columns - self.rank
    }
}

/// Fraction-free (Bareiss) Gauss-Jordan elimination of an integer matrix.
/// Every division is exact, so entries stay integral and bounded by minors.
pub fn nullspace(mut a: Vec<Vec<BigInt>>, columns: usize) -> NullSpace {
    let rows = a.len();
    let mut prev = BigInt::one();
    let mut pivots: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..columns {
        if row == rows {
            break;
        }
        let Some(found) = (row..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, found);
        let pivot_row = std::mem::take(&mut a[row]);
        let pivot = pivot_row[col].clone();
        for (i, target) in a.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let lead = std::mem::take(&mut target[col]);
            for j in 0..columns {
                if j == col {
                    continue;
                }
                let mut v = &pivot * &target[j];
                if !lead.is_zero() && !pivot_row[j].is_zero() {
                    v -= &lead * &pivot_row[j];
                }
                target[j] = if v.is_zero() { v } else { v / &prev };
            }
        }
        a[row] = pivot_row;
        prev = pivot;
        pivots.push(col);
        row += 1;
    }
    let rank = pivots.len();
    let generator = (columns == rank + 1).then(|| {
        let free = (0..columns)
            .find(|c| !pivots.contains(c))
            .unwrap_or(columns - 1);
        let mut x = vec![BigInt::zero(); columns];
        x[free] = prev.clone();
        for (k, &pc) in pivots.iter().enumerate() {
            x[pc] = -a[k][free].clone();
        }
        x
    });
    NullSpace {
        rank,
        columns,
        generator,
    }
}
