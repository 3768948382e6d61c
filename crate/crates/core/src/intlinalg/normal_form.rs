//! Smith and Hermite normal forms.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::IntMatrix;

/// `U * A * V = D` with unimodular `U`, `V` and `D` diagonal,
/// `d_1 | d_2 | ...`, non-negative, zeros trailing.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    /// Inverse of `v`, maintained alongside it.
    pub v_inv: IntMatrix,
}

impl SnfResult {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

/// Position of the smallest non-zero entry (by absolute value) in the
/// lower-right block starting at `(t, t)`; ties go to the lowest `(row, col)`.
fn smallest_entry(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let x = &a[(i, j)];
            if x.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if a[(bi, bj)].abs() <= x.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

pub fn smith_normal_form(a: &IntMatrix) -> SnfResult {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let mut v_inv = IntMatrix::identity(n);

    let swap_cols = |d: &mut IntMatrix, v: &mut IntMatrix, v_inv: &mut IntMatrix, x: usize, y: usize| {
        d.swap_cols(x, y);
        v.swap_cols(x, y);
        v_inv.swap_rows(x, y);
    };

    for t in 0..m.min(n) {
        let Some((pi, pj)) = smallest_entry(&d, t) else {
            break;
        };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        swap_cols(&mut d, &mut v, &mut v_inv, t, pj);

        loop {
            let pivot = d[(t, t)].clone();
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = -d[(i, t)].div_floor(&pivot);
                d.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = -d[(t, j)].div_floor(&pivot);
                d.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                // V <- V E with E = I + q e_t e_j^T, so V^{-1} <- (I - q e_t e_j^T) V^{-1}
                v_inv.add_row_multiple(t, j, &-&q);
            }

            // a smaller remainder in row or column t becomes the new pivot
            let mut smaller: Option<(usize, usize)> = None;
            let mut best = pivot.abs();
            for i in t + 1..m {
                let x = d[(i, t)].abs();
                if !x.is_zero() && x < best {
                    best = x;
                    smaller = Some((i, t));
                }
            }
            for j in t + 1..n {
                let x = d[(t, j)].abs();
                if !x.is_zero() && x < best {
                    best = x;
                    smaller = Some((t, j));
                }
            }
            if let Some((i, j)) = smaller {
                if i != t {
                    d.swap_rows(t, i);
                    u.swap_rows(t, i);
                } else {
                    swap_cols(&mut d, &mut v, &mut v_inv, t, j);
                }
                continue;
            }

            // row and column are clear; enforce the divisibility chain
            let pivot = d[(t, t)].clone();
            let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d[(i, j)].is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    let one = BigInt::from(1);
                    d.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }

        if d[(t, t)].sign() == Sign::Minus {
            d.negate_row(t);
            u.negate_row(t);
        }
    }

    SnfResult { u, d, v, v_inv }
}

/// Row-style Hermite normal form `U * A = H`.
#[derive(Clone, Debug)]
pub struct HnfResult {
    pub h: IntMatrix,
    pub u: IntMatrix,
    pub rank: usize,
    /// Pivot column of each of the first `rank` rows.
    pub pivots: Vec<usize>,
}

impl HnfResult {
    /// Rows of `U` that annihilate `A` from the left.
    pub fn left_kernel(&self) -> Vec<Vec<BigInt>> {
        (self.rank..self.u.rows()).map(|i| self.u.row(i).to_vec()).collect()
    }
}

fn hnf_impl(a: &IntMatrix, track: bool) -> HnfResult {
    let (m, n) = (a.rows(), a.cols());
    let mut h = a.clone();
    let mut u = if track { IntMatrix::identity(m) } else { IntMatrix::zeros(0, 0) };
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..n {
        if r == m {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for i in r..m {
                if h[(i, c)].is_zero() {
                    continue;
                }
                match best {
                    Some(b) if h[(b, c)].abs() <= h[(i, c)].abs() => {}
                    _ => best = Some(i),
                }
            }
            let Some(p) = best else { break };
            h.swap_rows(r, p);
            if track {
                u.swap_rows(r, p);
            }
            let pivot = h[(r, c)].clone();
            let mut clear = true;
            for i in r + 1..m {
                if h[(i, c)].is_zero() {
                    continue;
                }
                let q = -h[(i, c)].div_floor(&pivot);
                h.add_row_multiple(i, r, &q);
                if track {
                    u.add_row_multiple(i, r, &q);
                }
                if !h[(i, c)].is_zero() {
                    clear = false;
                }
            }
            if clear {
                break;
            }
        }
        if r < m && !h[(r, c)].is_zero() {
            if h[(r, c)].sign() == Sign::Minus {
                h.negate_row(r);
                if track {
                    u.negate_row(r);
                }
            }
            let pivot = h[(r, c)].clone();
            for i in 0..r {
                let q = -h[(i, c)].div_floor(&pivot);
                h.add_row_multiple(i, r, &q);
                if track {
                    u.add_row_multiple(i, r, &q);
                }
            }
            pivots.push(c);
            r += 1;
        }
    }
    HnfResult { h, u, rank: r, pivots }
}

pub fn hnf_with_transform(a: &IntMatrix) -> HnfResult {
    hnf_impl(a, true)
}

/// Non-zero rows of the row-style Hermite normal form of the lattice
/// spanned by `rows`.
pub fn hermite_normal_form(cols: usize, rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let res = hnf_impl(&IntMatrix::from_rows(cols, rows), false);
    (0..res.rank).map(|i| res.h.row(i).to_vec()).collect()
}
