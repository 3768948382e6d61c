//! Linear systems over the integers and over products of cyclic groups.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{smith_normal_form, IntMatrix};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiophantineSolution {
    pub particular: Vec<BigInt>,
    /// Basis of the integer kernel of `A`.
    pub kernel: Vec<Vec<BigInt>>,
}

/// Witness that `A x = b` has no integer solution: `row * A` vanishes
/// modulo `modulus` (exactly, when the modulus is zero) while `row * b`
/// does not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Infeasibility {
    pub row: Vec<BigInt>,
    pub modulus: BigInt,
}

impl Infeasibility {
    pub fn verify(&self, a: &IntMatrix, b: &[BigInt]) -> bool {
        let ra = a.vec_mul(&self.row);
        let rb: BigInt = self.row.iter().zip(b).map(|(x, y)| x * y).sum();
        let vanishes = |x: &BigInt| {
            if self.modulus.is_zero() {
                x.is_zero()
            } else {
                x.is_multiple_of(&self.modulus)
            }
        };
        ra.iter().all(vanishes) && !vanishes(&rb)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiophantineOutcome {
    Solved(DiophantineSolution),
    Infeasible(Infeasibility),
}

pub fn solve_diophantine(a: &IntMatrix, b: &[BigInt]) -> Result<DiophantineOutcome> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} rows but right-hand side has {} entries",
            a.rows(),
            b.len()
        )));
    }
    let snf = smith_normal_form(a);
    let c = snf.u.mul_vec(b);
    let diag = snf.diagonal();
    let rank = snf.rank();
    let n = a.cols();

    let mut y = vec![BigInt::zero(); n];
    for (i, ci) in c.iter().enumerate() {
        if i < rank {
            let (q, r) = ci.div_mod_floor(&diag[i]);
            if !r.is_zero() {
                return Ok(DiophantineOutcome::Infeasible(Infeasibility {
                    row: snf.u.row(i).to_vec(),
                    modulus: diag[i].clone(),
                }));
            }
            y[i] = q;
        } else if !ci.is_zero() {
            return Ok(DiophantineOutcome::Infeasible(Infeasibility {
                row: snf.u.row(i).to_vec(),
                modulus: BigInt::zero(),
            }));
        }
    }
    let particular = snf.v.mul_vec(&y);
    let kernel = (rank..n).map(|j| snf.v.col(j)).collect();
    Ok(DiophantineOutcome::Solved(DiophantineSolution { particular, kernel }))
}

/// Solves `sum_j A[i][j] x_j = b_i (mod s_i)` for every row `i`.
/// The returned entries lie in `[0, lcm(s))`.
pub fn solve_modular(a: &IntMatrix, b: &[BigInt], moduli: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    let m = a.rows();
    if b.len() != m || moduli.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "{} rows, {} right-hand entries, {} moduli",
            m,
            b.len(),
            moduli.len()
        )));
    }
    let n = a.cols();
    let mut ext = IntMatrix::zeros(m, n + m);
    for i in 0..m {
        for j in 0..n {
            ext[(i, j)] = a[(i, j)].clone();
        }
        ext[(i, n + i)] = moduli[i].clone();
    }
    let l = moduli.iter().fold(BigInt::one(), |acc, s| if s.is_zero() { acc } else { acc.lcm(s) });
    match solve_diophantine(&ext, b)? {
        DiophantineOutcome::Solved(sol) => {
            Ok(Some(sol.particular[..n].iter().map(|x| x.mod_floor(&l)).collect()))
        }
        DiophantineOutcome::Infeasible(_) => Ok(None),
    }
}
