//! Lattices attached to finite abelian groups `Z_{s_1} x ... x Z_{s_l}`.

use num_bigint::{BigInt, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use super::{hermite_normal_form, hnf_with_transform, smith_normal_form, IntMatrix};
use crate::error::{Error, Result};

/// HNF basis of `{c in Z^n : sum_i c_i images[i] in span(relations)}`.
///
/// `images` has one row per generator; all rows share one length.
pub fn relation_lattice(images: &[Vec<BigInt>], relations: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = images.len();
    let t = images
        .first()
        .map(Vec::len)
        .or_else(|| relations.first().map(Vec::len))
        .unwrap_or(0);
    if t == 0 {
        return IntMatrix::identity(n).to_rows();
    }
    let rel = hermite_normal_form(t, relations);
    let mut stacked: Vec<Vec<BigInt>> = images.to_vec();
    stacked.extend(rel);
    let res = hnf_with_transform(&IntMatrix::from_rows(t, &stacked));
    let kernel: Vec<Vec<BigInt>> = res.left_kernel().into_iter().map(|k| k[..n].to_vec()).collect();
    hermite_normal_form(n, &kernel)
}

fn diagonal_rows(moduli: &[BigInt]) -> Vec<Vec<BigInt>> {
    let l = moduli.len();
    (0..l)
        .map(|i| {
            let mut row = vec![BigInt::zero(); l];
            row[i] = moduli[i].clone();
            row
        })
        .collect()
}

/// Characters of `G = prod Z_{s_j}` trivial on the subgroup generated by
/// `vectors`, as a full-rank HNF lattice containing `diag(s)`.
///
/// A character `y` acts on `z` by `exp(2 pi i sum_j y_j z_j / s_j)`.
pub fn annihilator_lattice(vectors: &[Vec<BigInt>], moduli: &[BigInt]) -> Vec<Vec<BigInt>> {
    let l = moduli.len();
    let mut rows: Vec<Vec<BigInt>> = vectors.to_vec();
    rows.extend(diagonal_rows(moduli));
    let reduced = hermite_normal_form(l, &rows);
    let big_l = moduli.iter().fold(BigInt::one(), |acc, s| acc.lcm(s));
    // y_j contributes (L / s_j) * v_j to each pairing; all pairings must vanish mod L
    let images: Vec<Vec<BigInt>> = (0..l)
        .map(|j| {
            let w = &big_l / &moduli[j];
            reduced.iter().map(|v| &v[j] * &w).collect()
        })
        .collect();
    let relations: Vec<Vec<BigInt>> = (0..reduced.len())
        .map(|i| {
            let mut row = vec![BigInt::zero(); reduced.len()];
            row[i] = big_l.clone();
            row
        })
        .collect();
    let mut out = if reduced.is_empty() { IntMatrix::identity(l).to_rows() } else { relation_lattice(&images, &relations) };
    out.extend(diagonal_rows(moduli));
    hermite_normal_form(l, &out)
}

/// A subgroup `H` of `G = prod Z_{s_j}`, stored as the full-rank lattice
/// `Lambda` with `Lambda / diag(s) Z^l = H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sublattice {
    moduli: Vec<BigInt>,
    /// Upper-triangular HNF rows; row `i` has its pivot in column `i`.
    basis: Vec<Vec<BigInt>>,
}

impl Sublattice {
    pub fn from_generators(generators: &[Vec<BigInt>], moduli: &[BigInt]) -> Result<Self> {
        let l = moduli.len();
        if moduli.iter().any(|s| !s.is_positive()) {
            return Err(Error::Precondition("moduli must be positive".into()));
        }
        if let Some(g) = generators.iter().find(|g| g.len() != l) {
            return Err(Error::DimensionMismatch(format!(
                "generator of length {} in a group of rank {l}",
                g.len()
            )));
        }
        let mut rows = generators.to_vec();
        rows.extend(diagonal_rows(moduli));
        let basis = hermite_normal_form(l, &rows);
        debug_assert_eq!(basis.len(), l);
        Ok(Sublattice { moduli: moduli.to_vec(), basis })
    }

    /// Takes an HNF basis already known to contain `diag(s)`.
    pub fn from_full_rank_basis(basis: Vec<Vec<BigInt>>, moduli: &[BigInt]) -> Self {
        Sublattice::from_generators(&basis, moduli).expect("well-formed basis")
    }

    pub fn whole(moduli: &[BigInt]) -> Self {
        Sublattice { moduli: moduli.to_vec(), basis: IntMatrix::identity(moduli.len()).to_rows() }
    }

    pub fn trivial(moduli: &[BigInt]) -> Self {
        Sublattice { moduli: moduli.to_vec(), basis: diagonal_rows(moduli) }
    }

    pub fn moduli(&self) -> &[BigInt] {
        &self.moduli
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn order(&self) -> BigInt {
        let g: BigInt = self.moduli.iter().product();
        let idx: BigInt = (0..self.rank()).map(|i| self.basis[i][i].clone()).product();
        g / idx
    }

    /// Index of `H` in `G`.
    pub fn index(&self) -> BigInt {
        (0..self.rank()).map(|i| self.basis[i][i].clone()).product()
    }

    /// Canonical representative of `z + H` with `0 <= z_i < pivot_i`.
    pub fn reduce(&self, z: &[BigInt]) -> Vec<BigInt> {
        let mut z = z.to_vec();
        for i in 0..self.rank() {
            let q = z[i].div_floor(&self.basis[i][i]);
            if !q.is_zero() {
                for (zj, bj) in z.iter_mut().zip(&self.basis[i]).skip(i) {
                    *zj -= &q * bj;
                }
            }
        }
        z
    }

    pub fn contains(&self, z: &[BigInt]) -> bool {
        self.reduce(z).iter().all(Zero::is_zero)
    }

    pub fn contains_subgroup(&self, other: &Sublattice) -> bool {
        other.basis.iter().all(|b| self.contains(b))
    }

    /// Generators of `H` with entries reduced mod `s`; the zero element is
    /// omitted.
    pub fn generators(&self) -> Vec<Vec<BigInt>> {
        self.basis
            .iter()
            .map(|row| row.iter().zip(&self.moduli).map(|(x, s)| x.mod_floor(s)).collect::<Vec<_>>())
            .filter(|row| !row.iter().all(Zero::is_zero))
            .collect()
    }

    pub fn sum(&self, other: &Sublattice) -> Sublattice {
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Sublattice { moduli: self.moduli.clone(), basis: hermite_normal_form(self.rank(), &rows) }
    }

    pub fn intersection(&self, other: &Sublattice) -> Sublattice {
        // c with c * B_self in Lambda_other
        let rel = relation_lattice(&self.basis, &other.basis);
        let b = IntMatrix::from_rows(self.rank(), &self.basis);
        let rows: Vec<Vec<BigInt>> = rel.iter().map(|c| b.vec_mul(c)).collect();
        Sublattice::from_generators(&rows, &self.moduli).expect("same ambient group")
    }

    /// The annihilator of `H` in the character group.
    pub fn dual(&self) -> Sublattice {
        Sublattice { moduli: self.moduli.clone(), basis: annihilator_lattice(&self.basis, &self.moduli) }
    }

    /// The element with mixed-radix index `k < |H|`, reduced mod `s`.
    /// Distinct indices give distinct elements.
    pub fn element(&self, k: &BigInt) -> Vec<BigInt> {
        let mut k = k.clone();
        let mut z = vec![BigInt::zero(); self.rank()];
        for i in 0..self.rank() {
            let radix = &self.moduli[i] / &self.basis[i][i];
            let (q, c) = k.div_mod_floor(&radix);
            k = q;
            for (zj, bj) in z.iter_mut().zip(&self.basis[i]) {
                *zj += &c * bj;
            }
        }
        z.iter().zip(&self.moduli).map(|(x, s)| x.mod_floor(s)).collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<BigInt> {
        let k = rng.gen_bigint_range(&BigInt::zero(), &self.order());
        self.element(&k)
    }
}

/// `Z^k` modulo a full-rank relation lattice, in invariant-factor form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientGroup {
    /// Invariant factors `d_1 | d_2 | ...`, all greater than one.
    pub factors: Vec<BigInt>,
    /// `h_i` as an integer combination of the `k` original generators.
    pub invariant_generators: Vec<Vec<BigInt>>,
    /// Original generator `g_j` as a combination of the `h_i`.
    pub original_in_invariant: Vec<Vec<BigInt>>,
    v: IntMatrix,
    kept: Vec<usize>,
}

impl QuotientGroup {
    pub fn new(num_generators: usize, relations: &[Vec<BigInt>]) -> Result<Self> {
        let k = num_generators;
        let rel = IntMatrix::from_rows(k, relations);
        let snf = smith_normal_form(&rel);
        let diag = snf.diagonal();
        if diag.len() < k || diag.iter().any(Zero::is_zero) {
            return Err(Error::Precondition("relation lattice is not of full rank".into()));
        }
        let kept: Vec<usize> = (0..k).filter(|&i| !diag[i].is_one()).collect();
        let factors = kept.iter().map(|&i| diag[i].clone()).collect();
        let invariant_generators = kept.iter().map(|&i| snf.v_inv.row(i).to_vec()).collect();
        let original_in_invariant = (0..k)
            .map(|j| kept.iter().map(|&i| snf.v[(j, i)].mod_floor(&diag[i])).collect())
            .collect();
        Ok(QuotientGroup { factors, invariant_generators, original_in_invariant, v: snf.v, kept })
    }

    pub fn order(&self) -> BigInt {
        self.factors.iter().product()
    }

    /// Invariant coordinates of `sum_j c_j g_j`.
    pub fn coordinates(&self, c: &[BigInt]) -> Vec<BigInt> {
        let w = self.v.vec_mul(c);
        self.kept.iter().zip(&self.factors).map(|(&i, d)| w[i].mod_floor(d)).collect()
    }
}
