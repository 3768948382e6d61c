//! Finite abelian subgroups of `(R,+)`: presentations, invariant-factor
//! bases, element coordinates and coset labels.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::blackbox::{ElementCode, QueryLedger, RingOracle};
use crate::error::{Error, Result};
use crate::intlinalg::{big, small, QuotientGroup, Sublattice};
use crate::qsim::{
    find_additive_order, is_member_decision, solve_ahsp, HidingFunction, Linearization, Provider,
    SubgroupDescriptor,
};

/// Oracle arithmetic with a known additive identity.
#[derive(Debug, Clone, Copy)]
pub struct RingArith<'r> {
    ring: &'r RingOracle,
    zero: ElementCode,
}

impl<'r> RingArith<'r> {
    /// Finds zero as `c g` for the first ring generator `g` of order `c`.
    pub fn new(ring: &'r RingOracle, p: &mut Provider) -> Result<Self> {
        let g = *ring
            .generators()
            .first()
            .ok_or_else(|| Error::Precondition("ring has no generators".into()))?;
        let c = find_additive_order(ring, g, p)?;
        Ok(RingArith { ring, zero: ring.multiple(c, g)? })
    }

    pub fn with_zero(ring: &'r RingOracle, zero: ElementCode) -> Self {
        RingArith { ring, zero }
    }

    pub fn ring(&self) -> &'r RingOracle {
        self.ring
    }

    pub fn zero(&self) -> ElementCode {
        self.zero
    }

    pub fn add(&self, a: ElementCode, b: ElementCode) -> Result<ElementCode> {
        self.ring.add(a, b)
    }

    pub fn mul(&self, a: ElementCode, b: ElementCode) -> Result<ElementCode> {
        self.ring.mul(a, b)
    }

    pub fn scale(&self, k: u64, a: ElementCode) -> Result<ElementCode> {
        if k == 0 {
            Ok(self.zero)
        } else {
            self.ring.multiple(k, a)
        }
    }

    /// `sum_i coeffs[i] elems[i]`.
    pub fn combination(&self, coeffs: &[u64], elems: &[ElementCode]) -> Result<ElementCode> {
        if coeffs.len() != elems.len() {
            return Err(Error::DimensionMismatch("one coefficient per element".into()));
        }
        let mut acc: Option<ElementCode> = None;
        for (&c, &e) in coeffs.iter().zip(elems) {
            if c == 0 {
                continue;
            }
            let term = self.ring.multiple(c, e)?;
            acc = Some(match acc {
                Some(a) => self.ring.add(a, term)?,
                None => term,
            });
        }
        Ok(acc.unwrap_or(self.zero))
    }
}

/// Generators with their orders and relation lattice.
#[derive(Debug, Clone)]
pub struct AbelianPresentation {
    pub generators: Vec<ElementCode>,
    pub orders: Vec<u64>,
    /// `{z : sum_j z_j g_j = 0}` inside `prod Z_{s_j}`.
    pub relations: Sublattice,
}

impl AbelianPresentation {
    pub fn order(&self) -> u64 {
        small(&self.relations.index())
    }
}

/// `h_1, ..., h_l` with `(group,+) = Z_{s_1} x ... x Z_{s_l}` and
/// `s_1 | s_2 | ... | s_l`, all `s_i > 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantFactorBasis {
    pub h: Vec<ElementCode>,
    pub s: Vec<u64>,
    /// Generators the basis was computed from.
    pub generators: Vec<ElementCode>,
    pub generator_orders: Vec<u64>,
    /// `h_i = sum_j to_original[i][j] g_j`
    pub to_original: Vec<Vec<u64>>,
    /// `g_j = sum_i from_original[j][i] h_i`
    pub from_original: Vec<Vec<u64>>,
}

impl InvariantFactorBasis {
    pub fn rank(&self) -> usize {
        self.h.len()
    }

    pub fn order(&self) -> u64 {
        self.s.iter().product()
    }

    pub fn moduli(&self) -> Vec<BigInt> {
        self.s.iter().map(|&x| big(x)).collect()
    }

    pub fn descriptor(&self) -> SubgroupDescriptor {
        SubgroupDescriptor::span(self.h.clone())
    }

    /// Exponent of the group (1 for the trivial group).
    pub fn exponent(&self) -> u64 {
        self.s.last().copied().unwrap_or(1)
    }
}

/// `z -> sum_j z_j g_j` on `prod Z_{s_j}`.
pub(crate) struct CombinationHiding<'a> {
    pub arith: &'a RingArith<'a>,
    pub elems: Vec<ElementCode>,
    pub orders: Vec<u64>,
}

pub(crate) fn coords_of(ring: &RingOracle, x: ElementCode) -> Result<Vec<BigInt>> {
    Ok(ring.ground_truth().coords(x)?.into_iter().map(big).collect())
}

pub(crate) fn ring_relations(ring: &RingOracle) -> Vec<Vec<BigInt>> {
    let m = ring.ground_truth().moduli();
    (0..m.len())
        .map(|i| {
            let mut row = vec![BigInt::zero(); m.len()];
            row[i] = big(m[i]);
            row
        })
        .collect()
}

/// Modeled additions for one coherent evaluation of `sum_j z_j g_j`.
pub(crate) fn combination_cost(orders: &[u64]) -> u64 {
    orders.iter().map(|&s| 2 * (64 - s.leading_zeros() as u64)).sum()
}

impl HidingFunction for CombinationHiding<'_> {
    fn orders(&self) -> Vec<u64> {
        self.orders.clone()
    }

    fn linearize(&self) -> Result<Linearization> {
        let ring = self.arith.ring();
        Ok(Linearization {
            images: self.elems.iter().map(|&g| coords_of(ring, g)).collect::<Result<_>>()?,
            relations: ring_relations(ring),
        })
    }

    fn same_label(&self, z: &[u64], w: &[u64], _: &mut Provider) -> Result<bool> {
        Ok(self.arith.combination(z, &self.elems)? == self.arith.combination(w, &self.elems)?)
    }

    fn charge_coherent(&self, evaluations: u64) {
        self.ledger().charge(evaluations * combination_cost(&self.orders), 0);
    }
}

impl CombinationHiding<'_> {
    fn ledger(&self) -> &QueryLedger {
        self.arith.ring().ledger()
    }
}

/// Orders and relation lattice of `gens`.
pub fn present_group(arith: &RingArith, gens: &[ElementCode], p: &mut Provider) -> Result<AbelianPresentation> {
    let orders = gens
        .iter()
        .map(|&g| find_additive_order(arith.ring(), g, p))
        .collect::<Result<Vec<_>>>()?;
    let f = CombinationHiding { arith, elems: gens.to_vec(), orders: orders.clone() };
    let relations = solve_ahsp(&f, p)?;
    Ok(AbelianPresentation { generators: gens.to_vec(), orders, relations })
}

pub fn invariant_factor_basis(arith: &RingArith, pres: &AbelianPresentation) -> Result<InvariantFactorBasis> {
    let k = pres.generators.len();
    let q = QuotientGroup::new(k, pres.relations.basis())?;
    let to_original: Vec<Vec<u64>> = q
        .invariant_generators
        .iter()
        .map(|row| row.iter().zip(&pres.orders).map(|(c, &s)| small(&c.mod_floor(&big(s)))).collect())
        .collect();
    let from_original: Vec<Vec<u64>> =
        q.original_in_invariant.iter().map(|row| row.iter().map(small).collect()).collect();
    let h = to_original
        .iter()
        .map(|row| arith.combination(row, &pres.generators))
        .collect::<Result<Vec<_>>>()?;
    Ok(InvariantFactorBasis {
        h,
        s: q.factors.iter().map(small).collect(),
        generators: pres.generators.clone(),
        generator_orders: pres.orders.clone(),
        to_original,
        from_original,
    })
}

/// Invariant-factor basis of the subgroup generated by `gens`.
pub fn decompose_group(arith: &RingArith, gens: &[ElementCode], p: &mut Provider) -> Result<InvariantFactorBasis> {
    let pres = present_group(arith, gens, p)?;
    invariant_factor_basis(arith, &pres)
}

/// Coefficients `n` with `x = sum_j n_j h_j` and `0 <= n_j < s_j`, read off
/// the cyclic subgroup hidden by `(m, n) -> m x + sum_j n_j h_j`.
pub fn decompose_element(
    arith: &RingArith,
    x: ElementCode,
    basis: &InvariantFactorBasis,
    p: &mut Provider,
) -> Result<Vec<u64>> {
    let ring = arith.ring();
    if !is_member_decision(ring, x, &basis.descriptor(), p)? {
        return Err(Error::NotMember);
    }
    if basis.rank() == 0 {
        return Ok(Vec::new());
    }
    let mut elems = vec![x];
    elems.extend(basis.h.iter().copied());
    let mut orders = vec![basis.exponent()];
    orders.extend(basis.s.iter().copied());
    let f = CombinationHiding { arith, elems, orders };
    for _ in 0..p.retry_cap() {
        let h = solve_ahsp(&f, p)?;
        let row = &h.basis()[0];
        if row[0] != BigInt::from(1) {
            continue;
        }
        // (1, v) hidden means x + sum v_j h_j = 0
        let n: Vec<u64> = row[1..]
            .iter()
            .zip(&basis.s)
            .map(|(v, &s)| small(&(-v).mod_floor(&big(s))))
            .collect();
        if arith.combination(&n, &basis.h)? == x {
            return Ok(n);
        }
    }
    p.flag_low_confidence();
    Err(Error::LowConfidence("element decomposition did not converge".into()))
}

/// Lattice of coordinate vectors (over `basis`) of the subgroup generated
/// by `elems`.
pub fn coordinate_lattice(
    arith: &RingArith,
    basis: &InvariantFactorBasis,
    elems: &[ElementCode],
    p: &mut Provider,
) -> Result<Sublattice> {
    let rows = elems
        .iter()
        .map(|&e| Ok(decompose_element(arith, e, basis, p)?.into_iter().map(big).collect()))
        .collect::<Result<Vec<Vec<BigInt>>>>()?;
    Sublattice::from_generators(&rows, &basis.moduli())
}

/// Label of the coset `x + sub`, where `sub` is given in the coordinates of
/// `basis`.
pub fn coset_canonical_form(
    arith: &RingArith,
    x: ElementCode,
    basis: &InvariantFactorBasis,
    sub: &Sublattice,
    p: &mut Provider,
) -> Result<Vec<u64>> {
    if sub.moduli() != basis.moduli().as_slice() {
        return Err(Error::DimensionMismatch("subgroup lattice over a different group".into()));
    }
    let n: Vec<BigInt> = decompose_element(arith, x, basis, p)?.into_iter().map(big).collect();
    Ok(sub.reduce(&n).iter().map(small).collect())
}

pub fn subgroup_order(basis: &InvariantFactorBasis) -> u64 {
    basis.order()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blackbox::{brute_force_enumerate, brute_force_span, make_ring};
    use std::collections::{BTreeMap, HashSet};

    fn setup(spec: &str) -> (RingOracle, Provider) {
        (make_ring(&spec.parse().unwrap(), 21).unwrap(), Provider::exact(4))
    }

    fn lit(r: &RingOracle, s: &str) -> ElementCode {
        r.ground_truth().parse_literal(s).unwrap()
    }

    #[test]
    fn arith_zero_matches_construction() {
        let (r, mut p) = setup("product(modular 2; modular 9)");
        let a = RingArith::new(&r, &mut p).unwrap();
        assert_eq!(a.zero(), r.ground_truth().zero());
        assert_eq!(a.combination(&[0, 0], &[lit(&r, "(1,0)"), lit(&r, "(0,1)")]).unwrap(), a.zero());
        assert_eq!(a.combination(&[3, 5], &[lit(&r, "(1,0)"), lit(&r, "(0,1)")]).unwrap(), lit(&r, "(1,5)"));
    }

    #[test]
    fn group_examples() {
        let (r, mut p) = setup("product(modular 2; modular 9)");
        let a = RingArith::new(&r, &mut p).unwrap();
        let b = decompose_group(&a, &[lit(&r, "(1,0)"), lit(&r, "(0,1)")], &mut p).unwrap();
        assert_eq!(b.s, vec![18]);

        let (r, mut p) = setup("modular 12");
        let a = RingArith::new(&r, &mut p).unwrap();
        let b = decompose_group(&a, &[lit(&r, "4"), lit(&r, "6")], &mut p).unwrap();
        assert_eq!(b.s, vec![6]);
        let b = decompose_group(&a, &[lit(&r, "3")], &mut p).unwrap();
        assert_eq!((b.h.clone(), b.s.clone()), (vec![lit(&r, "3")], vec![4]));
        assert_eq!(subgroup_order(&b), 4);
        let b = decompose_group(&a, &[lit(&r, "0")], &mut p).unwrap();
        assert_eq!(subgroup_order(&b), 1);
        let b = decompose_group(&a, &[lit(&r, "1")], &mut p).unwrap();
        assert_eq!(subgroup_order(&b), 12);
    }

    #[test]
    fn element_examples() {
        let (r, mut p) = setup("modular 12");
        let a = RingArith::new(&r, &mut p).unwrap();
        let one = decompose_group(&a, &[lit(&r, "1")], &mut p).unwrap();
        assert_eq!(decompose_element(&a, lit(&r, "7"), &one, &mut p).unwrap(), vec![7]);
        let four = decompose_group(&a, &[lit(&r, "4")], &mut p).unwrap();
        assert_eq!(decompose_element(&a, lit(&r, "8"), &four, &mut p).unwrap(), vec![2]);
        assert_eq!(decompose_element(&a, lit(&r, "2"), &four, &mut p), Err(Error::NotMember));

        let (f4, mut p) = setup("polyquot 2 [1,1,1]");
        let a = RingArith::new(&f4, &mut p).unwrap();
        let pres = AbelianPresentation {
            generators: vec![lit(&f4, "[1,0]"), lit(&f4, "[0,1]")],
            orders: vec![2, 2],
            relations: Sublattice::trivial(&[big(2), big(2)]),
        };
        let b = invariant_factor_basis(&a, &pres).unwrap();
        assert_eq!(b.h, pres.generators);
        assert_eq!(decompose_element(&a, lit(&f4, "[1,1]"), &b, &mut p).unwrap(), vec![1, 1]);
    }

    fn check_ring(spec: &str, mut p: Provider) {
        let r = make_ring(&spec.parse().unwrap(), 3).unwrap();
        let a = RingArith::new(&r, &mut p).unwrap();
        let gens = r.generators().to_vec();
        let b = decompose_group(&a, &gens, &mut p).unwrap();
        let all = brute_force_span(&r, &gens).unwrap();
        assert_eq!(b.order() as usize, all.len(), "{spec}");
        for w in b.s.windows(2) {
            assert_eq!(w[1] % w[0], 0);
        }
        assert!(b.s.iter().all(|&s| s > 1));
        // from_original reproduces the input generators
        for (j, g) in gens.iter().enumerate() {
            assert_eq!(a.combination(&b.from_original[j], &b.h).unwrap(), *g);
        }
        // round trip on every element (or a sample)
        let step = (all.len() / 1000).max(1);
        for &x in all.iter().step_by(step) {
            let n = decompose_element(&a, x, &b, &mut p).unwrap();
            assert!(n.iter().zip(&b.s).all(|(c, s)| c < s));
            assert_eq!(a.combination(&n, &b.h).unwrap(), x);
        }
    }

    #[test]
    fn desk_rings_round_trip_exact() {
        for spec in [
            "modular 36",
            "product(modular 2; modular 9)",
            "matrix 2 over modular 2",
            "polyquot 2 [1,1,0,1]",
            "polyquot 3 [0,0,1]",
            "product(modular 4; modular 6; modular 10)",
        ] {
            check_ring(spec, Provider::exact(1));
        }
    }

    #[test]
    fn desk_rings_round_trip_sampled() {
        for spec in ["modular 64", "product(modular 2; modular 9)", "matrix 2 over modular 2", "polyquot 2 [1,1,0,1]"] {
            check_ring(spec, Provider::sampled(2, 1e-6).unwrap());
        }
    }

    #[test]
    fn coset_labels_partition_by_lagrange() {
        let (r, mut p) = setup("modular 12");
        let a = RingArith::new(&r, &mut p).unwrap();
        let basis = decompose_group(&a, &[lit(&r, "1")], &mut p).unwrap();
        let all = brute_force_enumerate(&r).unwrap();
        assert_eq!(all.len(), 12);
        for (gen, classes) in [("3", 3usize), ("0", 12), ("2", 2), ("1", 1)] {
            let sub = coordinate_lattice(&a, &basis, &[lit(&r, gen)], &mut p).unwrap();
            let mut sizes: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
            for &x in &all {
                *sizes.entry(coset_canonical_form(&a, x, &basis, &sub, &mut p).unwrap()).or_default() += 1;
            }
            assert_eq!(sizes.len(), classes);
            assert!(sizes.values().all(|&n| n == 12 / classes));
            let members: HashSet<_> = brute_force_span(&r, &[lit(&r, gen)]).unwrap().into_iter().collect();
            let zero_label = coset_canonical_form(&a, a.zero(), &basis, &sub, &mut p).unwrap();
            for &x in &all {
                let same = coset_canonical_form(&a, x, &basis, &sub, &mut p).unwrap() == zero_label;
                assert_eq!(same, members.contains(&x));
            }
        }
    }
}
