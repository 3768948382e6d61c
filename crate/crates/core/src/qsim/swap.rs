//! Swap tests on coset states.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

use super::{Backend, Provider, SubgroupDescriptor};
use crate::blackbox::{ElementCode, RingOracle};
use crate::error::{Error, Result};
use crate::intlinalg::{big, Sublattice};

struct CosetLattice {
    lattice: Sublattice,
    offset: Vec<BigInt>,
}

fn coset_lattice(ring: &RingOracle, d: &SubgroupDescriptor) -> Result<CosetLattice> {
    let truth = ring.ground_truth();
    let moduli: Vec<BigInt> = truth.moduli().into_iter().map(big).collect();
    let coords = |c: ElementCode| -> Result<Vec<BigInt>> { Ok(truth.coords(c)?.into_iter().map(big).collect()) };
    let gens = d.generators.iter().map(|&g| coords(g)).collect::<Result<Vec<_>>>()?;
    let offset = match d.offset {
        Some(o) => coords(o)?,
        None => vec![BigInt::zero(); moduli.len()],
    };
    Ok(CosetLattice { lattice: Sublattice::from_generators(&gens, &moduli)?, offset })
}

/// `|A cap B| / max(|A|, |B|)` as a fraction.
fn exact_overlap(ring: &RingOracle, a: &SubgroupDescriptor, b: &SubgroupDescriptor) -> Result<(BigInt, BigInt)> {
    let la = coset_lattice(ring, a)?;
    let lb = coset_lattice(ring, b)?;
    let larger = la.lattice.order().max(lb.lattice.order());
    let diff: Vec<BigInt> = la.offset.iter().zip(&lb.offset).map(|(x, y)| x - y).collect();
    if !la.lattice.sum(&lb.lattice).contains(&diff) {
        return Ok((BigInt::zero(), larger));
    }
    Ok((la.lattice.intersection(&lb.lattice).order(), larger))
}

fn charge_shots(ring: &RingOracle, a: &SubgroupDescriptor, b: &SubgroupDescriptor, shots: u64, p: &mut Provider) {
    ring.ledger().charge(shots * (a.preparation_cost(ring) + b.preparation_cost(ring)), 0);
    p.stats_mut().swap_shots += shots;
}

/// One simulated swap-test shot: `true` for ancilla outcome 0.
fn shot(c2: f64, p: &mut Provider) -> bool {
    p.rng().gen::<f64>() < (1.0 + c2) / 2.0
}

fn ratio(num: &BigInt, den: &BigInt) -> f64 {
    let g = num.gcd(den);
    if g.is_zero() {
        return 0.0;
    }
    (num / &g).to_f64().unwrap_or(0.0) / (den / &g).to_f64().unwrap_or(f64::INFINITY)
}

/// Overlap of the two coset states. The sampled backend returns the
/// estimate `sqrt(max(0, 2 z / t - 1))` from the fraction `z / t` of zero
/// outcomes over `t` shots.
pub fn coset_overlap(
    ring: &RingOracle,
    a: &SubgroupDescriptor,
    b: &SubgroupDescriptor,
    p: &mut Provider,
) -> Result<f64> {
    let (num, den) = exact_overlap(ring, a, b)?;
    let c = ratio(&num, &den);
    let t = p.shots_per_decision();
    charge_shots(ring, a, b, t as u64, p);
    match p.backend() {
        Backend::Exact => Ok(c),
        Backend::Sampled => {
            let zeros = (0..t).filter(|_| shot(c * c, p)).count();
            Ok((2.0 * zeros as f64 / t as f64 - 1.0).max(0.0).sqrt())
        }
    }
}

/// Decides whether the overlap is 1, assuming it is otherwise at most 1/2.
/// Under the sampled backend any ancilla-1 shot rejects.
pub fn overlap_is_one(
    ring: &RingOracle,
    a: &SubgroupDescriptor,
    b: &SubgroupDescriptor,
    p: &mut Provider,
) -> Result<bool> {
    let (num, den) = exact_overlap(ring, a, b)?;
    p.stats_mut().decisions += 1;
    let t = p.shots_per_decision();
    match p.backend() {
        Backend::Exact => {
            charge_shots(ring, a, b, t as u64, p);
            Ok(num == den)
        }
        Backend::Sampled => {
            let c = ratio(&num, &den);
            for i in 0..t {
                if !shot(c * c, p) {
                    charge_shots(ring, a, b, i as u64 + 1, p);
                    return Ok(false);
                }
            }
            charge_shots(ring, a, b, t as u64, p);
            Ok(true)
        }
    }
}

/// `A subset-of B` for a subgroup `B`: the states of `B` and of the join
/// `A + B` coincide exactly when `A` lies in `B`, and otherwise `B` has
/// index at least two in the join.
pub fn is_subset_decision(
    ring: &RingOracle,
    a: &SubgroupDescriptor,
    b: &SubgroupDescriptor,
    p: &mut Provider,
) -> Result<bool> {
    if b.offset.is_some() {
        return Err(Error::Precondition("subset test needs a subgroup on the right".into()));
    }
    overlap_is_one(ring, b, &a.join(b), p)
}

/// `x in B`, by the swap test on `|B>` and `|x + B>`.
pub fn is_member_decision(ring: &RingOracle, x: ElementCode, b: &SubgroupDescriptor, p: &mut Provider) -> Result<bool> {
    if b.offset.is_some() {
        return Err(Error::Precondition("membership test needs a subgroup".into()));
    }
    overlap_is_one(ring, b, &SubgroupDescriptor::coset(x, b.generators.clone()), p)
}

pub fn is_equal_decision(
    ring: &RingOracle,
    a: &SubgroupDescriptor,
    b: &SubgroupDescriptor,
    p: &mut Provider,
) -> Result<bool> {
    overlap_is_one(ring, a, b, p)
}
