//! Abelian hidden subgroup problem: character sampling and reconstruction.

use num_bigint::BigInt;
use rand::Rng;

use super::{Backend, Provider};
use crate::error::{Error, Result};
use crate::intlinalg::{annihilator_lattice, big, relation_lattice, small, Sublattice};

/// A function on `G = Z_{s_1} x ... x Z_{s_l}` constant on the cosets of a
/// hidden subgroup and distinct across them.
pub trait HidingFunction {
    /// The orders `s_1, ..., s_l`.
    fn orders(&self) -> Vec<u64>;

    /// A linear model `z -> sum_j z_j images[j]` modulo the span of
    /// `relations`, read from the construction. Only the simulator calls
    /// this.
    fn linearize(&self) -> Result<Linearization>;

    /// Whether `z` and `w` carry the same label, decided with oracle queries.
    fn same_label(&self, z: &[u64], w: &[u64], provider: &mut Provider) -> Result<bool>;

    /// Records the modeled cost of `evaluations` coherent evaluations.
    fn charge_coherent(&self, _evaluations: u64) {}
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Linearization {
    pub images: Vec<Vec<BigInt>>,
    pub relations: Vec<Vec<BigInt>>,
}

/// Character `y` of `G`; it acts on `z` by `exp(2 pi i sum_j y_j z_j / s_j)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CharacterSample {
    pub components: Vec<u64>,
}

fn moduli_of(f: &dyn HidingFunction) -> Vec<BigInt> {
    f.orders().into_iter().map(big).collect()
}

/// The hidden subgroup, straight from the construction. Reserved for the
/// simulator and for tests.
pub fn hidden_subgroup(f: &dyn HidingFunction) -> Result<Sublattice> {
    let moduli = moduli_of(f);
    let lin = f.linearize()?;
    if lin.images.len() != moduli.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} images for a group of rank {}",
            lin.images.len(),
            moduli.len()
        )));
    }
    let rel = relation_lattice(&lin.images, &lin.relations);
    Sublattice::from_generators(&rel, &moduli)
}

/// Characters trivial on the hidden subgroup. The sampled backend returns
/// `batch` independent uniform draws from the annihilator; the exact
/// backend returns a generating set of it.
pub fn sample_hidden_subgroup_characters(
    f: &dyn HidingFunction,
    batch: usize,
    p: &mut Provider,
) -> Result<Vec<CharacterSample>> {
    let dual = hidden_subgroup(f)?.dual();
    f.charge_coherent(batch as u64);
    p.stats_mut().character_samples += batch as u64;
    let rows = match p.backend() {
        Backend::Exact => {
            let g = dual.generators();
            if g.is_empty() {
                vec![vec![BigInt::from(0); dual.rank()]]
            } else {
                g
            }
        }
        Backend::Sampled => (0..batch).map(|_| dual.sample(p.rng())).collect(),
    };
    Ok(rows
        .into_iter()
        .map(|y| CharacterSample { components: y.iter().map(small).collect() })
        .collect())
}

/// Reconstructs the hidden subgroup as the common kernel of sampled
/// characters, then spot-checks the function on random cosets.
pub fn solve_ahsp(f: &dyn HidingFunction, p: &mut Provider) -> Result<Sublattice> {
    let orders = f.orders();
    let moduli = moduli_of(f);
    p.stats_mut().hidden_subgroup_solves += 1;
    if orders.is_empty() {
        return Ok(Sublattice::whole(&moduli));
    }
    let batch = p.config().character_batch.unwrap_or(orders.len() + 32);
    let samples = sample_hidden_subgroup_characters(f, batch, p)?;
    let rows: Vec<Vec<BigInt>> =
        samples.iter().map(|y| y.components.iter().map(|&c| big(c)).collect()).collect();
    let h = Sublattice::from_full_rank_basis(annihilator_lattice(&rows, &moduli), &moduli);

    for _ in 0..p.config().spot_checks {
        p.stats_mut().spot_checks += 1;
        let z: Vec<u64> = orders.iter().map(|&s| p.rng().gen_range(0..s)).collect();
        let g = h.sample(p.rng());
        let w: Vec<u64> = z.iter().zip(&g).zip(&orders).map(|((a, b), &s)| (a + small(b)) % s).collect();
        if !f.same_label(&z, &w, p)? {
            return Err(Error::ContractViolation(
                "hiding function is not constant on the recovered cosets".into(),
            ));
        }
    }
    Ok(h)
}
