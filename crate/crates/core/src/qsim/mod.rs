//! Simulated quantum subroutines.
//!
//! Every primitive has two backends. [`Backend::Exact`] reads the answer
//! off the construction. [`Backend::Sampled`] draws measurement outcomes
//! (swap-test shots, characters, period-finding registers) from the
//! distribution the circuit would produce; the construction is consulted
//! only to know that distribution. Callers receive decisions, characters and
//! periods, and do their own classical post-processing.
//!
//! Coherent oracle use cannot be counted by running circuits, so each
//! primitive charges a modeled number of queries to the ring's ledger.

mod hsp;
mod order;
mod swap;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blackbox::{ElementCode, RingOracle};
use crate::error::{Error, Result};

pub use hsp::{
    hidden_subgroup, sample_hidden_subgroup_characters, solve_ahsp, CharacterSample, HidingFunction, Linearization,
};
pub use order::{find_additive_order, find_multiplicative_order_in_quotient, sample_uniform};
pub use swap::{coset_overlap, is_equal_decision, is_member_decision, is_subset_decision, overlap_is_one};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Exact,
    Sampled,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Exact => "exact",
            Backend::Sampled => "sampled",
        })
    }
}

impl FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Backend::Exact),
            "sampled" => Ok(Backend::Sampled),
            other => Err(Error::Parse(format!("unknown backend '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProviderConfig {
    pub backend: Backend,
    /// Swap-test shots per decision.
    pub swap_samples: usize,
    /// Characters per hidden-subgroup solve; `None` means rank + 32.
    pub character_batch: Option<usize>,
    /// Failure budget per decision.
    pub epsilon: f64,
    pub seed: u64,
    /// Evaluation spot checks per hidden-subgroup solve.
    pub spot_checks: usize,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        ProviderConfig {
            backend: Backend::Exact,
            swap_samples: 48,
            character_batch: None,
            epsilon: 1e-6,
            seed: 0,
            spot_checks: 2,
        }
    }
}

impl ProviderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.swap_samples == 0 {
            return Err(Error::InvalidSpec { field: "swap_samples", reason: "must be at least 1".into() });
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidSpec { field: "epsilon", reason: format!("{} is not in (0, 1)", self.epsilon) });
        }
        if self.character_batch == Some(0) {
            return Err(Error::InvalidSpec { field: "character_batch", reason: "must be at least 1".into() });
        }
        Ok(())
    }
}

/// Counters of primitive invocations, independent of the query ledger.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProviderStats {
    pub decisions: u64,
    pub swap_shots: u64,
    pub character_samples: u64,
    pub hidden_subgroup_solves: u64,
    pub period_runs: u64,
    pub spot_checks: u64,
}

/// Backend choice, budgets and a seeded random stream.
#[derive(Debug, Clone)]
pub struct Provider {
    config: ProviderConfig,
    rng: ChaCha8Rng,
    stats: ProviderStats,
    low_confidence: bool,
}

impl Provider {
    pub fn new(config: ProviderConfig) -> Result<Self> {
        config.validate()?;
        let rng = ChaCha8Rng::seed_from_u64(config.seed);
        Ok(Provider { config, rng, stats: ProviderStats::default(), low_confidence: false })
    }

    pub fn exact(seed: u64) -> Self {
        Provider::new(ProviderConfig { seed, ..ProviderConfig::default() }).expect("default config is valid")
    }

    pub fn sampled(seed: u64, epsilon: f64) -> Result<Self> {
        Provider::new(ProviderConfig { seed, epsilon, backend: Backend::Sampled, ..ProviderConfig::default() })
    }

    pub fn config(&self) -> &ProviderConfig {
        &self.config
    }

    pub fn backend(&self) -> Backend {
        self.config.backend
    }

    pub fn epsilon(&self) -> f64 {
        self.config.epsilon
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A provider with the same configuration and a seed drawn from this
    /// one's stream.
    pub fn fork(&mut self) -> Provider {
        let seed = self.rng.gen();
        Provider::new(ProviderConfig { seed, ..self.config.clone() }).expect("validated config")
    }

    pub fn stats(&self) -> &ProviderStats {
        &self.stats
    }

    pub(crate) fn stats_mut(&mut self) -> &mut ProviderStats {
        &mut self.stats
    }

    pub fn flag_low_confidence(&mut self) {
        self.low_confidence = true;
    }

    pub fn low_confidence(&self) -> bool {
        self.low_confidence
    }

    /// `ceil(log2(1/epsilon)) + 4`.
    pub fn retry_cap(&self) -> usize {
        (1.0 / self.config.epsilon).log2().ceil() as usize + 4
    }

    /// Shots per swap-test decision: the configured count, raised if needed
    /// so that an overlap of at most 1/2 passes with probability below
    /// epsilon.
    pub fn shots_per_decision(&self) -> usize {
        let needed = (self.config.epsilon.ln() / (5.0f64 / 8.0).ln()).ceil() as usize;
        self.config.swap_samples.max(needed)
    }
}

/// Generators of an additive subgroup of a ring, optionally shifted to the
/// coset `offset + <generators>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupDescriptor {
    pub generators: Vec<ElementCode>,
    pub offset: Option<ElementCode>,
}

impl SubgroupDescriptor {
    pub fn span(generators: Vec<ElementCode>) -> Self {
        SubgroupDescriptor { generators, offset: None }
    }

    pub fn coset(offset: ElementCode, generators: Vec<ElementCode>) -> Self {
        SubgroupDescriptor { generators, offset: Some(offset) }
    }

    /// The subgroup generated by both descriptors, offsets included.
    pub fn join(&self, other: &SubgroupDescriptor) -> SubgroupDescriptor {
        let mut gens = self.generators.clone();
        gens.extend(other.generators.iter().copied());
        gens.extend(self.offset);
        gens.extend(other.offset);
        SubgroupDescriptor::span(gens)
    }

    /// Modeled additions to prepare the uniform superposition over this set.
    pub(crate) fn preparation_cost(&self, ring: &RingOracle) -> u64 {
        self.generators.len() as u64 * ring.width() as u64 + self.offset.is_some() as u64
    }
}
