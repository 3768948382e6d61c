//! Randomised comparison of the ring operations against exhaustive
//! enumeration on small rings.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blackbox::{brute_force_closure, make_ring, ElementCode, RingOracle, RingSpec, Side};
use crate::error::Result;
use crate::idealcore::IdealSpec;
use crate::numtheory::is_prime;
use crate::qsim::{Provider, ProviderConfig};
use crate::reference::{self as brute, ElementSet};
use crate::ringops::{Engine, HomomorphismOracle, PrimeTestMethod};

/// Ring descriptions of the standard small test suite.
pub const DESK_SUITE: [&str; 10] = [
    "modular 6",
    "modular 12",
    "modular 36",
    "modular 64",
    "modular 101",
    "product(modular 2; modular 9)",
    "matrix 2 over modular 2",
    "polyquot 2 [1,1,1]",
    "polyquot 2 [1,1,0,1]",
    "polyquot 3 [0,0,1]",
];

pub fn desk_suite() -> Vec<RingSpec> {
    DESK_SUITE.iter().map(|s| s.parse().expect("suite entries parse")).collect()
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub specs_per_ring: usize,
    pub provider: ProviderConfig,
    pub ring_seed: u64,
}

#[derive(Debug, Clone, Default)]
pub struct SweepReport {
    pub rings: usize,
    pub specs: usize,
    pub checks: u64,
    pub mismatches: Vec<String>,
    pub decisions: u64,
    pub prime_checks: u64,
    pub false_primes: u64,
}

impl SweepReport {
    pub fn error_rate(&self) -> f64 {
        if self.checks == 0 {
            0.0
        } else {
            self.mismatches.len() as f64 / self.checks as f64
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.mismatches.push(what());
        }
    }

    fn check_result<T>(&mut self, r: Result<T>, what: &str, pass: impl FnOnce(T) -> bool) {
        match r {
            Ok(v) => {
                let ok = pass(v);
                self.check(ok, || what.to_string());
            }
            Err(e) => self.check(false, || format!("{what}: {e}")),
        }
    }
}

fn span_set(ring: &RingOracle, gens: &[ElementCode]) -> Result<ElementSet> {
    brute::span(ring, gens)
}

/// Ring homomorphisms out of `spec` with a small codomain, as
/// `(codomain, matrix)`.
fn sample_homs(spec: &RingSpec, ring: &RingOracle) -> Vec<(RingSpec, Vec<Vec<u64>>)> {
    let m = ring.ground_truth().moduli();
    let id: Vec<Vec<u64>> = (0..m.len()).map(|i| (0..m.len()).map(|j| (i == j) as u64).collect()).collect();
    let zero = vec![vec![0; m.len()]; m.len()];
    let mut out = vec![(spec.clone(), id), (spec.clone(), zero)];
    if let RingSpec::Modular { n } = *spec {
        for d in 2..n {
            if n % d == 0 {
                out.push((RingSpec::modular(d), vec![vec![1]]));
            }
        }
        for e in 2..n {
            if e * e % n == e {
                out.push((spec.clone(), vec![vec![e]]));
            }
        }
    }
    out
}

/// Runs every operation on `specs_per_ring` random ideals of `spec` and
/// compares with brute force.
pub fn sweep_ring(spec: &RingSpec, cfg: &SweepConfig, report: &mut SweepReport) -> Result<()> {
    let ring = make_ring(spec, cfg.ring_seed)?;
    let mut p = Provider::new(cfg.provider.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.provider.seed ^ cfg.ring_seed.rotate_left(17) ^ ring.ground_truth().order());
    let engine = Engine::new(&ring, &mut p)?;
    let all = brute::elements(&ring)?;
    let whole: ElementSet = all.iter().copied().collect();
    let one = brute::identity(&ring)?;
    let desc = spec.to_string();
    report.rings += 1;

    report.check_result(engine.ring_order(&mut p), &format!("{desc}: ring order"), |n| n as usize == all.len());
    report.check_result(engine.multiplicative_identity(&mut p), &format!("{desc}: identity"), |e| Some(e) == one);
    report.check(engine.additive_identity() == brute::zero(&ring)?, || format!("{desc}: zero"));

    let pick = |rng: &mut ChaCha8Rng| all[rng.gen_range(0..all.len())];
    for k in 0..cfg.specs_per_ring {
        report.specs += 1;
        let side = [Side::Left, Side::Right, Side::TwoSided][rng.gen_range(0..3)];
        let m = rng.gen_range(1..=3);
        let ispec = IdealSpec::new(side, (0..m).map(|_| pick(&mut rng)).collect())?;
        let iel = brute_force_closure(&ring, &ispec.generators, ring.generators(), side)?;
        let iset: ElementSet = iel.iter().copied().collect();
        let tag = |op: &str| format!("{desc} #{k} {op}");

        // J: either the same ideal regenerated, or another random one
        let jspec = if rng.gen_bool(0.3) {
            let mut g = ispec.generators.clone();
            g.reverse();
            g.push(iel[rng.gen_range(0..iel.len())]);
            IdealSpec::new(side, g)?
        } else {
            IdealSpec::new(side, (0..rng.gen_range(1..=2)).map(|_| pick(&mut rng)).collect())?
        };
        let jset = brute::ideal(&ring, &jspec)?;

        let irep = match engine.represent(&ispec, &mut p) {
            Ok(r) => r,
            Err(e) => {
                report.check(false, || format!("{}: {e}", tag("basis")));
                continue;
            }
        };
        report.check(span_set(&ring, &irep.basis.h)? == iset, || tag("basis span"));
        report.check(irep.order() as usize == iset.len(), || tag("ideal order"));

        report.check_result(engine.ideal_equal(&ispec, &jspec, &mut p), &tag("equal"), |v| v == (iset == jset));
        report.check_result(engine.ideal_equal(&ispec, &ispec, &mut p), &tag("equal self"), |v| v);

        let r = if rng.gen_bool(0.5) { iel[rng.gen_range(0..iel.len())] } else { pick(&mut rng) };
        report.check_result(engine.ideal_contains(&ispec, r, &mut p), &tag("contains"), |v| v == iset.contains(&r));

        let u = pick(&mut rng);
        let inv = brute::inverse(&ring, u)?;
        report.check_result(engine.is_unit(u, &mut p), &tag("is_unit"), |v| v == inv.is_some());
        if let Some(inv) = inv {
            report.check_result(engine.inverse(u, &mut p), &tag("inverse"), |v| v == inv);
        }

        report.check_result(engine.additive_inverse(u, &mut p), &tag("additive inverse"), |v| {
            brute::additive_inverse(&ring, u).is_ok_and(|n| n == v)
        });

        match engine.represent(&jspec, &mut p) {
            Ok(jrep) => {
                let inter: ElementSet = iset.intersection(&jset).copied().collect();
                report.check_result(engine.intersection(&irep, &jrep, &mut p), &tag("intersection"), |rep| {
                    span_set(&ring, &rep.basis.h).is_ok_and(|s| s == inter)
                });
                let colon = brute::colon(&ring, &iset, &jset)?;
                report.check_result(engine.colon(&irep, &jrep, &mut p), &tag("colon"), |c| {
                    c.order as usize == colon.len() && span_set(&ring, &c.generators).is_ok_and(|s| s == colon)
                });
            }
            Err(e) => report.check(false, || format!("{}: {e}", tag("basis of J"))),
        }

        let ann = brute::annihilator(&ring, &ispec.generators, side)?;
        report.check_result(engine.annihilator(&ispec.generators, side, &mut p), &tag("annihilator"), |a| {
            a.order as usize == ann.len() && span_set(&ring, &a.generators).is_ok_and(|s| s == ann)
        });

        let a = pick(&mut rng);
        let b = if rng.gen_bool(0.5) { ring.ground_truth().mul(a, pick(&mut rng))? } else { pick(&mut rng) };
        let sols = brute::solutions(&ring, a, b)?;
        report.check_result(engine.solve_linear(a, b, &mut p), &tag("solve"), |x| match x {
            Some(x) => sols.contains(&x),
            None => sols.is_empty(),
        });

        if side == Side::TwoSided && iset != whole {
            let truth = brute::is_prime(&ring, &iset)?;
            report.prime_checks += 1;
            match engine.is_prime_ideal(&irep, PrimeTestMethod::Divisor, &mut p) {
                Ok(v) => {
                    report.false_primes += (v.prime && !truth) as u64;
                    report.check(v.prime == truth, || tag("prime"));
                }
                Err(e) => report.check(false, || format!("{}: {e}", tag("prime"))),
            }
        }
    }

    for (cod_spec, matrix) in sample_homs(spec, &ring) {
        let cod = make_ring(&cod_spec, cfg.ring_seed.wrapping_add(1))?;
        let rho = HomomorphismOracle::new(&ring, &cod, matrix)?;
        let cod_engine = Engine::new(&cod, &mut p)?;
        let ker = brute::kernel(&rho)?;
        let img = brute::image(&rho)?;
        let tag = format!("{desc} -> {}", cod_spec);
        report.check_result(engine.hom_kernel(&rho, &mut p), &format!("{tag} kernel"), |k| {
            k.order as usize == ker.len() && span_set(&ring, &k.generators).is_ok_and(|s| s == ker)
        });
        report.check_result(engine.is_injective(&rho, &mut p), &format!("{tag} injective"), |v| v == (ker.len() == 1));
        report.check_result(engine.is_surjective(&rho, &cod_engine, &mut p), &format!("{tag} surjective"), |v| {
            v == (img.len() as u64 == cod.ground_truth().order())
        });
    }
    report.decisions += p.stats().decisions;
    Ok(())
}

/// Prime verdicts for every proper ideal `(d)`, `d | n`, of `Z_n` with
/// `2 <= n <= max_n`; the quotient is `Z_d`. Returns `(instances, wrong)`.
pub fn modular_prime_sweep(max_n: u64, config: &ProviderConfig, method: PrimeTestMethod, repetitions: usize) -> Result<(u64, u64)> {
    let mut instances = 0;
    let mut wrong = 0;
    let mut p = Provider::new(config.clone())?;
    for n in 2..=max_n {
        let ring = make_ring(&RingSpec::modular(n), n)?;
        let engine = Engine::new(&ring, &mut p)?;
        for d in (2..=n).filter(|d| n % d == 0) {
            let g = ring.ground_truth().parse_literal(&(d % n).to_string())?;
            let rep = engine.represent(&IdealSpec::two_sided(vec![g])?, &mut p)?;
            let truth = is_prime(d);
            for _ in 0..repetitions {
                instances += 1;
                let v = engine.is_prime_ideal(&rep, method, &mut p)?;
                wrong += (v.prime != truth) as u64;
            }
        }
    }
    Ok((instances, wrong))
}
