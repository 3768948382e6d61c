use std::collections::HashSet;

use ringideal::blackbox::{make_ring, ElementCode, RingOracle};
use ringideal::idealcore::{membership_witness, Expr, IdealSpec, Provenance};
use ringideal::qsim::{Backend, Provider, ProviderConfig};
use ringideal::reference as brute;
use ringideal::ringops::{Engine, HomomorphismOracle};
use ringideal::{Error, Result};
use serde_json::{json, Value};

use crate::report::{Report, Verification};
use crate::{bench, load_ring_spec, Command, RunConfig, EXIT_LOW_CONFIDENCE, EXIT_OK, EXIT_VERIFY_DIVERGED};

struct Ctx<'a> {
    cfg: &'a RunConfig,
    ring: &'a RingOracle,
}

impl Ctx<'_> {
    fn lit(&self, c: ElementCode) -> Value {
        let s = self.ring.ground_truth().literal(c);
        if self.cfg.debug_codes {
            Value::String(format!("{s} <{:#x}>", c.bits()))
        } else {
            Value::String(s)
        }
    }

    fn lits(&self, cs: &[ElementCode]) -> Value {
        Value::Array(cs.iter().map(|&c| self.lit(c)).collect())
    }

    fn element(&self, text: &Option<String>, flag: &str) -> Result<ElementCode> {
        let t = text.as_deref().ok_or_else(|| Error::Parse(format!("{flag} is required")))?;
        self.ring.ground_truth().parse_literal(t)
    }

    fn list(&self, text: &Option<String>, flag: &str) -> Result<Vec<ElementCode>> {
        let t = text.as_deref().ok_or_else(|| Error::Parse(format!("{flag} is required")))?;
        let v = self.ring.ground_truth().parse_literal_list(t)?;
        if v.is_empty() {
            return Err(Error::Parse(format!("{flag} lists no elements")));
        }
        Ok(v)
    }

    fn ideal(&self, text: &Option<String>, flag: &str) -> Result<IdealSpec> {
        IdealSpec::new(self.cfg.side, self.list(text, flag)?)
    }

    fn set(&self, gens: &[ElementCode]) -> Result<HashSet<ElementCode>> {
        brute::span(self.ring, gens)
    }
}

fn parse_matrix(text: &str) -> Result<Vec<Vec<u64>>> {
    text.split(';')
        .map(|row| {
            row.split(',')
                .map(|x| x.trim().parse().map_err(|_| Error::Parse(format!("bad matrix entry `{x}`"))))
                .collect()
        })
        .collect()
}

/// Evaluates an expression through the unmetered channel.
fn eval_truth(ring: &RingOracle, e: &Expr, gens: &[ElementCode]) -> Result<ElementCode> {
    let t = ring.ground_truth();
    let rg = ring.generators();
    Ok(match &**e {
        Provenance::Gen(k) => gens[*k],
        Provenance::Scale(c, x) => {
            let x = eval_truth(ring, x, gens)?;
            let mut acc = brute::zero(ring)?;
            for _ in 0..*c {
                acc = t.add(acc, x)?;
            }
            acc
        }
        Provenance::Sum(xs) => {
            let mut acc = brute::zero(ring)?;
            for x in xs {
                acc = t.add(acc, eval_truth(ring, x, gens)?)?;
            }
            acc
        }
        Provenance::LeftMul(r, x) => t.mul(rg[*r], eval_truth(ring, x, gens)?)?,
        Provenance::RightMul(r, x) => t.mul(eval_truth(ring, x, gens)?, rg[*r])?,
    })
}

/// Records a mismatch between the algorithm and brute force.
fn expect<T: std::fmt::Debug + PartialEq>(diff: &mut Vec<String>, what: &str, got: T, want: T) {
    if got != want {
        diff.push(format!("{what}: algorithm gave {got:?}, brute force gave {want:?}"));
    }
}

pub(crate) fn execute(cfg: &RunConfig, report: &mut Report) -> Result<i32> {
    if cfg.command == Command::BenchQueries {
        return bench::run(cfg, report);
    }
    let source = cfg.ring.as_deref().ok_or_else(|| Error::Parse("--ring is required".into()))?;
    let spec = load_ring_spec(source)?;
    report.ring = Some(spec.to_string());
    let ring = make_ring(&spec, cfg.seed)?;
    if cfg.verify && ring.ground_truth().order() > ring.desk_cap() {
        return Err(Error::Precondition(format!(
            "--verify needs a ring of order at most {}, this one has {}",
            ring.desk_cap(),
            ring.ground_truth().order()
        )));
    }
    let mut p = Provider::new(ProviderConfig {
        backend: cfg.backend,
        seed: cfg.seed,
        epsilon: cfg.epsilon,
        ..ProviderConfig::default()
    })?;
    let ctx = Ctx { cfg, ring: &ring };
    let engine = Engine::new(&ring, &mut p)?;
    let mut diff: Vec<String> = Vec::new();
    let mut confidence_cap = 1.0f64;
    let mut hom_evaluations = None;
    let v = cfg.verify;

    let result = match cfg.command {
        Command::Basis | Command::Order => {
            let spec = ctx.ideal(&cfg.ideal, "--ideal")?;
            let rep = engine.represent(&spec, &mut p)?;
            if v {
                let truth = brute::ideal(&ring, &spec)?;
                expect(&mut diff, "order", rep.order() as usize, truth.len());
                expect(&mut diff, "span of basis", ctx.set(&rep.basis.h)? == truth, true);
            }
            if cfg.command == Command::Order {
                json!({ "order": rep.order() })
            } else {
                let provenance: Vec<Value> = rep
                    .provenance_table()
                    .into_iter()
                    .map(|(name, expr)| json!({ "name": name, "expr": expr }))
                    .collect();
                json!({
                    "order": rep.order(),
                    "orders": rep.basis.s,
                    "rank": rep.rank(),
                    "basis": ctx.lits(&rep.basis.h),
                    "tensor": rep.tensor,
                    "rounds": rep.accumulation.rounds,
                    "additive_generators": ctx.lits(&rep.accumulation.elements()),
                    "provenance": provenance,
                })
            }
        }
        Command::RingOrder => {
            let n = engine.ring_order(&mut p)?;
            if v {
                expect(&mut diff, "ring order", n as usize, brute::elements(&ring)?.len());
            }
            json!({ "order": n })
        }
        Command::Equal => {
            let i = ctx.ideal(&cfg.ideal, "--ideal")?;
            let j = ctx.ideal(&cfg.ideal2, "--ideal2")?;
            let eq = engine.ideal_equal(&i, &j, &mut p)?;
            if v {
                expect(&mut diff, "equal", eq, brute::ideal(&ring, &i)? == brute::ideal(&ring, &j)?);
            }
            json!({ "equal": eq })
        }
        Command::Member => {
            let i = ctx.ideal(&cfg.ideal, "--ideal")?;
            let r = ctx.element(&cfg.element, "--element")?;
            let m = engine.ideal_contains(&i, r, &mut p)?;
            if v {
                expect(&mut diff, "member", m, brute::ideal(&ring, &i)?.contains(&r));
            }
            json!({ "member": m, "element": ctx.lit(r) })
        }
        Command::Witness => {
            let i = ctx.ideal(&cfg.ideal, "--ideal")?;
            let r = ctx.element(&cfg.element, "--element")?;
            let rep = engine.represent(&i, &mut p)?;
            let w = membership_witness(engine.arith(), r, &rep, &mut p)?;
            if v {
                expect(&mut diff, "witness value", ctx.lit(eval_truth(&ring, &w, &i.generators)?), ctx.lit(r));
            }
            let definitions: Vec<Value> = rep
                .provenance_table()
                .into_iter()
                .map(|(name, expr)| json!({ "name": name, "expr": expr }))
                .collect();
            json!({
                "element": ctx.lit(r),
                "expression": rep.describe_expression(&w),
                "definitions": definitions,
            })
        }
        Command::Intersect => {
            let i = engine.represent(&ctx.ideal(&cfg.ideal, "--ideal")?, &mut p)?;
            let j = engine.represent(&ctx.ideal(&cfg.ideal2, "--ideal2")?, &mut p)?;
            let k = engine.intersection(&i, &j, &mut p)?;
            if v {
                let a = ctx.set(&i.basis.h)?;
                let b = ctx.set(&j.basis.h)?;
                let want: HashSet<_> = a.intersection(&b).copied().collect();
                expect(&mut diff, "intersection", ctx.set(&k.basis.h)? == want, true);
            }
            json!({ "order": k.order(), "orders": k.basis.s, "basis": ctx.lits(&k.basis.h) })
        }
        Command::Colon => {
            let i = engine.represent(&ctx.ideal(&cfg.ideal, "--ideal")?, &mut p)?;
            let j = engine.represent(&ctx.ideal(&cfg.ideal2, "--ideal2")?, &mut p)?;
            let c = engine.colon(&i, &j, &mut p)?;
            if v {
                let want = brute::colon(&ring, &ctx.set(&i.basis.h)?, &ctx.set(&j.basis.h)?)?;
                expect(&mut diff, "colon", ctx.set(&c.generators)? == want, true);
            }
            json!({ "order": c.order, "generators": ctx.lits(&c.generators) })
        }
        Command::Annihilate => {
            let s = ctx.list(&cfg.ideal, "--ideal")?;
            let a = engine.annihilator(&s, cfg.side, &mut p)?;
            if v {
                let want = brute::annihilator(&ring, &s, cfg.side)?;
                expect(&mut diff, "annihilator", ctx.set(&a.generators)? == want, true);
            }
            json!({ "order": a.order, "generators": ctx.lits(&a.generators) })
        }
        Command::Unit => {
            let r = ctx.element(&cfg.element, "--element")?;
            let u = engine.is_unit(r, &mut p)?;
            if v {
                expect(&mut diff, "unit", u, brute::inverse(&ring, r)?.is_some());
            }
            json!({ "unit": u, "element": ctx.lit(r) })
        }
        Command::Inverse => {
            let r = ctx.element(&cfg.element, "--element")?;
            let inv = engine.inverse(r, &mut p)?;
            if v {
                expect(&mut diff, "inverse", Some(ctx.lit(inv)), brute::inverse(&ring, r)?.map(|x| ctx.lit(x)));
            }
            json!({ "inverse": ctx.lit(inv), "element": ctx.lit(r) })
        }
        Command::One => {
            let e = engine.multiplicative_identity(&mut p)?;
            if v {
                expect(&mut diff, "one", Some(ctx.lit(e)), brute::identity(&ring)?.map(|x| ctx.lit(x)));
            }
            json!({ "one": ctx.lit(e) })
        }
        Command::Zero => {
            let z = engine.additive_identity();
            if v {
                expect(&mut diff, "zero", ctx.lit(z), ctx.lit(brute::zero(&ring)?));
            }
            json!({ "zero": ctx.lit(z) })
        }
        Command::Neg => {
            let r = ctx.element(&cfg.element, "--element")?;
            let n = engine.additive_inverse(r, &mut p)?;
            if v {
                expect(&mut diff, "negative", ctx.lit(n), ctx.lit(brute::additive_inverse(&ring, r)?));
            }
            json!({ "negative": ctx.lit(n), "element": ctx.lit(r) })
        }
        Command::Solve => {
            let a = ctx.element(&cfg.element, "--element")?;
            let b = ctx.element(&cfg.element2, "--element2")?;
            let x = engine.solve_linear(a, b, &mut p)?;
            if v {
                let sols = brute::solutions(&ring, a, b)?;
                match x {
                    Some(x) => expect(&mut diff, "solution satisfies a x = b", sols.contains(&x), true),
                    None => expect(&mut diff, "solvable", false, !sols.is_empty()),
                }
            }
            match x {
                Some(x) => json!({ "solvable": true, "solution": ctx.lit(x) }),
                None => json!({ "solvable": false, "solution": Value::Null, "message": "no solution" }),
            }
        }
        Command::Prime => {
            let spec = ctx.ideal(&cfg.ideal, "--ideal")?;
            let rep = engine.represent(&spec, &mut p)?;
            let verdict = engine.is_prime_ideal(&rep, cfg.prime_method, &mut p)?;
            if v {
                expect(&mut diff, "prime", verdict.prime, brute::is_prime(&ring, &brute::ideal(&ring, &spec)?)?);
            }
            confidence_cap = verdict.confidence;
            json!({
                "verdict": if verdict.prime { "prime" } else { "not-prime" },
                "prime": verdict.prime,
                "quotient_order": verdict.quotient_order,
                "trials_used": verdict.trials_used,
                "trial_budget": verdict.trial_budget,
                "witness": verdict.witness.map(|w| ctx.lit(w)),
            })
        }
        Command::HomKernel | Command::HomInjective | Command::HomSurjective => {
            let cod_src = cfg.codomain.as_deref().ok_or_else(|| Error::Parse("--codomain is required".into()))?;
            let cod = make_ring(&load_ring_spec(cod_src)?, cfg.seed.wrapping_add(1))?;
            let matrix = parse_matrix(cfg.hom.as_deref().ok_or_else(|| Error::Parse("--hom is required".into()))?)?;
            let rho = HomomorphismOracle::new(&ring, &cod, matrix)?;
            match cfg.command {
                Command::HomKernel => {
                    let k = engine.hom_kernel(&rho, &mut p)?;
                    hom_evaluations = Some(rho.evaluations());
                    if v {
                        expect(&mut diff, "kernel", ctx.set(&k.generators)? == brute::kernel(&rho)?, true);
                    }
                    json!({ "order": k.order, "generators": ctx.lits(&k.generators) })
                }
                Command::HomInjective => {
                    let inj = engine.is_injective(&rho, &mut p)?;
                    hom_evaluations = Some(rho.evaluations());
                    if v {
                        expect(&mut diff, "injective", inj, brute::kernel(&rho)?.len() == 1);
                    }
                    json!({ "injective": inj })
                }
                _ => {
                    let cod_engine = Engine::new(&cod, &mut p)?;
                    let image = engine.image_order(&rho, &cod_engine, &mut p)?;
                    let target = cod_engine.ring_order(&mut p)?;
                    hom_evaluations = Some(rho.evaluations());
                    report.queries.record(cod.ledger().counts(), &Default::default());
                    if v {
                        expect(&mut diff, "image order", image as usize, brute::image(&rho)?.len());
                    }
                    json!({ "surjective": image == target, "image_order": image, "codomain_order": target })
                }
            }
        }
        Command::BenchQueries => unreachable!(),
    };

    report.result = result;
    report.queries.record(ring.ledger().counts(), p.stats());
    report.queries.hom_evaluations = hom_evaluations;
    let union = match cfg.backend {
        Backend::Exact => 1.0,
        Backend::Sampled => (1.0 - cfg.epsilon * p.stats().decisions as f64).max(0.0),
    };
    report.confidence = Some(union.min(confidence_cap));
    if v {
        report.verify = Some(Verification {
            agree: diff.is_empty(),
            brute_force_queries: ring.verification_ledger().counts().total(),
            diff: diff.clone(),
        });
    }
    Ok(if !diff.is_empty() {
        EXIT_VERIFY_DIVERGED
    } else if p.low_confidence() && cfg.backend == Backend::Sampled {
        EXIT_LOW_CONFIDENCE
    } else {
        EXIT_OK
    })
}
