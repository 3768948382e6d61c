//! Acceptance run: one line per criterion, non-zero exit if any fails.
//!
//! `cargo test -p ringideal-cli --test acceptance`

use std::collections::HashSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ringideal::abelian::{decompose_element, RingArith};
use ringideal::blackbox::{brute_force_closure, brute_force_span, make_ring, ElementCode, RingOracle, Side};
use ringideal::conformance::{desk_suite, modular_prime_sweep, sweep_ring, SweepConfig, SweepReport};
use ringideal::idealcore::{find_basis_representation, BasisRepresentation, IdealSpec};
use ringideal::intlinalg::{smith_normal_form, solve_modular, IntMatrix};
use ringideal::qsim::{Backend, Provider, ProviderConfig};
use ringideal::reference;
use ringideal::ringops::{Engine, PrimeTestMethod};
use ringideal_cli::{bench_queries, run, BenchFamily, Command, OutputMode, RunConfig};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn provider(backend: Backend, seed: u64) -> ProviderConfig {
    ProviderConfig { backend, seed, epsilon: 1e-3, ..ProviderConfig::default() }
}

fn parallel_sweep(backend: Backend, specs: usize, seed: u64) -> SweepReport {
    let rings = desk_suite();
    let parts: Vec<SweepReport> = std::thread::scope(|s| {
        let handles: Vec<_> = rings
            .iter()
            .map(|spec| {
                s.spawn(move || {
                    let cfg = SweepConfig { specs_per_ring: specs, provider: provider(backend, seed), ring_seed: seed + 1 };
                    let mut r = SweepReport::default();
                    sweep_ring(spec, &cfg, &mut r).unwrap();
                    r
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut total = SweepReport::default();
    for p in parts {
        total.rings += p.rings;
        total.specs += p.specs;
        total.checks += p.checks;
        total.mismatches.extend(p.mismatches);
        total.decisions += p.decisions;
        total.prime_checks += p.prime_checks;
        total.false_primes += p.false_primes;
    }
    total
}

fn criterion_1() -> Verdict {
    let t = Instant::now();
    let r = parallel_sweep(Backend::Exact, 100, 1);
    let el = t.elapsed();
    let pass = r.mismatches.is_empty() && r.specs >= 1000 && el < Duration::from_secs(300);
    let mut detail = format!("{} specs, {} checks, {} mismatches, {:.1}s", r.specs, r.checks, r.mismatches.len(), el.as_secs_f64());
    if let Some(m) = r.mismatches.first() {
        detail += &format!("; first: {m}");
    }
    verdict(pass, detail)
}

fn criterion_2() -> Verdict {
    let mut total = SweepReport::default();
    let mut seed = 100;
    while total.decisions < 10_000 {
        let r = parallel_sweep(Backend::Sampled, 20, seed);
        total.specs += r.specs;
        total.checks += r.checks;
        total.decisions += r.decisions;
        total.mismatches.extend(r.mismatches);
        total.prime_checks += r.prime_checks;
        total.false_primes += r.false_primes;
        seed += 1;
    }
    let rate = total.error_rate();
    verdict(
        rate <= 0.005 && total.false_primes == 0,
        format!(
            "{} decisions, {} checks, error rate {:.4}%, {} prime verdicts, {} false primes",
            total.decisions,
            total.checks,
            100.0 * rate,
            total.prime_checks,
            total.false_primes
        ),
    )
}

fn random_specs(ring: &RingOracle, count: usize, rng: &mut ChaCha8Rng) -> Vec<IdealSpec> {
    let all = ring.ground_truth().all_codes().unwrap();
    (0..count)
        .map(|_| {
            let m = rng.gen_range(1..=3);
            let gens = (0..m).map(|_| all[rng.gen_range(0..all.len())]).collect();
            let side = [Side::Left, Side::Right, Side::TwoSided][rng.gen_range(0..3)];
            IdealSpec::new(side, gens).unwrap()
        })
        .collect()
}

/// Representations of random ideals on every desk ring, in both backends.
fn desk_representations<F>(per_ring: usize, mut check: F) -> usize
where
    F: FnMut(&RingOracle, &RingArith, &IdealSpec, &BasisRepresentation),
{
    let mut runs = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for spec in desk_suite() {
        let ring = make_ring(&spec, 5).unwrap();
        for backend in [Backend::Exact, Backend::Sampled] {
            let mut p = Provider::new(provider(backend, 6)).unwrap();
            let a = RingArith::new(&ring, &mut p).unwrap();
            for ideal in random_specs(&ring, per_ring, &mut rng) {
                let rep = find_basis_representation(&a, &ideal, &mut p).unwrap();
                check(&ring, &a, &ideal, &rep);
                runs += 1;
            }
        }
    }
    runs
}

fn criterion_3() -> Verdict {
    let mut failures = Vec::new();
    let runs = desk_representations(30, |ring, a, ideal, rep| {
        let truth = brute_force_closure(ring, &ideal.generators, ring.generators(), ideal.side).unwrap();
        let order = truth.len() as u64;
        let acc = &rep.accumulation;
        if (1u64 << acc.rounds) > order {
            failures.push(format!("{} rounds for an ideal of order {order}", acc.rounds));
        }
        let elems = acc.elements();
        let mut prev = brute_force_span(ring, &elems[..acc.seeds]).unwrap().len();
        for k in acc.seeds + 1..=elems.len() {
            let now = brute_force_span(ring, &elems[..k]).unwrap().len();
            if now < 2 * prev {
                failures.push(format!("augmentation grew {prev} to {now}"));
            }
            prev = now;
        }
        if rep.basis.s.iter().product::<u64>() != order {
            failures.push(format!("orders {:?} against |I| = {order}", rep.basis.s));
        }
        let h = &rep.basis.h;
        let s = &rep.basis.s;
        let t = &rep.tensor;
        let l = h.len();
        for i in 0..l {
            for j in 0..l {
                if a.combination(&t[i][j], h).unwrap() != ring.ground_truth().mul(h[i], h[j]).unwrap() {
                    failures.push(format!("tensor entry ({i},{j}) disagrees with the oracle"));
                }
                for k in 0..l {
                    // (h_i h_j) h_k = h_i (h_j h_k)
                    for m in 0..l {
                        let lhs: u64 = (0..l).map(|q| t[i][j][q] * t[q][k][m]).sum();
                        let rhs: u64 = (0..l).map(|q| t[j][k][q] * t[i][q][m]).sum();
                        if lhs % s[m] != rhs % s[m] {
                            failures.push(format!("associativity at ({i},{j},{k})"));
                        }
                    }
                    // (h_i + h_j) h_k = h_i h_k + h_j h_k
                    let sum = ring.ground_truth().add(h[i], h[j]).unwrap();
                    let coeffs: Vec<u64> = (0..l).map(|m| (t[i][k][m] + t[j][k][m]) % s[m]).collect();
                    if ring.ground_truth().mul(sum, h[k]).unwrap() != a.combination(&coeffs, h).unwrap() {
                        failures.push(format!("distributivity at ({i},{j},{k})"));
                    }
                }
            }
        }
    });
    let detail = format!("{runs} representations, {} violations{}", failures.len(), first(&failures));
    verdict(failures.is_empty(), detail)
}

fn first(v: &[String]) -> String {
    v.first().map(|f| format!("; first: {f}")).unwrap_or_default()
}

fn criterion_4() -> Verdict {
    let mut failures = Vec::new();
    let runs = desk_representations(30, |ring, _, ideal, rep| {
        let truth: HashSet<ElementCode> =
            brute_force_closure(ring, &ideal.generators, ring.generators(), ideal.side).unwrap().into_iter().collect();
        let b = rep.accumulation.elements();
        let span: HashSet<ElementCode> = brute_force_span(ring, &b).unwrap().into_iter().collect();
        if span != truth {
            failures.push(format!("span of B has {} elements, closure has {}", span.len(), truth.len()));
        }
        let t = ring.ground_truth();
        for &r in ring.generators() {
            for &x in &b {
                if ideal.side.left() && !span.contains(&t.mul(r, x).unwrap()) {
                    failures.push("r b outside B".into());
                }
                if ideal.side.right() && !span.contains(&t.mul(x, r).unwrap()) {
                    failures.push("b r outside B".into());
                }
            }
        }
    });
    let detail = format!("{runs} accumulations, {} failures{}", failures.len(), first(&failures));
    verdict(failures.is_empty(), detail)
}

fn criterion_5() -> Verdict {
    let mut failures = Vec::new();
    let mut trips = 0;
    let mut z2z9 = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for spec in desk_suite() {
        let ring = make_ring(&spec, 9).unwrap();
        let all = ring.ground_truth().all_codes().unwrap();
        for backend in [Backend::Exact, Backend::Sampled] {
            let mut p = Provider::new(provider(backend, 10)).unwrap();
            let e = Engine::new(&ring, &mut p).unwrap();
            let basis = e.ring_representation(&mut p).unwrap().basis.clone();
            if basis.s.windows(2).any(|w| w[1] % w[0] != 0) {
                failures.push(format!("{spec}: chain {:?} not divisible", basis.s));
            }
            if spec.to_string() == "product(modular 2; modular 9)" {
                z2z9 = basis.s.clone();
            }
            for _ in 0..1000 {
                let x = all[rng.gen_range(0..all.len())];
                let n = decompose_element(e.arith(), x, &basis, &mut p).unwrap();
                trips += 1;
                let ok = n.iter().zip(&basis.s).all(|(c, s)| c < s) && e.arith().combination(&n, &basis.h).unwrap() == x;
                if !ok {
                    failures.push(format!("{spec}: {} decomposed to {n:?}", ring.ground_truth().literal(x)));
                }
            }
        }
    }
    if z2z9 != [18] {
        failures.push(format!("Z_2 x Z_9 gave {z2z9:?}"));
    }
    let detail = format!("{trips} round trips, Z_2 x Z_9 -> {z2z9:?}, {} failures{}", failures.len(), first(&failures));
    verdict(failures.is_empty(), detail)
}

fn det(m: &IntMatrix) -> BigInt {
    // fraction-free elimination
    let n = m.rows();
    let mut a = m.to_rows();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    if n == 0 {
        BigInt::one()
    } else {
        sign * &a[n - 1][n - 1]
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    let data: Vec<Vec<i64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-bound..=bound)).collect()).collect();
    IntMatrix::from_rows(cols, &data)
}

fn exhaustive_modular(a: &IntMatrix, b: &[BigInt], moduli: &[BigInt], range: u64) -> bool {
    let n = a.cols();
    let total = range.pow(n as u32);
    (0..total).any(|mut idx| {
        let x: Vec<BigInt> = (0..n)
            .map(|_| {
                let v = idx % range;
                idx /= range;
                BigInt::from(v)
            })
            .collect();
        satisfies(a, &x, b, moduli)
    })
}

fn satisfies(a: &IntMatrix, x: &[BigInt], b: &[BigInt], moduli: &[BigInt]) -> bool {
    a.mul_vec(x).iter().zip(b).zip(moduli).all(|((l, r), s)| (l - r).mod_floor(s).is_zero())
}

fn criterion_6() -> Verdict {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..500 {
        let (r, c) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let a = random_matrix(&mut rng, r, c, 30);
        let snf = smith_normal_form(&a);
        let d = snf.diagonal();
        let diagonal = (0..r).all(|i| (0..c).all(|j| i == j || snf.d[(i, j)].is_zero()));
        let chain = d.windows(2).all(|w| if w[0].is_zero() { w[1].is_zero() } else { (&w[1] % &w[0]).is_zero() });
        let unimodular = det(&snf.u).abs().is_one() && det(&snf.v).abs().is_one() && snf.v.mul(&snf.v_inv) == IntMatrix::identity(c);
        if snf.u.mul(&a).mul(&snf.v) != snf.d || !diagonal || !chain || !unimodular || d.iter().any(|x| x.is_negative()) {
            failures.push(format!("SNF of {a:?}"));
        }
    }
    let mut systems = 0;
    while systems < 400 {
        let m = rng.gen_range(1..=3);
        let n = rng.gen_range(1..=3);
        let moduli: Vec<BigInt> = (0..m).map(|_| BigInt::from(rng.gen_range(2u64..=40))).collect();
        let prod: BigInt = moduli.iter().product();
        let range = moduli.iter().fold(BigInt::one(), |l, s| l.lcm(s));
        let range: u64 = range.try_into().unwrap();
        if prod > BigInt::from(100_000u64) || range.checked_pow(n as u32).is_none_or(|t| t > 100_000) {
            continue;
        }
        systems += 1;
        let a = random_matrix(&mut rng, m, n, 50);
        let b: Vec<BigInt> = (0..m).map(|_| BigInt::from(rng.gen_range(0..100))).collect();
        let got = solve_modular(&a, &b, &moduli).unwrap();
        let want = exhaustive_modular(&a, &b, &moduli, range);
        match got {
            Some(x) if !satisfies(&a, &x, &b, &moduli) => failures.push(format!("solve_modular returned a non-solution for {a:?}")),
            Some(_) if !want => failures.push("solution where search finds none".into()),
            None if want => failures.push(format!("missed a solution of {a:?} = {b:?} mod {moduli:?}")),
            _ => {}
        }
    }
    let mut answers = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for spec in desk_suite() {
        let ring = make_ring(&spec, 14).unwrap();
        let all = ring.ground_truth().all_codes().unwrap();
        let mut p = Provider::exact(15);
        let e = Engine::new(&ring, &mut p).unwrap();
        for _ in 0..60 {
            let a = all[rng.gen_range(0..all.len())];
            let b = if rng.gen_bool(0.5) {
                ring.ground_truth().mul(a, all[rng.gen_range(0..all.len())]).unwrap()
            } else {
                all[rng.gen_range(0..all.len())]
            };
            match e.solve_linear(a, b, &mut p).unwrap() {
                Some(x) => {
                    answers += 1;
                    if ring.ground_truth().mul(a, x).unwrap() != b {
                        failures.push(format!("{spec}: a x != b"));
                    }
                }
                None => {
                    if !reference::solutions(&ring, a, b).unwrap().is_empty() {
                        failures.push(format!("{spec}: missed a solution"));
                    }
                }
            }
        }
    }
    let detail = format!(
        "500 SNFs, {systems} modular systems against exhaustive search, {answers} substituted solutions, {} failures{}",
        failures.len(),
        first(&failures)
    );
    verdict(failures.is_empty(), detail)
}

fn criterion_7() -> Verdict {
    let (n_exact, wrong_exact) = modular_prime_sweep(200, &provider(Backend::Exact, 20), PrimeTestMethod::Divisor, 1).unwrap();
    let mut n_sampled = 0;
    let mut wrong_sampled = 0;
    for (seed, method) in [(21, PrimeTestMethod::Divisor), (22, PrimeTestMethod::Period), (23, PrimeTestMethod::Divisor)] {
        let (n, w) = modular_prime_sweep(200, &provider(Backend::Sampled, seed), method, 1).unwrap();
        n_sampled += n;
        wrong_sampled += w;
    }
    let rate = wrong_sampled as f64 / n_sampled as f64;
    verdict(
        wrong_exact == 0 && rate <= 0.005,
        format!(
            "divisor certificate: {wrong_exact}/{n_exact} wrong; sampled repetitions: {wrong_sampled}/{n_sampled} wrong ({:.3}%)",
            100.0 * rate
        ),
    )
}

fn criterion_8() -> Verdict {
    let t = Instant::now();
    let table = bench_queries(BenchFamily::Modular, 4, 14, &ProviderConfig::default()).unwrap();
    let el = t.elapsed();
    let exponent = table.fitted_exponent.unwrap_or(f64::INFINITY);
    let monotone = table.rows.windows(2).all(|w| w[0].total <= w[1].total);
    let ratio = table
        .rows
        .iter()
        .map(|r| r.brute_force.map_or(0.0, |b| b as f64 / 2f64.powi(r.k as i32)))
        .fold(f64::INFINITY, f64::min);
    let pass = exponent <= 3.5 && monotone && ratio >= 1.0 && el < Duration::from_secs(180);
    verdict(
        pass,
        format!(
            "fitted exponent {exponent:.3}, totals {} to {}, brute force >= {ratio:.2} * 2^k, {:.1}s",
            table.rows[0].total,
            table.rows.last().unwrap().total,
            el.as_secs_f64()
        ),
    )
}

fn determinism_configs() -> Vec<RunConfig> {
    let mut out = Vec::new();
    for backend in [Backend::Exact, Backend::Sampled] {
        for command in Command::ALL {
            let mut c = RunConfig::new(command);
            c.backend = backend;
            c.epsilon = 1e-3;
            c.seed = 42;
            c.output = OutputMode::Json;
            c.ring = Some("modular 36".into());
            c.ideal = Some("6".into());
            c.ideal2 = Some("4".into());
            c.element = Some("5".into());
            c.element2 = Some("10".into());
            c.codomain = Some("modular 12".into());
            c.hom = Some("1".into());
            c.count_queries = true;
            c.k_min = 4;
            c.k_max = 8;
            if command == Command::Witness {
                c.element = Some("30".into());
            }
            if backend == Backend::Sampled && command != Command::BenchQueries {
                c.verify = true;
            }
            out.push(c);
        }
    }
    out
}

fn criterion_9() -> Verdict {
    let mut diverged = Vec::new();
    let configs = determinism_configs();
    for c in &configs {
        let a = run(c);
        let b = run(c);
        if a != b {
            diverged.push(format!("{} ({})", c.command, c.backend));
        }
    }
    let bin = env!("CARGO_BIN_EXE_ringideal");
    let args = ["basis", "--ring", "matrix 2 over modular 2", "--ideal", "[1,0;0,0]", "--side", "left", "--backend", "sampled", "--json"];
    let outs: Vec<Vec<u8>> =
        (0..2).map(|_| std::process::Command::new(bin).args(args).env("RINGIDEAL_SEED", "5").output().unwrap().stdout).collect();
    if outs[0] != outs[1] || outs[0].is_empty() {
        diverged.push("separate processes".into());
    }
    verdict(
        diverged.is_empty(),
        format!("{} runs in-process plus 2 processes, {} diverged{}", configs.len() * 2, diverged.len(), first(&diverged)),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("oracle equivalence sweep, exact backend", criterion_1),
        ("sampled backend fidelity", criterion_2),
        ("accumulation and tensor invariants", criterion_3),
        ("accumulated generators close under multiplication", criterion_4),
        ("element decomposition round trips", criterion_5),
        ("normal forms and linear solving", criterion_6),
        ("prime verdicts on Z_n", criterion_7),
        ("query scaling on Z_2^k", criterion_8),
        ("byte-identical reruns", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let v = f();
        println!(
            "criterion {}: {} [{name}] {} ({:.1}s)",
            i + 1,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            t.elapsed().as_secs_f64()
        );
        if !v.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} of 9 criteria failed");
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
