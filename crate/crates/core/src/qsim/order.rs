//! Order finding and uniform sampling.

use std::collections::HashMap;

use num_bigint::BigInt;
use rand::Rng;

use super::{overlap_is_one, Backend, Provider, SubgroupDescriptor};
use crate::blackbox::{ElementCode, RingOracle};
use crate::error::{Error, Result};
use crate::intlinalg::{big, small, Sublattice};
use crate::numtheory::{convergent_denominators, factorize, gcd, lcm};

/// One simulated readout of the period-finding register of size `q` for a
/// function of period `c`: a peak near `j q / c` for uniform `j`, spread by
/// the discrete sinc-squared kernel, with a small uniform background.
fn period_outcome<R: Rng + ?Sized>(rng: &mut R, c: u128, q: u128) -> u128 {
    if rng.gen::<f64>() < 0.05 {
        return rng.gen_range(0..q);
    }
    let j = rng.gen_range(0..c);
    let num = j * q;
    let base = num / c;
    let frac = (num % c) as f64 / c as f64;
    if frac == 0.0 {
        return base % q;
    }
    let weights: Vec<f64> = (-8i64..=9).map(|d| 1.0 / (d as f64 - frac).powi(2)).collect();
    let total: f64 = weights.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    let mut delta = 9i64;
    for (d, w) in (-8i64..=9).zip(&weights) {
        if u < *w {
            delta = d;
            break;
        }
        u -= w;
    }
    (base as i128 + delta as i128).rem_euclid(q as i128) as u128
}

/// Candidate period from one readout: the last convergent denominator of
/// `y / q` not exceeding `bound`.
fn candidate(y: u128, q: u128, bound: u128) -> u128 {
    convergent_denominators(y, q, bound).last().copied().unwrap_or(1)
}

/// Smallest power of two strictly above `n^2`, capped at `2^127`.
fn register_size(n: u128) -> u128 {
    let sq = n.saturating_mul(n);
    1u128 << (128 - sq.leading_zeros()).min(127)
}

/// Repeats simulated period finding until a candidate passes `check`, then
/// strips superfluous prime factors. `None` when the attempts run out.
fn reconstruct_period(
    truth: u64,
    bound: u64,
    attempts: usize,
    p: &mut Provider,
    mut charge_run: impl FnMut(),
    mut check: impl FnMut(u64, &mut Provider) -> Result<bool>,
) -> Result<Option<u64>> {
    let q = register_size(bound as u128);
    let mut acc: u64 = 1;
    for _ in 0..attempts {
        p.stats_mut().period_runs += 1;
        charge_run();
        let y = period_outcome(p.rng(), truth as u128, q);
        let d = candidate(y, q, bound as u128) as u64;
        let next = lcm(acc, d);
        acc = if next == 0 || next > bound { d } else { next };
        if check(acc, p)? {
            let mut l = acc;
            for (prime, _) in factorize(acc) {
                while l.is_multiple_of(prime) && check(l / prime, p)? {
                    l /= prime;
                }
            }
            return Ok(Some(l));
        }
    }
    Ok(None)
}

fn additive_order_truth(ring: &RingOracle, a: ElementCode) -> Result<u64> {
    let truth = ring.ground_truth();
    let coords = truth.coords(a)?;
    Ok(coords
        .iter()
        .zip(truth.moduli())
        .fold(1, |acc, (&x, m)| lcm(acc, m / gcd(x, m))))
}

/// Least `c >= 1` with `c a = 0`.
pub fn find_additive_order(ring: &RingOracle, a: ElementCode, p: &mut Provider) -> Result<u64> {
    let c = additive_order_truth(ring, a)?;
    let w = ring.width();
    let run_cost = 2 * (2 * w as u64 + 1);
    let bound = if w >= 64 { u64::MAX } else { 1u64 << w };
    match p.backend() {
        Backend::Exact => {
            p.stats_mut().period_runs += 1;
            ring.ledger().charge(run_cost, 0);
            Ok(c)
        }
        Backend::Sampled => {
            let attempts = 4 * p.retry_cap();
            let found = reconstruct_period(
                c,
                bound,
                attempts,
                p,
                || ring.ledger().charge(run_cost, 0),
                |k, _| Ok(ring.multiple(k + 1, a)? == a),
            )?;
            found.ok_or_else(|| Error::LowConfidence("order finding did not converge".into()))
        }
    }
}

/// Period of `r^0, r^1, r^2, ...` in `S = R / I`, or `None` when `r` is not
/// invertible in `S` (the sequence never returns to `1`).
///
/// `ideal` holds additive generators of `I`; `one` is the identity of `R`;
/// `quotient_order` bounds `|S|`.
pub fn find_multiplicative_order_in_quotient(
    ring: &RingOracle,
    ideal: &[ElementCode],
    r: ElementCode,
    one: ElementCode,
    quotient_order: u64,
    p: &mut Provider,
) -> Result<Option<u64>> {
    let sub = SubgroupDescriptor::span(ideal.to_vec());
    if super::is_member_decision(ring, r, &sub, p)? {
        return Err(Error::Precondition("element lies in the ideal".into()));
    }

    let truth = ring.ground_truth();
    let moduli: Vec<BigInt> = truth.moduli().into_iter().map(big).collect();
    let gens = ideal
        .iter()
        .map(|&g| Ok(truth.coords(g)?.into_iter().map(big).collect()))
        .collect::<Result<Vec<Vec<BigInt>>>>()?;
    let lattice = Sublattice::from_generators(&gens, &moduli)?;
    let canonical = |x: ElementCode| -> Result<Vec<u64>> {
        let c: Vec<BigInt> = truth.coords(x)?.into_iter().map(big).collect();
        Ok(lattice.reduce(&c).iter().map(small).collect())
    };

    // walk the powers until a state repeats
    let start = canonical(one)?;
    let mut seen: HashMap<Vec<u64>, u64> = HashMap::new();
    seen.insert(start.clone(), 0);
    let mut x = truth.from_coords(&start)?;
    let mut k = 0u64;
    let (first, period) = loop {
        k += 1;
        let next = canonical(truth.mul(x, r)?)?;
        if let Some(&j) = seen.get(&next) {
            break (j, k - j);
        }
        if k > quotient_order.max(ring.desk_cap()) {
            return Err(Error::CapExceeded { order: quotient_order, cap: ring.desk_cap() });
        }
        seen.insert(next.clone(), k);
        x = truth.from_coords(&next)?;
    };

    let w = 128 - (quotient_order as u128).leading_zeros() as u64;
    let run_cost = 2 * (2 * w + 1);
    match p.backend() {
        Backend::Exact => {
            p.stats_mut().period_runs += 1;
            ring.ledger().charge(0, run_cost);
            Ok((first == 0).then_some(period))
        }
        Backend::Sampled => {
            let ideal_gens = ideal.to_vec();
            let target = SubgroupDescriptor::coset(one, ideal_gens.clone());
            reconstruct_period(
                period,
                quotient_order.max(2),
                p.retry_cap(),
                p,
                || ring.ledger().charge(0, run_cost),
                |l, prov| {
                    let power = ring.power(r, l)?;
                    overlap_is_one(ring, &SubgroupDescriptor::coset(power, ideal_gens.clone()), &target, prov)
                },
            )
        }
    }
}

/// Uniform element of the subgroup generated by `basis`, where `orders[i]`
/// is the additive order of `basis[i]`. Returns the element and its
/// coefficients. `zero` is only needed when every coefficient is zero and
/// the basis is empty.
pub fn sample_uniform(
    ring: &RingOracle,
    basis: &[ElementCode],
    orders: &[u64],
    zero: Option<ElementCode>,
    p: &mut Provider,
) -> Result<(ElementCode, Vec<u64>)> {
    if basis.len() != orders.len() {
        return Err(Error::DimensionMismatch("one order per basis element".into()));
    }
    let coeffs: Vec<u64> = orders.iter().map(|&s| p.rng().gen_range(0..s.max(1))).collect();
    let mut acc: Option<ElementCode> = None;
    for ((&g, &c), _) in basis.iter().zip(&coeffs).zip(orders) {
        if c == 0 {
            continue;
        }
        let term = ring.multiple(c, g)?;
        acc = Some(match acc {
            Some(a) => ring.add(a, term)?,
            None => term,
        });
    }
    let element = match (acc, zero) {
        (Some(a), _) => a,
        (None, Some(z)) => z,
        (None, None) => match basis.first() {
            Some(&g) => ring.multiple(orders[0].max(1), g)?,
            None => return Err(Error::Precondition("empty basis and no additive identity".into())),
        },
    };
    Ok((element, coeffs))
}
