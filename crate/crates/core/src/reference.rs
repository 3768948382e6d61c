//! Exhaustive-enumeration versions of the ring operations, run through the
//! unmetered verification channel. Only usable up to the desk cap.

use std::collections::HashSet;

use crate::blackbox::{brute_force_closure, brute_force_enumerate, brute_force_span, ElementCode, RingOracle, Side};
use crate::error::Result;
use crate::idealcore::IdealSpec;
use crate::ringops::HomomorphismOracle;

pub type ElementSet = HashSet<ElementCode>;

pub fn elements(ring: &RingOracle) -> Result<Vec<ElementCode>> {
    brute_force_enumerate(ring)
}

pub fn ideal(ring: &RingOracle, spec: &IdealSpec) -> Result<ElementSet> {
    Ok(brute_force_closure(ring, &spec.generators, ring.generators(), spec.side)?.into_iter().collect())
}

pub fn span(ring: &RingOracle, gens: &[ElementCode]) -> Result<ElementSet> {
    Ok(brute_force_span(ring, gens)?.into_iter().collect())
}

pub fn zero(ring: &RingOracle) -> Result<ElementCode> {
    Ok(brute_force_span(ring, &[])?[0])
}

/// The element `e` with `e x = x e = x` for every `x`, if any.
pub fn identity(ring: &RingOracle) -> Result<Option<ElementCode>> {
    let all = elements(ring)?;
    let t = ring.ground_truth();
    for &e in &all {
        let mut ok = true;
        for &x in &all {
            if t.mul(e, x)? != x || t.mul(x, e)? != x {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(Some(e));
        }
    }
    Ok(None)
}

/// Two-sided inverse of `r`, if any.
pub fn inverse(ring: &RingOracle, r: ElementCode) -> Result<Option<ElementCode>> {
    let Some(one) = identity(ring)? else { return Ok(None) };
    let t = ring.ground_truth();
    for x in elements(ring)? {
        if t.mul(r, x)? == one && t.mul(x, r)? == one {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

pub fn additive_inverse(ring: &RingOracle, r: ElementCode) -> Result<ElementCode> {
    let z = zero(ring)?;
    let t = ring.ground_truth();
    for x in elements(ring)? {
        if t.add(r, x)? == z {
            return Ok(x);
        }
    }
    unreachable!("every element of a ring has a negative")
}

/// `{x : x j in I for every j in J}`.
pub fn colon(ring: &RingOracle, i: &ElementSet, j: &ElementSet) -> Result<ElementSet> {
    let t = ring.ground_truth();
    let mut out = ElementSet::new();
    'x: for x in elements(ring)? {
        for &y in j {
            if !i.contains(&t.mul(x, y)?) {
                continue 'x;
            }
        }
        out.insert(x);
    }
    Ok(out)
}

pub fn annihilator(ring: &RingOracle, s: &[ElementCode], side: Side) -> Result<ElementSet> {
    let t = ring.ground_truth();
    let z = zero(ring)?;
    let mut out = ElementSet::new();
    'x: for x in elements(ring)? {
        for &y in s {
            if (side.left() && t.mul(x, y)? != z) || (side.right() && t.mul(y, x)? != z) {
                continue 'x;
            }
        }
        out.insert(x);
    }
    Ok(out)
}

/// All `x` with `a x = b`.
pub fn solutions(ring: &RingOracle, a: ElementCode, b: ElementCode) -> Result<ElementSet> {
    let t = ring.ground_truth();
    let mut out = ElementSet::new();
    for x in elements(ring)? {
        if t.mul(a, x)? == b {
            out.insert(x);
        }
    }
    Ok(out)
}

pub fn kernel(rho: &HomomorphismOracle) -> Result<ElementSet> {
    let z = zero(rho.codomain())?;
    let mut out = ElementSet::new();
    for x in elements(rho.domain())? {
        if rho.eval(x)? == z {
            out.insert(x);
        }
    }
    Ok(out)
}

pub fn image(rho: &HomomorphismOracle) -> Result<ElementSet> {
    elements(rho.domain())?.into_iter().map(|x| rho.eval(x)).collect()
}

/// `a b in I` implies `a in I` or `b in I`, for a proper ideal `I`.
pub fn is_prime(ring: &RingOracle, i: &ElementSet) -> Result<bool> {
    let all = elements(ring)?;
    if i.len() == all.len() {
        return Ok(false);
    }
    let t = ring.ground_truth();
    let outside: Vec<ElementCode> = all.into_iter().filter(|x| !i.contains(x)).collect();
    for &a in &outside {
        for &b in &outside {
            if i.contains(&t.mul(a, b)?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blackbox::make_ring;

    #[test]
    fn z12_reference_values() {
        let r = make_ring(&"modular 12".parse().unwrap(), 1).unwrap();
        let l = |s: &str| r.ground_truth().parse_literal(s).unwrap();
        assert_eq!(identity(&r).unwrap(), Some(l("1")));
        assert_eq!(inverse(&r, l("5")).unwrap(), Some(l("5")));
        assert_eq!(inverse(&r, l("4")).unwrap(), None);
        let four = ideal(&r, &IdealSpec::two_sided(vec![l("4")]).unwrap()).unwrap();
        assert_eq!(four.len(), 3);
        assert!(is_prime(&r, &ideal(&r, &IdealSpec::two_sided(vec![l("3")]).unwrap()).unwrap()).unwrap());
        assert!(!is_prime(&r, &four).unwrap());
        assert_eq!(solutions(&r, l("4"), l("8")).unwrap().len(), 4);
        assert_eq!(annihilator(&r, &[l("4")], Side::Left).unwrap().len(), 4);
    }
}
