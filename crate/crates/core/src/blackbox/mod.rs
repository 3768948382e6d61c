//! Black-box rings.
//!
//! A concrete ring is hidden behind an injective, seed-keyed encoding of its
//! elements as fixed-width bit strings. Algorithm code sees only
//! [`ElementCode`]s and the two metered oracles [`RingOracle::add`] and
//! [`RingOracle::mul`]; it may compare codes for equality and nothing else.
//!
//! [`RingOracle::ground_truth`] opens a separate, unmetered channel onto the
//! construction. It exists for brute-force verification and for the
//! simulation layer in `qsim`, which must know the true state of a
//! ring to produce measurement statistics.

mod encoding;
mod structure;

use std::collections::HashMap;
#[cfg(test)]
use std::collections::HashSet;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

pub use structure::{RingSpec, Value, MAX_ORDER};
pub(crate) use structure::split_top_level;

use crate::error::{Error, Result};
use encoding::KeyedPermutation;
use structure::Structure;

/// Default ring order up to which brute-force enumeration is permitted.
pub const DEFAULT_DESK_CAP: u64 = 1 << 20;

/// Opaque name of one ring element.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ElementCode(u64);

impl ElementCode {
    /// Raw bit content. Only for debug output; algorithms must not inspect it.
    pub fn bits(self) -> u64 {
        self.0
    }
}

impl fmt::Debug for ElementCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{:x}", self.0)
    }
}

#[derive(Debug, Default)]
pub struct QueryLedger {
    add: AtomicU64,
    mul: AtomicU64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QueryCounts {
    pub add: u64,
    pub mul: u64,
}

impl QueryCounts {
    pub fn total(&self) -> u64 {
        self.add + self.mul
    }
}

impl std::ops::Sub for QueryCounts {
    type Output = QueryCounts;
    fn sub(self, rhs: Self) -> Self {
        QueryCounts { add: self.add - rhs.add, mul: self.mul - rhs.mul }
    }
}

impl QueryLedger {
    pub fn counts(&self) -> QueryCounts {
        QueryCounts {
            add: self.add.load(Ordering::Relaxed),
            mul: self.mul.load(Ordering::Relaxed),
        }
    }

    pub fn reset(&self) {
        self.add.store(0, Ordering::Relaxed);
        self.mul.store(0, Ordering::Relaxed);
    }

    /// Records `add` addition and `mul` multiplication queries.
    pub fn charge(&self, add: u64, mul: u64) {
        self.add.fetch_add(add, Ordering::Relaxed);
        self.mul.fetch_add(mul, Ordering::Relaxed);
    }
}

/// A finite ring behind addition and multiplication oracles.
#[derive(Debug)]
pub struct RingOracle {
    spec: RingSpec,
    structure: Structure,
    encoding: KeyedPermutation,
    order: u64,
    width: u32,
    generators: Vec<ElementCode>,
    ledger: QueryLedger,
    verification: QueryLedger,
    desk_cap: u64,
}

/// Builds the oracle for `spec`; identical `(spec, seed)` pairs give
/// bit-identical oracles.
pub fn make_ring(spec: &RingSpec, seed: u64) -> Result<RingOracle> {
    spec.validate()?;
    let structure = Structure::compile(spec);
    let order = structure.order();
    let width = (64 - (order - 1).leading_zeros()).max(1) + 2;
    let encoding = KeyedPermutation::new(width, seed);
    let generators = structure
        .generators()
        .into_iter()
        .map(|i| ElementCode(encoding.forward(i)))
        .collect();
    Ok(RingOracle {
        spec: spec.clone(),
        structure,
        encoding,
        order,
        width,
        generators,
        ledger: QueryLedger::default(),
        verification: QueryLedger::default(),
        desk_cap: DEFAULT_DESK_CAP,
    })
}

impl RingOracle {
    fn index(&self, code: ElementCode) -> Result<u64> {
        let idx = self.encoding.inverse(code.0);
        if idx < self.order {
            Ok(idx)
        } else {
            Err(Error::InvalidCode(code.0))
        }
    }

    fn code(&self, index: u64) -> ElementCode {
        ElementCode(self.encoding.forward(index))
    }

    /// Addition oracle `f_+`.
    pub fn add(&self, a: ElementCode, b: ElementCode) -> Result<ElementCode> {
        let (x, y) = (self.index(a)?, self.index(b)?);
        self.ledger.charge(1, 0);
        Ok(self.code(self.structure.add(x, y)))
    }

    /// Multiplication oracle `f_x`.
    pub fn mul(&self, a: ElementCode, b: ElementCode) -> Result<ElementCode> {
        let (x, y) = (self.index(a)?, self.index(b)?);
        self.ledger.charge(0, 1);
        Ok(self.code(self.structure.mul(x, y)))
    }

    /// The ring generators `r_1, ..., r_n`.
    /// `k * a` for `k >= 1` by doubling; at most `2 log2 k` additions.
    pub fn multiple(&self, k: u64, a: ElementCode) -> Result<ElementCode> {
        if k == 0 {
            return Err(Error::Precondition("multiple of zero needs the additive identity".into()));
        }
        let mut acc = a;
        for bit in (0..63 - k.leading_zeros()).rev() {
            acc = self.add(acc, acc)?;
            if (k >> bit) & 1 == 1 {
                acc = self.add(acc, a)?;
            }
        }
        Ok(acc)
    }

    /// `a^k` for `k >= 1` by repeated squaring.
    pub fn power(&self, a: ElementCode, k: u64) -> Result<ElementCode> {
        if k == 0 {
            return Err(Error::Precondition("zeroth power needs the multiplicative identity".into()));
        }
        let mut acc = a;
        for bit in (0..63 - k.leading_zeros()).rev() {
            acc = self.mul(acc, acc)?;
            if (k >> bit) & 1 == 1 {
                acc = self.mul(acc, a)?;
            }
        }
        Ok(acc)
    }

    pub fn generators(&self) -> &[ElementCode] {
        &self.generators
    }

    /// Code width in bits.
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn ledger(&self) -> &QueryLedger {
        &self.ledger
    }

    /// Ledger of the unmetered verification channel.
    pub fn verification_ledger(&self) -> &QueryLedger {
        &self.verification
    }

    pub fn spec(&self) -> &RingSpec {
        &self.spec
    }

    pub fn desk_cap(&self) -> u64 {
        self.desk_cap
    }

    pub fn set_desk_cap(&mut self, cap: u64) {
        self.desk_cap = cap;
    }

    /// Construction-side access; never used by the algorithms proper.
    pub fn ground_truth(&self) -> GroundTruth<'_> {
        GroundTruth { ring: self }
    }
}

/// Unmetered view of the construction behind an oracle.
#[derive(Clone, Copy)]
pub struct GroundTruth<'a> {
    ring: &'a RingOracle,
}

impl<'a> GroundTruth<'a> {
    pub fn order(&self) -> u64 {
        self.ring.order
    }

    pub fn add(&self, a: ElementCode, b: ElementCode) -> Result<ElementCode> {
        let (x, y) = (self.ring.index(a)?, self.ring.index(b)?);
        self.ring.verification.charge(1, 0);
        Ok(self.ring.code(self.ring.structure.add(x, y)))
    }

    pub fn mul(&self, a: ElementCode, b: ElementCode) -> Result<ElementCode> {
        let (x, y) = (self.ring.index(a)?, self.ring.index(b)?);
        self.ring.verification.charge(0, 1);
        Ok(self.ring.code(self.ring.structure.mul(x, y)))
    }

    pub fn zero(&self) -> ElementCode {
        self.ring.code(0)
    }

    pub fn one(&self) -> ElementCode {
        self.ring.code(self.ring.structure.one())
    }

    pub fn is_valid(&self, code: ElementCode) -> bool {
        self.ring.index(code).is_ok()
    }

    /// Moduli `m_1, ..., m_t` with `(R,+) = Z_{m_1} x ... x Z_{m_t}`.
    pub fn moduli(&self) -> Vec<u64> {
        self.ring.structure.moduli()
    }

    /// Additive coordinates of `code` with respect to [`Self::moduli`].
    pub fn coords(&self, code: ElementCode) -> Result<Vec<u64>> {
        Ok(self.ring.structure.coords(self.ring.index(code)?))
    }

    /// Element with the given additive coordinates (reduced mod the moduli).
    pub fn from_coords(&self, coords: &[u64]) -> Result<ElementCode> {
        if coords.len() != self.moduli().len() {
            return Err(Error::DimensionMismatch(format!(
                "{} coordinates for a group of rank {}",
                coords.len(),
                self.moduli().len()
            )));
        }
        Ok(self.ring.code(self.ring.structure.from_coords(coords)))
    }

    pub fn decode(&self, code: ElementCode) -> Result<Value> {
        Ok(self.ring.structure.to_value(self.ring.index(code)?))
    }

    pub fn encode(&self, value: &Value) -> Result<ElementCode> {
        Ok(self.ring.code(self.ring.structure.from_value(value)?))
    }

    /// Parses an element literal in the construction's native syntax.
    pub fn parse_literal(&self, text: &str) -> Result<ElementCode> {
        let v = self.ring.structure.parse_value(text)?;
        self.encode(&v)
    }

    /// Parses a comma-separated list of element literals.
    pub fn parse_literal_list(&self, text: &str) -> Result<Vec<ElementCode>> {
        if text.trim().is_empty() {
            return Ok(Vec::new());
        }
        split_top_level(text, ',')
            .into_iter()
            .map(|t| self.parse_literal(t))
            .collect()
    }

    pub fn literal(&self, code: ElementCode) -> String {
        match self.decode(code) {
            Ok(v) => v.to_string(),
            Err(_) => format!("{code:?}"),
        }
    }

    /// Every element code, listed by canonical index.
    pub fn all_codes(&self) -> Result<Vec<ElementCode>> {
        self.check_cap()?;
        Ok((0..self.ring.order).map(|i| self.ring.code(i)).collect())
    }

    fn check_cap(&self) -> Result<()> {
        if self.ring.order > self.ring.desk_cap {
            return Err(Error::CapExceeded { order: self.ring.order, cap: self.ring.desk_cap });
        }
        Ok(())
    }
}

/// Which side(s) ring elements multiply from when closing a set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
    TwoSided,
}

impl Side {
    pub fn left(self) -> bool {
        matches!(self, Side::Left | Side::TwoSided)
    }

    pub fn right(self) -> bool {
        matches!(self, Side::Right | Side::TwoSided)
    }
}

/// Brute-force enumeration state: an additive subgroup stored as an
/// insertion-ordered set, grown coset by coset.
struct Closure<'a> {
    truth: GroundTruth<'a>,
    elements: Vec<ElementCode>,
    position: HashMap<ElementCode, usize>,
}

impl<'a> Closure<'a> {
    fn new(truth: GroundTruth<'a>) -> Result<Self> {
        // The zero element is found the black-box way: the additive cycle of
        // the first generator returns to itself after passing through zero.
        let g = *truth
            .ring
            .generators
            .first()
            .ok_or_else(|| Error::Precondition("ring has no generators".into()))?;
        let mut x = g;
        loop {
            let next = truth.add(x, g)?;
            if next == g {
                break;
            }
            x = next;
        }
        let mut c = Closure { truth, elements: vec![x], position: HashMap::new() };
        c.position.insert(x, 0);
        Ok(c)
    }

    fn extend(&mut self, y: ElementCode) -> Result<()> {
        if self.position.contains_key(&y) {
            return Ok(());
        }
        let old = self.elements.len();
        let mut t = y;
        loop {
            for i in 0..old {
                let s = self.truth.add(self.elements[i], t)?;
                if !self.position.contains_key(&s) {
                    self.position.insert(s, self.elements.len());
                    self.elements.push(s);
                }
            }
            t = self.truth.add(t, y)?;
            if self.position.get(&t).is_some_and(|&p| p < old) {
                break;
            }
            if self.elements.len() as u64 > self.truth.order() {
                return Err(Error::Precondition("closure exceeded ring order".into()));
            }
        }
        Ok(())
    }

    fn close(&mut self, multipliers: &[ElementCode], side: Side) -> Result<()> {
        let mut i = 0;
        while i < self.elements.len() {
            let x = self.elements[i];
            for &r in multipliers {
                if side.left() {
                    let p = self.truth.mul(r, x)?;
                    self.extend(p)?;
                }
                if side.right() {
                    let p = self.truth.mul(x, r)?;
                    self.extend(p)?;
                }
            }
            i += 1;
        }
        Ok(())
    }
}

/// Additive subgroup generated by `gens` (the zero subgroup when empty).
pub fn brute_force_span(ring: &RingOracle, gens: &[ElementCode]) -> Result<Vec<ElementCode>> {
    let truth = ring.ground_truth();
    truth.check_cap()?;
    let mut c = Closure::new(truth)?;
    for &g in gens {
        c.extend(g)?;
    }
    Ok(c.elements)
}

/// Smallest additive subgroup containing `seeds` and closed under
/// multiplication by `multipliers` on `side`.
pub fn brute_force_closure(
    ring: &RingOracle,
    seeds: &[ElementCode],
    multipliers: &[ElementCode],
    side: Side,
) -> Result<Vec<ElementCode>> {
    let truth = ring.ground_truth();
    truth.check_cap()?;
    let mut c = Closure::new(truth)?;
    for &g in seeds {
        c.extend(g)?;
    }
    c.close(multipliers, side)?;
    Ok(c.elements)
}

/// All elements of the ring, found by closing the generators under
/// addition and multiplication through the verification channel.
pub fn brute_force_enumerate(ring: &RingOracle) -> Result<Vec<ElementCode>> {
    brute_force_closure(ring, ring.generators(), ring.generators(), Side::TwoSided)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z12() -> RingOracle {
        make_ring(&RingSpec::modular(12), 7).unwrap()
    }

    #[test]
    fn z12_addition_and_multiplication() {
        let r = z12();
        let t = r.ground_truth();
        let c = |n: u64| t.encode(&Value::Int(n)).unwrap();
        assert_eq!(r.add(c(3), c(4)).unwrap(), c(7));
        assert_eq!(r.add(c(8), c(8)).unwrap(), c(4));
        assert_eq!(r.mul(c(4), c(5)).unwrap(), c(8));
        assert_eq!(r.ledger().counts(), QueryCounts { add: 2, mul: 1 });
        assert!(r.width() >= 4);
        assert_eq!(t.order(), 12);
    }

    #[test]
    fn multiples_and_powers() {
        let r = z12();
        let t = r.ground_truth();
        let c = |n: u64| t.encode(&Value::Int(n)).unwrap();
        for k in 1..40u64 {
            assert_eq!(r.multiple(k, c(5)).unwrap(), c(5 * k % 12));
            assert_eq!(r.power(c(5), k).unwrap(), c(if k % 2 == 1 { 5 } else { 1 }));
        }
        assert!(r.multiple(0, c(5)).is_err());
        assert_eq!(t.from_coords(&[19]).unwrap(), c(7));
        let m = make_ring(&RingSpec::product(vec![RingSpec::modular(2), RingSpec::modular(9)]), 3).unwrap();
        let mt = m.ground_truth();
        for code in mt.all_codes().unwrap() {
            assert_eq!(mt.from_coords(&mt.coords(code).unwrap()).unwrap(), code);
        }
    }

    #[test]
    fn invalid_codes_are_rejected() {
        let r = z12();
        let t = r.ground_truth();
        let valid: HashSet<u64> = t.all_codes().unwrap().into_iter().map(|c| c.bits()).collect();
        let invalid = (0..1u64 << r.width()).find(|b| !valid.contains(b)).unwrap();
        let one = t.one();
        assert_eq!(r.add(ElementCode(invalid), one), Err(Error::InvalidCode(invalid)));
        assert_eq!(r.mul(one, ElementCode(invalid)), Err(Error::InvalidCode(invalid)));
        assert_eq!(r.ledger().counts().total(), 0);
    }

    #[test]
    fn matrix_ring_examples() {
        let r = make_ring(&RingSpec::matrix(2, RingSpec::modular(2)), 1).unwrap();
        let t = r.ground_truth();
        let e11 = t.parse_literal("[1,0;0,0]").unwrap();
        let e12 = t.parse_literal("[0,1;0,0]").unwrap();
        assert_eq!(r.add(e11, e11).unwrap(), t.zero());
        assert_eq!(r.mul(e11, e12).unwrap(), e12);
        assert_eq!(t.order(), 16);
    }

    #[test]
    fn f4_has_no_zero_divisors() {
        let r = make_ring(&RingSpec::polyquot(2, vec![1, 1, 1]), 3).unwrap();
        let t = r.ground_truth();
        let all = brute_force_enumerate(&r).unwrap();
        assert_eq!(all.len(), 4);
        let zero = t.zero();
        for &a in &all {
            for &b in &all {
                if a != zero && b != zero {
                    assert_ne!(t.mul(a, b).unwrap(), zero);
                }
            }
        }
        let x = t.parse_literal("[0,1]").unwrap();
        assert_eq!(r.mul(x, x).unwrap(), t.parse_literal("[1,1]").unwrap());
    }

    #[test]
    fn enumeration_sizes_and_injectivity() {
        let specs = [
            (RingSpec::modular(12), 12),
            (RingSpec::matrix(2, RingSpec::modular(2)), 16),
            (RingSpec::product(vec![RingSpec::modular(2), RingSpec::modular(9)]), 18),
            (RingSpec::polyquot(3, vec![0, 0, 1]), 9),
            (RingSpec::matrix(2, RingSpec::polyquot(2, vec![1, 1, 1])), 256),
            (RingSpec::matrix(3, RingSpec::modular(2)), 512),
        ];
        for (spec, n) in specs {
            let r = make_ring(&spec, 5).unwrap();
            let all = brute_force_enumerate(&r).unwrap();
            assert_eq!(all.len(), n, "{spec}");
            let distinct: HashSet<_> = all.iter().collect();
            assert_eq!(distinct.len(), n);
            // enumeration goes through the verification channel only
            assert_eq!(r.ledger().counts().total(), 0);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let mut r = make_ring(&RingSpec::modular(1000), 1).unwrap();
        r.set_desk_cap(100);
        assert!(matches!(brute_force_enumerate(&r), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn identical_seeds_give_identical_oracles() {
        let spec = RingSpec::product(vec![RingSpec::modular(4), RingSpec::modular(6)]);
        let a = make_ring(&spec, 99).unwrap();
        let b = make_ring(&spec, 99).unwrap();
        let c = make_ring(&spec, 100).unwrap();
        assert_eq!(a.generators(), b.generators());
        let ga = a.generators().to_vec();
        let gb = b.generators().to_vec();
        let mut xa = ga[0];
        let mut xb = gb[0];
        for i in 0..50 {
            xa = a.mul(a.add(xa, ga[i % ga.len()]).unwrap(), xa).unwrap();
            xb = b.mul(b.add(xb, gb[i % gb.len()]).unwrap(), xb).unwrap();
            assert_eq!(xa, xb);
        }
        assert_ne!(a.generators(), c.generators());
    }
}
