//! Derived ideal and ring operations on top of basis representations.

use std::cell::{Cell, OnceCell};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::abelian::{combination_cost, coordinate_lattice, coords_of, decompose_element, ring_relations, InvariantFactorBasis, RingArith};
use crate::blackbox::{ElementCode, RingOracle, Side};
use crate::error::{Error, Result};
use crate::idealcore::{
    accumulate, accumulate_additive_generators, basis_of_accumulation, combine, find_basis_representation,
    representation_from_accumulation, Accumulation, BasisRepresentation, Expr, IdealSpec, Provenance,
};
use crate::intlinalg::{big, small, IntMatrix, Sublattice};
use crate::numtheory::{prime_divisors, totient};
use crate::qsim::{
    find_additive_order, find_multiplicative_order_in_quotient, is_equal_decision, is_member_decision, overlap_is_one,
    sample_uniform, solve_ahsp, HidingFunction, Linearization, Provider, SubgroupDescriptor,
};

/// Trial constant `c0` of the prime test.
pub const PRIME_TRIAL_CONSTANT: f64 = 6.0;

/// Additive subgroup of a ring found as a hidden subgroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdditiveSubgroup {
    pub generators: Vec<ElementCode>,
    pub order: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimeTestMethod {
    /// `r^n = 1` and `r^(n/p) != 1` for the primes `p | n`.
    Divisor,
    /// Simulated period finding.
    Period,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrimalityVerdict {
    pub prime: bool,
    pub quotient_order: u64,
    pub trials_used: usize,
    pub trial_budget: usize,
    /// Lower bound on the probability that the verdict is right.
    pub confidence: f64,
    /// Element whose class has multiplicative order `|S| - 1`.
    pub witness: Option<ElementCode>,
}

/// Part of the label a hiding function attaches to a group element.
#[derive(Debug, Clone, PartialEq, Eq)]
enum LabelPart {
    Code(ElementCode),
    Coset(Vec<BigInt>),
}

type LabelFn<'a> = Box<dyn Fn(ElementCode, &mut Provider) -> Result<Vec<LabelPart>> + 'a>;

/// `z -> label(sum_j z_j domain_j)` on `prod Z_{orders_j}`.
struct LabelHiding<'a> {
    arith: &'a RingArith<'a>,
    domain: Vec<ElementCode>,
    orders: Vec<u64>,
    lin: Linearization,
    label: LabelFn<'a>,
    label_muls: u64,
}

impl HidingFunction for LabelHiding<'_> {
    fn orders(&self) -> Vec<u64> {
        self.orders.clone()
    }

    fn linearize(&self) -> Result<Linearization> {
        Ok(self.lin.clone())
    }

    fn same_label(&self, z: &[u64], w: &[u64], p: &mut Provider) -> Result<bool> {
        let x = self.arith.combination(z, &self.domain)?;
        let y = self.arith.combination(w, &self.domain)?;
        Ok((self.label)(x, p)? == (self.label)(y, p)?)
    }

    fn charge_coherent(&self, evaluations: u64) {
        self.arith.ring().ledger().charge(evaluations * combination_cost(&self.orders), evaluations * self.label_muls);
    }
}

/// Places each block of coordinates side by side.
fn block_relations(blocks: usize, rel: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let w = rel.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    for k in 0..blocks {
        for r in rel {
            let mut row = vec![BigInt::zero(); blocks * w];
            row[k * w..(k + 1) * w].clone_from_slice(r);
            out.push(row);
        }
    }
    out
}

/// A homomorphism `R -> R'` given by an integer matrix on additive
/// coordinates. Evaluations are counted separately from ring queries.
pub struct HomomorphismOracle<'a> {
    domain: &'a RingOracle,
    codomain: &'a RingOracle,
    matrix: Vec<Vec<u64>>,
    evaluations: Cell<u64>,
}

impl<'a> HomomorphismOracle<'a> {
    /// `matrix[i]` is the image of the `i`-th additive coordinate generator.
    pub fn new(domain: &'a RingOracle, codomain: &'a RingOracle, matrix: Vec<Vec<u64>>) -> Result<Self> {
        let dm = domain.ground_truth().moduli();
        let cm = codomain.ground_truth().moduli();
        if matrix.len() != dm.len() || matrix.iter().any(|row| row.len() != cm.len()) {
            return Err(Error::DimensionMismatch(format!("map needs {} rows of {} entries", dm.len(), cm.len())));
        }
        for (row, &m) in matrix.iter().zip(&dm) {
            for (&a, &n) in row.iter().zip(&cm) {
                if !(a as u128 * m as u128).is_multiple_of(n as u128) {
                    return Err(Error::Precondition("map is not well defined on the additive group".into()));
                }
            }
        }
        Ok(HomomorphismOracle { domain, codomain, matrix, evaluations: Cell::new(0) })
    }

    pub fn domain(&self) -> &'a RingOracle {
        self.domain
    }

    pub fn codomain(&self) -> &'a RingOracle {
        self.codomain
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations.get()
    }

    pub fn eval(&self, x: ElementCode) -> Result<ElementCode> {
        self.evaluations.set(self.evaluations.get() + 1);
        self.apply(x)
    }

    fn apply(&self, x: ElementCode) -> Result<ElementCode> {
        let c = self.domain.ground_truth().coords(x)?;
        let cm = self.codomain.ground_truth().moduli();
        let y: Vec<u64> = (0..cm.len())
            .map(|j| {
                let s: u128 = c.iter().zip(&self.matrix).map(|(&x, row)| x as u128 * row[j] as u128).sum();
                (s % cm[j] as u128) as u64
            })
            .collect();
        self.codomain.ground_truth().from_coords(&y)
    }
}

/// Operations on one ring, sharing its basis representation.
pub struct Engine<'r> {
    arith: RingArith<'r>,
    ring_rep: OnceCell<BasisRepresentation>,
    one: Cell<Option<ElementCode>>,
}

impl<'r> Engine<'r> {
    pub fn new(ring: &'r RingOracle, p: &mut Provider) -> Result<Self> {
        Ok(Engine { arith: RingArith::new(ring, p)?, ring_rep: OnceCell::new(), one: Cell::new(None) })
    }

    pub fn ring(&self) -> &'r RingOracle {
        self.arith.ring()
    }

    pub fn arith(&self) -> &RingArith<'r> {
        &self.arith
    }

    /// Basis representation of the ring as an ideal of itself, computed on
    /// first use.
    pub fn ring_representation(&self, p: &mut Provider) -> Result<&BasisRepresentation> {
        if self.ring_rep.get().is_none() {
            let spec = IdealSpec::two_sided(self.ring().generators().to_vec())?;
            let rep = find_basis_representation(&self.arith, &spec, p)?;
            let _ = self.ring_rep.set(rep);
        }
        Ok(self.ring_rep.get().expect("just set"))
    }

    fn ring_basis(&self, p: &mut Provider) -> Result<&InvariantFactorBasis> {
        Ok(&self.ring_representation(p)?.basis)
    }

    pub fn represent(&self, ideal: &IdealSpec, p: &mut Provider) -> Result<BasisRepresentation> {
        find_basis_representation(&self.arith, ideal, p)
    }

    fn accumulate(&self, ideal: &IdealSpec, p: &mut Provider) -> Result<Accumulation> {
        accumulate_additive_generators(&self.arith, ideal, p)
    }

    pub fn ideal_equal(&self, i: &IdealSpec, j: &IdealSpec, p: &mut Provider) -> Result<bool> {
        let a = self.accumulate(i, p)?;
        let b = self.accumulate(j, p)?;
        is_equal_decision(self.ring(), &SubgroupDescriptor::span(a.elements()), &SubgroupDescriptor::span(b.elements()), p)
    }

    pub fn ideal_contains(&self, i: &IdealSpec, r: ElementCode, p: &mut Provider) -> Result<bool> {
        let a = self.accumulate(i, p)?;
        is_member_decision(self.ring(), r, &SubgroupDescriptor::span(a.elements()), p)
    }

    /// `Rr = R`.
    pub fn is_unit(&self, r: ElementCode, p: &mut Provider) -> Result<bool> {
        let rr = self.accumulate(&IdealSpec::new(Side::Left, vec![r])?, p)?;
        is_equal_decision(self.ring(), &SubgroupDescriptor::span(rr.elements()), &self.ring_basis(p)?.descriptor(), p)
    }

    /// `r^(c-1)` for the multiplicative order `c` of `r`.
    pub fn inverse(&self, r: ElementCode, p: &mut Provider) -> Result<ElementCode> {
        if !self.is_unit(r, p)? {
            return Err(Error::NotUnit);
        }
        let one = self.multiplicative_identity(p)?;
        let zero = self.arith.zero();
        let order = self.ring_order(p)?;
        let c = find_multiplicative_order_in_quotient(self.ring(), &[zero], r, one, order, p)?
            .ok_or(Error::NotUnit)?;
        let inv = if c == 1 { one } else { self.ring().power(r, c - 1)? };
        if self.arith.mul(r, inv)? != one {
            return Err(Error::LowConfidence("inverse failed verification".into()));
        }
        Ok(inv)
    }

    pub fn ideal_order(&self, rep: &BasisRepresentation) -> u64 {
        rep.order()
    }

    pub fn ring_order(&self, p: &mut Provider) -> Result<u64> {
        Ok(self.ring_representation(p)?.order())
    }

    /// Coordinates of `x` over the ring basis.
    fn ring_coords(&self, x: ElementCode, p: &mut Provider) -> Result<Vec<BigInt>> {
        Ok(decompose_element(&self.arith, x, self.ring_basis(p)?, p)?.into_iter().map(big).collect())
    }

    /// The lattice of `rep` inside the coordinates of the ring basis.
    fn ideal_lattice(&self, rep: &BasisRepresentation, p: &mut Provider) -> Result<Sublattice> {
        coordinate_lattice(&self.arith, self.ring_basis(p)?, &rep.basis.h, p)
    }

    fn truth_coords(&self, x: ElementCode) -> Result<Vec<BigInt>> {
        coords_of(self.ring(), x)
    }

    fn elements_of(&self, h: &Sublattice, domain: &[ElementCode]) -> Result<Vec<(ElementCode, Vec<u64>)>> {
        h.generators()
            .into_iter()
            .map(|row| {
                let c: Vec<u64> = row.iter().map(small).collect();
                Ok((self.arith.combination(&c, domain)?, c))
            })
            .collect()
    }

    fn subgroup(&self, f: &LabelHiding, p: &mut Provider) -> Result<AdditiveSubgroup> {
        let h = solve_ahsp(f, p)?;
        let generators = self.elements_of(&h, &f.domain)?.into_iter().map(|(e, _)| e).collect();
        Ok(AdditiveSubgroup { generators, order: small(&h.order()) })
    }

    /// `I cap J`, found as the kernel of `I -> R / J` on the basis of `I`.
    pub fn intersection(&self, i: &BasisRepresentation, j: &BasisRepresentation, p: &mut Provider) -> Result<BasisRepresentation> {
        let side = match (i.side.left() && j.side.left(), i.side.right() && j.side.right()) {
            (true, true) => Side::TwoSided,
            (true, false) => Side::Left,
            (false, true) => Side::Right,
            (false, false) => {
                return Err(Error::Precondition("a left and a right ideal do not meet in an ideal".into()))
            }
        };
        let jl = self.ideal_lattice(j, p)?;
        let mut relations = ring_relations(self.ring());
        for &g in &j.basis.h {
            relations.push(self.truth_coords(g)?);
        }
        let lin = Linearization {
            images: i.basis.h.iter().map(|&h| self.truth_coords(h)).collect::<Result<_>>()?,
            relations,
        };
        let f = LabelHiding {
            arith: &self.arith,
            domain: i.basis.h.clone(),
            orders: i.basis.s.clone(),
            lin,
            label: Box::new(|x, p: &mut Provider| Ok(vec![LabelPart::Coset(jl.reduce(&self.ring_coords(x, p)?))])),
            label_muls: 0,
        };
        let h = solve_ahsp(&f, p)?;
        let seeds: Vec<(ElementCode, Expr)> = self
            .elements_of(&h, &i.basis.h)?
            .into_iter()
            .map(|(e, c)| (e, combine(&c, &i.provenance)))
            .collect();
        let acc = accumulate(&self.arith, seeds, self.ring().generators(), side, p)?;
        representation_from_accumulation(&self.arith, side, i.ideal_generators.clone(), acc, p)
    }

    /// `(I : J) = {x : xJ subset I}`, tested against the additive
    /// generators of `J`.
    pub fn colon(&self, i: &BasisRepresentation, j: &BasisRepresentation, p: &mut Provider) -> Result<AdditiveSubgroup> {
        let il = self.ideal_lattice(i, p)?;
        let jgens = j.accumulation.elements();
        let truth = self.ring().ground_truth();
        let mut rel = ring_relations(self.ring());
        for &g in &i.basis.h {
            rel.push(self.truth_coords(g)?);
        }
        let images = self
            .ring_basis(p)?
            .h
            .iter()
            .map(|&h| {
                let mut row = Vec::new();
                for &g in &jgens {
                    row.extend(self.truth_coords(truth.mul(h, g)?)?);
                }
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()?;
        let lin = Linearization { images, relations: block_relations(jgens.len(), &rel) };
        let jg = jgens.clone();
        let f = LabelHiding {
            arith: &self.arith,
            domain: self.ring_basis(p)?.h.clone(),
            orders: self.ring_basis(p)?.s.clone(),
            lin,
            label: Box::new(move |x, p: &mut Provider| {
                jg.iter()
                    .map(|&g| {
                        let y = self.arith.mul(x, g)?;
                        Ok(LabelPart::Coset(il.reduce(&self.ring_coords(y, p)?)))
                    })
                    .collect()
            }),
            label_muls: jgens.len() as u64,
        };
        self.subgroup(&f, p)
    }

    /// `{x : x s = 0 for s in S}` for `Side::Left`, `{x : s x = 0}` for
    /// `Side::Right`, both for `Side::TwoSided`.
    pub fn annihilator(&self, s: &[ElementCode], side: Side, p: &mut Provider) -> Result<AdditiveSubgroup> {
        let truth = self.ring().ground_truth();
        let mut products: Vec<(ElementCode, bool)> = Vec::new();
        for &x in s {
            if side.left() {
                products.push((x, true));
            }
            if side.right() {
                products.push((x, false));
            }
        }
        let images = self
            .ring_basis(p)?
            .h
            .iter()
            .map(|&h| {
                let mut row = Vec::new();
                for &(x, on_right) in &products {
                    let y = if on_right { truth.mul(h, x)? } else { truth.mul(x, h)? };
                    row.extend(self.truth_coords(y)?);
                }
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()?;
        let lin = Linearization { images, relations: block_relations(products.len(), &ring_relations(self.ring())) };
        let n = products.len() as u64;
        let f = LabelHiding {
            arith: &self.arith,
            domain: self.ring_basis(p)?.h.clone(),
            orders: self.ring_basis(p)?.s.clone(),
            lin,
            label: Box::new(move |y, _: &mut Provider| {
                products
                    .iter()
                    .map(|&(x, on_right)| {
                        Ok(LabelPart::Code(if on_right { self.arith.mul(y, x)? } else { self.arith.mul(x, y)? }))
                    })
                    .collect()
            }),
            label_muls: n,
        };
        self.subgroup(&f, p)
    }

    /// Some `x` with `a x = b`, or `None`.
    pub fn solve_linear(&self, a: ElementCode, b: ElementCode, p: &mut Provider) -> Result<Option<ElementCode>> {
        let basis = self.ring_basis(p)?;
        let m = &self.ring_representation(p)?.tensor;
        let l = basis.rank();
        let ac = decompose_element(&self.arith, a, basis, p)?;
        let bc = decompose_element(&self.arith, b, basis, p)?;
        // (a x)_i = sum_j (sum_k a_k M[k][j][i]) x_j
        let rows: Vec<Vec<BigInt>> = (0..l)
            .map(|i| (0..l).map(|j| big((0..l).map(|k| ac[k] as u128 * m[k][j][i] as u128).sum::<u128>() as u64 % basis.s[i])).collect())
            .collect();
        let sol = crate::intlinalg::solve_modular(&IntMatrix::from_rows(l, &rows), &crate::intlinalg::big_vec(&bc), &basis.moduli())?;
        let Some(x) = sol else { return Ok(None) };
        let xc: Vec<u64> = x.iter().zip(&basis.s).map(|(v, &s)| small(&v.mod_floor(&big(s)))).collect();
        let x = self.arith.combination(&xc, &basis.h)?;
        if self.arith.mul(a, x)? != b {
            return Err(Error::LowConfidence("solution failed verification".into()));
        }
        Ok(Some(x))
    }

    pub fn multiplicative_identity(&self, p: &mut Provider) -> Result<ElementCode> {
        if let Some(e) = self.one.get() {
            return Ok(e);
        }
        let e = identity_of(&self.arith, self.ring_representation(p)?)?;
        for &g in self.ring().generators() {
            if self.arith.mul(e, g)? != g || self.arith.mul(g, e)? != g {
                return Err(Error::NoIdentity);
            }
        }
        self.one.set(Some(e));
        Ok(e)
    }

    pub fn additive_identity(&self) -> ElementCode {
        self.arith.zero()
    }

    /// `(c - 1) r` for the additive order `c` of `r`.
    pub fn additive_inverse(&self, r: ElementCode, p: &mut Provider) -> Result<ElementCode> {
        let c = find_additive_order(self.ring(), r, p)?;
        let neg = if c == 1 { r } else { self.ring().multiple(c - 1, r)? };
        if self.arith.add(r, neg)? != self.arith.zero() {
            return Err(Error::LowConfidence("additive inverse failed verification".into()));
        }
        Ok(neg)
    }

    /// Samples pairs and checks that `rho` respects both operations.
    pub fn check_homomorphism(&self, rho: &HomomorphismOracle, p: &mut Provider) -> Result<()> {
        let basis = self.ring_basis(p)?;
        let cod = rho.codomain();
        for _ in 0..p.retry_cap() {
            let (a, _) = sample_uniform(self.ring(), &basis.h, &basis.s, Some(self.arith.zero()), p)?;
            let (b, _) = sample_uniform(self.ring(), &basis.h, &basis.s, Some(self.arith.zero()), p)?;
            let (fa, fb) = (rho.eval(a)?, rho.eval(b)?);
            if rho.eval(self.arith.add(a, b)?)? != cod.add(fa, fb)? || rho.eval(self.arith.mul(a, b)?)? != cod.mul(fa, fb)? {
                return Err(Error::ContractViolation("map does not respect the ring operations".into()));
            }
        }
        Ok(())
    }

    pub fn hom_kernel(&self, rho: &HomomorphismOracle, p: &mut Provider) -> Result<AdditiveSubgroup> {
        if !std::ptr::eq(rho.domain(), self.ring()) {
            return Err(Error::Precondition("map is defined on a different ring".into()));
        }
        self.check_homomorphism(rho, p)?;
        let lin = Linearization {
            images: self.ring_basis(p)?.h.iter().map(|&h| coords_of(rho.codomain(), rho.apply(h)?)).collect::<Result<_>>()?,
            relations: ring_relations(rho.codomain()),
        };
        let f = LabelHiding {
            arith: &self.arith,
            domain: self.ring_basis(p)?.h.clone(),
            orders: self.ring_basis(p)?.s.clone(),
            lin,
            label: Box::new(|x, _: &mut Provider| Ok(vec![LabelPart::Code(rho.eval(x)?)])),
            label_muls: 0,
        };
        self.subgroup(&f, p)
    }

    pub fn is_injective(&self, rho: &HomomorphismOracle, p: &mut Provider) -> Result<bool> {
        Ok(self.hom_kernel(rho, p)?.order == 1)
    }

    /// Order of the subring generated by `rho(r_1), ..., rho(r_n)`.
    pub fn image_order(&self, rho: &HomomorphismOracle, codomain: &Engine, p: &mut Provider) -> Result<u64> {
        self.check_homomorphism(rho, p)?;
        let images = self.ring().generators().iter().map(|&g| rho.eval(g)).collect::<Result<Vec<_>>>()?;
        let seeds = images.iter().enumerate().map(|(k, &y)| (y, Arc::new(Provenance::Gen(k)))).collect();
        let acc = accumulate(codomain.arith(), seeds, &images, Side::TwoSided, p)?;
        Ok(basis_of_accumulation(codomain.arith(), &acc, p)?.order())
    }

    pub fn is_surjective(&self, rho: &HomomorphismOracle, codomain: &Engine, p: &mut Provider) -> Result<bool> {
        Ok(self.image_order(rho, codomain, p)? == codomain.ring_order(p)?)
    }

    pub fn prime_trial_budget(quotient_order: u64, epsilon: f64) -> usize {
        let t = PRIME_TRIAL_CONSTANT * (quotient_order as f64).ln() * (1.0 / epsilon).ln();
        (t.ceil() as usize).max(1)
    }

    /// Whether `R / I` is a field, by looking for a class of multiplicative
    /// order `|R / I| - 1`.
    pub fn is_prime_ideal(&self, i: &BasisRepresentation, method: PrimeTestMethod, p: &mut Provider) -> Result<PrimalityVerdict> {
        if i.side != Side::TwoSided {
            return Err(Error::Precondition("the prime test needs a two-sided ideal".into()));
        }
        let q = self.ring_order(p)? / i.order();
        if q <= 1 {
            return Err(Error::Precondition("the ideal is the whole ring".into()));
        }
        let one = self.multiplicative_identity(p)?;
        let ideal = i.basis.h.clone();
        let sub = SubgroupDescriptor::span(ideal.clone());
        let one_class = SubgroupDescriptor::coset(one, ideal.clone());
        let n = q - 1;
        let primes = prime_divisors(n);
        let budget = Self::prime_trial_budget(q, p.epsilon());
        let basis = self.ring_basis(p)?;
        let density = totient(n.max(1)) as f64 / q as f64;
        let mut trials = 0;
        while trials < budget {
            trials += 1;
            let (r, _) = sample_uniform(self.ring(), &basis.h, &basis.s, Some(self.arith.zero()), p)?;
            if is_member_decision(self.ring(), r, &sub, p)? {
                continue;
            }
            let generates = match method {
                PrimeTestMethod::Divisor => {
                    let is_one = |k: u64, p: &mut Provider| -> Result<bool> {
                        let x = self.ring().power(r, k)?;
                        overlap_is_one(self.ring(), &SubgroupDescriptor::coset(x, ideal.clone()), &one_class, p)
                    };
                    is_one(n, p)? && {
                        let mut all = true;
                        for &pr in &primes {
                            if is_one(n / pr, p)? {
                                all = false;
                                break;
                            }
                        }
                        all
                    }
                }
                PrimeTestMethod::Period => {
                    find_multiplicative_order_in_quotient(self.ring(), &ideal, r, one, q, p)? == Some(n)
                }
            };
            if generates {
                return Ok(PrimalityVerdict {
                    prime: true,
                    quotient_order: q,
                    trials_used: trials,
                    trial_budget: budget,
                    confidence: 1.0,
                    witness: Some(r),
                });
            }
        }
        Ok(PrimalityVerdict {
            prime: false,
            quotient_order: q,
            trials_used: trials,
            trial_budget: budget,
            confidence: 1.0 - (1.0 - density).powi(budget as i32),
            witness: None,
        })
    }
}

/// Solves `e h_j = h_j = h_j e` over the basis of `rep`.
pub fn identity_of(arith: &RingArith, rep: &BasisRepresentation) -> Result<ElementCode> {
    let l = rep.rank();
    let s = &rep.basis.s;
    let m = &rep.tensor;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut moduli = Vec::new();
    for j in 0..l {
        for k in 0..l {
            // (e h_j)_k = sum_i e_i M[i][j][k], (h_j e)_k = sum_i e_i M[j][i][k]
            rows.push((0..l).map(|i| big(m[i][j][k])).collect::<Vec<_>>());
            rows.push((0..l).map(|i| big(m[j][i][k])).collect::<Vec<_>>());
            for _ in 0..2 {
                rhs.push(big((j == k) as u64));
                moduli.push(big(s[k]));
            }
        }
    }
    let sol = crate::intlinalg::solve_modular(&IntMatrix::from_rows(l, &rows), &rhs, &moduli)?.ok_or(Error::NoIdentity)?;
    let e: Vec<u64> = sol.iter().zip(s).map(|(v, &sk)| small(&v.mod_floor(&big(sk)))).collect();
    let e = arith.combination(&e, &rep.basis.h)?;
    for &h in &rep.basis.h {
        if arith.mul(e, h)? != h || arith.mul(h, e)? != h {
            return Err(Error::NoIdentity);
        }
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blackbox::{brute_force_closure, make_ring};
    use std::collections::HashSet;

    fn ring(spec: &str) -> RingOracle {
        make_ring(&spec.parse().unwrap(), 31).unwrap()
    }

    fn lit(r: &RingOracle, s: &str) -> ElementCode {
        r.ground_truth().parse_literal(s).unwrap()
    }

    fn two(r: &RingOracle, s: &str) -> IdealSpec {
        IdealSpec::two_sided(r.ground_truth().parse_literal_list(s).unwrap()).unwrap()
    }

    #[test]
    fn z12_examples() {
        let z = ring("modular 12");
        for mut p in [Provider::exact(1), Provider::sampled(1, 1e-6).unwrap()] {
            let e = Engine::new(&z, &mut p).unwrap();
            assert!(e.ideal_equal(&two(&z, "2"), &two(&z, "10"), &mut p).unwrap());
            assert!(!e.ideal_equal(&two(&z, "2"), &two(&z, "3"), &mut p).unwrap());
            assert!(e.ideal_contains(&two(&z, "4"), lit(&z, "8"), &mut p).unwrap());
            assert!(!e.ideal_contains(&two(&z, "4"), lit(&z, "2"), &mut p).unwrap());
            assert!(e.ideal_contains(&two(&z, "4"), lit(&z, "0"), &mut p).unwrap());
            assert!(e.is_unit(lit(&z, "5"), &mut p).unwrap());
            assert_eq!(e.inverse(lit(&z, "5"), &mut p).unwrap(), lit(&z, "5"));
            assert!(!e.is_unit(lit(&z, "4"), &mut p).unwrap());
            assert_eq!(e.inverse(lit(&z, "4"), &mut p), Err(Error::NotUnit));

            let r4 = e.represent(&two(&z, "4"), &mut p).unwrap();
            let r6 = e.represent(&two(&z, "6"), &mut p).unwrap();
            let r2 = e.represent(&two(&z, "2"), &mut p).unwrap();
            let r3 = e.represent(&two(&z, "3"), &mut p).unwrap();
            let r0 = e.represent(&two(&z, "0"), &mut p).unwrap();
            assert_eq!(e.intersection(&r4, &r6, &mut p).unwrap().order(), 1);
            let i23 = e.intersection(&r2, &r3, &mut p).unwrap();
            assert_eq!(i23.order(), 2);
            assert_eq!(i23.basis.h, vec![lit(&z, "6")]);
            assert_eq!(e.intersection(&r4, &r4, &mut p).unwrap().order(), 3);

            let c = e.colon(&r4, &r2, &mut p).unwrap();
            assert_eq!(c.order, 6);
            assert_eq!(e.colon(&r0, &r4, &mut p).unwrap().order, 4);
            let whole = e.ring_representation(&mut p).unwrap().clone();
            assert_eq!(e.colon(&r4, &whole, &mut p).unwrap().order, 3);

            assert_eq!(e.annihilator(&[lit(&z, "4")], Side::Left, &mut p).unwrap().order, 4);
            assert_eq!(e.annihilator(&[lit(&z, "1")], Side::Left, &mut p).unwrap().order, 1);

            assert_eq!(e.ideal_order(&r4), 3);
            assert_eq!(e.ideal_order(&r0), 1);
            assert_eq!(e.ring_order(&mut p).unwrap(), 12);

            let x = e.solve_linear(lit(&z, "4"), lit(&z, "8"), &mut p).unwrap().unwrap();
            assert!(["2", "5", "8", "11"].iter().any(|s| lit(&z, s) == x));
            assert_eq!(e.solve_linear(lit(&z, "4"), lit(&z, "2"), &mut p).unwrap(), None);
            assert_eq!(e.solve_linear(lit(&z, "1"), lit(&z, "7"), &mut p).unwrap(), Some(lit(&z, "7")));

            assert_eq!(e.multiplicative_identity(&mut p).unwrap(), lit(&z, "1"));
            assert_eq!(e.additive_identity(), lit(&z, "0"));
            assert_eq!(e.additive_inverse(lit(&z, "4"), &mut p).unwrap(), lit(&z, "8"));
            assert_eq!(e.additive_inverse(lit(&z, "0"), &mut p).unwrap(), lit(&z, "0"));

            for method in [PrimeTestMethod::Divisor, PrimeTestMethod::Period] {
                assert!(e.is_prime_ideal(&r3, method, &mut p).unwrap().prime);
                assert!(!e.is_prime_ideal(&r4, method, &mut p).unwrap().prime);
                assert!(e.is_prime_ideal(&r2, method, &mut p).unwrap().prime);
            }
            let whole = e.represent(&two(&z, "1"), &mut p).unwrap();
            assert!(matches!(e.is_prime_ideal(&whole, PrimeTestMethod::Divisor, &mut p), Err(Error::Precondition(_))));
        }
    }

    #[test]
    fn other_ring_examples() {
        let mut p = Provider::exact(2);
        let f4 = ring("polyquot 2 [1,1,1]");
        let e = Engine::new(&f4, &mut p).unwrap();
        assert_eq!(e.inverse(lit(&f4, "[0,1]"), &mut p).unwrap(), lit(&f4, "[1,1]"));

        let prod = ring("product(modular 2; modular 9)");
        let e = Engine::new(&prod, &mut p).unwrap();
        assert_eq!(e.multiplicative_identity(&mut p).unwrap(), lit(&prod, "(1,1)"));

        let m2 = ring("matrix 2 over modular 2");
        let e = Engine::new(&m2, &mut p).unwrap();
        assert_eq!(e.ring_order(&mut p).unwrap(), 16);
        assert_eq!(e.multiplicative_identity(&mut p).unwrap(), lit(&m2, "[1,0;0,1]"));
        let ann = e.annihilator(&[lit(&m2, "[1,0;0,0]")], Side::Left, &mut p).unwrap();
        assert_eq!(ann.order, 4);
        for g in ann.generators {
            assert_eq!(m2.ground_truth().mul(g, lit(&m2, "[1,0;0,0]")).unwrap(), lit(&m2, "[0,0;0,0]"));
        }
        // a proper ideal has no identity of its own here
        let left = e.represent(&IdealSpec::new(Side::Left, vec![lit(&m2, "[1,0;0,0]")]).unwrap(), &mut p).unwrap();
        assert_eq!(identity_of(e.arith(), &left).unwrap_err(), Error::NoIdentity);
    }

    #[test]
    fn homomorphism_examples() {
        let z12 = ring("modular 12");
        let z6 = ring("modular 6");
        let mut p = Provider::exact(3);
        let e12 = Engine::new(&z12, &mut p).unwrap();
        let e6 = Engine::new(&z6, &mut p).unwrap();

        let rho = HomomorphismOracle::new(&z12, &z6, vec![vec![1]]).unwrap();
        let k = e12.hom_kernel(&rho, &mut p).unwrap();
        assert_eq!(k.order, 2);
        assert_eq!(k.generators, vec![lit(&z12, "6")]);
        assert!(!e12.is_injective(&rho, &mut p).unwrap());
        assert!(e12.is_surjective(&rho, &e6, &mut p).unwrap());
        assert!(rho.evaluations() > 0);

        let id = HomomorphismOracle::new(&z12, &z12, vec![vec![1]]).unwrap();
        assert_eq!(e12.hom_kernel(&id, &mut p).unwrap().order, 1);
        assert!(e12.is_injective(&id, &mut p).unwrap());
        assert!(e12.is_surjective(&id, &e12, &mut p).unwrap());

        let four = HomomorphismOracle::new(&z12, &z12, vec![vec![4]]).unwrap();
        let k = e12.hom_kernel(&four, &mut p).unwrap();
        assert_eq!(k.order, 4);
        assert_eq!(e12.image_order(&four, &e12, &mut p).unwrap(), 3);
        assert!(!e12.is_injective(&four, &mut p).unwrap());
        assert!(!e12.is_surjective(&four, &e12, &mut p).unwrap());

        let five = HomomorphismOracle::new(&z12, &z12, vec![vec![5]]).unwrap();
        assert!(matches!(e12.hom_kernel(&five, &mut p), Err(Error::ContractViolation(_))));
        assert!(HomomorphismOracle::new(&z12, &z6, vec![vec![1, 0]]).is_err());
        assert!(HomomorphismOracle::new(&z6, &z12, vec![vec![1]]).is_err());
    }

    #[test]
    fn colon_contains_ideal() {
        let z = ring("modular 36");
        let mut p = Provider::exact(4);
        let e = Engine::new(&z, &mut p).unwrap();
        for (a, b) in [("4", "6"), ("9", "2"), ("0", "12"), ("6", "1")] {
            let i = e.represent(&two(&z, a), &mut p).unwrap();
            let j = e.represent(&two(&z, b), &mut p).unwrap();
            let c: HashSet<_> = brute_force_closure(&z, &e.colon(&i, &j, &mut p).unwrap().generators, &[], Side::Left)
                .unwrap()
                .into_iter()
                .collect();
            for x in brute_force_closure(&z, &i.basis.h, &[], Side::Left).unwrap() {
                assert!(c.contains(&x));
            }
        }
    }
}
