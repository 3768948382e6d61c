//! Basis representations of ideals.
//!
//! Starting from the ideal generators, additive generators are accumulated
//! until multiplying by every ring generator keeps the generated subgroup
//! fixed; the subgroup is then put in invariant-factor form and its
//! multiplication tensor computed.

use std::collections::HashMap;
use std::sync::Arc;

use crate::abelian::{decompose_element, invariant_factor_basis, AbelianPresentation, CombinationHiding, InvariantFactorBasis, RingArith};
use crate::blackbox::{ElementCode, Side};
use crate::error::{Error, Result};
use crate::qsim::{find_additive_order, is_member_decision, is_subset_decision, sample_uniform, solve_ahsp, Provider, SubgroupDescriptor};

/// Ideal given by generators `i_1, ..., i_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealSpec {
    pub side: Side,
    pub generators: Vec<ElementCode>,
}

impl IdealSpec {
    pub fn new(side: Side, generators: Vec<ElementCode>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::Precondition("an ideal needs at least one generator".into()));
        }
        Ok(IdealSpec { side, generators })
    }

    pub fn two_sided(generators: Vec<ElementCode>) -> Result<Self> {
        Self::new(Side::TwoSided, generators)
    }

    /// Whether `m` exceeds the logarithmic bound the algorithms assume.
    pub fn exceeds_log_bound(&self, ring_width: u32) -> bool {
        self.generators.len() > 2 * ring_width as usize
    }
}

/// How an element was built from the ideal generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    /// The ideal generator `i_{k+1}`.
    Gen(usize),
    Scale(u64, Expr),
    Sum(Vec<Expr>),
    /// Ring generator `r_{k+1}` times the expression.
    LeftMul(usize, Expr),
    /// The expression times ring generator `r_{k+1}`.
    RightMul(usize, Expr),
}

pub type Expr = Arc<Provenance>;

fn key(e: &Expr) -> *const Provenance {
    Arc::as_ptr(e)
}

/// Linear combination `sum_j coeffs[j] exprs[j]`, dropping zero terms.
pub fn combine(coeffs: &[u64], exprs: &[Expr]) -> Expr {
    let terms: Vec<Expr> = coeffs
        .iter()
        .zip(exprs)
        .filter(|(&c, _)| c != 0)
        .map(|(&c, e)| if c == 1 { e.clone() } else { Arc::new(Provenance::Scale(c, e.clone())) })
        .collect();
    if terms.len() == 1 {
        return terms.into_iter().next().unwrap();
    }
    Arc::new(Provenance::Sum(terms))
}

/// Evaluates expressions through the oracles, sharing common subtrees.
pub struct Evaluator<'a> {
    arith: &'a RingArith<'a>,
    ideal_generators: &'a [ElementCode],
    multipliers: &'a [ElementCode],
    memo: HashMap<*const Provenance, ElementCode>,
}

impl<'a> Evaluator<'a> {
    pub fn new(arith: &'a RingArith<'a>, ideal_generators: &'a [ElementCode], multipliers: &'a [ElementCode]) -> Self {
        Evaluator { arith, ideal_generators, multipliers, memo: HashMap::new() }
    }

    pub fn eval(&mut self, e: &Expr) -> Result<ElementCode> {
        if let Some(&v) = self.memo.get(&key(e)) {
            return Ok(v);
        }
        let bad = |k: usize| Error::Precondition(format!("expression refers to missing index {}", k + 1));
        let v = match &**e {
            Provenance::Gen(k) => *self.ideal_generators.get(*k).ok_or_else(|| bad(*k))?,
            Provenance::Scale(c, inner) => {
                let x = self.eval(inner)?;
                self.arith.scale(*c, x)?
            }
            Provenance::Sum(terms) => {
                let mut acc: Option<ElementCode> = None;
                for t in terms {
                    let x = self.eval(t)?;
                    acc = Some(match acc {
                        Some(a) => self.arith.add(a, x)?,
                        None => x,
                    });
                }
                acc.unwrap_or(self.arith.zero())
            }
            Provenance::LeftMul(r, inner) => {
                let x = self.eval(inner)?;
                self.arith.mul(*self.multipliers.get(*r).ok_or_else(|| bad(*r))?, x)?
            }
            Provenance::RightMul(r, inner) => {
                let x = self.eval(inner)?;
                self.arith.mul(x, *self.multipliers.get(*r).ok_or_else(|| bad(*r))?)?
            }
        };
        self.memo.insert(key(e), v);
        Ok(v)
    }
}

/// Renders an expression, printing `names` for known shared subtrees.
pub fn render(e: &Expr, names: &HashMap<*const Provenance, String>) -> String {
    fn atom(e: &Expr, names: &HashMap<*const Provenance, String>) -> String {
        if let Some(n) = names.get(&key(e)) {
            return n.clone();
        }
        match &**e {
            Provenance::Gen(_) => render(e, names),
            Provenance::Sum(t) if t.is_empty() => "0".into(),
            _ => format!("({})", render(e, names)),
        }
    }
    if let Some(n) = names.get(&key(e)) {
        return n.clone();
    }
    match &**e {
        Provenance::Gen(k) => format!("i{}", k + 1),
        Provenance::Scale(c, inner) => format!("{c}*{}", atom(inner, names)),
        Provenance::Sum(t) if t.is_empty() => "0".into(),
        Provenance::Sum(t) => t.iter().map(|x| render(x, names)).collect::<Vec<_>>().join(" + "),
        Provenance::LeftMul(r, inner) => format!("r{}*{}", r + 1, atom(inner, names)),
        Provenance::RightMul(r, inner) => format!("{}*r{}", atom(inner, names), r + 1),
    }
}

/// Additive generator found by accumulation.
#[derive(Debug, Clone)]
pub struct AccumulatedGenerator {
    pub element: ElementCode,
    pub provenance: Expr,
    pub order: u64,
}

#[derive(Debug, Clone)]
pub struct Accumulation {
    /// Seeds first, then one entry per augmentation in the order found.
    pub generators: Vec<AccumulatedGenerator>,
    pub seeds: usize,
    pub rounds: usize,
    pub rescans: usize,
    pub low_confidence: bool,
}

impl Accumulation {
    pub fn elements(&self) -> Vec<ElementCode> {
        self.generators.iter().map(|g| g.element).collect()
    }

    pub fn orders(&self) -> Vec<u64> {
        self.generators.iter().map(|g| g.order).collect()
    }
}

/// Grows `seeds` into additive generators of the smallest subgroup closed
/// under multiplication by `multipliers` on `side`.
pub fn accumulate(
    arith: &RingArith,
    seeds: Vec<(ElementCode, Expr)>,
    multipliers: &[ElementCode],
    side: Side,
    p: &mut Provider,
) -> Result<Accumulation> {
    let ring = arith.ring();
    let mut gens = Vec::with_capacity(seeds.len());
    for (element, provenance) in seeds {
        let order = find_additive_order(ring, element, p)?;
        gens.push(AccumulatedGenerator { element, provenance, order });
    }
    let n_seeds = gens.len();
    let cap = p.retry_cap();
    let mut rounds = 0;
    let mut rescans = 0;
    let mut low_confidence = false;

    let mut directions = Vec::new();
    if side.left() {
        directions.push(Side::Left);
    }
    if side.right() {
        directions.push(Side::Right);
    }

    'scan: loop {
        for (ri, &r) in multipliers.iter().enumerate() {
            for &dir in &directions {
                let current: Vec<ElementCode> = gens.iter().map(|g| g.element).collect();
                let orders: Vec<u64> = gens.iter().map(|g| g.order).collect();
                let products = current
                    .iter()
                    .map(|&g| if dir == Side::Left { ring.mul(r, g) } else { ring.mul(g, r) })
                    .collect::<Result<Vec<_>>>()?;
                let b = SubgroupDescriptor::span(current);
                if is_subset_decision(ring, &SubgroupDescriptor::span(products.clone()), &b, p)? {
                    continue;
                }
                let mut found = None;
                for _ in 0..cap {
                    let (y, coeffs) = sample_uniform(ring, &products, &orders, Some(arith.zero()), p)?;
                    if !is_member_decision(ring, y, &b, p)? {
                        found = Some((y, coeffs));
                        break;
                    }
                }
                let Some((y, coeffs)) = found else {
                    rescans += 1;
                    if rescans > cap {
                        low_confidence = true;
                        p.flag_low_confidence();
                        break 'scan;
                    }
                    continue 'scan;
                };
                let exprs: Vec<Expr> = gens.iter().map(|g| g.provenance.clone()).collect();
                let inner = combine(&coeffs, &exprs);
                let provenance = Arc::new(if dir == Side::Left {
                    Provenance::LeftMul(ri, inner)
                } else {
                    Provenance::RightMul(ri, inner)
                });
                let order = find_additive_order(ring, y, p)?;
                gens.push(AccumulatedGenerator { element: y, provenance, order });
                rounds += 1;
                continue 'scan;
            }
        }
        break;
    }
    Ok(Accumulation { generators: gens, seeds: n_seeds, rounds, rescans, low_confidence })
}

pub fn accumulate_additive_generators(arith: &RingArith, ideal: &IdealSpec, p: &mut Provider) -> Result<Accumulation> {
    let seeds = ideal
        .generators
        .iter()
        .enumerate()
        .map(|(k, &g)| (g, Arc::new(Provenance::Gen(k))))
        .collect();
    accumulate(arith, seeds, arith.ring().generators(), ideal.side, p)
}

/// Invariant-factor basis of the subgroup spanned by accumulated
/// generators, reusing their known orders.
pub fn basis_of_accumulation(arith: &RingArith, acc: &Accumulation, p: &mut Provider) -> Result<InvariantFactorBasis> {
    let f = CombinationHiding { arith, elems: acc.elements(), orders: acc.orders() };
    let relations = solve_ahsp(&f, p)?;
    let pres = AbelianPresentation { generators: acc.elements(), orders: acc.orders(), relations };
    invariant_factor_basis(arith, &pres)
}

#[derive(Debug, Clone)]
pub struct BasisRepresentation {
    pub side: Side,
    pub ideal_generators: Vec<ElementCode>,
    pub accumulation: Accumulation,
    pub basis: InvariantFactorBasis,
    /// `h_i h_j = sum_k tensor[i][j][k] h_k`
    pub tensor: Vec<Vec<Vec<u64>>>,
    /// Expression for each `h_i` over the ideal generators.
    pub provenance: Vec<Expr>,
}

impl BasisRepresentation {
    pub fn order(&self) -> u64 {
        self.basis.order()
    }

    pub fn rank(&self) -> usize {
        self.basis.rank()
    }

    /// Names for the shared subexpressions: `g1, g2, ...` for accumulated
    /// generators and `h1, h2, ...` for the basis.
    pub fn names(&self) -> HashMap<*const Provenance, String> {
        let mut names = HashMap::new();
        for (i, g) in self.accumulation.generators.iter().enumerate() {
            names.entry(key(&g.provenance)).or_insert(format!("g{}", i + 1));
        }
        for (i, e) in self.provenance.iter().enumerate() {
            names.entry(key(e)).or_insert(format!("h{}", i + 1));
        }
        names
    }

    /// Definitions of every named subexpression, in dependency order.
    pub fn provenance_table(&self) -> Vec<(String, String)> {
        let names = self.names();
        let mut out = Vec::new();
        for (i, g) in self.accumulation.generators.iter().enumerate() {
            let mut without = names.clone();
            without.remove(&key(&g.provenance));
            let name = format!("g{}", i + 1);
            // a generator equal to an earlier one keeps the earlier name
            if names.get(&key(&g.provenance)) == Some(&name) {
                out.push((name, render(&g.provenance, &without)));
            }
        }
        for (i, e) in self.provenance.iter().enumerate() {
            let name = format!("h{}", i + 1);
            let mut without = names.clone();
            if names.get(&key(e)) == Some(&name) {
                without.remove(&key(e));
            }
            out.push((name, render(e, &without)));
        }
        out
    }

    pub fn describe_expression(&self, e: &Expr) -> String {
        render(e, &self.names())
    }
}

/// `tensor[i][j]` holds the coordinates of `h_i h_j`.
pub fn multiplication_tensor(arith: &RingArith, basis: &InvariantFactorBasis, p: &mut Provider) -> Result<Vec<Vec<Vec<u64>>>> {
    let l = basis.rank();
    let mut tensor = vec![vec![Vec::new(); l]; l];
    for i in 0..l {
        for j in 0..l {
            let prod = arith.mul(basis.h[i], basis.h[j])?;
            tensor[i][j] = decompose_element(arith, prod, basis, p).map_err(|e| match e {
                Error::NotMember => Error::NotClosed,
                other => other,
            })?;
        }
    }
    Ok(tensor)
}

/// Basis representation built from an accumulation.
pub fn representation_from_accumulation(
    arith: &RingArith,
    side: Side,
    ideal_generators: Vec<ElementCode>,
    accumulation: Accumulation,
    p: &mut Provider,
) -> Result<BasisRepresentation> {
    let basis = basis_of_accumulation(arith, &accumulation, p)?;
    let tensor = multiplication_tensor(arith, &basis, p)?;
    let exprs: Vec<Expr> = accumulation.generators.iter().map(|g| g.provenance.clone()).collect();
    let provenance = basis.to_original.iter().map(|row| combine(row, &exprs)).collect();
    Ok(BasisRepresentation { side, ideal_generators, accumulation, basis, tensor, provenance })
}

pub fn find_basis_representation(arith: &RingArith, ideal: &IdealSpec, p: &mut Provider) -> Result<BasisRepresentation> {
    let acc = accumulate_additive_generators(arith, ideal, p)?;
    representation_from_accumulation(arith, ideal.side, ideal.generators.clone(), acc, p)
}

/// Expression for `r` over the ideal generators; fails when `r` is not in
/// the ideal.
pub fn membership_witness(arith: &RingArith, r: ElementCode, rep: &BasisRepresentation, p: &mut Provider) -> Result<Expr> {
    if let Some(k) = rep.ideal_generators.iter().position(|&g| g == r) {
        return Ok(Arc::new(Provenance::Gen(k)));
    }
    let n = decompose_element(arith, r, &rep.basis, p)?;
    Ok(combine(&n, &rep.provenance))
}
