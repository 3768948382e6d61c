use ringideal::abelian::RingArith;
use ringideal::blackbox::{brute_force_closure, make_ring, RingSpec, Side};
use ringideal::idealcore::{find_basis_representation, IdealSpec};
use ringideal::qsim::{Provider, ProviderConfig};
use ringideal::{Error, Result};
use serde::Serialize;
use serde_json::json;

use crate::report::Report;
use crate::{RunConfig, EXIT_OK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BenchFamily {
    /// `Z_{2^k}` with the ideal `(2)`.
    Modular,
    /// `M_2(Z_{2^k})` with the left ideal generated by `E_11`.
    Matrix,
}

impl BenchFamily {
    fn ring(self, k: u32) -> RingSpec {
        match self {
            BenchFamily::Modular => RingSpec::modular(1 << k),
            BenchFamily::Matrix => RingSpec::matrix(2, RingSpec::modular(1 << k)),
        }
    }

    fn ideal(self) -> (Side, &'static str) {
        match self {
            BenchFamily::Modular => (Side::TwoSided, "2"),
            BenchFamily::Matrix => (Side::Left, "[1,0;0,0]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub k: u32,
    pub ideal_order: u64,
    pub add: u64,
    pub mul: u64,
    pub total: u64,
    /// Oracle calls made by brute-force closure of the same ideal, when the
    /// ring is small enough to enumerate.
    pub brute_force: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchTable {
    pub family: BenchFamily,
    pub rows: Vec<BenchRow>,
    /// Slope of `ln total` against `ln k`.
    pub fitted_exponent: Option<f64>,
    /// Slope of `log2 brute_force` against `k`.
    pub brute_force_log2_slope: Option<f64>,
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Exponent `a` in `y ~ c x^a`.
pub fn fit_exponent(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    fit_slope(&logs)
}

pub fn bench_queries(family: BenchFamily, k_min: u32, k_max: u32, provider: &ProviderConfig) -> Result<BenchTable> {
    if k_min == 0 || k_min > k_max || k_max > 30 {
        return Err(Error::Precondition(format!("k range {k_min}..={k_max} must lie within 1..=30")));
    }
    let mut rows = Vec::new();
    for k in k_min..=k_max {
        let ring = make_ring(&family.ring(k), u64::from(k))?;
        let mut p = Provider::new(provider.clone())?;
        let (side, gen) = family.ideal();
        let g = ring.ground_truth().parse_literal(gen)?;
        let arith = RingArith::new(&ring, &mut p)?;
        let rep = find_basis_representation(&arith, &IdealSpec::new(side, vec![g])?, &mut p)?;
        let counts = ring.ledger().counts();
        let brute_force = if ring.ground_truth().order() <= ring.desk_cap() {
            ring.verification_ledger().reset();
            brute_force_closure(&ring, &[g], ring.generators(), side)?;
            Some(ring.verification_ledger().counts().total())
        } else {
            None
        };
        rows.push(BenchRow { k, ideal_order: rep.order(), add: counts.add, mul: counts.mul, total: counts.total(), brute_force });
    }
    let fitted_exponent = fit_exponent(&rows.iter().map(|r| (r.k as f64, r.total as f64)).collect::<Vec<_>>());
    let brute: Vec<(f64, f64)> =
        rows.iter().filter_map(|r| r.brute_force.map(|b| (r.k as f64, (b as f64).log2()))).collect();
    Ok(BenchTable { family, rows, fitted_exponent, brute_force_log2_slope: fit_slope(&brute) })
}

pub(crate) fn run(cfg: &RunConfig, report: &mut Report) -> Result<i32> {
    let provider = ProviderConfig { backend: cfg.backend, seed: cfg.seed, epsilon: cfg.epsilon, ..ProviderConfig::default() };
    let table = bench_queries(cfg.family, cfg.k_min, cfg.k_max, &provider)?;
    report.inputs.insert("family".into(), json!(table.family));
    report.inputs.insert("k_min".into(), json!(cfg.k_min));
    report.inputs.insert("k_max".into(), json!(cfg.k_max));
    for r in &table.rows {
        report.queries.add += r.add;
        report.queries.mul += r.mul;
    }
    report.queries.total = report.queries.add + report.queries.mul;
    report.result = serde_json::to_value(&table).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(EXIT_OK)
}
