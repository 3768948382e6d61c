use std::collections::BTreeMap;
use std::fmt::Write as _;

use ringideal::blackbox::{QueryCounts, Side};
use ringideal::qsim::ProviderStats;
use ringideal::Error;
use serde::Serialize;
use serde_json::Value;

use crate::RunConfig;

pub const SCHEMA: &str = "ringideal.report/1";

#[derive(Debug, Clone, Default, Serialize)]
pub struct Queries {
    pub add: u64,
    pub mul: u64,
    pub total: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hom_evaluations: Option<u64>,
    pub decisions: u64,
    pub swap_shots: u64,
    pub character_samples: u64,
    pub hidden_subgroup_solves: u64,
    pub period_runs: u64,
    pub spot_checks: u64,
}

impl Queries {
    pub fn record(&mut self, counts: QueryCounts, stats: &ProviderStats) {
        self.add += counts.add;
        self.mul += counts.mul;
        self.total = self.add + self.mul;
        self.decisions += stats.decisions;
        self.swap_shots += stats.swap_shots;
        self.character_samples += stats.character_samples;
        self.hidden_subgroup_solves += stats.hidden_subgroup_solves;
        self.period_runs += stats.period_runs;
        self.spot_checks += stats.spot_checks;
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Verification {
    pub agree: bool,
    pub brute_force_queries: u64,
    pub diff: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorInfo {
    pub kind: &'static str,
    pub message: String,
}

/// One structured document per run.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub ring: Option<String>,
    pub inputs: BTreeMap<String, Value>,
    pub result: Value,
    pub queries: Queries,
    pub confidence: Option<f64>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<Verification>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidSpec { .. } => "invalid-spec",
        Error::InvalidCode(_) => "invalid-code",
        Error::CapExceeded { .. } => "cap-exceeded",
        Error::DimensionMismatch(_) => "dimension-mismatch",
        Error::ContractViolation(_) => "contract-violation",
        Error::NotMember => "not-member",
        Error::Precondition(_) => "precondition",
        Error::NoIdentity => "no-identity",
        Error::NotUnit => "not-unit",
        Error::NotClosed => "not-closed",
        Error::LowConfidence(_) => "low-confidence",
        Error::Parse(_) => "parse",
    }
}

impl Report {
    pub fn new(config: &RunConfig) -> Self {
        let mut inputs = BTreeMap::new();
        let mut put = |k: &str, v: &Option<String>| {
            if let Some(v) = v {
                inputs.insert(k.to_string(), Value::String(v.clone()));
            }
        };
        put("ideal", &config.ideal);
        put("ideal2", &config.ideal2);
        put("element", &config.element);
        put("element2", &config.element2);
        put("codomain", &config.codomain);
        put("hom", &config.hom);
        inputs.insert("backend".into(), Value::String(config.backend.to_string()));
        inputs.insert("epsilon".into(), serde_json::json!(config.epsilon));
        let side = match config.side {
            Side::Left => "left",
            Side::Right => "right",
            Side::TwoSided => "two",
        };
        inputs.insert("side".into(), Value::String(side.into()));
        Report {
            schema: SCHEMA,
            command: config.command.name().to_string(),
            ring: None,
            inputs,
            result: Value::Null,
            queries: Queries::default(),
            confidence: None,
            seed: config.seed,
            verify: None,
            error: None,
        }
    }

    pub fn set_error(&mut self, e: &Error) {
        self.error = Some(ErrorInfo { kind: error_kind(e), message: e.to_string() });
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_human(&self, with_queries: bool) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        if let Some(r) = &self.ring {
            let _ = writeln!(out, "ring: {r}");
        }
        if let Value::Object(map) = &self.result {
            for (k, v) in map {
                match v {
                    Value::String(s) => {
                        let _ = writeln!(out, "{k}: {s}");
                    }
                    Value::Array(items) if items.iter().all(Value::is_object) && !items.is_empty() => {
                        let _ = writeln!(out, "{k}:");
                        for item in items {
                            let _ = writeln!(out, "  {item}");
                        }
                    }
                    other => {
                        let _ = writeln!(out, "{k}: {other}");
                    }
                }
            }
        }
        if let Some(c) = self.confidence {
            let _ = writeln!(out, "confidence: {c}");
        }
        if with_queries {
            let q = &self.queries;
            let _ = writeln!(out, "queries: add={} mul={} total={}", q.add, q.mul, q.total);
            if let Some(h) = q.hom_evaluations {
                let _ = writeln!(out, "hom evaluations: {h}");
            }
        }
        if let Some(v) = &self.verify {
            if v.agree {
                let _ = writeln!(out, "verify: agrees with brute force");
            } else {
                let _ = writeln!(out, "verify: DIVERGED");
                for d in &v.diff {
                    let _ = writeln!(out, "  {d}");
                }
            }
        }
        if let Some(e) = &self.error {
            let _ = writeln!(out, "error ({}): {}", e.kind, e.message);
        }
        out
    }
}
