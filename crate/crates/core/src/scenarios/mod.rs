//! Parameterized reconstructions of the worked examples. Each scenario
//! resolves its parameters against a schema, runs the relevant library
//! calls, re-checks the results it depends on, and returns a JSON document
//! plus figure-named CSV series.

mod cone;
mod epr;
mod format;
mod kinetic;
mod machine;
mod n_box;
mod n_spin;
mod params;
mod protect;
mod spin_xi;
mod three_box;

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};

pub use format::{fmt17, to_json_string};
pub use kinetic::{lattice_ground_state, lattice_kinetic_weak_value, LatticeWell};
pub use params::{ParamKind, ParamSpec, ParamValue, Params};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.to_string(), passed, detail: detail.into() }
    }

    /// `|got - want| <= tol`.
    pub fn close(name: &str, got: f64, want: f64, tol: f64) -> Self {
        let err = (got - want).abs();
        Self::new(name, err <= tol, format!("got {}, want {} ± {:e} (error {:e})", fmt17(got), fmt17(want), tol, err))
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioOutput {
    pub scenario: String,
    pub params: Params,
    pub seed: u64,
    pub results: Value,
    /// Scalar summaries, used for the one-line report and sweep tables.
    pub summary: Vec<(String, f64)>,
    pub checks: Vec<Check>,
    /// `(file name, contents)`.
    pub csv: Vec<(String, String)>,
}

impl ScenarioOutput {
    fn new(scenario: &str, params: &Params, seed: u64) -> Self {
        Self {
            scenario: scenario.to_string(),
            params: params.clone(),
            seed,
            results: json!({}),
            summary: Vec::new(),
            checks: Vec::new(),
            csv: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn summary_value(&self, key: &str) -> Option<f64> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    fn scalar(&mut self, key: &str, value: f64) {
        self.summary.push((key.to_string(), value));
    }

    pub fn to_json(&self) -> Value {
        let summary: BTreeMap<&str, f64> = self.summary.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        json!({
            "schema_version": SCHEMA_VERSION,
            "scenario": self.scenario,
            "seed": self.seed,
            "params": self.params.to_json(),
            "summary": summary,
            "checks": self.checks,
            "passed": self.passed(),
            "results": self.results,
        })
    }

    /// One line: scenario name, pass state and the scalar summaries.
    pub fn one_line(&self) -> String {
        let fields: Vec<String> = self.summary.iter().map(|(k, v)| format!("{k}={}", fmt17(*v))).collect();
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        let state = if failed == 0 { "ok".to_string() } else { format!("FAILED({failed})") };
        format!("{} {state} {}", self.scenario, fields.join(" "))
    }
}

type Runner = fn(&Params, u64) -> Result<ScenarioOutput>;

#[derive(Clone)]
pub struct Scenario {
    pub name: &'static str,
    pub summary: &'static str,
    pub params: Vec<ParamSpec>,
    runner: Runner,
}

impl std::fmt::Debug for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Scenario").field("name", &self.name).field("params", &self.params).finish()
    }
}

impl Scenario {
    /// Defaults overridden by `overrides`, type-checked against the schema.
    pub fn resolve(&self, overrides: &BTreeMap<String, ParamValue>) -> Result<Params> {
        Params::resolve(&self.params, overrides)
    }

    pub fn run(&self, params: &Params, seed: u64) -> Result<ScenarioOutput> {
        (self.runner)(params, seed)
    }

    pub fn run_with(&self, overrides: &BTreeMap<String, ParamValue>, seed: u64) -> Result<ScenarioOutput> {
        self.run(&self.resolve(overrides)?, seed)
    }

    pub fn run_default(&self) -> Result<ScenarioOutput> {
        self.run_with(&BTreeMap::new(), DEFAULT_SEED)
    }
}

/// All scenarios in listing order.
pub fn registry() -> Vec<Scenario> {
    vec![
        three_box::scenario(),
        n_box::scenario(),
        epr::scenario(),
        spin_xi::scenario(),
        n_spin::scenario(),
        kinetic::scenario(),
        cone::scenario(),
        machine::scenario(),
        protect::scenario(),
    ]
}

pub fn find(name: &str) -> Option<Scenario> {
    registry().into_iter().find(|s| s.name == name)
}

pub fn run(name: &str, overrides: &BTreeMap<String, ParamValue>, seed: u64) -> Result<ScenarioOutput> {
    find(name)
        .ok_or_else(|| Error::param("scenario", format!("unknown scenario `{name}`")))?
        .run_with(overrides, seed)
}
