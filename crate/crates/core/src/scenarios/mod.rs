//! Canned drivers for the worked examples and the serialization surface.
//!
//! Every driver returns a [`ScenarioResult`]; [`emit`] writes it as JSON or
//! CSV with sorted keys and floats printed to 17 significant digits, so the
//! same inputs always give the same bytes.

mod finite;
mod output;
mod slit;

use std::collections::BTreeMap;

use serde_json::Value;

pub use finite::{run_eraser, run_hardy, run_three_boxes, run_wheeler, EraserSpec};
pub use output::{emit, format_float, to_csv_files, to_json, Format};
pub use slit::{
    histogram_sigma_residual, run_doubleslit, surrogate_noncommutation, BranchSelection, MOMENTUM_TOL, NORM_DRIFT_TOL,
    SHOT_SIGMAS, SUPERPOSITION_TOL, VISIBILITY_MARGIN,
};

use crate::error::{Error, Result};
use crate::kernel::C64;
use crate::measurement::{Outcome, Pmf};

/// Frozen scenario identifiers.
pub const SCENARIOS: [&str; 5] = ["eraser", "wheeler", "hardy", "three-boxes", "doubleslit"];

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledPmf {
    pub label: String,
    pub pmf: Pmf,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledValues {
    pub label: String,
    pub values: Vec<(Outcome, C64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    pub label: String,
    pub counts: Vec<(String, u64)>,
}

/// A named numeric check. `pass` is `residual <= tol` unless the check asks
/// for a quantity to exceed its threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct Identity {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Identity {
    pub fn at_most(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        Identity { name: name.into(), residual, tol, pass: residual <= tol }
    }

    pub fn exceeds(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Identity { name: name.into(), residual: value, tol: threshold, pass: value > threshold }
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ScenarioResult {
    pub scenario: String,
    pub parameters: BTreeMap<String, Value>,
    pub pmfs: Vec<LabeledPmf>,
    pub weak_values: Vec<LabeledValues>,
    pub identities: Vec<Identity>,
    /// Shot histograms; serialized under `metadata.histograms`.
    pub histograms: Vec<Histogram>,
    pub metadata: BTreeMap<String, Value>,
}

impl ScenarioResult {
    pub fn new(scenario: &str) -> Self {
        ScenarioResult { scenario: scenario.into(), ..Default::default() }
    }

    pub fn pmf(&self, label: &str) -> Option<&Pmf> {
        self.pmfs.iter().find(|p| p.label == label).map(|p| &p.pmf)
    }

    pub fn values(&self, label: &str) -> Option<&[(Outcome, C64)]> {
        self.weak_values.iter().find(|v| v.label == label).map(|v| v.values.as_slice())
    }

    pub fn identity(&self, name: &str) -> Option<&Identity> {
        self.identities.iter().find(|i| i.name == name)
    }

    pub fn all_pass(&self) -> bool {
        self.identities.iter().all(|i| i.pass)
    }

    fn push_pmf(&mut self, label: &str, pmf: Pmf) {
        self.pmfs.push(LabeledPmf { label: label.into(), pmf });
    }

    fn check(&mut self, identity: Identity) {
        self.identities.push(identity);
    }

    fn meta(&mut self, key: &str, value: impl Into<Value>) {
        self.metadata.insert(key.into(), value.into());
    }

    fn param(&mut self, key: &str, value: impl Into<Value>) {
        self.parameters.insert(key.into(), value.into());
    }
}

/// Runs a finite scenario by its frozen name with default settings.
pub fn run_named(name: &str) -> Result<ScenarioResult> {
    match name {
        "eraser" => run_eraser(&EraserSpec::default()),
        "wheeler" => run_wheeler(),
        "hardy" => run_hardy(),
        "three-boxes" => run_three_boxes(),
        "doubleslit" => run_doubleslit(&crate::doubleslit::DoubleSlitConfig::default(), BranchSelection::Both),
        other => Err(Error::UnknownScenario(other.into())),
    }
}

/// Largest absolute deviation between two equally long sequences.
fn max_deviation(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn complex_json(z: C64) -> Value {
    serde_json::json!({ "re": z.re, "im": z.im })
}
