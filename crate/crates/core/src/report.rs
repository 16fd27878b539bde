//! Machine-readable run reports.

use serde::Serialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::time::Instant;

use crate::quadric::ModelSummary;

pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Formula,
    Enumeration,
    Oracle,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: Value,
    pub actual: Value,
    pub source: Source,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub command: String,
    pub config: Value,
    pub model: Option<ModelSummary>,
    pub checks: Vec<Check>,
    pub details: Value,
    pub timings: BTreeMap<String, f64>,
}

impl RunReport {
    pub fn new(command: &str, config: Value) -> RunReport {
        RunReport {
            schema: SCHEMA,
            command: command.to_string(),
            config,
            model: None,
            checks: Vec::new(),
            details: json!({}),
            timings: BTreeMap::new(),
        }
    }

    /// Records a comparison of two serializable values.
    pub fn compare<T: Serialize + PartialEq>(&mut self, name: &str, expected: T, actual: T, source: Source) -> bool {
        let pass = expected == actual;
        self.checks.push(Check {
            name: name.to_string(),
            expected: json!(expected),
            actual: json!(actual),
            source,
            pass,
        });
        pass
    }

    /// Records a boolean property; the expected value is `true`.
    pub fn holds(&mut self, name: &str, actual: bool, source: Source) -> bool {
        self.compare(name, true, actual, source)
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) {
        if let Value::Object(m) = &mut self.details {
            m.insert(key.to_string(), json!(value));
        }
    }

    /// Runs `f` and stores its wall-clock time under `phase`.
    pub fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.timings.insert(phase.to_string(), t.elapsed().as_secs_f64());
        out
    }

    pub fn pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }

    pub fn failed(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The report without its timings, for comparing runs.
    pub fn payload(&self) -> Value {
        let mut v = json!(self);
        if let Value::Object(m) = &mut v {
            m.remove("timings");
        }
        v
    }
}
