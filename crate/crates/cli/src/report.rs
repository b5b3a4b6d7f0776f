use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use periharm::io::format_float;

#[derive(Debug, Clone, Serialize)]
pub struct Item {
    pub identity: String,
    pub paper_eq: String,
    pub max_abs_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Item {
    /// Passes when `error <= tolerance` and the error is a real number.
    pub fn bounded(identity: &str, label: &str, error: f64, tolerance: f64) -> Self {
        let finite = error.is_finite() && error >= 0.0;
        Self {
            identity: identity.to_string(),
            paper_eq: label.to_string(),
            max_abs_error: if finite { error } else { f64::MAX },
            tolerance,
            pass: finite && error <= tolerance,
        }
    }

    /// An item that could not be evaluated at all.
    pub fn failed(identity: &str, label: &str, tolerance: f64) -> Self {
        Self::bounded(identity, label, f64::INFINITY, tolerance)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub suite: String,
    pub items: Vec<Item>,
    pub pass: bool,
    pub wall_time_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase_absorbed: Option<bool>,
}

pub type Check = Box<dyn Fn() -> Item + Send + Sync>;

impl Report {
    /// Runs the checks in parallel; items keep declaration order.
    pub fn run(suite: &str, checks: Vec<Check>) -> Self {
        let start = Instant::now();
        let items: Vec<Item> = checks.par_iter().map(|c| c()).collect();
        Self::from_items(suite, items, start.elapsed().as_secs_f64())
    }

    pub fn from_items(suite: &str, items: Vec<Item>, wall_time_s: f64) -> Self {
        let pass = items.iter().all(|i| i.pass);
        Self {
            suite: suite.to_string(),
            items,
            pass,
            wall_time_s,
            phase_absorbed: None,
        }
    }

    pub fn merge(suite: &str, parts: Vec<Report>) -> Self {
        let wall = parts.iter().map(|r| r.wall_time_s).sum();
        Self::from_items(suite, parts.into_iter().flat_map(|r| r.items).collect(), wall)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("identity,paper_eq,max_abs_error,tolerance,pass\n");
        for i in &self.items {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                i.identity,
                i.paper_eq,
                format_float(i.max_abs_error),
                format_float(i.tolerance),
                i.pass
            ));
        }
        out
    }
}
