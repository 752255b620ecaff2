//! Seeded corpora of random maps, property checks over them, and shrinking
//! of counterexamples.

mod generate;
mod pinned;
mod properties;
mod shrink;

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{parse_map, PiecewiseMap};
use crate::rational::{parse_rational, Rational};

pub use generate::{corpus_config, random_map, random_point, GeneratorConfig, SlopePalette};
pub use pinned::{all_pinned, pinned, PINNED};
pub use properties::PROPERTY_NAMES;
pub use shrink::shrink;

/// Extra input a case carries besides its map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Extra {
    None,
    Point(Rational),
    Partners(Vec<PiecewiseMap>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Case {
    pub label: String,
    pub map: PiecewiseMap,
    pub extra: Extra,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail(serde_json::Value),
    Skip(String),
}

/// Result of one case, with tags recording notable but non-failing events.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: Status,
    pub tags: Vec<&'static str>,
}

impl Outcome {
    pub fn pass() -> Self {
        Outcome { status: Status::Pass, tags: Vec::new() }
    }

    pub fn fail(trace: serde_json::Value) -> Self {
        Outcome { status: Status::Fail(trace), tags: Vec::new() }
    }

    pub fn skip(why: impl Into<String>) -> Self {
        Outcome { status: Status::Skip(why.into()), tags: Vec::new() }
    }

    pub fn tagged(mut self, tag: &'static str) -> Self {
        self.tags.push(tag);
        self
    }

    pub fn failed(&self) -> bool {
        matches!(self.status, Status::Fail(_))
    }
}

/// A replayable failure: the map, the extra input, and what went wrong.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bundle {
    pub property: String,
    pub case: String,
    pub map: String,
    pub extra: Vec<String>,
    pub trace: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shrunk: Option<String>,
}

impl Bundle {
    fn new(property: &str, case: &Case, trace: serde_json::Value) -> Self {
        let extra = match &case.extra {
            Extra::None => Vec::new(),
            Extra::Point(y) => vec![y.to_string()],
            Extra::Partners(gs) => gs.iter().map(|g| g.to_text()).collect(),
        };
        Bundle {
            property: property.to_string(),
            case: case.label.clone(),
            map: case.map.to_text(),
            extra,
            trace,
            shrunk: None,
        }
    }

    pub fn to_case(&self) -> Result<Case> {
        let map = parse_map(&self.map)?;
        let extra = match self.extra.as_slice() {
            [] => Extra::None,
            [one] if !one.contains("interval") => Extra::Point(
                parse_rational(one).ok_or_else(|| Error::Invalid(format!("bad point {one}")))?,
            ),
            many => Extra::Partners(many.iter().map(|t| parse_map(t)).collect::<Result<_>>()?),
        };
        Ok(Case {
            label: self.case.clone(),
            map,
            extra,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub name: String,
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
    pub tags: BTreeMap<String, usize>,
    pub counterexamples: Vec<Bundle>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
}

impl PropertyReport {
    pub fn ok(&self) -> bool {
        self.fail == 0
    }

    fn merge(&mut self, case: &Case, o: Outcome, property: &str) {
        match o.status {
            Status::Pass => self.pass += 1,
            Status::Skip(_) => self.skip += 1,
            Status::Fail(trace) => {
                self.fail += 1;
                self.counterexamples.push(Bundle::new(property, case, trace));
            }
        }
        for t in o.tags {
            *self.tags.entry(t.to_string()).or_default() += 1;
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub properties: Vec<PropertyReport>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.properties.iter().all(|p| p.ok())
    }

    pub fn property(&self, name: &str) -> Option<&PropertyReport> {
        self.properties.iter().find(|p| p.name == name)
    }

    pub fn to_json(&self, with_timing: bool) -> String {
        let mut r = self.clone();
        if !with_timing {
            for p in &mut r.properties {
                p.seconds = None;
            }
        }
        serde_json::to_string_pretty(&r).expect("report serializes")
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for p in &self.properties {
            let status = if p.ok() { "PASS" } else { "FAIL" };
            out.push_str(&format!(
                "{status} {:<26} pass={} fail={} skip={}",
                p.name, p.pass, p.fail, p.skip
            ));
            if let Some(s) = p.seconds {
                out.push_str(&format!(" ({s:.2}s)"));
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub generator: GeneratorConfig,
    /// Multiplies every corpus size; 1.0 gives the full sizes.
    pub scale: f64,
    pub shrink: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            generator: GeneratorConfig::default(),
            scale: 1.0,
            shrink: true,
        }
    }
}

/// Runs the named properties (all of them when `which` is empty).
pub fn run_suite(cfg: &SuiteConfig, which: &[&str]) -> Result<SuiteReport> {
    for w in which {
        if !PROPERTY_NAMES.contains(w) {
            return Err(Error::Invalid(format!("unknown property {w}")));
        }
    }
    let mut report = SuiteReport {
        seed: cfg.generator.seed,
        properties: Vec::new(),
    };
    for prop in properties::all() {
        if !which.is_empty() && !which.contains(&prop.name) {
            continue;
        }
        let start = Instant::now();
        let cases = prop.corpus(cfg);
        let outcomes: Vec<Outcome> = cases.par_iter().map(|c| properties::evaluate(prop.check, c)).collect();
        let mut pr = PropertyReport {
            name: prop.name.to_string(),
            ..Default::default()
        };
        for (case, o) in cases.iter().zip(outcomes) {
            pr.merge(case, o, prop.name);
        }
        for (tag, why) in prop.requires {
            if pr.tags.get(*tag).copied().unwrap_or(0) == 0 && !cases.is_empty() {
                pr.fail += 1;
                pr.counterexamples.push(Bundle {
                    property: prop.name.to_string(),
                    case: "corpus".into(),
                    map: String::new(),
                    extra: Vec::new(),
                    trace: serde_json::json!({ "missing": tag, "expected": why }),
                    shrunk: None,
                });
            }
        }
        if cfg.shrink {
            for b in pr.counterexamples.iter_mut().filter(|b| !b.map.is_empty()) {
                if let Ok(s) = shrink(b) {
                    if s.map != b.map {
                        b.shrunk = Some(s.map);
                    }
                }
            }
        }
        pr.seconds = Some(start.elapsed().as_secs_f64());
        report.properties.push(pr);
    }
    Ok(report)
}

/// Re-runs the check a bundle was produced by.
pub fn replay(bundle: &Bundle) -> Result<Outcome> {
    let prop = properties::all()
        .into_iter()
        .find(|p| p.name == bundle.property)
        .ok_or_else(|| Error::Invalid(format!("unknown property {}", bundle.property)))?;
    Ok(properties::evaluate(prop.check, &bundle.to_case()?))
}
