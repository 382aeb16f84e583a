//! Deterministic reports (JSON and text) and golden-file comparison with
//! exact scalar equality.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::check::Check;
use crate::error::{Error, Result};
use crate::scalar::CycScalar;

pub const TOOL: &str = "qpbkit";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub suite: String,
    pub name: String,
    pub anchor: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(default)]
    pub values: BTreeMap<String, String>,
}

impl CheckRecord {
    pub fn from_check(suite: &str, c: Check) -> Self {
        CheckRecord {
            suite: suite.to_string(),
            name: c.name,
            anchor: c.anchor,
            status: if c.outcome.is_ok() { Status::Pass } else { Status::Fail },
            witness: c.outcome.err(),
            values: c.values.into_iter().collect(),
        }
    }

    fn key(&self) -> (&str, &str, &str) {
        (&self.suite, &self.anchor, &self.name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub scenario: String,
    pub conductor: u32,
    pub input_digest: String,
    pub suite: String,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn new(scenario: &str, conductor: u32, input_digest: &str, suite: &str, checks: Vec<CheckRecord>) -> Self {
        let passed = checks.iter().filter(|c| c.status == Status::Pass).count();
        Report {
            tool: TOOL.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            scenario: scenario.to_string(),
            conductor,
            input_digest: input_digest.to_string(),
            suite: suite.to_string(),
            summary: Summary { total: checks.len(), passed, failed: checks.len() - passed },
            checks,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Report> {
        serde_json::from_str(text).map_err(|e| Error::parse(format!("line {}, column {}", e.line(), e.column()), e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} {} | scenario {} | suite {} | conductor {}\ninput sha256 {}\n",
            self.tool, self.version, self.scenario, self.suite, self.conductor, self.input_digest
        );
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
            };
            out.push_str(&format!("{tag} [{}] {} ({})\n", c.suite, c.name, c.anchor));
            if let Some(w) = &c.witness {
                out.push_str(&format!("     witness: {w}\n"));
            }
            for (k, v) in &c.values {
                out.push_str(&format!("     {k} = {v}\n"));
            }
        }
        out.push_str(&format!(
            "{} checks: {} passed, {} failed\n",
            self.summary.total, self.summary.passed, self.summary.failed
        ));
        out
    }
}

/// One field on which a report and its golden file disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Difference {
    pub path: String,
    pub expected: String,
    pub actual: String,
}

/// A bracketed value: either a leaf token or a list of values.
#[derive(Debug)]
enum Shape<'a> {
    Leaf(&'a str),
    List(Vec<Shape<'a>>),
}

fn shape(text: &str) -> Option<Shape<'_>> {
    let t = text.trim();
    if !t.starts_with('[') {
        return (!t.contains(['[', ']'])).then_some(Shape::Leaf(t));
    }
    let inner = t.strip_prefix('[')?.strip_suffix(']')?;
    if inner.trim().is_empty() {
        return Some(Shape::List(Vec::new()));
    }
    let mut items = Vec::new();
    let (mut depth, mut start) = (0i32, 0usize);
    for (i, ch) in inner.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => {
                depth -= 1;
                if depth < 0 {
                    return None;
                }
            }
            ',' if depth == 0 => {
                items.push(shape(&inner[start..i])?);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return None;
    }
    items.push(shape(&inner[start..])?);
    Some(Shape::List(items))
}

fn shapes_equal(a: &Shape, b: &Shape, conductor: u32) -> bool {
    match (a, b) {
        (Shape::Leaf(x), Shape::Leaf(y)) => match (CycScalar::parse(x, conductor), CycScalar::parse(y, conductor)) {
            (Ok(p), Ok(q)) => p == q,
            _ => x == y,
        },
        (Shape::List(xs), Shape::List(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| shapes_equal(x, y, conductor))
        }
        _ => false,
    }
}

/// Equality of recorded values: scalars and (nested) matrices of scalars are
/// compared in the field, anything else as text.
pub fn values_equal(a: &str, b: &str, conductor: u32) -> bool {
    if a == b {
        return true;
    }
    match (shape(a), shape(b)) {
        (Some(x), Some(y)) => shapes_equal(&x, &y, conductor),
        _ => false,
    }
}

fn push_if(diffs: &mut Vec<Difference>, path: String, expected: &str, actual: &str, equal: bool) {
    if !equal {
        diffs.push(Difference { path, expected: expected.to_string(), actual: actual.to_string() });
    }
}

fn opt(s: &Option<String>) -> &str {
    s.as_deref().unwrap_or("")
}

fn status_str(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
    }
}

/// Field-by-field comparison of `actual` against `golden`. Check order is
/// canonicalized by (suite, anchor, name); the tool version is not compared.
pub fn diff_golden(actual: &Report, golden: &Report) -> Vec<Difference> {
    let mut diffs = Vec::new();
    let n = golden.conductor.max(actual.conductor);
    push_if(&mut diffs, "tool".into(), &golden.tool, &actual.tool, golden.tool == actual.tool);
    push_if(&mut diffs, "scenario".into(), &golden.scenario, &actual.scenario, golden.scenario == actual.scenario);
    push_if(
        &mut diffs,
        "conductor".into(),
        &golden.conductor.to_string(),
        &actual.conductor.to_string(),
        golden.conductor == actual.conductor,
    );
    push_if(
        &mut diffs,
        "input_digest".into(),
        &golden.input_digest,
        &actual.input_digest,
        golden.input_digest == actual.input_digest,
    );
    push_if(&mut diffs, "suite".into(), &golden.suite, &actual.suite, golden.suite == actual.suite);

    let group = |r: &Report| {
        let mut m: BTreeMap<(String, String, String), Vec<CheckRecord>> = BTreeMap::new();
        for c in &r.checks {
            let (s, a, nm) = c.key();
            m.entry((s.to_string(), a.to_string(), nm.to_string())).or_default().push(c.clone());
        }
        m
    };
    let (ga, gg) = (group(actual), group(golden));
    let keys: std::collections::BTreeSet<_> = ga.keys().chain(gg.keys()).cloned().collect();
    let empty = Vec::new();
    for key in keys {
        let (xs, ys) = (ga.get(&key).unwrap_or(&empty), gg.get(&key).unwrap_or(&empty));
        for i in 0..xs.len().max(ys.len()) {
            let base = format!("checks[{}/{}/{}#{}]", key.0, key.1, key.2, i);
            match (xs.get(i), ys.get(i)) {
                (Some(a), Some(g)) => {
                    push_if(&mut diffs, format!("{base}.status"), status_str(g.status), status_str(a.status), g.status == a.status);
                    push_if(&mut diffs, format!("{base}.witness"), opt(&g.witness), opt(&a.witness), g.witness == a.witness);
                    let vk: std::collections::BTreeSet<&String> = a.values.keys().chain(g.values.keys()).collect();
                    for k in vk {
                        let (av, gv) = (a.values.get(k), g.values.get(k));
                        let eq = match (av, gv) {
                            (Some(x), Some(y)) => values_equal(x, y, n),
                            _ => false,
                        };
                        push_if(
                            &mut diffs,
                            format!("{base}.values.{k}"),
                            gv.map_or("<absent>", String::as_str),
                            av.map_or("<absent>", String::as_str),
                            eq,
                        );
                    }
                }
                (None, Some(g)) => push_if(&mut diffs, base, status_str(g.status), "<absent>", false),
                (Some(a), None) => push_if(&mut diffs, base, "<absent>", status_str(a.status), false),
                (None, None) => {}
            }
        }
    }
    diffs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let checks = vec![
            CheckRecord::from_check("assoc", Check::new("frame", "frame/idempotent", Ok(())).with("z", "[[1, 0], [0, 1]]")),
            CheckRecord::from_check("hopf", Check::new("haar", "hopf/haar", Err("no".into()))),
        ];
        Report::new("demo", 4, "abc", "all", checks)
    }

    #[test]
    fn identical_reports_are_equal() {
        let r = sample();
        assert!(diff_golden(&r, &r).is_empty());
        let back = Report::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(r.summary, Summary { total: 2, passed: 1, failed: 1 });
    }

    #[test]
    fn reordered_checks_are_equal() {
        let r = sample();
        let mut g = r.clone();
        g.checks.reverse();
        assert!(diff_golden(&r, &g).is_empty());
    }

    #[test]
    fn scaled_frame_matrix_is_one_difference() {
        let r = sample();
        let mut g = r.clone();
        g.checks[0].values.insert("z".into(), "[[2, 0], [0, 2]]".into());
        let d = diff_golden(&r, &g);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].path, "checks[assoc/frame/idempotent/frame#0].values.z");
    }

    #[test]
    fn scalars_compare_in_the_field() {
        assert!(values_equal("[[2/4, z^2]]", "[[1/2, -1]]", 4));
        assert!(values_equal("1 + z + z^2", "0", 3));
        assert!(!values_equal("[1, 2]", "[1, 2, 3]", 4));
        assert!(values_equal("flat", "flat", 4));
        assert!(!values_equal("flat", "curved", 4));
    }

    #[test]
    fn schema_mismatch_is_a_parse_error() {
        assert!(matches!(Report::from_json("{\"tool\": 1}"), Err(Error::Parse { .. })));
    }
}
