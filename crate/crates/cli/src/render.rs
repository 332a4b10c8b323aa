use std::collections::BTreeMap;
use std::fmt::Write as _;

use planwright_core::{Redundancy, Session, TestDependency};

pub fn dependencies(deps: &[TestDependency]) -> String {
    let mut out = String::new();
    if deps.is_empty() {
        out.push_str("no dependencies between test results\n");
    }
    for d in deps {
        let _ = writeln!(out, "{d}");
    }
    out
}

pub fn redundancy(verdicts: &BTreeMap<String, Redundancy>) -> String {
    let width = verdicts.keys().map(String::len).max().unwrap_or(4).max(4);
    let mut out = String::new();
    let _ = writeln!(out, "{:<width$}  verdict", "test");
    for (t, v) in verdicts {
        let v = match v {
            Redundancy::ForcedTrue => "FORCED_TRUE",
            Redundancy::ForcedFalse => "FORCED_FALSE",
            Redundancy::Open => "OPEN",
        };
        let _ = writeln!(out, "{t:<width$}  {v}");
    }
    out
}

/// Plan table followed by dropped constraints and resolved conflicts.
pub fn plan_table(session: &Session) -> String {
    let plan = &session.plan;
    let width = plan.sequence.iter().map(String::len).max().unwrap_or(4).max(4);
    let mut out = String::new();
    let _ = writeln!(out, "{:>3}  {:<width$}  {:<11}  {:<12}  note", "#", "test", "expected", "disposition");
    for (i, t) in plan.sequence.iter().enumerate() {
        let expected = match session.expectation.verdict(t) {
            Some(planwright_core::Verdict::Success) => "success",
            Some(planwright_core::Verdict::Fail) => "fail",
            None => "-",
        };
        let disposition = serde_json::to_value(session.dispositions[t])
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default();
        let mut notes = Vec::new();
        if plan.immediately_redundant.contains(t) {
            notes.push("inferable without running other tests".to_string());
        }
        for c in plan.satisfied.iter().filter(|c| &c.target == t) {
            let sources: Vec<&str> = c.sources.iter().map(String::as_str).collect();
            notes.push(format!("inferable after {}", sources.join(", ")));
        }
        if session.executed.iter().any(|e| &e.test == t && e.mismatch) {
            notes.push("result differs from expectation".to_string());
        }
        let row = format!("{:>3}  {t:<width$}  {expected:<11}  {disposition:<12}  {}", i + 1, notes.join("; "));
        out.push_str(row.trim_end());
        out.push('\n');
    }
    let _ = writeln!(out, "\nsearch: {:?}, {} constraint(s) satisfied", plan.search_mode, plan.satisfied.len());
    if !plan.dropped_constraints.is_empty() {
        out.push_str("dropped constraints:\n");
        for c in &plan.dropped_constraints {
            let _ = writeln!(out, "  {c}");
        }
    }
    if !session.conflicts.is_empty() {
        out.push_str("conflicting expectations (ignored for planning):\n");
        for c in &session.conflicts {
            let tests: Vec<&str> = c.tests.iter().map(String::as_str).collect();
            let _ = writeln!(out, "  {} [{}]", c.dependency, tests.join(", "));
        }
    }
    out
}
