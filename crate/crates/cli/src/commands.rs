use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use planwright_core::encode::{encode_platforms, encode_requirements, encode_status, encode_test_suite};
use planwright_core::planner::apply_default_expectation;
use planwright_core::{dimacs, sat};
use planwright_core::{ClauseSet, DefaultPolicy, Expectation, Outcome, PlannerOptions, ProjectFile, Session};

use crate::{load_project, read_file, render, write_file, CliError};

/// Source of the expectation used by `plan`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExpectArg {
    Pessimistic,
    Optimistic,
    /// Previous results, read from a JSON object mapping test ids to `pass` or `fail`.
    History(PathBuf),
    /// The expectation embedded in the project file.
    File,
}

impl FromStr for ExpectArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pessimistic" => Ok(ExpectArg::Pessimistic),
            "optimistic" => Ok(ExpectArg::Optimistic),
            "file" => Ok(ExpectArg::File),
            _ => match s.strip_prefix("history=") {
                Some(p) if !p.is_empty() => Ok(ExpectArg::History(PathBuf::from(p))),
                _ => Err(format!(
                    "unknown expectation `{s}`; use pessimistic, optimistic, history=<file> or file"
                )),
            },
        }
    }
}

/// Which clause sets `export-cnf` writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    R,
    T,
    P,
    S,
    Rtps,
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "R" => Ok(Stage::R),
            "T" => Ok(Stage::T),
            "P" => Ok(Stage::P),
            "S" => Ok(Stage::S),
            "RTPS" => Ok(Stage::Rtps),
            _ => Err(format!("unknown stage `{s}`; use R, T, P, S or RTPS")),
        }
    }
}

pub fn check(path: &Path) -> Result<String, CliError> {
    let text = read_file(path)?;
    let project = ProjectFile::parse_unchecked(&text).map_err(|e| CliError::Validation(e.to_string()))?;
    let report = project.validate();
    if report.is_clean() {
        Ok(format!(
            "ok: {} requirement(s), {} test(s)\n",
            project.requirements.len(),
            project.tests.len()
        ))
    } else {
        Err(CliError::Validation(format!(
            "{} violation(s):\n{report}",
            report.violations.len()
        )))
    }
}

pub fn deps(path: &Path) -> Result<String, CliError> {
    let project = load_project(path)?;
    let session = Session::new(project.spec(), project.suite(), Expectation::new(), PlannerOptions::default())?;
    Ok(render::dependencies(&session.dependencies()?))
}

pub fn resolve_expectation(project: &ProjectFile, arg: Option<&ExpectArg>) -> Result<Expectation, CliError> {
    let suite = project.suite();
    let arg = match arg {
        Some(a) => a.clone(),
        None if project.expectation.is_some() => ExpectArg::File,
        None => ExpectArg::Pessimistic,
    };
    Ok(match arg {
        ExpectArg::Pessimistic => apply_default_expectation(&suite, DefaultPolicy::Pessimistic, None)?,
        ExpectArg::Optimistic => apply_default_expectation(&suite, DefaultPolicy::Optimistic, None)?,
        ExpectArg::History(file) => {
            let text = read_file(&file)?;
            let prior: BTreeMap<String, Outcome> = serde_json::from_str(&text)
                .map_err(|e| CliError::Validation(format!("{}: {e}", file.display())))?;
            apply_default_expectation(&suite, DefaultPolicy::History, Some(&prior))?
        }
        ExpectArg::File => project
            .expectation
            .clone()
            .ok_or_else(|| CliError::Validation("project file has no expectation".into()))?,
    })
}

pub fn plan_session(
    path: &Path,
    expect: Option<&ExpectArg>,
    exact_threshold: Option<usize>,
) -> Result<Session, CliError> {
    let project = load_project(path)?;
    let expectation = resolve_expectation(&project, expect)?;
    let mut options = PlannerOptions::default();
    if let Some(n) = exact_threshold {
        options.exact_threshold = n;
    }
    Ok(Session::from_project(&project, expectation, options)?)
}

/// Runs `plan`. The table always goes to stdout; the plan JSON goes to
/// `out`, to stdout alone when `out` is `-`, or after the table otherwise.
pub fn plan(
    path: &Path,
    expect: Option<&ExpectArg>,
    exact_threshold: Option<usize>,
    out: Option<&Path>,
) -> Result<String, CliError> {
    let session = plan_session(path, expect, exact_threshold)?;
    let json = plan_json(&session);
    match out {
        Some(p) if p == Path::new("-") => Ok(json),
        Some(p) => {
            write_file(p, &json)?;
            Ok(render::plan_table(&session))
        }
        None => {
            let mut s = render::plan_table(&session);
            s.push('\n');
            s.push_str(&json);
            Ok(s)
        }
    }
}

pub fn plan_json(session: &Session) -> String {
    let mut json = serde_json::to_string_pretty(&session.plan).expect("plan serializes");
    json.push('\n');
    json
}

pub fn redundant(path: &Path) -> Result<String, CliError> {
    let project = load_project(path)?;
    let spec = project.spec();
    let suite = project.suite();
    let status = project.status.clone().unwrap_or_default();
    let verdicts = sat::redundant_tests(
        &encode_requirements(&spec)?,
        &encode_test_suite(&suite)?,
        &encode_platforms(&spec),
        &encode_status(&status),
        &suite,
    )?;
    Ok(render::redundancy(&verdicts))
}

pub fn export_cnf(path: &Path, stage: Stage, out: Option<&Path>) -> Result<String, CliError> {
    let project = load_project(path)?;
    let spec = project.spec();
    let suite = project.suite();
    let status = project.status.clone().unwrap_or_default();
    let cs = match stage {
        Stage::R => encode_requirements(&spec)?,
        Stage::T => encode_test_suite(&suite)?,
        Stage::P => encode_platforms(&spec),
        Stage::S => encode_status(&status),
        Stage::Rtps => ClauseSet::union([
            &encode_requirements(&spec)?,
            &encode_test_suite(&suite)?,
            &encode_platforms(&spec),
            &encode_status(&status),
        ]),
    };
    let text = dimacs::to_dimacs(&cs);
    match out {
        Some(p) if p != Path::new("-") => {
            write_file(p, &text)?;
            let mut msg = String::new();
            let _ = writeln!(msg, "wrote {} clause(s) to {}", cs.len(), p.display());
            Ok(msg)
        }
        _ => Ok(text),
    }
}
