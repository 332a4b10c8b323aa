//! The JSON project file and the clause encodings derived from it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encode;
use crate::logic::ClauseSet;
use crate::model::{
    validate, validate_expectation, validate_status, Expectation, Requirement, RequirementsSpec,
    TestCase, TestStatus, TestSuite, ValidationReport,
};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectFile {
    pub requirements: Vec<Requirement>,
    pub tests: Vec<TestCase>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expectation: Option<Expectation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub status: Option<TestStatus>,
}

#[derive(Debug, Error)]
pub enum ProjectError {
    #[error("malformed project file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("project failed validation:\n{0}")]
    Invalid(ValidationReport),
}

impl ProjectFile {
    /// Parses and validates. Succeeds only for a valid model.
    pub fn parse(text: &str) -> std::result::Result<ProjectFile, ProjectError> {
        let project: ProjectFile = serde_json::from_str(text)?;
        let report = project.validate();
        if report.is_clean() {
            Ok(project)
        } else {
            Err(ProjectError::Invalid(report))
        }
    }

    /// Parses without validating, for reporting violations.
    pub fn parse_unchecked(text: &str) -> std::result::Result<ProjectFile, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn validate(&self) -> ValidationReport {
        let spec = self.spec();
        let suite = self.suite();
        let mut violations = validate(&spec, &suite).violations;
        if let Some(s) = &self.status {
            violations.extend(validate_status(&suite, s).violations);
        }
        if let Some(x) = &self.expectation {
            violations.extend(validate_expectation(&suite, x).violations);
        }
        violations.sort();
        violations.dedup();
        ValidationReport { violations }
    }

    pub fn spec(&self) -> RequirementsSpec {
        RequirementsSpec::new(self.requirements.clone())
    }

    pub fn suite(&self) -> TestSuite {
        TestSuite::new(self.tests.clone())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("project serializes")
    }
}

/// The requirement (R), test-link (T) and platform (P) clause sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Encoded {
    pub requirements: ClauseSet,
    pub tests: ClauseSet,
    pub platforms: ClauseSet,
}

impl Encoded {
    pub fn new(spec: &RequirementsSpec, suite: &TestSuite) -> Result<Encoded> {
        validate(spec, suite).into_result()?;
        Ok(Encoded {
            requirements: encode::encode_requirements(spec)?,
            tests: encode::encode_test_suite(suite)?,
            platforms: encode::encode_platforms(spec),
        })
    }

    pub fn conjunction(&self) -> ClauseSet {
        ClauseSet::union([&self.requirements, &self.tests, &self.platforms])
    }
}
