//! Domain types: requirements, tests, statuses, expectations and plans.
//!
//! Values are plain data. [`validate`] checks the structural invariants and
//! reports every violation it finds instead of stopping at the first one.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RequirementType {
    /// Vehicle function.
    VF,
    /// Sub function.
    SF,
    /// End condition.
    EC,
    /// Function contribution.
    FC,
    /// Trigger.
    TR,
    /// Pre condition.
    PC,
}

impl RequirementType {
    pub const ALL: [RequirementType; 6] = [
        RequirementType::VF,
        RequirementType::SF,
        RequirementType::EC,
        RequirementType::FC,
        RequirementType::TR,
        RequirementType::PC,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Requirement {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
    #[serde(rename = "type")]
    pub rtype: RequirementType,
    /// Groups requirements that express the same condition on different platforms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition_id: Option<String>,
    /// Larger is a higher platform (vehicle > HiL > SiL).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub platform_level: Option<u32>,
}

impl Requirement {
    pub fn new(id: impl Into<String>, rtype: RequirementType) -> Self {
        Requirement {
            id: id.into(),
            parent: None,
            rtype,
            condition_id: None,
            platform_level: None,
        }
    }

    pub fn with_parent(mut self, parent: impl Into<String>) -> Self {
        self.parent = Some(parent.into());
        self
    }

    pub fn on_platform(mut self, condition: impl Into<String>, level: u32) -> Self {
        self.condition_id = Some(condition.into());
        self.platform_level = Some(level);
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RequirementsSpec {
    pub requirements: Vec<Requirement>,
}

impl RequirementsSpec {
    pub fn new(requirements: Vec<Requirement>) -> Self {
        RequirementsSpec { requirements }
    }

    pub fn get(&self, id: &str) -> Option<&Requirement> {
        self.requirements.iter().find(|r| r.id == id)
    }

    pub fn ids(&self) -> BTreeSet<&str> {
        self.requirements.iter().map(|r| r.id.as_str()).collect()
    }

    /// Requirements sharing the given parent, in id order.
    pub fn children_of<'a>(&'a self, parent: &'a str) -> impl Iterator<Item = &'a Requirement> {
        self.requirements
            .iter()
            .filter(move |r| r.parent.as_deref() == Some(parent))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestCase {
    pub id: String,
    pub links: BTreeSet<String>,
}

impl TestCase {
    pub fn new<I, S>(id: impl Into<String>, links: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        TestCase {
            id: id.into(),
            links: links.into_iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TestSuite {
    pub tests: Vec<TestCase>,
}

impl TestSuite {
    pub fn new(tests: Vec<TestCase>) -> Self {
        TestSuite { tests }
    }

    pub fn get(&self, id: &str) -> Option<&TestCase> {
        self.tests.iter().find(|t| t.id == id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.get(id).is_some()
    }

    /// Test ids in canonical (sorted) order.
    pub fn ids(&self) -> BTreeSet<String> {
        self.tests.iter().map(|t| t.id.clone()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    #[serde(alias = "success")]
    Pass,
    Fail,
}

impl Outcome {
    pub fn as_bool(self) -> bool {
        matches!(self, Outcome::Pass)
    }
}

/// The test status: results observed so far. Tests in neither set have no result.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestStatus {
    #[serde(default)]
    pub success: BTreeSet<String>,
    #[serde(default)]
    pub fail: BTreeSet<String>,
}

impl TestStatus {
    pub fn is_empty(&self) -> bool {
        self.success.is_empty() && self.fail.is_empty()
    }

    pub fn record(&mut self, test: &str, outcome: Outcome) {
        match outcome {
            Outcome::Pass => self.success.insert(test.to_string()),
            Outcome::Fail => self.fail.insert(test.to_string()),
        };
    }

    pub fn outcome(&self, test: &str) -> Option<Outcome> {
        if self.success.contains(test) {
            Some(Outcome::Pass)
        } else if self.fail.contains(test) {
            Some(Outcome::Fail)
        } else {
            None
        }
    }

    pub fn executed(&self) -> impl Iterator<Item = &String> {
        self.success.iter().chain(self.fail.iter())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Success,
    Fail,
}

impl Verdict {
    pub fn as_bool(self) -> bool {
        matches!(self, Verdict::Success)
    }

    pub fn matches(self, outcome: Outcome) -> bool {
        self.as_bool() == outcome.as_bool()
    }
}

impl From<Outcome> for Verdict {
    fn from(o: Outcome) -> Self {
        match o {
            Outcome::Pass => Verdict::Success,
            Outcome::Fail => Verdict::Fail,
        }
    }
}

/// Expected result per test. Tests absent from the map are unspecified.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Expectation(pub BTreeMap<String, Verdict>);

impl Expectation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn uniform<'a, I: IntoIterator<Item = &'a str>>(tests: I, verdict: Verdict) -> Self {
        Expectation(tests.into_iter().map(|t| (t.to_string(), verdict)).collect())
    }

    pub fn verdict(&self, test: &str) -> Option<Verdict> {
        self.0.get(test).copied()
    }

    pub fn set(&mut self, test: impl Into<String>, verdict: Option<Verdict>) {
        let test = test.into();
        match verdict {
            Some(v) => {
                self.0.insert(test, v);
            }
            None => {
                self.0.remove(&test);
            }
        }
    }

    pub fn with(mut self, test: impl Into<String>, verdict: Verdict) -> Self {
        self.0.insert(test.into(), verdict);
        self
    }

    pub fn specified(&self) -> impl Iterator<Item = (&String, &Verdict)> {
        self.0.iter()
    }

    pub fn is_specified(&self, test: &str) -> bool {
        self.0.contains_key(test)
    }

    /// Restricts the expectation to the given tests.
    pub fn restricted_to(&self, tests: &BTreeSet<String>) -> Expectation {
        Expectation(
            self.0
                .iter()
                .filter(|(t, _)| tests.contains(*t))
                .map(|(t, v)| (t.clone(), *v))
                .collect(),
        )
    }
}

/// Hyperedge precedence: every source runs before the target.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OrderingConstraint {
    pub sources: BTreeSet<String>,
    pub target: String,
}

impl OrderingConstraint {
    /// Returns `None` when the sources are empty or contain the target.
    pub fn new<I, S>(sources: I, target: impl Into<String>) -> Option<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let sources: BTreeSet<String> = sources.into_iter().map(Into::into).collect();
        let target = target.into();
        if sources.is_empty() || sources.contains(&target) {
            return None;
        }
        Some(OrderingConstraint { sources, target })
    }

    /// True when every source precedes the target in `sequence`.
    pub fn satisfied_by(&self, sequence: &[String]) -> bool {
        let pos = |id: &str| sequence.iter().position(|s| s == id);
        let Some(target) = pos(&self.target) else {
            return false;
        };
        self.sources
            .iter()
            .all(|s| matches!(pos(s), Some(p) if p < target))
    }
}

impl fmt::Display for OrderingConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .sources
            .iter()
            .map(|s| format!("{s} < {}", self.target))
            .collect();
        f.write_str(&parts.join(" & "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Exact,
    Heuristic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestPlan {
    pub sequence: Vec<String>,
    pub satisfied: Vec<OrderingConstraint>,
    pub dropped_constraints: Vec<OrderingConstraint>,
    pub immediately_redundant: BTreeSet<String>,
    pub search_mode: SearchMode,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Violation {
    DuplicateRequirement { id: String },
    DanglingParent { id: String, parent: String },
    ParentCycle { id: String },
    PartialPlatform { id: String },
    DuplicatePlatformSlot { id: String, condition_id: String, platform_level: u32 },
    DuplicateTest { id: String },
    IdCollision { id: String },
    EmptyLinks { test: String },
    DanglingLink { test: String, requirement: String },
    UnknownStatusTest { test: String },
    StatusOverlap { test: String },
    UnknownExpectationTest { test: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateRequirement { id } => write!(f, "duplicate requirement id '{id}'"),
            Violation::DanglingParent { id, parent } => {
                write!(f, "requirement '{id}' has unknown parent '{parent}'")
            }
            Violation::ParentCycle { id } => write!(f, "requirement '{id}' lies on a parent cycle"),
            Violation::PartialPlatform { id } => write!(
                f,
                "requirement '{id}' must set both condition_id and platform_level or neither"
            ),
            Violation::DuplicatePlatformSlot {
                id,
                condition_id,
                platform_level,
            } => write!(
                f,
                "requirement '{id}' reuses platform slot ({condition_id}, {platform_level})"
            ),
            Violation::DuplicateTest { id } => write!(f, "duplicate test id '{id}'"),
            Violation::IdCollision { id } => {
                write!(f, "id '{id}' is used by both a requirement and a test")
            }
            Violation::EmptyLinks { test } => write!(f, "test '{test}' links no requirement"),
            Violation::DanglingLink { test, requirement } => {
                write!(f, "test '{test}' links unknown requirement '{requirement}'")
            }
            Violation::UnknownStatusTest { test } => {
                write!(f, "status mentions unknown test '{test}'")
            }
            Violation::StatusOverlap { test } => {
                write!(f, "test '{test}' is recorded as both success and fail")
            }
            Violation::UnknownExpectationTest { test } => {
                write!(f, "expectation mentions unknown test '{test}'")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }

    fn merge(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }

    fn finish(mut self) -> Self {
        self.violations.sort();
        self.violations.dedup();
        self
    }

    pub fn into_result(self) -> crate::Result<()> {
        if self.is_clean() {
            Ok(())
        } else {
            Err(crate::Error::Invalid(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

/// Checks the requirement-level invariants only.
pub fn validate_spec(spec: &RequirementsSpec) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut seen = BTreeSet::new();
    for r in &spec.requirements {
        if !seen.insert(r.id.as_str()) {
            report.push(Violation::DuplicateRequirement { id: r.id.clone() });
        }
    }

    let parent_of: BTreeMap<&str, &str> = spec
        .requirements
        .iter()
        .filter_map(|r| r.parent.as_deref().map(|p| (r.id.as_str(), p)))
        .collect();
    for r in &spec.requirements {
        if let Some(p) = &r.parent {
            if !seen.contains(p.as_str()) {
                report.push(Violation::DanglingParent {
                    id: r.id.clone(),
                    parent: p.clone(),
                });
            }
        }
        // Walk up the parent chain; revisiting the start means a cycle.
        let mut cur = r.id.as_str();
        let mut steps = 0;
        while let Some(&p) = parent_of.get(cur) {
            if p == r.id {
                report.push(Violation::ParentCycle { id: r.id.clone() });
                break;
            }
            cur = p;
            steps += 1;
            if steps > parent_of.len() {
                break;
            }
        }
    }

    let mut slots = BTreeSet::new();
    for r in &spec.requirements {
        match (&r.condition_id, r.platform_level) {
            (Some(c), Some(l)) => {
                if !slots.insert((c.as_str(), l)) {
                    report.push(Violation::DuplicatePlatformSlot {
                        id: r.id.clone(),
                        condition_id: c.clone(),
                        platform_level: l,
                    });
                }
            }
            (None, None) => {}
            _ => report.push(Violation::PartialPlatform { id: r.id.clone() }),
        }
    }
    report.finish()
}

/// Checks the test-suite invariants against `spec`.
pub fn validate_suite(spec: &RequirementsSpec, suite: &TestSuite) -> ValidationReport {
    let mut report = ValidationReport::default();
    let req_ids = spec.ids();
    let mut seen = BTreeSet::new();
    for t in &suite.tests {
        if !seen.insert(t.id.as_str()) {
            report.push(Violation::DuplicateTest { id: t.id.clone() });
        }
        if req_ids.contains(t.id.as_str()) {
            report.push(Violation::IdCollision { id: t.id.clone() });
        }
        if t.links.is_empty() {
            report.push(Violation::EmptyLinks { test: t.id.clone() });
        }
        for l in &t.links {
            if !req_ids.contains(l.as_str()) {
                report.push(Violation::DanglingLink {
                    test: t.id.clone(),
                    requirement: l.clone(),
                });
            }
        }
    }
    report.finish()
}

/// Validates requirements together with the test suite linking to them.
pub fn validate(spec: &RequirementsSpec, suite: &TestSuite) -> ValidationReport {
    let mut report = validate_spec(spec);
    report.merge(validate_suite(spec, suite));
    report.finish()
}

pub fn validate_status(suite: &TestSuite, status: &TestStatus) -> ValidationReport {
    let mut report = ValidationReport::default();
    for t in status.executed() {
        if !suite.contains(t) {
            report.push(Violation::UnknownStatusTest { test: t.clone() });
        }
    }
    for t in status.success.intersection(&status.fail) {
        report.push(Violation::StatusOverlap { test: t.clone() });
    }
    report.finish()
}

pub fn validate_expectation(suite: &TestSuite, expectation: &Expectation) -> ValidationReport {
    let mut report = ValidationReport::default();
    for (t, _) in expectation.specified() {
        if !suite.contains(t) {
            report.push(Violation::UnknownExpectationTest { test: t.clone() });
        }
    }
    report.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use RequirementType::*;

    #[test]
    fn empty_model_is_clean() {
        assert!(validate(&RequirementsSpec::default(), &TestSuite::default()).is_clean());
    }

    #[test]
    fn self_parent_is_a_cycle() {
        let spec = RequirementsSpec::new(vec![Requirement::new("r0", SF).with_parent("r0")]);
        let report = validate(&spec, &TestSuite::default());
        assert_eq!(
            report.violations,
            vec![Violation::ParentCycle { id: "r0".into() }]
        );
    }

    #[test]
    fn longer_parent_cycle_flags_every_member() {
        let spec = RequirementsSpec::new(vec![
            Requirement::new("a", SF).with_parent("b"),
            Requirement::new("b", SF).with_parent("c"),
            Requirement::new("c", SF).with_parent("a"),
            Requirement::new("d", SF).with_parent("a"),
        ]);
        let ids: Vec<_> = validate_spec(&spec)
            .violations
            .into_iter()
            .map(|v| match v {
                Violation::ParentCycle { id } => id,
                other => panic!("unexpected {other:?}"),
            })
            .collect();
        assert_eq!(ids, vec!["a", "b", "c"]);
    }

    #[test]
    fn dangling_link_names_requirement() {
        let spec = RequirementsSpec::new(vec![Requirement::new("r0", VF)]);
        let suite = TestSuite::new(vec![TestCase::new("t0", ["r0", "r99"])]);
        let report = validate(&spec, &suite);
        assert_eq!(
            report.violations,
            vec![Violation::DanglingLink {
                test: "t0".into(),
                requirement: "r99".into()
            }]
        );
        assert!(report.to_string().contains("r99"));
    }

    #[test]
    fn structural_violations() {
        let mut half = Requirement::new("h", PC);
        half.platform_level = Some(1);
        let spec = RequirementsSpec::new(vec![
            Requirement::new("a", VF),
            Requirement::new("a", SF),
            Requirement::new("b", SF).with_parent("zz"),
            Requirement::new("p1", TR).on_platform("c", 1),
            Requirement::new("p2", TR).on_platform("c", 1),
            half,
        ]);
        let suite = TestSuite::new(vec![
            TestCase::new("a", ["a"]),
            TestCase::new("t", Vec::<String>::new()),
            TestCase::new("t", ["b"]),
        ]);
        let v = validate(&spec, &suite).violations;
        assert!(v.contains(&Violation::DuplicateRequirement { id: "a".into() }));
        assert!(v.contains(&Violation::DanglingParent {
            id: "b".into(),
            parent: "zz".into()
        }));
        assert!(v.contains(&Violation::DuplicatePlatformSlot {
            id: "p2".into(),
            condition_id: "c".into(),
            platform_level: 1
        }));
        assert!(v.contains(&Violation::PartialPlatform { id: "h".into() }));
        assert!(v.contains(&Violation::IdCollision { id: "a".into() }));
        assert!(v.contains(&Violation::EmptyLinks { test: "t".into() }));
        assert!(v.contains(&Violation::DuplicateTest { id: "t".into() }));
    }

    #[test]
    fn status_and_expectation_checks() {
        let suite = TestSuite::new(vec![TestCase::new("t0", ["r"])]);
        let status = TestStatus {
            success: ["t0".to_string(), "tx".to_string()].into(),
            fail: ["t0".to_string()].into(),
        };
        let v = validate_status(&suite, &status).violations;
        assert!(v.contains(&Violation::StatusOverlap { test: "t0".into() }));
        assert!(v.contains(&Violation::UnknownStatusTest { test: "tx".into() }));
        let x = Expectation::new().with("nope", Verdict::Fail);
        assert!(!validate_expectation(&suite, &x).is_clean());
    }

    #[test]
    fn constraint_rejects_degenerate_shapes() {
        assert!(OrderingConstraint::new(Vec::<String>::new(), "t").is_none());
        assert!(OrderingConstraint::new(["t"], "t").is_none());
        let c = OrderingConstraint::new(["a", "b"], "t").unwrap();
        assert_eq!(c.to_string(), "a < t & b < t");
        let seq: Vec<String> = ["a", "b", "t"].iter().map(|s| s.to_string()).collect();
        assert!(c.satisfied_by(&seq));
        let seq: Vec<String> = ["a", "t", "b"].iter().map(|s| s.to_string()).collect();
        assert!(!c.satisfied_by(&seq));
    }

    #[test]
    fn six_requirement_types() {
        assert_eq!(RequirementType::ALL.len(), 6);
        let parsed: RequirementType = serde_json::from_str("\"TR\"").unwrap();
        assert_eq!(parsed, TR);
    }
}
