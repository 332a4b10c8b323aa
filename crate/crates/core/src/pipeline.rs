//! From the requirement model to ordering constraints:
//!
//! 1. dependencies between test results (project out requirements, saturate),
//! 2. dependencies between expected results (substitute expectation variables),
//! 3. ordering constraints (minimal definite Horn dependencies).

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::logic::{Clause, ClauseSet, Literal, VarKind, Variable};
use crate::model::{Expectation, OrderingConstraint, Verdict};
use crate::sat;
use crate::{Error, Result};

/// Renders a clause as `body => head`, reading negative literals as the
/// conjunctive body and positive literals as the disjunctive head.
fn render_implication(c: &Clause, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let body: Vec<String> = c.negatives().map(|l| l.var.to_string()).collect();
    let head: Vec<String> = c.positives().map(|l| l.var.to_string()).collect();
    let body = if body.is_empty() { "true".to_string() } else { body.join(" & ") };
    let head = if head.is_empty() { "false".to_string() } else { head.join(" | ") };
    write!(f, "{body} => {head}")
}

/// A clause over test variables only.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TestDependency(Clause);

impl TestDependency {
    pub fn new(c: Clause) -> Option<Self> {
        (!c.is_empty() && c.variables().all(|v| v.kind == VarKind::Test)).then_some(TestDependency(c))
    }

    pub fn clause(&self) -> &Clause {
        &self.0
    }

    pub fn tests(&self) -> BTreeSet<String> {
        self.0.variables().map(|v| v.id.clone()).collect()
    }
}

impl fmt::Display for TestDependency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render_implication(&self.0, f)
    }
}

/// A clause over expected-result variables only.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExpectedDependency(Clause);

impl ExpectedDependency {
    pub fn new(c: Clause) -> Option<Self> {
        (!c.is_empty() && c.variables().all(|v| v.kind == VarKind::Xpctd))
            .then_some(ExpectedDependency(c))
    }

    pub fn clause(&self) -> &Clause {
        &self.0
    }

    pub fn tests(&self) -> BTreeSet<String> {
        self.0.variables().map(|v| v.id.clone()).collect()
    }
}

impl fmt::Display for ExpectedDependency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render_implication(&self.0, f)
    }
}

/// An all-negative expected dependency: the stated expectations for these
/// tests cannot all come true together.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExpectationConflict {
    pub dependency: ExpectedDependency,
    pub tests: BTreeSet<String>,
}

fn collect_dependencies(saturated: ClauseSet) -> Vec<TestDependency> {
    saturated
        .into_iter()
        .map(|c| TestDependency::new(c).expect("projected clauses mention tests only"))
        .collect()
}

/// All minimal dependencies between test results entailed by `R & T & P`.
pub fn step_a_dependencies(r: &ClauseSet, t: &ClauseSet, p: &ClauseSet) -> Result<Vec<TestDependency>> {
    let projected = sat::project_requirements(&ClauseSet::union([r, t, p]));
    if projected.has_empty_clause() {
        return Err(Error::Contradiction);
    }
    Ok(collect_dependencies(sat::saturate(&projected)?))
}

/// Dependencies among the tests not yet executed, given recorded results.
/// Executed tests are projected away after their values are fixed.
pub fn dependencies_given_status(
    r: &ClauseSet,
    t: &ClauseSet,
    p: &ClauseSet,
    s: &ClauseSet,
) -> Result<Vec<TestDependency>> {
    let executed: BTreeSet<Variable> = s.variables();
    let theory = ClauseSet::union([r, t, p, s]);
    let projected = sat::project_out(&theory, |v| v.kind == VarKind::Req || executed.contains(v));
    if projected.has_empty_clause() {
        return Err(Error::InconsistentStatus);
    }
    match sat::saturate(&projected) {
        Err(Error::Contradiction) => Err(Error::InconsistentStatus),
        other => Ok(collect_dependencies(other?)),
    }
}

/// Rewrites each dependency whose tests all carry an expectation into a
/// dependency between expected results. All-negative results are returned
/// as conflicts instead.
pub fn step_b_expected(
    deps: &[TestDependency],
    x: &Expectation,
) -> (Vec<ExpectedDependency>, Vec<ExpectationConflict>) {
    let mut out = BTreeSet::new();
    let mut conflicts = BTreeSet::new();
    for dep in deps {
        let lits: Option<Vec<Literal>> = dep
            .clause()
            .literals()
            .map(|l| {
                let v = x.verdict(&l.var.id)?;
                // success: t -> l, -t -> -l; fail: t -> -l, -t -> l
                let positive = l.positive == matches!(v, Verdict::Success);
                Some(Variable::xpctd(&l.var.id).lit(positive))
            })
            .collect();
        let Some(lits) = lits else { continue };
        let clause = Clause::new(lits).expect("renaming preserves non-tautology");
        let ed = ExpectedDependency::new(clause).expect("non-empty xpctd clause");
        if ed.clause().positives().next().is_none() {
            conflicts.insert(ExpectationConflict { tests: ed.tests(), dependency: ed });
        } else {
            out.insert(ed);
        }
    }
    (out.into_iter().collect(), conflicts.into_iter().collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConflictResolution {
    pub expectation: Expectation,
    /// Every conflict that was resolved, in the order it was handled.
    pub resolved: Vec<ExpectationConflict>,
}

/// Unspecifies the tests of the first remaining conflict and reruns the
/// substitution, until no conflict is left.
pub fn resolve_conflicts(deps: &[TestDependency], x: &Expectation) -> ConflictResolution {
    let mut expectation = x.clone();
    let mut resolved = Vec::new();
    loop {
        let (_, conflicts) = step_b_expected(deps, &expectation);
        let Some(first) = conflicts.into_iter().next() else { break };
        for t in &first.tests {
            expectation.set(t.clone(), None);
        }
        resolved.push(first);
    }
    ConflictResolution { expectation, resolved }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraints {
    pub constraints: Vec<OrderingConstraint>,
    /// Tests whose expected result holds unconditionally.
    pub immediately_redundant: BTreeSet<String>,
}

/// Keeps dependencies with exactly one positive literal, drops those subsumed
/// by another, and turns each survivor `l1 & .. & ln => l` into the
/// constraint `{t1..tn} < t`.
pub fn step_c_constraints(eds: &[ExpectedDependency]) -> Constraints {
    let horn: Vec<&Clause> = eds
        .iter()
        .map(ExpectedDependency::clause)
        .filter(|c| c.is_horn_definite())
        .collect();
    let minimal: Vec<&Clause> = horn
        .iter()
        .filter(|c| !horn.iter().any(|o| o != *c && o.is_subset(c)))
        .copied()
        .collect();

    let mut out = Constraints::default();
    let mut constraints = BTreeSet::new();
    for c in minimal {
        let head = c.positives().next().expect("definite Horn clause").var.id.clone();
        let body: Vec<String> = c.negatives().map(|l| l.var.id.clone()).collect();
        if body.is_empty() {
            out.immediately_redundant.insert(head);
        } else {
            constraints.insert(OrderingConstraint::new(body, head).expect("head not in body"));
        }
    }
    out.constraints = constraints.into_iter().collect();
    out
}
