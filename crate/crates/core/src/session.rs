//! A live test campaign: the current plan, the results recorded so far, and
//! replanning when the expectation changes.
//!
//! Every operation takes `&self` and returns a new [`Session`]; a failed
//! operation leaves the original untouched.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::encode::encode_status;
use crate::logic::ClauseSet;
use crate::model::{validate_expectation, Expectation, OrderingConstraint, Outcome, RequirementsSpec, TestPlan, TestStatus, TestSuite, Verdict};
use crate::pipeline::{self, ExpectationConflict, TestDependency};
use crate::planner::{plan_from_dependencies, PlanReport, PlannerOptions};
use crate::project::{Encoded, ProjectFile};
use crate::sat::{self, Redundancy};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Disposition {
    Pending,
    ExecutedPass,
    ExecutedFail,
    Droppable,
    Dropped,
}

impl Disposition {
    pub fn is_executed(self) -> bool {
        matches!(self, Disposition::ExecutedPass | Disposition::ExecutedFail)
    }

    /// Still to be scheduled.
    pub fn is_open(self) -> bool {
        matches!(self, Disposition::Pending | Disposition::Droppable)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutedResult {
    pub test: String,
    pub outcome: Outcome,
    /// The outcome differs from the expectation in force when it was recorded
    /// (re-evaluated on replan).
    pub mismatch: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Session {
    pub spec: RequirementsSpec,
    pub suite: TestSuite,
    pub options: PlannerOptions,
    /// The expectation as stated by the user.
    pub expectation: Expectation,
    /// Revisions staged for the next replan; `None` unspecifies a test.
    #[serde(default)]
    pub staged: BTreeMap<String, Option<Verdict>>,
    /// Executed prefix followed by the planned order of the remaining tests.
    pub plan: TestPlan,
    /// The expectation the current plan was built with, after conflicts were resolved.
    pub effective_expectation: Expectation,
    pub conflicts: Vec<ExpectationConflict>,
    pub executed: Vec<ExecutedResult>,
    pub dispositions: BTreeMap<String, Disposition>,
    /// Inferred verdicts of droppable and dropped tests.
    pub inferred: BTreeMap<String, Redundancy>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplanDiff {
    pub moved: Vec<String>,
    pub newly_droppable: Vec<String>,
    pub dropped_constraints: Vec<OrderingConstraint>,
}

impl Session {
    pub fn new(
        spec: RequirementsSpec,
        suite: TestSuite,
        expectation: Expectation,
        options: PlannerOptions,
    ) -> Result<Session> {
        // Validates the model.
        Encoded::new(&spec, &suite)?;
        let dispositions = suite.ids().into_iter().map(|t| (t, Disposition::Pending)).collect();
        let skeleton = Session {
            plan: TestPlan {
                sequence: suite.ids().into_iter().collect(),
                satisfied: vec![],
                dropped_constraints: vec![],
                immediately_redundant: BTreeSet::new(),
                search_mode: crate::model::SearchMode::Exact,
            },
            spec,
            suite,
            options,
            expectation: expectation.clone(),
            staged: BTreeMap::new(),
            effective_expectation: Expectation::new(),
            conflicts: vec![],
            executed: vec![],
            dispositions,
            inferred: BTreeMap::new(),
        };
        Ok(skeleton.replan(expectation)?.0)
    }

    /// Starts a session from a project; an embedded status is recorded in
    /// id order before the first plan is made.
    pub fn from_project(project: &ProjectFile, expectation: Expectation, options: PlannerOptions) -> Result<Session> {
        let mut session = Session::new(project.spec(), project.suite(), expectation.clone(), options)?;
        if let Some(status) = &project.status {
            let recorded: BTreeMap<&String, Outcome> = status
                .success
                .iter()
                .map(|t| (t, Outcome::Pass))
                .chain(status.fail.iter().map(|t| (t, Outcome::Fail)))
                .collect();
            for (t, o) in recorded {
                session = session.record_result(t, o)?;
            }
            session = session.replan(expectation)?.0;
        }
        Ok(session)
    }

    pub fn encoded(&self) -> Result<Encoded> {
        Encoded::new(&self.spec, &self.suite)
    }

    pub fn status(&self) -> TestStatus {
        let mut s = TestStatus::default();
        for e in &self.executed {
            s.record(&e.test, e.outcome);
        }
        s
    }

    pub fn disposition(&self, test: &str) -> Result<Disposition> {
        self.dispositions
            .get(test)
            .copied()
            .ok_or_else(|| Error::UnknownTest(test.to_string()))
    }

    /// Tests not yet executed or dropped, in plan order.
    pub fn remaining(&self) -> Vec<&String> {
        self.plan
            .sequence
            .iter()
            .filter(|t| self.dispositions[*t].is_open())
            .collect()
    }

    /// The first remaining test in plan order.
    pub fn next_test(&self) -> Option<&String> {
        self.remaining().into_iter().next()
    }

    fn theory(&self, status: &TestStatus) -> Result<ClauseSet> {
        let e = self.encoded()?;
        Ok(ClauseSet::union([&e.conjunction(), &encode_status(status)]))
    }

    /// Recomputes droppable tests under `status`; errors if inconsistent.
    fn refresh_dispositions(&mut self, status: &TestStatus) -> Result<BTreeSet<String>> {
        let verdicts = sat::redundant_tests_with(&self.theory(status)?, &self.suite, Default::default())?;
        let mut newly = BTreeSet::new();
        for (t, v) in verdicts {
            let d = self.dispositions.get_mut(&t).expect("suite test");
            if d.is_open() || *d == Disposition::Dropped {
                if v.is_forced() {
                    self.inferred.insert(t.clone(), v);
                } else {
                    self.inferred.remove(&t);
                }
            }
            if d.is_open() {
                let next = if v.is_forced() { Disposition::Droppable } else { Disposition::Pending };
                if next == Disposition::Droppable && *d != Disposition::Droppable {
                    newly.insert(t.clone());
                }
                *d = next;
            }
        }
        Ok(newly)
    }

    /// Records an actual result and marks newly inferable tests droppable.
    pub fn record_result(&self, test: &str, outcome: Outcome) -> Result<Session> {
        match self.disposition(test)? {
            d if d.is_executed() => return Err(Error::AlreadyExecuted(test.to_string())),
            Disposition::Dropped => return Err(Error::AlreadyExecuted(test.to_string())),
            _ => {}
        }
        let mut next = self.clone();
        let mut status = self.status();
        status.record(test, outcome);
        next.dispositions.insert(
            test.to_string(),
            match outcome {
                Outcome::Pass => Disposition::ExecutedPass,
                Outcome::Fail => Disposition::ExecutedFail,
            },
        );
        next.inferred.remove(test);
        next.refresh_dispositions(&status)?;
        let mismatch = self.expectation.verdict(test).is_some_and(|v| !v.matches(outcome));
        next.executed.push(ExecutedResult { test: test.to_string(), outcome, mismatch });

        // Keep the executed prefix in recording order.
        let executed: Vec<String> = next.executed.iter().map(|e| e.test.clone()).collect();
        let rest = self.plan.sequence.iter().filter(|t| !executed.contains(t)).cloned();
        next.plan.sequence = executed.iter().cloned().chain(rest).collect();
        Ok(next)
    }

    /// Marks a droppable test as dropped without executing it.
    pub fn drop_test(&self, test: &str) -> Result<Session> {
        match self.disposition(test)? {
            Disposition::Droppable => {}
            d if d.is_executed() => return Err(Error::AlreadyExecuted(test.to_string())),
            _ => return Err(Error::NotDroppable(test.to_string())),
        }
        let mut next = self.clone();
        next.dispositions.insert(test.to_string(), Disposition::Dropped);
        Ok(next)
    }

    pub fn stage_expectation(&self, test: &str, verdict: Option<Verdict>) -> Result<Session> {
        self.disposition(test)?;
        let mut next = self.clone();
        next.staged.insert(test.to_string(), verdict);
        Ok(next)
    }

    /// The current expectation with staged revisions applied.
    pub fn staged_expectation(&self) -> Expectation {
        let mut x = self.expectation.clone();
        for (t, v) in &self.staged {
            x.set(t.clone(), *v);
        }
        x
    }

    /// The current expectation with every executed test expected to repeat
    /// its recorded outcome.
    pub fn expectation_with_history(&self) -> Expectation {
        let mut x = self.expectation.clone();
        for e in &self.executed {
            x.set(e.test.clone(), Some(e.outcome.into()));
        }
        x
    }

    /// Dependencies between the remaining tests given the recorded results.
    pub fn dependencies(&self) -> Result<Vec<TestDependency>> {
        let e = self.encoded()?;
        let status = encode_status(&self.status());
        pipeline::dependencies_given_status(&e.requirements, &e.tests, &e.platforms, &status)
    }

    /// Plans the remaining tests under `expectation` without changing anything.
    pub fn preview(&self, expectation: &Expectation) -> Result<PlanReport> {
        validate_expectation(&self.suite, expectation).into_result()?;
        let open: BTreeSet<String> = self
            .dispositions
            .iter()
            .filter(|(_, d)| d.is_open())
            .map(|(t, _)| t.clone())
            .collect();
        plan_from_dependencies(self.dependencies()?, &open, expectation, &self.options)
    }

    /// Replaces the expectation and re-plans the remaining tests. Executed
    /// and dropped tests keep their place and disposition. Clears staged
    /// revisions.
    pub fn replan(&self, revised: Expectation) -> Result<(Session, ReplanDiff)> {
        let report = self.preview(&revised)?;
        let mut next = self.clone();
        next.staged.clear();
        let status = self.status();
        next.refresh_dispositions(&status)?;

        let executed = self.executed.iter().map(|e| e.test.clone());
        let dropped = self
            .dispositions
            .iter()
            .filter(|(_, d)| **d == Disposition::Dropped)
            .map(|(t, _)| t.clone());
        let mut plan = report.plan;
        plan.sequence = executed.chain(plan.sequence).chain(dropped).collect();

        for e in &mut next.executed {
            e.mismatch = revised.verdict(&e.test).is_some_and(|v| !v.matches(e.outcome));
        }
        let was_droppable = |s: &Session, t: &str| {
            s.dispositions.get(t) == Some(&Disposition::Droppable) || s.plan.immediately_redundant.contains(t)
        };
        let old_pos: BTreeMap<&String, usize> =
            self.plan.sequence.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let moved = plan
            .sequence
            .iter()
            .enumerate()
            .filter(|(i, t)| old_pos.get(t) != Some(i))
            .map(|(_, t)| t.clone())
            .collect();

        next.expectation = revised;
        next.effective_expectation = report.expectation;
        next.conflicts = report.conflicts;
        next.plan = plan;
        let newly_droppable = next
            .suite
            .ids()
            .into_iter()
            .filter(|t| was_droppable(&next, t) && !was_droppable(self, t))
            .collect();
        let diff = ReplanDiff {
            moved,
            newly_droppable,
            dropped_constraints: next.plan.dropped_constraints.clone(),
        };
        Ok((next, diff))
    }

    /// Replans with the staged revisions.
    pub fn replan_staged(&self) -> Result<(Session, ReplanDiff)> {
        self.replan(self.staged_expectation())
    }
}
