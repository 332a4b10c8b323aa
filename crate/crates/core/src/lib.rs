//! Test plan generation driven by logical dependencies between test results.
//!
//! Requirements, test links and platform levels are encoded as clause sets.
//! Projecting out the requirement variables and saturating yields every
//! minimal dependency between test results. Under a user's expectation of
//! the results, the definite Horn dependencies become ordering constraints:
//! running the sources first with the expected outcomes makes the target's
//! result inferable. The planner keeps a maximum satisfiable set of these
//! constraints and emits a topological order, and [`session::Session`]
//! replans as actual results arrive.

pub mod dimacs;
pub mod encode;
mod error;
pub mod exec;
pub mod logic;
pub mod model;
pub mod pipeline;
pub mod planner;
pub mod project;
pub mod sat;
pub mod session;

pub use error::{Error, Result};
pub use exec::Execution;
pub use logic::{Clause, ClauseSet, Literal, VarKind, Variable};
pub use model::{
    validate, Expectation, OrderingConstraint, Outcome, Requirement, RequirementType, RequirementsSpec,
    SearchMode, TestCase, TestPlan, TestStatus, TestSuite, ValidationReport, Verdict,
};
pub use pipeline::{ExpectationConflict, ExpectedDependency, TestDependency};
pub use planner::{DefaultPolicy, PlanReport, PlannerOptions};
pub use project::{Encoded, ProjectFile};
pub use sat::Redundancy;
pub use session::{Disposition, Session};
