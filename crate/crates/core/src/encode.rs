//! Clause encodings of the requirements model, the test links, the platform
//! ordering, the observed status and the user's expectation.

use crate::logic::{ClauseSet, Variable};
use crate::model::{
    validate_spec, Expectation, RequirementType, RequirementsSpec, TestStatus, TestSuite, Verdict,
    Violation, ValidationReport,
};
use crate::{Error, Result};

use RequirementType::*;

/// Logical dependencies between requirements derived from hierarchy and type.
///
/// Conjunctive rules: a VF parent implies each SF child; among siblings, a TR
/// implies each PC and an EC implies each FC. Disjunctive rules: an FC implies
/// the disjunction of all its TR siblings, an SF the disjunction of all its EC
/// siblings. A disjunctive rule with no matching sibling contributes nothing.
pub fn encode_requirements(spec: &RequirementsSpec) -> Result<ClauseSet> {
    validate_spec(spec).into_result()?;
    let mut cs = ClauseSet::new();
    let req = Variable::req;

    for child in &spec.requirements {
        let Some(parent_id) = &child.parent else { continue };
        let parent = spec.get(parent_id).expect("validated parent");
        if parent.rtype == VF && child.rtype == SF {
            cs.add([req(&parent.id).neg(), req(&child.id).pos()]);
        }
    }

    for r0 in &spec.requirements {
        let Some(parent) = &r0.parent else { continue };
        let siblings: Vec<_> = spec
            .children_of(parent)
            .filter(|s| s.id != r0.id)
            .collect();
        let conjunctive = match r0.rtype {
            TR => Some(PC),
            EC => Some(FC),
            _ => None,
        };
        if let Some(target) = conjunctive {
            for s in siblings.iter().filter(|s| s.rtype == target) {
                cs.add([req(&r0.id).neg(), req(&s.id).pos()]);
            }
        }
        let disjunctive = match r0.rtype {
            FC => Some(TR),
            SF => Some(EC),
            _ => None,
        };
        if let Some(target) = disjunctive {
            let heads: Vec<_> = siblings
                .iter()
                .filter(|s| s.rtype == target)
                .map(|s| req(&s.id).pos())
                .collect();
            if !heads.is_empty() {
                cs.add(std::iter::once(req(&r0.id).neg()).chain(heads));
            }
        }
    }
    Ok(cs)
}

/// Each test is equivalent to the conjunction of its linked requirements.
pub fn encode_test_suite(suite: &TestSuite) -> Result<ClauseSet> {
    let empty: Vec<_> = suite
        .tests
        .iter()
        .filter(|t| t.links.is_empty())
        .map(|t| Violation::EmptyLinks { test: t.id.clone() })
        .collect();
    if !empty.is_empty() {
        return Err(Error::Invalid(ValidationReport { violations: empty }));
    }
    let mut cs = ClauseSet::new();
    for t in &suite.tests {
        let tv = Variable::test(&t.id);
        for r in &t.links {
            cs.add([tv.neg(), Variable::req(r).pos()]);
        }
        cs.add(std::iter::once(tv.pos()).chain(t.links.iter().map(|r| Variable::req(r).neg())));
    }
    Ok(cs)
}

/// Satisfaction on a higher platform implies satisfaction on every lower one.
pub fn encode_platforms(spec: &RequirementsSpec) -> ClauseSet {
    let mut cs = ClauseSet::new();
    for hi in &spec.requirements {
        let (Some(cond), Some(hl)) = (&hi.condition_id, hi.platform_level) else { continue };
        for lo in &spec.requirements {
            if lo.condition_id.as_ref() == Some(cond) && lo.platform_level.is_some_and(|ll| hl > ll) {
                cs.add([Variable::req(&hi.id).neg(), Variable::req(&lo.id).pos()]);
            }
        }
    }
    cs
}

pub fn encode_status(status: &TestStatus) -> ClauseSet {
    let mut cs = ClauseSet::new();
    for t in &status.success {
        cs.add([Variable::test(t).pos()]);
    }
    for t in &status.fail {
        cs.add([Variable::test(t).neg()]);
    }
    cs
}

/// `xpctd(t) <-> t` for expected success, `xpctd(t) <-> -t` for expected failure.
pub fn encode_expectation(x: &Expectation) -> ClauseSet {
    let mut cs = ClauseSet::new();
    for (t, v) in x.specified() {
        let l = Variable::xpctd(t);
        let tv = Variable::test(t);
        let good = matches!(v, Verdict::Success);
        cs.add([l.neg(), tv.lit(good)]);
        cs.add([l.pos(), tv.lit(!good)]);
    }
    cs
}
