//! Brute-force oracles that share no code with the planner beyond the data types.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use planwright_core::{
    Clause, ClauseSet, Expectation, OrderingConstraint, Requirement, RequirementType, RequirementsSpec,
    TestCase, TestSuite, Verdict,
};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../cli/fixtures").join(name)
}

/// Random valid requirements and tests. Ids are `r*` and `t*`, so they never collide.
pub fn random_instance<R: Rng>(rng: &mut R, max_reqs: usize, max_tests: usize) -> (RequirementsSpec, TestSuite) {
    let n_reqs = rng.gen_range(1..=max_reqs);
    let mut reqs: Vec<Requirement> = Vec::new();
    let mut slots = BTreeSet::new();
    for i in 0..n_reqs {
        // Parents drawn from the first few ids are mostly VF so that the
        // parent rule fires; the rest are uniform.
        let rtype = if i < 2 && rng.gen_bool(0.5) {
            RequirementType::VF
        } else {
            *RequirementType::ALL.choose(rng).unwrap()
        };
        let mut r = Requirement::new(format!("r{i}"), rtype);
        // Few distinct parents so sibling rules fire often.
        if i > 0 && rng.gen_bool(0.75) {
            let p = rng.gen_range(0..i.min(2));
            r = r.with_parent(format!("r{p}"));
        }
        if rng.gen_bool(0.25) {
            let cond = format!("c{}", rng.gen_range(0..2));
            let level = rng.gen_range(0..3u32);
            if slots.insert((cond.clone(), level)) {
                r = r.on_platform(cond, level);
            }
        }
        reqs.push(r);
    }
    let n_tests = rng.gen_range(1..=max_tests);
    let tests = (0..n_tests)
        .map(|i| {
            let k = rng.gen_range(1..=n_reqs.min(3));
            let links: Vec<String> = (0..k).map(|_| format!("r{}", rng.gen_range(0..n_reqs))).collect();
            TestCase::new(format!("t{i}"), links)
        })
        .collect();
    (RequirementsSpec::new(reqs), TestSuite::new(tests))
}

pub fn random_expectation<R: Rng>(rng: &mut R, suite: &TestSuite) -> Expectation {
    let mut x = Expectation::default();
    for t in suite.ids() {
        match rng.gen_range(0..3) {
            0 => x.set(t, Some(Verdict::Success)),
            1 => x.set(t, Some(Verdict::Fail)),
            _ => {}
        }
    }
    x
}

/// Whether a requirement assignment obeys every structural and platform rule.
fn admissible(spec: &RequirementsSpec, a: &BTreeMap<&str, bool>) -> bool {
    use RequirementType::*;
    let rs = &spec.requirements;
    let implies = |x: &str, y: &str| !a[x] || a[y];
    for r in rs {
        if let Some(p) = &r.parent {
            let parent = rs.iter().find(|q| &q.id == p).unwrap();
            if parent.rtype == VF && r.rtype == SF && !implies(p, &r.id) {
                return false;
            }
        }
        let siblings: Vec<&Requirement> = match &r.parent {
            Some(p) => rs.iter().filter(|q| q.id != r.id && q.parent.as_ref() == Some(p)).collect(),
            None => vec![],
        };
        for s in &siblings {
            let pair = (r.rtype, s.rtype);
            if (pair == (TR, PC) || pair == (EC, FC)) && !implies(&r.id, &s.id) {
                return false;
            }
        }
        let wanted = match r.rtype {
            FC => Some(TR),
            SF => Some(EC),
            _ => None,
        };
        if let Some(w) = wanted {
            let alts: Vec<&&Requirement> = siblings.iter().filter(|s| s.rtype == w).collect();
            if !alts.is_empty() && a[r.id.as_str()] && !alts.iter().any(|s| a[s.id.as_str()]) {
                return false;
            }
        }
        for o in rs {
            if let (Some(c1), Some(l1), Some(c2), Some(l2)) =
                (&r.condition_id, r.platform_level, &o.condition_id, o.platform_level)
            {
                if c1 == c2 && l1 > l2 && !implies(&r.id, &o.id) {
                    return false;
                }
            }
        }
    }
    true
}

/// Every combination of test results that some admissible requirement
/// assignment produces. Tests are indexed in id order.
pub fn realizable(spec: &RequirementsSpec, suite: &TestSuite) -> (Vec<String>, BTreeSet<Vec<bool>>) {
    let ids: Vec<&str> = spec.requirements.iter().map(|r| r.id.as_str()).collect();
    let tests: Vec<&TestCase> = {
        let mut v: Vec<&TestCase> = suite.tests.iter().collect();
        v.sort_by(|a, b| a.id.cmp(&b.id));
        v
    };
    let mut out = BTreeSet::new();
    for bits in 0u32..(1 << ids.len()) {
        let a: BTreeMap<&str, bool> = ids.iter().enumerate().map(|(i, r)| (*r, bits >> i & 1 == 1)).collect();
        if admissible(spec, &a) {
            out.insert(tests.iter().map(|t| t.links.iter().all(|l| a[l.as_str()])).collect());
        }
    }
    (tests.iter().map(|t| t.id.clone()).collect(), out)
}

/// Truth value of a clause under a named assignment.
pub fn clause_holds(c: &Clause, value: impl Fn(&str) -> bool) -> bool {
    c.literals().any(|l| value(&l.var.id) == l.positive)
}

/// All variables of a clause set, in canonical order.
pub fn variables(cs: &ClauseSet) -> Vec<planwright_core::Variable> {
    let mut v: BTreeSet<planwright_core::Variable> = BTreeSet::new();
    for c in cs {
        for l in c.literals() {
            v.insert(l.var.clone());
        }
    }
    v.into_iter().collect()
}

pub fn eval_set(cs: &ClauseSet, vars: &[planwright_core::Variable], bits: u32) -> bool {
    cs.into_iter().all(|c| {
        c.literals().any(|l| {
            let i = vars.iter().position(|v| v == &l.var).unwrap();
            (bits >> i & 1 == 1) == l.positive
        })
    })
}

/// Truth-table satisfiability.
pub fn brute_sat(cs: &ClauseSet) -> bool {
    let vars = variables(cs);
    (0u32..(1 << vars.len())).any(|b| eval_set(cs, &vars, b))
}

/// Largest number of constraints one permutation of `tests` satisfies.
pub fn brute_max_satisfied(tests: &[String], constraints: &[OrderingConstraint]) -> usize {
    let mut best = 0;
    let mut perm: Vec<String> = tests.to_vec();
    permute(&mut perm, 0, &mut |p| {
        best = best.max(constraints.iter().filter(|c| holds_in(c, p)).count());
    });
    best
}

pub fn holds_in(c: &OrderingConstraint, seq: &[String]) -> bool {
    let pos = |t: &String| seq.iter().position(|s| s == t).unwrap();
    c.sources.iter().all(|s| pos(s) < pos(&c.target))
}

pub fn permute(v: &mut Vec<String>, k: usize, f: &mut impl FnMut(&[String])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}
