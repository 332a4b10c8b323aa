//! Propositional reasoning: satisfiability, entailment, resolution,
//! variable elimination, saturation to prime implicates, and the
//! redundancy check for individual tests.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::exec::{self, Execution};
use crate::logic::{Clause, ClauseSet, Literal, VarKind, Variable};
use crate::model::TestSuite;
use crate::{Error, Result};

/// Default cap on clauses derived during one saturation run.
pub const DEFAULT_SATURATION_LIMIT: usize = 100_000;

/// A total assignment over the variables of the solved clause set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Model(pub BTreeMap<Variable, bool>);

impl Model {
    pub fn value(&self, v: &Variable) -> bool {
        self.0.get(v).copied().unwrap_or(false)
    }

    pub fn satisfies(&self, cs: &ClauseSet) -> bool {
        cs.eval(|v| self.value(v))
    }
}

#[derive(Clone, Copy)]
struct Lit {
    var: usize,
    positive: bool,
}

/// Dense form of a clause set. Variable indices follow canonical order, so
/// "lowest index first" is "lowest canonical variable first".
struct Cnf {
    vars: Vec<Variable>,
    clauses: Vec<Vec<Lit>>,
}

impl Cnf {
    fn new(cs: &ClauseSet) -> Cnf {
        let vars: Vec<Variable> = cs.variables().into_iter().collect();
        let index: BTreeMap<&Variable, usize> = vars.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let clauses = cs
            .iter()
            .map(|c| {
                c.literals()
                    .map(|l| Lit { var: index[&l.var], positive: l.positive })
                    .collect()
            })
            .collect();
        Cnf { vars, clauses }
    }
}

enum Propagation {
    Conflict,
    Done,
}

/// Complete backtracking search with unit propagation. Decisions take the
/// lowest unassigned variable and try `false` before `true`.
fn dpll(cnf: &Cnf, assign: &mut [Option<bool>]) -> bool {
    let mut trail = Vec::new();
    if let Propagation::Conflict = propagate(cnf, assign, &mut trail) {
        undo(assign, &trail);
        return false;
    }
    let Some(next) = assign.iter().position(Option::is_none) else {
        return true;
    };
    for value in [false, true] {
        assign[next] = Some(value);
        if dpll(cnf, assign) {
            return true;
        }
        assign[next] = None;
    }
    undo(assign, &trail);
    false
}

fn propagate(cnf: &Cnf, assign: &mut [Option<bool>], trail: &mut Vec<usize>) -> Propagation {
    loop {
        let mut changed = false;
        for clause in &cnf.clauses {
            let mut unassigned = None;
            let mut open = 0;
            let mut satisfied = false;
            for lit in clause {
                match assign[lit.var] {
                    Some(v) if v == lit.positive => {
                        satisfied = true;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        open += 1;
                        unassigned = Some(*lit);
                    }
                }
            }
            if satisfied {
                continue;
            }
            match (open, unassigned) {
                (0, _) => return Propagation::Conflict,
                (1, Some(lit)) => {
                    assign[lit.var] = Some(lit.positive);
                    trail.push(lit.var);
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            return Propagation::Done;
        }
    }
}

fn undo(assign: &mut [Option<bool>], trail: &[usize]) {
    for &v in trail {
        assign[v] = None;
    }
}

/// Returns a satisfying assignment, or `None` when `cs` is unsatisfiable.
pub fn solve(cs: &ClauseSet) -> Option<Model> {
    let cnf = Cnf::new(cs);
    let mut assign = vec![None; cnf.vars.len()];
    if !dpll(&cnf, &mut assign) {
        return None;
    }
    Some(Model(
        cnf.vars
            .into_iter()
            .zip(assign)
            .map(|(v, a)| (v, a.unwrap_or(false)))
            .collect(),
    ))
}

pub fn is_satisfiable(cs: &ClauseSet) -> bool {
    solve(cs).is_some()
}

/// `cs |= lit`, decided as unsatisfiability of `cs` with `-lit` added.
pub fn entails(cs: &ClauseSet, lit: &Literal) -> bool {
    let mut q = cs.clone();
    q.insert(Clause::unit(!lit));
    !is_satisfiable(&q)
}

/// `cs |= clause`: adding the negation of every literal is unsatisfiable.
pub fn entails_clause(cs: &ClauseSet, clause: &Clause) -> bool {
    let mut q = cs.clone();
    for l in clause.literals() {
        q.insert(Clause::unit(!l));
    }
    !is_satisfiable(&q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Redundancy {
    ForcedTrue,
    ForcedFalse,
    Open,
}

impl Redundancy {
    pub fn is_forced(self) -> bool {
        !matches!(self, Redundancy::Open)
    }

    pub fn forced_value(self) -> Option<bool> {
        match self {
            Redundancy::ForcedTrue => Some(true),
            Redundancy::ForcedFalse => Some(false),
            Redundancy::Open => None,
        }
    }
}

/// Redundancy verdicts for every test in `suite` under `R & T & P & S`.
pub fn redundant_tests(
    r: &ClauseSet,
    t: &ClauseSet,
    p: &ClauseSet,
    s: &ClauseSet,
    suite: &TestSuite,
) -> Result<BTreeMap<String, Redundancy>> {
    redundant_tests_with(&ClauseSet::union([r, t, p, s]), suite, Execution::default())
}

/// Like [`redundant_tests`] over a prebuilt conjunction, with explicit execution mode.
pub fn redundant_tests_with(
    theory: &ClauseSet,
    suite: &TestSuite,
    exec: Execution,
) -> Result<BTreeMap<String, Redundancy>> {
    let model = solve(theory).ok_or(Error::InconsistentStatus)?;
    let ids: Vec<String> = suite.ids().into_iter().collect();
    let cnf = Cnf::new(theory);
    // One query per test: the reference model fixes the only value that can
    // be forced, so it suffices to check whether the flipped value is possible.
    let verdicts = exec::map(&ids, exec, |id| {
        let v = Variable::test(id);
        let seen = model.value(&v);
        // A test absent from the theory is unconstrained.
        let Ok(i) = cnf.vars.binary_search(&v) else { return Redundancy::Open };
        let mut assign = vec![None; cnf.vars.len()];
        assign[i] = Some(!seen);
        if dpll(&cnf, &mut assign) {
            Redundancy::Open
        } else if seen {
            Redundancy::ForcedTrue
        } else {
            Redundancy::ForcedFalse
        }
    });
    Ok(ids.into_iter().zip(verdicts).collect())
}

/// Resolvent of `c1` (containing `v`) and `c2` (containing `-v`).
/// `None` when the resolvent is a tautology.
///
/// # Panics
/// When the pivot does not occur with the required polarities.
pub fn resolve(c1: &Clause, c2: &Clause, v: &Variable) -> Option<Clause> {
    let (pos, neg) = (v.pos(), v.neg());
    assert!(
        c1.contains(&pos) && c2.contains(&neg),
        "resolution pivot {v} must occur positively in {c1} and negatively in {c2}"
    );
    Clause::new(c1.without(&pos).literals().chain(c2.without(&neg).literals()).cloned())
}

pub fn subsumes(c1: &Clause, c2: &Clause) -> bool {
    c1.is_subset(c2)
}

/// Existentially quantifies `v` away (one Davis–Putnam elimination step).
/// The result may contain the empty clause when `cs` is unsatisfiable.
pub fn eliminate_variable(cs: &ClauseSet, v: &Variable) -> ClauseSet {
    let (pos, neg) = (v.pos(), v.neg());
    let mut out = ClauseSet::new();
    let mut with_pos = Vec::new();
    let mut with_neg = Vec::new();
    for c in cs {
        if c.contains(&pos) {
            with_pos.push(c);
        } else if c.contains(&neg) {
            with_neg.push(c);
        } else {
            out.insert(c.clone());
        }
    }
    for a in &with_pos {
        for b in &with_neg {
            if let Some(r) = resolve(a, b, v) {
                out.insert(r);
            }
        }
    }
    out.reduce()
}

/// Eliminates every variable selected by `keep_out`, fewest occurrences first
/// (ties in canonical order). Stops early once the empty clause appears.
pub fn project_out(cs: &ClauseSet, keep_out: impl Fn(&Variable) -> bool) -> ClauseSet {
    let mut cur = cs.reduce();
    loop {
        if cur.has_empty_clause() {
            return cur;
        }
        let mut counts: BTreeMap<&Variable, usize> = BTreeMap::new();
        for c in &cur {
            for v in c.variables().filter(|v| keep_out(v)) {
                *counts.entry(v).or_default() += 1;
            }
        }
        let Some(next) = counts
            .iter()
            .min_by(|a, b| a.1.cmp(b.1).then(a.0.cmp(b.0)))
            .map(|(v, _)| (*v).clone())
        else {
            return cur;
        };
        cur = eliminate_variable(&cur, &next);
    }
}

/// Eliminates all requirement variables.
pub fn project_requirements(cs: &ClauseSet) -> ClauseSet {
    project_out(cs, |v| v.kind == VarKind::Req)
}

/// Closes `cs` under resolution with eager subsumption. The result is the
/// set of prime implicates of `cs`.
pub fn saturate(cs: &ClauseSet) -> Result<ClauseSet> {
    saturate_with_limit(cs, DEFAULT_SATURATION_LIMIT)
}

pub fn saturate_with_limit(cs: &ClauseSet, limit: usize) -> Result<ClauseSet> {
    if cs.has_empty_clause() {
        return Err(Error::Contradiction);
    }
    let mut queue: BTreeSet<(usize, Clause)> = cs.iter().map(|c| (c.len(), c.clone())).collect();
    let mut processed: Vec<Clause> = Vec::new();
    let mut derived = 0usize;

    while let Some((_, given)) = queue.pop_first() {
        if processed.iter().any(|p| p.is_subset(&given)) {
            continue;
        }
        processed.retain(|p| !given.is_subset(p));
        for other in &processed {
            if let Some(r) = resolvent(&given, other) {
                if r.is_empty() {
                    return Err(Error::Contradiction);
                }
                if processed.iter().any(|p| p.is_subset(&r)) {
                    continue;
                }
                if queue.insert((r.len(), r)) {
                    derived += 1;
                    if derived > limit {
                        return Err(Error::SaturationLimit { limit });
                    }
                }
            }
        }
        processed.push(given);
    }
    Ok(processed.into_iter().collect())
}

/// The non-tautological resolvent of two clauses; at most one exists.
fn resolvent(a: &Clause, b: &Clause) -> Option<Clause> {
    let mut clash = a.literals().filter(|l| b.contains(&!*l));
    let pivot = clash.next()?;
    if clash.next().is_some() {
        return None;
    }
    if pivot.positive {
        resolve(a, b, &pivot.var)
    } else {
        resolve(b, a, &pivot.var)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{clause, clause_set};
    use crate::model::TestCase;

    fn t(id: &str) -> Literal {
        Variable::test(id).pos()
    }
    fn a(id: &str) -> Literal {
        Variable::req(id).pos()
    }

    fn rain() -> (ClauseSet, ClauseSet, TestSuite) {
        let r = clause_set(&[&[!a("req_sun"), a("req_sensor")]]);
        let suite = TestSuite::new(vec![
            TestCase::new("t_sun", ["req_sun"]),
            TestCase::new("t_sensor", ["req_sensor"]),
        ]);
        let tt = crate::encode::encode_test_suite(&suite).unwrap();
        (r, tt, suite)
    }

    #[test]
    fn satisfiability_basics() {
        assert_eq!(solve(&ClauseSet::new()), Some(Model::default()));
        assert!(!is_satisfiable(&clause_set(&[&[t("t")], &[!t("t")]])));
        let cs = clause_set(&[&[!t("t1"), t("t0")], &[!t("t0")]]);
        let m = solve(&cs).unwrap();
        assert!(!m.value(&Variable::test("t0")));
        assert!(!m.value(&Variable::test("t1")));
        assert!(m.satisfies(&cs));
    }

    #[test]
    fn empty_clause_is_unsatisfiable() {
        let mut cs = ClauseSet::new();
        cs.insert(Clause::empty());
        assert!(!is_satisfiable(&cs));
    }

    #[test]
    fn entailment() {
        assert!(entails(&clause_set(&[&[t("t0")]]), &t("t0")));
        assert!(!entails(&ClauseSet::new(), &t("t0")));
        let (r, tt, _) = rain();
        let mut cs = ClauseSet::union([&r, &tt]);
        cs.add([!t("t_sensor")]);
        assert!(entails(&cs, &!t("t_sun")));
        assert!(entails_clause(&ClauseSet::union([&r, &tt]), &clause(&[t("t_sensor"), !t("t_sun")])));
    }

    #[test]
    fn rain_redundancy() {
        let (r, tt, suite) = rain();
        let p = ClauseSet::new();
        let s = clause_set(&[&[!t("t_sensor")]]);
        let v = redundant_tests(&r, &tt, &p, &s, &suite).unwrap();
        assert_eq!(v["t_sun"], Redundancy::ForcedFalse);
        assert_eq!(v["t_sensor"], Redundancy::ForcedFalse);

        let v = redundant_tests(&r, &tt, &p, &ClauseSet::new(), &suite).unwrap();
        assert!(v.values().all(|x| *x == Redundancy::Open));

        let s = clause_set(&[&[t("t_sun")]]);
        let v = redundant_tests(&r, &tt, &p, &s, &suite).unwrap();
        assert_eq!(v["t_sensor"], Redundancy::ForcedTrue);
        assert_eq!(v["t_sun"], Redundancy::ForcedTrue);

        let s = clause_set(&[&[t("t_sun")], &[!t("t_sensor")]]);
        assert_eq!(
            redundant_tests(&r, &tt, &p, &s, &suite),
            Err(Error::InconsistentStatus)
        );
    }

    #[test]
    fn sequential_matches_parallel() {
        let (r, tt, suite) = rain();
        let theory = ClauseSet::union([&r, &tt, &clause_set(&[&[t("t_sun")]])]);
        assert_eq!(
            redundant_tests_with(&theory, &suite, Execution::Sequential),
            redundant_tests_with(&theory, &suite, Execution::Parallel)
        );
    }

    #[test]
    fn resolution_rule() {
        let v = Variable::test("t1");
        assert_eq!(
            resolve(&clause(&[t("t0"), t("t1")]), &clause(&[t("t0"), !t("t1")]), &v),
            Some(clause(&[t("t0")]))
        );
        let va = Variable::req("a");
        assert_eq!(resolve(&clause(&[a("a"), a("b")]), &clause(&[!a("a"), !a("b")]), &va), None);
        assert_eq!(resolve(&clause(&[a("a")]), &clause(&[!a("a")]), &va), Some(Clause::empty()));
    }

    #[test]
    #[should_panic(expected = "pivot")]
    fn resolution_without_pivot_panics() {
        resolve(&clause(&[a("b")]), &clause(&[!a("a")]), &Variable::req("a"));
    }

    #[test]
    fn elimination_examples() {
        let x = Variable::req("x");
        let cs = clause_set(&[&[!a("x"), a("a")], &[a("x"), a("b")]]);
        assert_eq!(eliminate_variable(&cs, &x), clause_set(&[&[a("a"), a("b")]]));
        let cs = clause_set(&[&[a("a"), a("b")]]);
        assert_eq!(eliminate_variable(&cs, &x), cs);
        let cs = clause_set(&[&[a("x"), a("a")], &[a("x"), a("b")]]);
        assert!(eliminate_variable(&cs, &x).is_empty());
        let cs = clause_set(&[&[a("x")], &[!a("x")]]);
        assert!(eliminate_variable(&cs, &x).has_empty_clause());
    }

    #[test]
    fn saturation_examples() {
        let cs = clause_set(&[&[t("t0"), t("t1")], &[t("t0"), !t("t1")]]);
        assert_eq!(saturate(&cs).unwrap(), clause_set(&[&[t("t0")]]));
        let cs = clause_set(&[&[t("t0")]]);
        assert_eq!(saturate(&cs).unwrap(), cs);
        // Prime implicates of (a|b)&(-b|c), enumerated by truth table over {a,b,c}:
        // among all 26 non-tautological clauses the entailed minimal ones are
        // exactly these three.
        let cs = clause_set(&[&[a("a"), a("b")], &[!a("b"), a("c")]]);
        assert_eq!(
            saturate(&cs).unwrap(),
            clause_set(&[&[a("a"), a("b")], &[!a("b"), a("c")], &[a("a"), a("c")]])
        );
        assert_eq!(
            saturate(&clause_set(&[&[t("a")], &[!t("a")]])),
            Err(Error::Contradiction)
        );
    }

    #[test]
    fn saturation_limit_is_a_hard_error() {
        // Pairwise clauses over many variables generate far more than two resolvents.
        let mut cs = ClauseSet::new();
        for i in 0..8 {
            cs.add([!a(&format!("x{i}")), a(&format!("x{}", i + 1)), a(&format!("y{i}"))]);
        }
        assert_eq!(
            saturate_with_limit(&cs, 2),
            Err(Error::SaturationLimit { limit: 2 })
        );
        assert!(saturate(&cs).is_ok());
    }

    #[test]
    fn subsumption() {
        assert!(subsumes(&clause(&[t("t0")]), &clause(&[t("t0"), t("t1")])));
        assert!(!subsumes(&clause(&[t("t0"), !t("t1")]), &clause(&[t("t0"), t("t1")])));
        let c = clause(&[t("t0"), !t("t1")]);
        assert!(subsumes(&c, &c));
    }

    #[test]
    fn projection_removes_requirements() {
        let (r, tt, _) = rain();
        let projected = project_requirements(&ClauseSet::union([&r, &tt]));
        assert_eq!(projected, clause_set(&[&[!t("t_sun"), t("t_sensor")]]));
    }
}
