//! Choosing a maximum jointly satisfiable set of ordering constraints and
//! turning it into a concrete test sequence.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use serde::{Deserialize, Serialize};

use crate::model::{Expectation, OrderingConstraint, Outcome, SearchMode, TestPlan, TestSuite, Verdict};
use crate::pipeline::{self, ExpectationConflict, ExpectedDependency, TestDependency};
use crate::{Error, Result};

/// Constraint count up to which the subset search is exact.
pub const DEFAULT_EXACT_THRESHOLD: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlannerOptions {
    pub exact_threshold: usize,
}

impl Default for PlannerOptions {
    fn default() -> Self {
        PlannerOptions { exact_threshold: DEFAULT_EXACT_THRESHOLD }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    pub kept: Vec<OrderingConstraint>,
    pub dropped: Vec<OrderingConstraint>,
    pub mode: SearchMode,
}

/// Precedence graph over test indices. Edge multiplicities let several
/// hyperedges share an arc and be removed independently.
struct Precedence {
    succ: Vec<BTreeMap<usize, usize>>,
}

impl Precedence {
    fn new(n: usize) -> Self {
        Precedence { succ: vec![BTreeMap::new(); n] }
    }

    fn reaches(&self, from: usize, to: &BTreeSet<usize>) -> bool {
        let mut seen = vec![false; self.succ.len()];
        let mut stack = vec![from];
        while let Some(u) = stack.pop() {
            if to.contains(&u) {
                return true;
            }
            if std::mem::replace(&mut seen[u], true) {
                continue;
            }
            stack.extend(self.succ[u].keys().copied());
        }
        false
    }

    /// A hyperedge fits iff no source is reachable from its target.
    fn admits(&self, e: &Edge) -> bool {
        !self.reaches(e.target, &e.sources)
    }

    fn add(&mut self, e: &Edge) {
        for &s in &e.sources {
            *self.succ[s].entry(e.target).or_default() += 1;
        }
    }

    fn remove(&mut self, e: &Edge) {
        for &s in &e.sources {
            let m = self.succ[s].get_mut(&e.target).expect("edge present");
            *m -= 1;
            if *m == 0 {
                self.succ[s].remove(&e.target);
            }
        }
    }

    /// Some directed cycle as a node sequence, if one exists.
    fn find_cycle(&self) -> Option<Vec<usize>> {
        let n = self.succ.len();
        let mut color = vec![0u8; n];
        let mut parent = vec![usize::MAX; n];
        for root in 0..n {
            if color[root] != 0 {
                continue;
            }
            let mut stack = vec![(root, self.succ[root].keys().copied().collect::<Vec<_>>())];
            color[root] = 1;
            while let Some((u, next)) = stack.last_mut() {
                let u = *u;
                match next.pop() {
                    Some(v) if color[v] == 0 => {
                        color[v] = 1;
                        parent[v] = u;
                        stack.push((v, self.succ[v].keys().copied().collect()));
                    }
                    Some(v) if color[v] == 1 => {
                        let mut cycle = vec![v];
                        let mut w = u;
                        while w != v {
                            cycle.push(w);
                            w = parent[w];
                        }
                        cycle.reverse();
                        return Some(cycle);
                    }
                    Some(_) => {}
                    None => {
                        color[u] = 2;
                        stack.pop();
                    }
                }
            }
        }
        None
    }
}

struct Edge {
    sources: BTreeSet<usize>,
    target: usize,
}

fn index_edges(constraints: &[OrderingConstraint]) -> (usize, Vec<Edge>) {
    let nodes: BTreeSet<&str> = constraints
        .iter()
        .flat_map(|c| c.sources.iter().map(String::as_str).chain([c.target.as_str()]))
        .collect();
    let index: BTreeMap<&str, usize> = nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let edges = constraints
        .iter()
        .map(|c| Edge {
            sources: c.sources.iter().map(|s| index[s.as_str()]).collect(),
            target: index[c.target.as_str()],
        })
        .collect();
    (nodes.len(), edges)
}

/// Largest subset of `constraints` satisfiable by one linear order. Among
/// subsets of maximum size the one with the lexicographically smallest list
/// of canonical constraint indices wins. Exact up to `opts.exact_threshold`
/// constraints, greedy cycle breaking beyond.
pub fn max_satisfiable_subset(constraints: &[OrderingConstraint], opts: &PlannerOptions) -> Selection {
    let canonical: Vec<OrderingConstraint> = constraints
        .iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let (n, edges) = index_edges(&canonical);
    let (keep, mode) = if canonical.len() <= opts.exact_threshold {
        (exact_subset(n, &edges), SearchMode::Exact)
    } else {
        (greedy_subset(n, &edges), SearchMode::Heuristic)
    };
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for (i, c) in canonical.into_iter().enumerate() {
        if keep.contains(&i) {
            kept.push(c);
        } else {
            dropped.push(c);
        }
    }
    Selection { kept, dropped, mode }
}

fn exact_subset(n: usize, edges: &[Edge]) -> BTreeSet<usize> {
    struct Search<'a> {
        edges: &'a [Edge],
        graph: Precedence,
        chosen: Vec<usize>,
        best: Vec<usize>,
    }

    impl Search<'_> {
        // Include-first depth-first order visits equal-size subsets in
        // lexicographic order, so only strict improvements replace `best`.
        fn go(&mut self, i: usize) {
            if self.chosen.len() + (self.edges.len() - i) <= self.best.len() {
                return;
            }
            if i == self.edges.len() {
                self.best = self.chosen.clone();
                return;
            }
            let e = &self.edges[i];
            if self.graph.admits(e) {
                self.graph.add(e);
                self.chosen.push(i);
                self.go(i + 1);
                self.chosen.pop();
                self.graph.remove(e);
            }
            self.go(i + 1);
        }
    }

    let mut s = Search { edges, graph: Precedence::new(n), chosen: Vec::new(), best: Vec::new() };
    s.go(0);
    s.best.into_iter().collect()
}

/// Start from all constraints, repeatedly break a cycle by removing the
/// constraint contributing most arcs to it (highest index on ties), then
/// re-admit removed constraints that fit.
fn greedy_subset(n: usize, edges: &[Edge]) -> BTreeSet<usize> {
    let mut graph = Precedence::new(n);
    for e in edges {
        graph.add(e);
    }
    let mut kept: BTreeSet<usize> = (0..edges.len()).collect();
    let mut removed = Vec::new();
    while let Some(cycle) = graph.find_cycle() {
        let arcs: BTreeSet<(usize, usize)> = cycle
            .iter()
            .zip(cycle.iter().cycle().skip(1))
            .map(|(&u, &v)| (u, v))
            .collect();
        let victim = kept
            .iter()
            .copied()
            .map(|i| {
                let e = &edges[i];
                let hits = e.sources.iter().filter(|&&s| arcs.contains(&(s, e.target))).count();
                (hits, i)
            })
            .max()
            .map(|(_, i)| i)
            .expect("a cycle implies a kept constraint");
        graph.remove(&edges[victim]);
        kept.remove(&victim);
        removed.push(victim);
    }
    removed.sort_unstable();
    for i in removed {
        if graph.admits(&edges[i]) {
            graph.add(&edges[i]);
            kept.insert(i);
        }
    }
    kept
}

/// Orders all tests of `tests` so that every kept constraint holds.
///
/// Among ready tests, constraint targets wait behind non-targets and
/// immediately redundant tests come last; remaining ties go by id.
pub fn topological_plan(
    selection: &Selection,
    tests: &BTreeSet<String>,
    immediately_redundant: &BTreeSet<String>,
) -> Result<TestPlan> {
    for c in &selection.kept {
        for id in c.sources.iter().chain([&c.target]) {
            if !tests.contains(id) {
                return Err(Error::UnknownTest(id.clone()));
            }
        }
    }
    let targets: BTreeSet<&str> = selection.kept.iter().map(|c| c.target.as_str()).collect();
    let mut indegree: BTreeMap<&str, usize> = tests.iter().map(|t| (t.as_str(), 0)).collect();
    let mut succ: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for c in &selection.kept {
        for s in &c.sources {
            if succ.entry(s.as_str()).or_default().insert(c.target.as_str()) {
                *indegree.get_mut(c.target.as_str()).expect("checked") += 1;
            }
        }
    }

    let key = |t: &str| (immediately_redundant.contains(t), targets.contains(t), t.to_string());
    let mut ready: BinaryHeap<Reverse<(bool, bool, String)>> = indegree
        .iter()
        .filter(|(_, d)| **d == 0)
        .map(|(t, _)| Reverse(key(t)))
        .collect();
    let mut sequence = Vec::with_capacity(tests.len());
    while let Some(Reverse((_, _, t))) = ready.pop() {
        if let Some(next) = succ.get(t.as_str()) {
            for &v in next {
                let d = indegree.get_mut(v).expect("known node");
                *d -= 1;
                if *d == 0 {
                    ready.push(Reverse(key(v)));
                }
            }
        }
        sequence.push(t);
    }
    if sequence.len() != tests.len() {
        let stuck = indegree
            .iter()
            .find(|(t, d)| **d > 0 && !sequence.iter().any(|s| s == *t))
            .map(|(t, _)| t.to_string())
            .unwrap_or_default();
        return Err(Error::Cycle(stuck));
    }
    Ok(TestPlan {
        sequence,
        satisfied: selection.kept.clone(),
        dropped_constraints: selection.dropped.clone(),
        immediately_redundant: immediately_redundant.clone(),
        search_mode: selection.mode,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DefaultPolicy {
    /// Every test fails.
    Pessimistic,
    /// Every test succeeds.
    Optimistic,
    /// Every test repeats its previous result.
    History,
}

pub fn apply_default_expectation(
    suite: &TestSuite,
    policy: DefaultPolicy,
    prior: Option<&BTreeMap<String, Outcome>>,
) -> Result<Expectation> {
    let ids = suite.ids();
    Ok(match policy {
        DefaultPolicy::Pessimistic => Expectation::uniform(ids.iter().map(String::as_str), Verdict::Fail),
        DefaultPolicy::Optimistic => Expectation::uniform(ids.iter().map(String::as_str), Verdict::Success),
        DefaultPolicy::History => {
            let prior = prior.ok_or(Error::MissingHistory)?;
            Expectation(
                ids.into_iter()
                    .filter_map(|t| prior.get(&t).map(|o| (t, Verdict::from(*o))))
                    .collect(),
            )
        }
    })
}

/// Everything computed on the way from dependencies to a plan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanReport {
    pub dependencies: Vec<TestDependency>,
    /// The expectation actually planned with, after conflict resolution.
    pub expectation: Expectation,
    pub conflicts: Vec<ExpectationConflict>,
    pub expected_dependencies: Vec<ExpectedDependency>,
    pub constraints: Vec<OrderingConstraint>,
    pub plan: TestPlan,
}

/// Steps B through D for the tests in `tests`.
pub fn plan_from_dependencies(
    deps: Vec<TestDependency>,
    tests: &BTreeSet<String>,
    expectation: &Expectation,
    opts: &PlannerOptions,
) -> Result<PlanReport> {
    let requested = expectation.restricted_to(tests);
    let resolution = pipeline::resolve_conflicts(&deps, &requested);
    let (expected, _) = pipeline::step_b_expected(&deps, &resolution.expectation);
    let step_c = pipeline::step_c_constraints(&expected);
    let selection = max_satisfiable_subset(&step_c.constraints, opts);
    let plan = topological_plan(&selection, tests, &step_c.immediately_redundant)?;
    Ok(PlanReport {
        dependencies: deps,
        expectation: resolution.expectation,
        conflicts: resolution.resolved,
        expected_dependencies: expected,
        constraints: step_c.constraints,
        plan,
    })
}
