//! Propositional vocabulary shared by every stage: variables, literals,
//! clauses and clause sets, all with a canonical total order.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Not;

use serde::{Deserialize, Serialize};

/// Variable kinds, ordered REQ < TEST < XPCTD.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum VarKind {
    Req,
    Test,
    Xpctd,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Variable {
    pub kind: VarKind,
    pub id: String,
}

impl Variable {
    pub fn req(id: impl Into<String>) -> Self {
        Variable { kind: VarKind::Req, id: id.into() }
    }

    pub fn test(id: impl Into<String>) -> Self {
        Variable { kind: VarKind::Test, id: id.into() }
    }

    /// The expected-result variable of a test.
    pub fn xpctd(id: impl Into<String>) -> Self {
        Variable { kind: VarKind::Xpctd, id: id.into() }
    }

    pub fn pos(&self) -> Literal {
        Literal { var: self.clone(), positive: true }
    }

    pub fn neg(&self) -> Literal {
        Literal { var: self.clone(), positive: false }
    }

    pub fn lit(&self, positive: bool) -> Literal {
        Literal { var: self.clone(), positive }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            VarKind::Req | VarKind::Test => f.write_str(&self.id),
            VarKind::Xpctd => write!(f, "xpctd({})", self.id),
        }
    }
}

/// Ordered by (kind, id, polarity) with the negative literal first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub var: Variable,
    pub positive: bool,
}

impl Not for Literal {
    type Output = Literal;
    fn not(self) -> Literal {
        Literal { var: self.var, positive: !self.positive }
    }
}

impl Not for &Literal {
    type Output = Literal;
    fn not(self) -> Literal {
        Literal { var: self.var.clone(), positive: !self.positive }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.var)
        } else {
            write!(f, "-{}", self.var)
        }
    }
}

/// A disjunction of literals. Never tautological; may be empty.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Literal>", into = "Vec<Literal>")]
pub struct Clause(BTreeSet<Literal>);

impl Clause {
    /// Builds a clause, returning `None` for a tautology.
    pub fn new<I: IntoIterator<Item = Literal>>(lits: I) -> Option<Clause> {
        let set: BTreeSet<Literal> = lits.into_iter().collect();
        let taut = set.iter().any(|l| l.positive && set.contains(&!l));
        (!taut).then_some(Clause(set))
    }

    pub fn empty() -> Clause {
        Clause(BTreeSet::new())
    }

    pub fn unit(lit: Literal) -> Clause {
        Clause(BTreeSet::from([lit]))
    }

    pub fn literals(&self) -> impl Iterator<Item = &Literal> + '_ {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, lit: &Literal) -> bool {
        self.0.contains(lit)
    }

    /// The polarity with which `var` occurs, if it does.
    pub fn polarity(&self, var: &Variable) -> Option<bool> {
        if self.0.contains(&var.pos()) {
            Some(true)
        } else if self.0.contains(&var.neg()) {
            Some(false)
        } else {
            None
        }
    }

    pub fn mentions(&self, var: &Variable) -> bool {
        self.polarity(var).is_some()
    }

    pub fn variables(&self) -> impl Iterator<Item = &Variable> + '_ {
        self.0.iter().map(|l| &l.var)
    }

    pub fn positives(&self) -> impl Iterator<Item = &Literal> + '_ {
        self.0.iter().filter(|l| l.positive)
    }

    pub fn negatives(&self) -> impl Iterator<Item = &Literal> + '_ {
        self.0.iter().filter(|l| !l.positive)
    }

    pub fn is_horn_definite(&self) -> bool {
        self.positives().count() == 1
    }

    /// Literal-set containment.
    pub fn is_subset(&self, other: &Clause) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn without(&self, lit: &Literal) -> Clause {
        let mut set = self.0.clone();
        set.remove(lit);
        Clause(set)
    }

    pub fn eval(&self, value: impl Fn(&Variable) -> bool) -> bool {
        self.0.iter().any(|l| value(&l.var) == l.positive)
    }

    /// Maps each literal through `f`; `None` if the image is tautological.
    pub fn map_literals(&self, f: impl Fn(&Literal) -> Literal) -> Option<Clause> {
        Clause::new(self.0.iter().map(f))
    }
}

impl TryFrom<Vec<Literal>> for Clause {
    type Error = String;
    fn try_from(lits: Vec<Literal>) -> Result<Self, Self::Error> {
        Clause::new(lits).ok_or_else(|| "tautological clause".to_string())
    }
}

impl From<Clause> for Vec<Literal> {
    fn from(c: Clause) -> Self {
        c.0.into_iter().collect()
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("()");
        }
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "({})", parts.join(" | "))
    }
}

/// A conjunction of clauses; set semantics with canonical iteration order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClauseSet(BTreeSet<Clause>);

impl ClauseSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, clause: Clause) -> bool {
        self.0.insert(clause)
    }

    /// Inserts the clause built from `lits` unless it is a tautology.
    pub fn add<I: IntoIterator<Item = Literal>>(&mut self, lits: I) {
        if let Some(c) = Clause::new(lits) {
            self.0.insert(c);
        }
    }

    pub fn remove(&mut self, clause: &Clause) -> bool {
        self.0.remove(clause)
    }

    pub fn contains(&self, clause: &Clause) -> bool {
        self.0.contains(clause)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Clause> + '_ {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn has_empty_clause(&self) -> bool {
        self.0.iter().next().is_some_and(Clause::is_empty)
    }

    pub fn extend(&mut self, other: &ClauseSet) {
        self.0.extend(other.0.iter().cloned());
    }

    pub fn union<'a, I: IntoIterator<Item = &'a ClauseSet>>(sets: I) -> ClauseSet {
        let mut out = ClauseSet::new();
        for s in sets {
            out.extend(s);
        }
        out
    }

    /// All variables, in canonical order.
    pub fn variables(&self) -> BTreeSet<Variable> {
        self.0
            .iter()
            .flat_map(|c| c.variables().cloned())
            .collect()
    }

    pub fn eval(&self, value: impl Fn(&Variable) -> bool) -> bool {
        self.0.iter().all(|c| c.eval(&value))
    }

    pub fn is_subsumed(&self, clause: &Clause) -> bool {
        self.0.iter().any(|c| c.is_subset(clause))
    }

    /// Drops every clause that is a strict superset of another member.
    pub fn reduce(&self) -> ClauseSet {
        let mut kept: Vec<&Clause> = Vec::new();
        let mut by_len: Vec<&Clause> = self.0.iter().collect();
        by_len.sort_by_key(|c| c.len());
        for c in by_len {
            if !kept.iter().any(|k| k.is_subset(c)) {
                kept.push(c);
            }
        }
        kept.into_iter().cloned().collect()
    }
}

impl FromIterator<Clause> for ClauseSet {
    fn from_iter<T: IntoIterator<Item = Clause>>(iter: T) -> Self {
        ClauseSet(iter.into_iter().collect())
    }
}

impl IntoIterator for ClauseSet {
    type Item = Clause;
    type IntoIter = std::collections::btree_set::IntoIter<Clause>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a ClauseSet {
    type Item = &'a Clause;
    type IntoIter = std::collections::btree_set::Iter<'a, Clause>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for ClauseSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Shorthand used heavily in tests: `clause(&[t("a"), !t("b")])`.
pub fn clause(lits: &[Literal]) -> Clause {
    Clause::new(lits.iter().cloned()).expect("tautological clause literal")
}

pub fn clause_set(clauses: &[&[Literal]]) -> ClauseSet {
    clauses.iter().map(|c| clause(c)).collect()
}
