//! Degree-lowering rewrites and the fixpoint driver.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::expr::InvariantExpression;
use super::facts::CodeFacts;
use super::lemma4::Lemma4Rules;
use crate::error::{Error, Result};
use crate::perm::PermTuple;

/// Merge two copies when every letter sends copy `j` to the same copy `c`,
/// using `P² = P`. Returns the degree `k-1` tuple with `j` spliced out.
pub fn merge_reduce(t: &PermTuple) -> Option<PermTuple> {
    if t.degree() < 2 {
        return None;
    }
    (1..=t.degree()).find_map(|j| {
        let c = t.letter(1).apply(j);
        (c != j && t.perms().iter().all(|p| p.apply(j) == c)).then(|| t.splice_out(j))
    })
}

/// Splice out a copy `j` using `Tr_{S^c}(P) = c I`, where `S^c` is exactly
/// the set of letters fixing `j`. Returns `(c, reduced)` with
/// `A'_t(P) = c · A'_reduced(P)`.
pub fn splice_reduce(t: &PermTuple, facts: &CodeFacts) -> Option<(f64, PermTuple)> {
    if t.degree() < 2 {
        return None;
    }
    (1..=t.degree()).find_map(|j| {
        let fixing = t.letters_fixing(j);
        if fixing.is_empty() {
            return None;
        }
        let moving: Vec<usize> = (1..=t.letters()).filter(|l| !fixing.contains(l)).collect();
        facts.constant_for(&moving).map(|c| (c, t.splice_out(j)))
    })
}

/// Rewrite every term of degree `k > α` until no eliminable letter
/// permutation remains anywhere in its conjugation orbit.
pub fn lemma4_rewrite(e: &InvariantExpression, alpha: usize) -> Result<InvariantExpression> {
    let mut rules = RuleCache::new(alpha);
    let mut current = e.clone();
    loop {
        let mut next = InvariantExpression::new(e.letters());
        let mut fired = false;
        for (t, c) in current.terms() {
            match rules.get(t.degree())?.and_then(|r| r.step(t)) {
                Some(out) => {
                    fired = true;
                    for (u, d) in out {
                        next.add_term(u, c * d)?;
                    }
                }
                None => next.add_term(t.clone(), *c)?,
            }
        }
        next.prune();
        if !fired {
            return Ok(next);
        }
        current = next;
    }
}

pub(crate) struct RuleCache {
    alpha: usize,
    rules: BTreeMap<usize, Option<Lemma4Rules>>,
}

impl RuleCache {
    pub(crate) fn new(alpha: usize) -> Self {
        RuleCache {
            alpha,
            rules: BTreeMap::new(),
        }
    }

    pub(crate) fn get(&mut self, k: usize) -> Result<Option<&Lemma4Rules>> {
        if !self.rules.contains_key(&k) {
            let r = Lemma4Rules::standard(k, self.alpha)?;
            self.rules.insert(k, r);
        }
        Ok(self.rules[&k].as_ref())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReduceStats {
    pub merges: usize,
    pub splices: usize,
    pub rewrites: usize,
    pub rounds: usize,
}

impl ReduceStats {
    pub fn steps(&self) -> usize {
        self.merges + self.splices + self.rewrites
    }
}

/// Step budget `10 · terms · k · n` for an expression.
pub fn default_budget(e: &InvariantExpression) -> usize {
    (10 * e.len() * e.max_degree() * e.letters()).max(1)
}

/// Apply merge, splice and antisymmetrizer rewrites until none fires.
pub fn reduce_fixpoint(e: &InvariantExpression, facts: &CodeFacts) -> Result<InvariantExpression> {
    reduce_fixpoint_with_stats(e, facts, default_budget(e)).map(|(out, _)| out)
}

/// As [`reduce_fixpoint`], with statistics and an explicit step budget.
pub fn reduce_fixpoint_with_stats(
    e: &InvariantExpression,
    facts: &CodeFacts,
    budget: usize,
) -> Result<(InvariantExpression, ReduceStats)> {
    let mut rules = RuleCache::new(facts.alpha());
    let mut stats = ReduceStats::default();
    let mut current = e.clone();
    loop {
        let mut next = InvariantExpression::new(e.letters());
        let mut fired = false;
        for (t, c) in current.terms() {
            if let Some(u) = merge_reduce(t) {
                stats.merges += 1;
                next.add_term(u, *c)?;
            } else if let Some((scalar, u)) = splice_reduce(t, facts) {
                stats.splices += 1;
                next.add_term(u, c * scalar)?;
            } else if let Some(out) = rules.get(t.degree())?.and_then(|r| r.step(t)) {
                stats.rewrites += 1;
                for (u, d) in out {
                    next.add_term(u, c * d)?;
                }
            } else {
                next.add_term(t.clone(), *c)?;
                continue;
            }
            fired = true;
            if stats.steps() > budget {
                return Err(Error::StepBudget(budget));
            }
        }
        next.prune();
        stats.rounds += 1;
        if !fired {
            return Ok((next, stats));
        }
        current = next;
    }
}

/// One rewrite of a single term, for step-by-step soundness checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    Canonicalize,
    Merge,
    Splice,
    Lemma4,
}

/// Apply one rule of the given kind to `t`, returning the replacement terms
/// (with `t` standing for coefficient 1), or `None` when it does not apply.
pub fn single_step(
    kind: StepKind,
    t: &PermTuple,
    facts: &CodeFacts,
) -> Result<Option<Vec<(PermTuple, Complex64)>>> {
    let one = Complex64::new(1.0, 0.0);
    Ok(match kind {
        StepKind::Canonicalize => Some(vec![(t.canonicalize(), one)]),
        StepKind::Merge => merge_reduce(t).map(|u| vec![(u, one)]),
        StepKind::Splice => splice_reduce(t, facts).map(|(c, u)| vec![(u, Complex64::new(c, 0.0))]),
        StepKind::Lemma4 => {
            Lemma4Rules::standard(t.degree(), facts.alpha())?.and_then(|r| r.step(t))
        }
    })
}
