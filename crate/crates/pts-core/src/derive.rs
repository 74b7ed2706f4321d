//! Derivability of atoms from assumed atomic rules in a base.
//!
//! The engine is a backward search that mirrors the derivation rules
//! directly: to apply a rule, each premise atom is derived with the
//! premise's discharged rules added to the available set. Search states are
//! memoized on (available rule set, goal) with cycle cutting; available
//! sets only grow within the finite closure of nested subrules, so the
//! decision is total.

use crate::error::Error;
use crate::rules::{AtomicRule, Base, Universe};
use crate::syntax::Atom;
use crate::Result;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// Fixed-width bit set over an engine's rule closure.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub(crate) struct Bits(Box<[u64]>);

impl Bits {
    fn empty(width: usize) -> Bits {
        Bits(vec![0u64; width.div_ceil(64).max(1)].into_boxed_slice())
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] & (1 << (i % 64)) != 0
    }

    fn union_with(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(other.0.iter()) {
            *a |= b;
        }
    }
}

/// How a rule application is justified at a derivation node.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum RuleUse {
    /// The rule belongs to the base (atomic explosion included).
    Base,
    /// The rule is assumed; it shows up in the reported premise set.
    Assumed,
    /// The rule is discharged by an enclosing rule application.
    Discharged,
}

/// A derivation tree. Each node records the rule it applies; leaves apply
/// level-0 rules. Children match the applied rule's premises in order, and
/// a premise's discharged rules are available throughout that child.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct AtomicDerivation {
    pub rule: AtomicRule,
    pub usage: RuleUse,
    pub children: Vec<AtomicDerivation>,
}

impl AtomicDerivation {
    pub fn conclusion(&self) -> &Atom {
        self.rule.conclusion()
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(AtomicDerivation::node_count).sum::<usize>()
    }

    /// Renders the tree with one node per line, children indented.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(0, &mut out);
        out
    }

    fn render_into(&self, depth: usize, out: &mut String) {
        for _ in 0..depth {
            out.push_str("  ");
        }
        let tag = match self.usage {
            RuleUse::Base => "base",
            RuleUse::Assumed => "assumed",
            RuleUse::Discharged => "discharged",
        };
        out.push_str(&format!(
            "{} [{} {}]\n",
            self.conclusion(),
            tag,
            self.rule
        ));
        for c in &self.children {
            c.render_into(depth + 1, out);
        }
    }
}

/// Shared search engine over a fixed closure of rules. The closure holds
/// every rule that can ever become available: the seed rules plus,
/// recursively, all discharged subrules.
pub(crate) struct Engine {
    closure: Vec<AtomicRule>,
    index: BTreeMap<AtomicRule, usize>,
    /// rule indices by conclusion atom
    by_conclusion: HashMap<Atom, Vec<usize>>,
    /// premise discharge sets, pre-resolved to closure bit sets
    premise_bits: Vec<Vec<Bits>>,
    alphabet: Vec<Atom>,
    memo: HashMap<(Bits, Atom), bool>,
}

impl Engine {
    pub(crate) fn new(seed: impl IntoIterator<Item = AtomicRule>, alphabet: &[Atom]) -> Engine {
        let mut closure: Vec<AtomicRule> = Vec::new();
        let mut index: BTreeMap<AtomicRule, usize> = BTreeMap::new();
        let mut work: Vec<AtomicRule> = seed.into_iter().collect();
        while let Some(r) = work.pop() {
            if index.contains_key(&r) {
                continue;
            }
            index.insert(r.clone(), closure.len());
            for p in r.premises() {
                for sub in &p.discharged {
                    work.push(sub.clone());
                }
            }
            closure.push(r);
        }
        let width = closure.len();
        let mut by_conclusion: HashMap<Atom, Vec<usize>> = HashMap::new();
        let mut premise_bits = Vec::with_capacity(width);
        for (i, r) in closure.iter().enumerate() {
            by_conclusion
                .entry(r.conclusion().clone())
                .or_default()
                .push(i);
            let mut per_rule = Vec::new();
            for p in r.premises() {
                let mut bits = Bits::empty(width);
                for sub in &p.discharged {
                    bits.set(index[sub]);
                }
                per_rule.push(bits);
            }
            premise_bits.push(per_rule);
        }
        Engine {
            closure,
            index,
            by_conclusion,
            premise_bits,
            alphabet: alphabet.to_vec(),
            memo: HashMap::new(),
        }
    }

    pub(crate) fn width(&self) -> usize {
        self.closure.len()
    }

    pub(crate) fn bits_for(&self, rules: &[AtomicRule]) -> Bits {
        let mut bits = Bits::empty(self.width());
        for r in rules {
            if let Some(&i) = self.index.get(r) {
                bits.set(i);
            }
        }
        bits
    }

    pub(crate) fn bits_for_mask(&self, universe: &Universe, mask: u64) -> Bits {
        let mut bits = Bits::empty(self.width());
        for (i, r) in universe.candidates().iter().enumerate() {
            if mask & (1 << i) != 0 {
                bits.set(self.index[r]);
            }
        }
        bits
    }

    /// Decides derivability of `goal` with the given available rule set.
    /// Returns cached results where possible; cycle-cut negatives are not
    /// cached because they are path-dependent.
    pub(crate) fn solve(&mut self, avail: &Bits, goal: &Atom) -> bool {
        let mut path = Vec::new();
        let (value, _clean) = self.solve_inner(avail, goal, &mut path);
        value
    }

    fn solve_inner(
        &mut self,
        avail: &Bits,
        goal: &Atom,
        path: &mut Vec<(Bits, Atom)>,
    ) -> (bool, bool) {
        let key = (avail.clone(), goal.clone());
        if let Some(&v) = self.memo.get(&key) {
            return (v, true);
        }
        if path.contains(&key) {
            return (false, false);
        }
        path.push(key.clone());
        let (value, clean) = self.explore(avail, goal, path);
        path.pop();
        if value || clean {
            self.memo.insert(key, value);
        }
        (value, clean)
    }

    fn explore(
        &mut self,
        avail: &Bits,
        goal: &Atom,
        path: &mut Vec<(Bits, Atom)>,
    ) -> (bool, bool) {
        let mut clean = true;
        // level-0 rules
        for &i in self.by_conclusion.get(goal).cloned().iter().flatten() {
            if avail.get(i) && self.closure[i].is_axiom() {
                return (true, true);
            }
        }
        // atomic explosion: any alphabet atom follows from bot
        if !goal.is_bot() && self.alphabet.contains(goal) {
            let (v, c) = self.solve_inner(avail, &Atom::bot(), path);
            if v {
                return (true, true);
            }
            clean &= c;
        }
        // compound rules concluding the goal
        let candidates: Vec<usize> = self
            .by_conclusion
            .get(goal)
            .cloned()
            .unwrap_or_default();
        'rules: for i in candidates {
            if !avail.get(i) || self.closure[i].is_axiom() {
                continue;
            }
            let premises = self.closure[i].premises().to_vec();
            let premise_bits = self.premise_bits[i].clone();
            let mut rule_clean = true;
            for (p, bits) in premises.iter().zip(premise_bits.iter()) {
                let mut child_avail = avail.clone();
                child_avail.union_with(bits);
                let (v, c) = self.solve_inner(&child_avail, &p.atom, path);
                rule_clean &= c;
                if !v {
                    clean &= rule_clean;
                    continue 'rules;
                }
            }
            return (true, true);
        }
        (false, clean)
    }

    /// Depth-bounded witness search; deterministic (rules in closure index
    /// order, iterative deepening on depth).
    fn witness(
        &mut self,
        avail: &Bits,
        base_bits: &Bits,
        assumed_bits: &Bits,
        goal: &Atom,
        depth: usize,
        path: &mut Vec<(Bits, Atom)>,
    ) -> Option<AtomicDerivation> {
        if depth == 0 {
            return None;
        }
        let key = (avail.clone(), goal.clone());
        if path.contains(&key) {
            return None;
        }
        let usage_of = |i: usize| {
            if base_bits.get(i) {
                RuleUse::Base
            } else if assumed_bits.get(i) {
                RuleUse::Assumed
            } else {
                RuleUse::Discharged
            }
        };
        for &i in self.by_conclusion.get(goal).cloned().iter().flatten() {
            if avail.get(i) && self.closure[i].is_axiom() {
                return Some(AtomicDerivation {
                    rule: self.closure[i].clone(),
                    usage: usage_of(i),
                    children: Vec::new(),
                });
            }
        }
        path.push(key);
        let mut found = None;
        // atomic explosion
        if !goal.is_bot() && self.alphabet.contains(goal) {
            if let Some(sub) = self.witness(avail, base_bits, assumed_bits, &Atom::bot(), depth - 1, path)
            {
                found = Some(AtomicDerivation {
                    rule: AtomicRule::compound(
                        vec![crate::rules::RulePremise {
                            discharged: Vec::new(),
                            atom: Atom::bot(),
                        }],
                        goal.clone(),
                    ),
                    usage: RuleUse::Base,
                    children: vec![sub],
                });
            }
        }
        if found.is_none() {
            let candidates: Vec<usize> = self
                .by_conclusion
                .get(goal)
                .cloned()
                .unwrap_or_default();
            'rules: for i in candidates {
                if !avail.get(i) || self.closure[i].is_axiom() {
                    continue;
                }
                let premises = self.closure[i].premises().to_vec();
                let premise_bits = self.premise_bits[i].clone();
                let mut children = Vec::new();
                for (p, bits) in premises.iter().zip(premise_bits.iter()) {
                    let mut child_avail = avail.clone();
                    child_avail.union_with(bits);
                    match self.witness(&child_avail, base_bits, assumed_bits, &p.atom, depth - 1, path)
                    {
                        Some(c) => children.push(c),
                        None => continue 'rules,
                    }
                }
                found = Some(AtomicDerivation {
                    rule: self.closure[i].clone(),
                    usage: usage_of(i),
                    children,
                });
                break;
            }
        }
        path.pop();
        found
    }
}

fn engine_for(base: &Base, assumed: &[AtomicRule]) -> Engine {
    let mut extra_atoms: Vec<Atom> = base.alphabet().to_vec();
    for r in assumed {
        for a in r.atoms() {
            if !a.is_bot() && !extra_atoms.contains(&a) {
                extra_atoms.push(a);
            }
        }
    }
    let seed: Vec<AtomicRule> = base
        .rules()
        .iter()
        .cloned()
        .chain(assumed.iter().cloned())
        .collect();
    Engine::new(seed, &extra_atoms)
}

/// Decides whether `goal` is derivable from the assumed rules in the base.
pub fn derives(base: &Base, assumed: &[AtomicRule], goal: &Atom) -> bool {
    let mut engine = engine_for(base, assumed);
    let mut avail = engine.bits_for(base.rules());
    avail.union_with(&engine.bits_for(assumed));
    engine.solve(&avail, goal)
}

/// Produces a checkable derivation tree whenever [`derives`] holds.
/// Witnesses are found smallest-depth-first and are deterministic.
pub fn derive_witness(
    base: &Base,
    assumed: &[AtomicRule],
    goal: &Atom,
) -> Option<AtomicDerivation> {
    let mut engine = engine_for(base, assumed);
    let base_bits = engine.bits_for(base.rules());
    let assumed_bits = engine.bits_for(assumed);
    let mut avail = base_bits.clone();
    avail.union_with(&assumed_bits);
    if !engine.solve(&avail, goal) {
        return None;
    }
    let max_depth = (engine.width() + 2) * (engine.alphabet.len() + 2) + 4;
    for depth in 1..=max_depth {
        let mut path = Vec::new();
        if let Some(d) = engine.witness(&avail, &base_bits, &assumed_bits, goal, depth, &mut path)
        {
            return Some(d);
        }
    }
    None
}

/// Checks a derivation tree node by node and returns the undischarged
/// assumed rules it uses together with its conclusion.
pub fn check_derivation(
    base: &Base,
    d: &AtomicDerivation,
) -> Result<(BTreeSet<AtomicRule>, Atom)> {
    let mut used = BTreeSet::new();
    let mut scope: Vec<AtomicRule> = Vec::new();
    check_node(base, d, &mut scope, &mut used)?;
    Ok((used, d.conclusion().clone()))
}

fn check_node(
    base: &Base,
    d: &AtomicDerivation,
    scope: &mut Vec<AtomicRule>,
    used: &mut BTreeSet<AtomicRule>,
) -> Result<()> {
    let premises = d.rule.premises();
    if d.children.len() != premises.len() {
        return Err(Error::IllFormedDerivation {
            node: d.conclusion().to_string(),
            msg: format!(
                "rule `{}` expects {} premises, found {} children",
                d.rule,
                premises.len(),
                d.children.len()
            ),
        });
    }
    for (child, premise) in d.children.iter().zip(premises.iter()) {
        if child.conclusion() != &premise.atom {
            return Err(Error::IllFormedDerivation {
                node: d.conclusion().to_string(),
                msg: format!(
                    "premise expects `{}`, child concludes `{}`",
                    premise.atom,
                    child.conclusion()
                ),
            });
        }
    }
    match d.usage {
        RuleUse::Base => {
            if !base.contains(&d.rule) {
                return Err(Error::DischargeScope {
                    node: d.conclusion().to_string(),
                    msg: format!("rule `{}` is not in the base and is not discharged", d.rule),
                });
            }
        }
        RuleUse::Discharged => {
            if !scope.contains(&d.rule) {
                return Err(Error::DischargeScope {
                    node: d.conclusion().to_string(),
                    msg: format!("rule `{}` is used outside any discharging premise", d.rule),
                });
            }
        }
        RuleUse::Assumed => {
            used.insert(d.rule.clone());
        }
    }
    for (child, premise) in d.children.iter().zip(premises.iter()) {
        let before = scope.len();
        scope.extend(premise.discharged.iter().cloned());
        check_node(base, child, scope, used)?;
        scope.truncate(before);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::Base;
    use crate::syntax::{parse_rule, Atom};

    fn atom(s: &str) -> Atom {
        Atom::new(s).unwrap()
    }

    fn rule(s: &str) -> AtomicRule {
        parse_rule(s).unwrap()
    }

    /// The worked base with one rule each of levels 0 through 3.
    fn worked_base() -> Base {
        Base::new(
            vec![
                rule("p"),
                rule("(p => q)"),
                rule("([s] t, r => w)"),
                rule("([(p, w => t)] z => y)"),
            ],
            &[],
        )
    }

    fn worked_assumed() -> Vec<AtomicRule> {
        vec![rule("q"), rule("(t, q => z)"), rule("(s => t)"), rule("(q => r)")]
    }

    #[test]
    fn worked_derivation_succeeds() {
        let base = worked_base();
        let assumed = worked_assumed();
        assert!(derives(&base, &assumed, &atom("y")));
        // dropping a load-bearing assumed rule breaks it (the assumed axiom
        // q is redundant: q is already derivable from the base)
        for skip in 1..assumed.len() {
            let partial: Vec<AtomicRule> = assumed
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, r)| r.clone())
                .collect();
            assert!(
                !derives(&base, &partial, &atom("y")),
                "rule {} should be needed",
                assumed[skip]
            );
        }
    }

    #[test]
    fn worked_witness_checks() {
        let base = worked_base();
        let assumed = worked_assumed();
        let w = derive_witness(&base, &assumed, &atom("y")).unwrap();
        let (used, concl) = check_derivation(&base, &w).unwrap();
        assert_eq!(concl, atom("y"));
        let all: BTreeSet<AtomicRule> = worked_assumed().into_iter().collect();
        assert!(used.is_subset(&all));
        // the three load-bearing rules must show up
        for r in ["(t, q => z)", "(s => t)", "(q => r)"] {
            assert!(used.contains(&rule(r)), "missing {r}");
        }
    }

    #[test]
    fn empty_base_derives_nothing() {
        let base = Base::empty(&[atom("p")]);
        assert!(!derives(&base, &[], &atom("p")));
        assert!(derive_witness(&base, &[], &atom("p")).is_none());
    }

    #[test]
    fn assumed_atom_derives_itself() {
        let base = Base::empty(&[atom("p")]);
        assert!(derives(&base, &[rule("p")], &atom("p")));
    }

    #[test]
    fn assumed_bot_derives_everything() {
        let base = Base::empty(&[atom("q")]);
        assert!(derives(&base, &[rule("bot")], &atom("q")));
        let w = derive_witness(&base, &[rule("bot")], &atom("q")).unwrap();
        let (used, _) = check_derivation(&base, &w).unwrap();
        assert_eq!(used.len(), 1);
    }

    #[test]
    fn two_node_witness() {
        let base = Base::new(vec![rule("(p => q)"), rule("p")], &[]);
        let w = derive_witness(&base, &[], &atom("q")).unwrap();
        assert_eq!(w.node_count(), 2);
        let (used, concl) = check_derivation(&base, &w).unwrap();
        assert!(used.is_empty());
        assert_eq!(concl, atom("q"));
    }

    #[test]
    fn discharge_scope_is_enforced() {
        let base = worked_base();
        // use the level-0 rule `s` claiming it is discharged, but outside
        // any discharging premise
        let bogus = AtomicDerivation {
            rule: rule("s"),
            usage: RuleUse::Discharged,
            children: Vec::new(),
        };
        assert!(matches!(
            check_derivation(&base, &bogus),
            Err(Error::DischargeScope { .. })
        ));
        // claiming base membership for a foreign rule fails the same way
        let bogus = AtomicDerivation {
            rule: rule("(q => p)"),
            usage: RuleUse::Base,
            children: vec![AtomicDerivation {
                rule: rule("q"),
                usage: RuleUse::Assumed,
                children: Vec::new(),
            }],
        };
        assert!(matches!(
            check_derivation(&base, &bogus),
            Err(Error::DischargeScope { .. })
        ));
    }

    #[test]
    fn discharged_rules_are_scoped_to_their_premise() {
        // ([q] p => r): q is available only inside the p-premise
        let base = Base::new(vec![rule("([q] p => r)"), rule("(q => p)")], &[]);
        assert!(derives(&base, &[], &atom("r")));
        let w = derive_witness(&base, &[], &atom("r")).unwrap();
        let (used, _) = check_derivation(&base, &w).unwrap();
        assert!(used.is_empty());
        // and q is not derivable outright
        assert!(!derives(&base, &[], &atom("q")));
    }

    #[test]
    fn monotone_under_extension() {
        let small = Base::new(vec![rule("(p => q)")], &[]);
        let big = small.extend(vec![rule("p")]);
        assert!(!derives(&small, &[], &atom("q")));
        assert!(derives(&big, &[], &atom("q")));
    }
}
