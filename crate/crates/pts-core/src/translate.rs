//! Syntactic translations between disjunction-free formulas and atomic
//! rules: implication-consequent normalization (`sharp`), the formula-to-
//! rules map (`circ`), and the rule-to-formula map (`star`).
//!
//! `sharp` rewrites `B -> C /\ D` to `(B -> C) /\ (B -> D)` and
//! `B -> (C -> D)` to `(B /\ C) -> D` until neither shape occurs, so every
//! implication in the result has an atomic consequent. `circ` reads the
//! normal form as a rule set; `star` inverts the reading up to
//! interderivability.

use crate::error::Error;
use crate::rules::{AtomicRule, Base, RulePremise};
use crate::syntax::Formula;
use crate::Result;
use std::fmt;

/// A formula checked to contain no disjunction.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct DisjunctionFreeFormula(Formula);

impl DisjunctionFreeFormula {
    pub fn new(f: Formula) -> Result<DisjunctionFreeFormula> {
        if f.is_disjunction_free() {
            Ok(DisjunctionFreeFormula(f))
        } else {
            Err(Error::NonAtomic(format!(
                "formula `{f}` contains a disjunction"
            )))
        }
    }

    pub fn formula(&self) -> &Formula {
        &self.0
    }

    pub fn into_formula(self) -> Formula {
        self.0
    }
}

impl fmt::Display for DisjunctionFreeFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl TryFrom<Formula> for DisjunctionFreeFormula {
    type Error = Error;
    fn try_from(f: Formula) -> Result<DisjunctionFreeFormula> {
        DisjunctionFreeFormula::new(f)
    }
}

/// Rewrites to the normal form in which every implication has an atomic
/// consequent. The result is interderivable with the input.
pub fn sharp(a: &DisjunctionFreeFormula) -> DisjunctionFreeFormula {
    DisjunctionFreeFormula(sharp_norm(&a.0))
}

fn sharp_norm(f: &Formula) -> Formula {
    match f {
        Formula::Atom(_) => f.clone(),
        Formula::Conj(l, r) => Formula::conj(sharp_norm(l), sharp_norm(r)),
        Formula::Imp(l, r) => imp_norm(sharp_norm(l), sharp_norm(r)),
        Formula::Disj(_, _) => f.clone(),
    }
}

// `l` and `r` are already normal; recursion is on the shape of `r`.
fn imp_norm(l: Formula, r: Formula) -> Formula {
    match r {
        Formula::Conj(c, d) => {
            Formula::conj(imp_norm(l.clone(), *c), imp_norm(l, *d))
        }
        Formula::Imp(c, d) => imp_norm(Formula::conj(l, *c), *d),
        other => Formula::imp(l, other),
    }
}

/// True when no subformula has the shape `B -> C /\ D` or `B -> (C -> D)`.
pub fn is_sharp_normal(f: &Formula) -> bool {
    match f {
        Formula::Atom(_) => true,
        Formula::Conj(l, r) | Formula::Disj(l, r) => is_sharp_normal(l) && is_sharp_normal(r),
        Formula::Imp(l, r) => {
            r.is_atomic() && is_sharp_normal(l)
        }
    }
}

/// One outermost-first rewriting pass; `None` when the formula is normal.
/// Exists so tests can compare strategies.
pub fn sharp_step_outermost(f: &Formula) -> Option<Formula> {
    match f {
        Formula::Atom(_) => None,
        Formula::Imp(l, r) => match &**r {
            Formula::Conj(c, d) => Some(Formula::conj(
                Formula::imp((**l).clone(), (**c).clone()),
                Formula::imp((**l).clone(), (**d).clone()),
            )),
            Formula::Imp(c, d) => Some(Formula::imp(
                Formula::conj((**l).clone(), (**c).clone()),
                (**d).clone(),
            )),
            _ => {
                if let Some(l2) = sharp_step_outermost(l) {
                    return Some(Formula::imp(l2, (**r).clone()));
                }
                sharp_step_outermost(r).map(|r2| Formula::imp((**l).clone(), r2))
            }
        },
        Formula::Conj(l, r) => {
            if let Some(l2) = sharp_step_outermost(l) {
                return Some(Formula::conj(l2, (**r).clone()));
            }
            sharp_step_outermost(r).map(|r2| Formula::conj((**l).clone(), r2))
        }
        Formula::Disj(_, _) => None,
    }
}

/// Normalizes by repeated outermost steps; tests check this agrees with
/// [`sharp`].
pub fn sharp_outermost(a: &DisjunctionFreeFormula) -> DisjunctionFreeFormula {
    let mut f = a.0.clone();
    while let Some(next) = sharp_step_outermost(&f) {
        f = next;
    }
    DisjunctionFreeFormula(f)
}

fn conjuncts(f: &Formula) -> Vec<&Formula> {
    match f {
        Formula::Conj(l, r) => {
            let mut out = conjuncts(l);
            out.extend(conjuncts(r));
            out
        }
        other => vec![other],
    }
}

/// The rule set associated to a disjunction-free formula. The formula is
/// normalized first, so callers may pass any disjunction-free input.
pub fn circ(a: &DisjunctionFreeFormula) -> Vec<AtomicRule> {
    let normal = sharp_norm(&a.0);
    let mut rules = circ_norm(&normal);
    rules.sort();
    rules.dedup();
    rules
}

fn circ_norm(f: &Formula) -> Vec<AtomicRule> {
    match f {
        Formula::Atom(a) => vec![AtomicRule::axiom(a.clone())],
        Formula::Conj(_, _) => conjuncts(f).iter().flat_map(|c| circ_norm(c)).collect(),
        Formula::Imp(l, r) => {
            let conclusion = r
                .as_atom()
                .expect("normal implications have atomic consequents")
                .clone();
            let mut premises = Vec::new();
            for b in conjuncts(l) {
                for rule in circ_norm(b) {
                    premises.push(demote(&rule));
                }
            }
            vec![AtomicRule::compound(premises, conclusion)]
        }
        Formula::Disj(_, _) => Vec::new(),
    }
}

/// A rule in premise position: its premises become the discharged set.
fn demote(rule: &AtomicRule) -> RulePremise {
    match rule {
        AtomicRule::Axiom(a) => RulePremise {
            discharged: Vec::new(),
            atom: a.clone(),
        },
        AtomicRule::Compound {
            premises,
            conclusion,
        } => RulePremise {
            discharged: premises.iter().map(promote).collect(),
            atom: conclusion.clone(),
        },
    }
}

/// A premise in rule position: its discharged set becomes the premises.
fn promote(p: &RulePremise) -> AtomicRule {
    if p.discharged.is_empty() {
        AtomicRule::Axiom(p.atom.clone())
    } else {
        AtomicRule::compound(
            p.discharged.iter().map(demote).collect(),
            p.atom.clone(),
        )
    }
}

/// Union of [`circ`] over a set of formulas.
pub fn circ_set(gamma: &[DisjunctionFreeFormula]) -> Vec<AtomicRule> {
    let mut out: Vec<AtomicRule> = gamma.iter().flat_map(circ).collect();
    out.sort();
    out.dedup();
    out
}

fn fold_conj(mut parts: Vec<Formula>) -> Formula {
    let first = parts.remove(0);
    parts.into_iter().fold(first, Formula::conj)
}

/// The disjunction-free formula associated to a rule: a level-0 rule maps
/// to its atom; a compound rule maps to the implication from the
/// conjunction of its translated premises to its conclusion.
pub fn star(rule: &AtomicRule) -> Formula {
    match rule {
        AtomicRule::Axiom(a) => Formula::Atom(a.clone()),
        AtomicRule::Compound {
            premises,
            conclusion,
        } => {
            if premises.is_empty() {
                return Formula::Atom(conclusion.clone());
            }
            let parts: Vec<Formula> = premises.iter().map(star_premise).collect();
            Formula::imp(fold_conj(parts), Formula::Atom(conclusion.clone()))
        }
    }
}

/// A premise with an empty discharged set translates as its atom; otherwise
/// as the implication from the conjunction of the discharged rules'
/// translations to the premise atom.
fn star_premise(p: &RulePremise) -> Formula {
    if p.discharged.is_empty() {
        Formula::Atom(p.atom.clone())
    } else {
        let parts: Vec<Formula> = p.discharged.iter().map(star).collect();
        Formula::imp(fold_conj(parts), Formula::Atom(p.atom.clone()))
    }
}

/// Translations of the non-explosion rules of a base; explosion rules are
/// omitted because their translations are already derivable.
pub fn star_base(b: &Base) -> Vec<Formula> {
    let mut out: Vec<Formula> = b.rules().iter().map(star).collect();
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_rule};

    fn df(s: &str) -> DisjunctionFreeFormula {
        DisjunctionFreeFormula::new(parse_formula(s).unwrap()).unwrap()
    }

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn sharp_golden_cases() {
        assert_eq!(sharp(&df("p -> (q -> r)")).formula(), &f("p /\\ q -> r"));
        assert_eq!(
            sharp(&df("p -> q /\\ r")).formula(),
            &f("(p -> q) /\\ (p -> r)")
        );
        assert_eq!(sharp(&df("p")).formula(), &f("p"));
        assert_eq!(
            sharp(&df("p -> (q -> r /\\ s)")).formula(),
            &f("(p /\\ q -> r) /\\ (p /\\ q -> s)")
        );
    }

    #[test]
    fn sharp_output_is_irreducible() {
        for s in [
            "p",
            "p -> q",
            "p -> (q -> (r /\\ s))",
            "(p -> q /\\ r) -> (s -> t /\\ u)",
            "~(p -> ~q)",
        ] {
            let n = sharp(&df(s));
            assert!(is_sharp_normal(n.formula()), "not normal: {n}");
        }
    }

    #[test]
    fn sharp_strategies_agree() {
        for s in [
            "p -> (q -> (r /\\ s))",
            "(p -> q /\\ r) -> (s -> t /\\ u)",
            "p /\\ (q -> r /\\ s) -> (t -> u)",
        ] {
            assert_eq!(sharp(&df(s)), sharp_outermost(&df(s)), "diverged on {s}");
        }
    }

    #[test]
    fn circ_golden_cases() {
        assert_eq!(circ(&df("p")), vec![parse_rule("p").unwrap()]);
        assert_eq!(circ(&df("p -> q")), vec![parse_rule("(p => q)").unwrap()]);
        assert_eq!(
            circ(&df("(p -> q) -> r")),
            vec![parse_rule("([p] q => r)").unwrap()]
        );
        // conjunction antecedents flatten into premise slots
        assert_eq!(
            circ(&df("p /\\ q -> r")),
            vec![parse_rule("(p, q => r)").unwrap()]
        );
    }

    #[test]
    fn circ_set_takes_unions() {
        assert!(circ_set(&[]).is_empty());
        let got = circ_set(&[df("p"), df("p -> q")]);
        assert_eq!(
            got,
            vec![parse_rule("p").unwrap(), parse_rule("(p => q)").unwrap()]
        );
        assert_eq!(circ_set(&[df("p -> q"), df("p -> q")]).len(), 1);
    }

    #[test]
    fn star_golden_cases() {
        assert_eq!(star(&parse_rule("q").unwrap()), f("q"));
        assert_eq!(star(&parse_rule("(p => q)").unwrap()), f("p -> q"));
        assert_eq!(
            star(&parse_rule("([s] u, v => q)").unwrap()),
            f("(s -> u) /\\ v -> q")
        );
        assert_eq!(
            star(&parse_rule("([(p, w => t)] z => y)").unwrap()),
            f("((p /\\ w -> t) -> z) -> y")
        );
        assert_eq!(star(&parse_rule("( => r)").unwrap()), f("r"));
    }

    #[test]
    fn star_base_drops_explosion() {
        let b = Base::new(
            vec![
                parse_rule("p").unwrap(),
                parse_rule("(p => v)").unwrap(),
                parse_rule("(q, r => z)").unwrap(),
                parse_rule("([s] u, v => q)").unwrap(),
                parse_rule("(bot => q)").unwrap(),
            ],
            &[],
        );
        let got = star_base(&b);
        let want: Vec<Formula> = vec![
            f("p"),
            f("p -> v"),
            f("q /\\ r -> z"),
            f("(s -> u) /\\ v -> q"),
        ]
        .into_iter()
        .collect();
        for w in &want {
            assert!(got.contains(w), "missing {w}");
        }
        assert_eq!(got.len(), want.len());
    }

    #[test]
    fn star_of_empty_base_is_empty() {
        let b = Base::empty(&[crate::syntax::Atom::new("p").unwrap()]);
        assert!(star_base(&b).is_empty());
    }

    #[test]
    fn star_circ_round_trip_examples() {
        // star of circ is interderivable with the input; here we check the
        // syntactic shape on inputs that are already rule-like
        let rules = circ(&df("(p -> q) -> r"));
        assert_eq!(star(&rules[0]), f("(p -> q) -> r"));
        let rules = circ(&df("p /\\ q -> r"));
        assert_eq!(star(&rules[0]), f("p /\\ q -> r"));
    }
}
