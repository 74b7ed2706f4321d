//! Bounded argumental validity over a base within a universe.
//!
//! A closed structure with an atomic conclusion is valid when it rewrites
//! to a closed derivation over the base; a closed structure with a compound
//! conclusion is valid when it rewrites to a canonical form whose immediate
//! substructures are valid. An open structure is checked by instantiating
//! its assumptions, at every extension of the base, with witnesses
//! synthesized from derivations at that extension, under the justification
//! extended by the standard reductions. Verdicts are three-valued: bounded
//! searches return `Unknown` rather than guessing, and invalidity reported
//! here is always relative to that fixed instantiation policy.

use super::reduction::{reduces_to, Justification, ReductionOutcome, SearchBounds};
use super::structure::{is_canonical, substitute, ArgumentStructure, NodeId, NodeKind};
use super::synth::synthesize_witness;
use crate::ipc::{prove_extended, ExtendedSequent};
use crate::rules::{AtomicRule, Base, BaseMask, RulePremise};
use crate::semantics::EvalContext;
use crate::syntax::Formula;
use crate::Result;
use serde::Serialize;
use std::collections::BTreeMap;

/// Certified validity verdicts; `Unknown` carries the exhausted bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict3 {
    Valid,
    Invalid,
    Unknown { reason: String },
}

impl Verdict3 {
    pub fn unknown(reason: impl Into<String>) -> Verdict3 {
        Verdict3::Unknown {
            reason: reason.into(),
        }
    }
}

// ---------------------------------------------------------------------------
// Closed derivations
// ---------------------------------------------------------------------------

/// The rule a node applies, read off the structure: premises pair each
/// child's atom with the rules discharged at this node from inside that
/// child's subtree.
fn applied_rule(d: &ArgumentStructure, n: NodeId) -> AtomicRule {
    let node = d.node(n);
    if node.children.is_empty() {
        return AtomicRule::axiom(
            node.formula
                .as_atom()
                .expect("applied_rule on atomic trees only")
                .clone(),
        );
    }
    let premises = node
        .children
        .iter()
        .map(|&c| {
            let mut discharged = Vec::new();
            for (&leaf, &t) in d.h_map() {
                if t == n && in_subtree(d, c, leaf) {
                    discharged.push(applied_rule(d, leaf));
                }
            }
            for (&app, &t) in d.g_map() {
                if t == n && in_subtree(d, c, app) {
                    discharged.push(applied_rule(d, app));
                }
            }
            discharged.sort();
            discharged.dedup();
            RulePremise {
                discharged,
                atom: d
                    .node(c)
                    .formula
                    .as_atom()
                    .expect("applied_rule on atomic trees only")
                    .clone(),
            }
        })
        .collect();
    AtomicRule::compound(
        premises,
        node.formula
            .as_atom()
            .expect("applied_rule on atomic trees only")
            .clone(),
    )
}

fn in_subtree(d: &ArgumentStructure, root: NodeId, n: NodeId) -> bool {
    n == root || d.is_proper_ancestor(root, n)
}

/// Declared rule `s` covers applied rule `a`: same conclusion, premises in
/// bijection with equal atoms, and every rule actually discharged in a slot
/// is covered by a declared one (unused discharge capacity is fine).
fn subsumes(s: &AtomicRule, a: &AtomicRule) -> bool {
    match (s, a) {
        (AtomicRule::Axiom(x), AtomicRule::Axiom(y)) => x == y,
        // a no-premise compound behaves like an axiom when applied
        (AtomicRule::Compound { premises, conclusion }, AtomicRule::Axiom(y)) => {
            premises.is_empty() && conclusion == y
        }
        (
            AtomicRule::Compound {
                premises: sp,
                conclusion: sc,
            },
            AtomicRule::Compound {
                premises: ap,
                conclusion: ac,
            },
        ) => {
            if sc != ac || sp.len() != ap.len() {
                return false;
            }
            match_slots(sp, ap, &mut vec![false; sp.len()])
        }
        (AtomicRule::Axiom(_), AtomicRule::Compound { .. }) => false,
    }
}

fn match_slots(sp: &[RulePremise], ap: &[RulePremise], taken: &mut Vec<bool>) -> bool {
    let Some(a) = ap.first() else {
        return true;
    };
    for (i, s) in sp.iter().enumerate() {
        if taken[i] || s.atom != a.atom {
            continue;
        }
        let covered = a
            .discharged
            .iter()
            .all(|u| s.discharged.iter().any(|decl| subsumes(decl, u)));
        if covered {
            taken[i] = true;
            if match_slots(sp, &ap[1..], taken) {
                return true;
            }
            taken[i] = false;
        }
    }
    false
}

/// Membership in the base's derivations, for closed structures: every node
/// is atomic, there are no assumption leaves, and every node that is not
/// itself discharged applies a base rule (atomic explosion included).
pub fn is_closed_derivation(base: &Base, d: &ArgumentStructure) -> bool {
    for n in d.node_ids() {
        let node = d.node(n);
        if !node.formula.is_atomic() || node.kind == NodeKind::Assumption {
            return false;
        }
    }
    for n in d.node_ids() {
        let discharged_here = d.h_map().contains_key(&n) || d.g_map().contains_key(&n);
        if discharged_here {
            continue;
        }
        let applied = applied_rule(d, n);
        let atexp_ok = applied.is_atexp()
            && base
                .alphabet()
                .contains(applied.conclusion());
        let base_ok = base.rules().iter().any(|r| subsumes(r, &applied))
            || (applied.is_axiom()
                && base
                    .rules()
                    .iter()
                    .any(|r| r.premises().is_empty() && r.conclusion() == applied.conclusion()));
        if !(atexp_ok || base_ok) {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Validity
// ---------------------------------------------------------------------------

/// Overall bounds: reduction search bounds plus a recursion depth cap.
#[derive(Clone, Copy, Debug)]
pub struct ValidityBounds {
    pub search: SearchBounds,
    pub max_depth: usize,
}

impl Default for ValidityBounds {
    fn default() -> ValidityBounds {
        ValidityBounds {
            search: SearchBounds::default(),
            max_depth: 24,
        }
    }
}

/// Checks `n`-validity of an argument over the base encoded by `mask`.
pub fn check_validity(
    d: &ArgumentStructure,
    j: &Justification,
    mask: BaseMask,
    ctx: &mut EvalContext,
    bounds: &ValidityBounds,
) -> Result<Verdict3> {
    check(d, j, mask, ctx, bounds, bounds.max_depth)
}

fn check(
    d: &ArgumentStructure,
    j: &Justification,
    mask: BaseMask,
    ctx: &mut EvalContext,
    bounds: &ValidityBounds,
    depth: usize,
) -> Result<Verdict3> {
    if depth == 0 {
        return Ok(Verdict3::unknown("recursion depth bound reached"));
    }
    if d.is_closed() {
        if d.conclusion().is_atomic() {
            check_closed_atomic(d, j, mask, ctx)
        } else {
            check_closed_compound(d, j, mask, ctx, bounds, depth)
        }
    } else {
        check_open(d, j, mask, ctx, bounds, depth)
    }
}

fn check_closed_atomic(
    d: &ArgumentStructure,
    j: &Justification,
    mask: BaseMask,
    ctx: &mut EvalContext,
) -> Result<Verdict3> {
    let base = ctx.universe().base_from_mask(mask);
    let bounds = SearchBounds::default();
    match reduces_to(d, j, &mut |s| is_closed_derivation(&base, s), &bounds)? {
        ReductionOutcome::Reached(_) => Ok(Verdict3::Valid),
        ReductionOutcome::Exhausted => Ok(Verdict3::Invalid),
        ReductionOutcome::BoundHit(reason) => Ok(Verdict3::unknown(reason)),
    }
}

fn check_closed_compound(
    d: &ArgumentStructure,
    j: &Justification,
    mask: BaseMask,
    ctx: &mut EvalContext,
    bounds: &ValidityBounds,
    depth: usize,
) -> Result<Verdict3> {
    // enumerate the reduction closure; try every canonical member
    let mut canonicals: Vec<ArgumentStructure> = Vec::new();
    let outcome = reduces_to(
        d,
        j,
        &mut |s| {
            if is_canonical(s) {
                canonicals.push(s.clone());
            }
            false
        },
        &bounds.search,
    )?;
    let closure_complete = matches!(outcome, ReductionOutcome::Exhausted);
    let mut saw_unknown = !closure_complete;
    for candidate in canonicals {
        let mut all_valid = true;
        let mut candidate_unknown = false;
        for sub in candidate.immediate_substructures() {
            match check(&sub, j, mask, ctx, bounds, depth - 1)? {
                Verdict3::Valid => {}
                Verdict3::Invalid => {
                    all_valid = false;
                    break;
                }
                Verdict3::Unknown { .. } => {
                    candidate_unknown = true;
                    all_valid = false;
                    break;
                }
            }
        }
        if all_valid {
            return Ok(Verdict3::Valid);
        }
        saw_unknown |= candidate_unknown;
    }
    if saw_unknown {
        Ok(Verdict3::unknown(
            "no canonical reduct certified within bounds",
        ))
    } else {
        Ok(Verdict3::Invalid)
    }
}

fn check_open(
    d: &ArgumentStructure,
    j: &Justification,
    mask: BaseMask,
    ctx: &mut EvalContext,
    bounds: &ValidityBounds,
    depth: usize,
) -> Result<Verdict3> {
    // fixed policy: the justification is extended by the standard
    // reductions, and assumption instances are synthesized from
    // derivations at each extension
    let jplus = j.union(&Justification::standard());
    let premises = d.assumption_set();
    let mut saw_unknown = false;
    for ext in ctx.universe().extensions(mask) {
        let base = ctx.universe().base_from_mask(ext);
        let mut sigma: BTreeMap<Formula, ArgumentStructure> = BTreeMap::new();
        let mut instantiable = true;
        for premise in &premises {
            let derivable = prove_extended(&ExtendedSequent {
                context: Vec::new(),
                assumed_rules: Vec::new(),
                base: base.clone(),
                goal: premise.clone(),
            })?;
            if !derivable {
                // no synthesizable witness for this premise here; the
                // policy skips the extension
                instantiable = false;
                break;
            }
            let (witness, _) = synthesize_witness(&[], premise, &base)?;
            sigma.insert(premise.clone(), witness);
        }
        if !instantiable {
            continue;
        }
        let instance = substitute(d, &sigma)?;
        match check(&instance, &jplus, ext, ctx, bounds, depth - 1)? {
            Verdict3::Valid => {}
            Verdict3::Invalid => return Ok(Verdict3::Invalid),
            Verdict3::Unknown { .. } => saw_unknown = true,
        }
    }
    if saw_unknown {
        Ok(Verdict3::unknown("an instantiation was cut off by bounds"))
    } else {
        Ok(Verdict3::Valid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::Universe;
    use crate::syntax::{parse_formula, parse_rule, Atom};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn universe_pq() -> Universe {
        Universe::infer(
            vec![
                parse_rule("p").unwrap(),
                parse_rule("q").unwrap(),
                parse_rule("(p => q)").unwrap(),
            ],
            &[],
        )
        .unwrap()
    }

    #[test]
    fn applied_rules_read_off_discharges() {
        // s-axiom discharged at the w-node which applies ([s] t, r => w)
        let mut b = super::super::structure::StructureBuilder::new();
        let s_leaf = b.leaf(f("s"), NodeKind::Axiom);
        let t = b.internal(f("t"), vec![s_leaf]);
        let r = b.leaf(f("r"), NodeKind::Axiom);
        let w = b.internal(f("w"), vec![t, r]);
        b.discharge_axiom(s_leaf, w);
        let d = b.finish(w).unwrap();
        let rule = applied_rule(&d, w);
        assert_eq!(rule, parse_rule("([s] t, r => w)").unwrap());
    }

    #[test]
    fn closed_derivation_membership() {
        let base = Base::new(
            vec![parse_rule("p").unwrap(), parse_rule("(p => q)").unwrap()],
            &[],
        );
        let d = ArgumentStructure::infer(vec![ArgumentStructure::axiom(f("p"))], f("q"));
        assert!(is_closed_derivation(&base, &d));
        // a lone axiom leaf for an atom not in the base is not a derivation
        assert!(!is_closed_derivation(&base, &ArgumentStructure::axiom(f("q"))));
        // atomic explosion is always available
        let base2 = Base::new(vec![parse_rule("bot").unwrap()], &[Atom::new("q").unwrap()]);
        let boom = ArgumentStructure::infer(vec![ArgumentStructure::axiom(f("bot"))], f("q"));
        assert!(is_closed_derivation(&base2, &boom));
        // assumption leaves disqualify
        let open = ArgumentStructure::infer(vec![ArgumentStructure::assumption(f("p"))], f("q"));
        assert!(!is_closed_derivation(&base, &open));
    }

    #[test]
    fn unused_discharge_capacity_is_accepted() {
        // base rule ([s; u] t => w) applied discharging only s
        let base = Base::new(
            vec![parse_rule("([s; u] t => w)").unwrap(), parse_rule("(s => t)").unwrap()],
            &[],
        );
        let mut b = super::super::structure::StructureBuilder::new();
        let s_leaf = b.leaf(f("s"), NodeKind::Axiom);
        let t = b.internal(f("t"), vec![s_leaf]);
        let w = b.internal(f("w"), vec![t]);
        b.discharge_axiom(s_leaf, w);
        let d = b.finish(w).unwrap();
        assert!(is_closed_derivation(&base, &d));
    }

    #[test]
    fn closed_atomic_derivations_are_valid_with_no_reductions() {
        let u = universe_pq();
        let mut ctx = EvalContext::new(&u);
        let full = u.full_mask();
        let d = ArgumentStructure::infer(vec![ArgumentStructure::axiom(f("p"))], f("q"));
        let verdict = check_validity(
            &d,
            &Justification::empty(),
            full,
            &mut ctx,
            &ValidityBounds::default(),
        )
        .unwrap();
        assert_eq!(verdict, Verdict3::Valid);
        // on the empty base, the same structure is certified invalid: the
        // closure is finite and never reaches a derivation
        let verdict = check_validity(
            &d,
            &Justification::empty(),
            0,
            &mut ctx,
            &ValidityBounds::default(),
        )
        .unwrap();
        assert_eq!(verdict, Verdict3::Invalid);
    }

    #[test]
    fn identity_argument_is_valid_everywhere() {
        let u = universe_pq();
        let mut ctx = EvalContext::new(&u);
        let d = ArgumentStructure::imp_intro(f("p"), ArgumentStructure::assumption(f("p")));
        for mask in u.all_bases() {
            let verdict = check_validity(
                &d,
                &Justification::standard(),
                mask,
                &mut ctx,
                &ValidityBounds::default(),
            )
            .unwrap();
            assert_eq!(verdict, Verdict3::Valid, "mask {mask}");
        }
    }
}
