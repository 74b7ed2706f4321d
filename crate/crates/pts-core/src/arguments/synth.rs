//! Witness synthesis: turns a derivation in the rule-extended propositional
//! system into an argument structure paired with the standard reductions.
//!
//! The pipeline: prove the translated sequent with the proof-term prover;
//! expand absurdity eliminations into introductions over atomic explosion;
//! replace each hypothesis standing for a base-rule translation by a proof
//! of that translation built from the rule itself; and read the resulting
//! term as a tree with discharge maps, where rule applications become
//! atomic inferences and uses of discharged rules point at the application
//! that discharges them.

use super::reduction::Justification;
use super::structure::{ArgumentStructure, NodeId, NodeKind, StructureBuilder};
use crate::error::Error;
use crate::ipc::{prove_extended, ExtendedSequent, Term, TermProver};
use crate::rules::{AtomicRule, Base};
use crate::syntax::Formula;
use crate::translate;
use crate::Result;
use std::collections::HashMap;

/// Terms with atomic-rule applications. `discharged` marks a use of an
/// assumed rule that some enclosing application discharges.
#[derive(Clone, Debug)]
enum ArgTerm {
    Hyp(u32),
    Lam(u32, Formula, Box<ArgTerm>),
    App(Box<ArgTerm>, Box<ArgTerm>),
    Pair(Box<ArgTerm>, Box<ArgTerm>),
    Fst(Box<ArgTerm>),
    Snd(Box<ArgTerm>),
    Inl(Box<ArgTerm>, Formula),
    Inr(Box<ArgTerm>, Formula),
    Case(Box<ArgTerm>, u32, Box<ArgTerm>, u32, Box<ArgTerm>),
    RuleApp {
        rule: AtomicRule,
        children: Vec<ArgTerm>,
        discharged: bool,
    },
}

impl ArgTerm {
    fn boxed(self) -> Box<ArgTerm> {
        Box::new(self)
    }

    fn subst(&self, hyp: u32, replacement: &ArgTerm) -> ArgTerm {
        match self {
            ArgTerm::Hyp(h) if *h == hyp => replacement.clone(),
            ArgTerm::Hyp(h) => ArgTerm::Hyp(*h),
            ArgTerm::Lam(h, t, b) => {
                ArgTerm::Lam(*h, t.clone(), b.subst(hyp, replacement).boxed())
            }
            ArgTerm::App(a, b) => ArgTerm::App(
                a.subst(hyp, replacement).boxed(),
                b.subst(hyp, replacement).boxed(),
            ),
            ArgTerm::Pair(a, b) => ArgTerm::Pair(
                a.subst(hyp, replacement).boxed(),
                b.subst(hyp, replacement).boxed(),
            ),
            ArgTerm::Fst(a) => ArgTerm::Fst(a.subst(hyp, replacement).boxed()),
            ArgTerm::Snd(a) => ArgTerm::Snd(a.subst(hyp, replacement).boxed()),
            ArgTerm::Inl(a, t) => ArgTerm::Inl(a.subst(hyp, replacement).boxed(), t.clone()),
            ArgTerm::Inr(a, t) => ArgTerm::Inr(a.subst(hyp, replacement).boxed(), t.clone()),
            ArgTerm::Case(s, hl, l, hr, r) => ArgTerm::Case(
                s.subst(hyp, replacement).boxed(),
                *hl,
                l.subst(hyp, replacement).boxed(),
                *hr,
                r.subst(hyp, replacement).boxed(),
            ),
            ArgTerm::RuleApp {
                rule,
                children,
                discharged,
            } => ArgTerm::RuleApp {
                rule: rule.clone(),
                children: children
                    .iter()
                    .map(|c| c.subst(hyp, replacement))
                    .collect(),
                discharged: *discharged,
            },
        }
    }
}

/// Converts a propositional proof term, expanding every absurdity
/// elimination into introductions over atomic explosion so that no
/// dedicated elimination node remains.
fn from_term(t: &Term, fresh: &mut u32) -> ArgTerm {
    match t {
        Term::Hyp(h) => ArgTerm::Hyp(*h),
        Term::Lam(h, ty, b) => ArgTerm::Lam(*h, ty.clone(), from_term(b, fresh).boxed()),
        Term::App(a, b) => {
            ArgTerm::App(from_term(a, fresh).boxed(), from_term(b, fresh).boxed())
        }
        Term::Pair(a, b) => {
            ArgTerm::Pair(from_term(a, fresh).boxed(), from_term(b, fresh).boxed())
        }
        Term::Fst(a) => ArgTerm::Fst(from_term(a, fresh).boxed()),
        Term::Snd(a) => ArgTerm::Snd(from_term(a, fresh).boxed()),
        Term::Inl(a, ty) => ArgTerm::Inl(from_term(a, fresh).boxed(), ty.clone()),
        Term::Inr(a, ty) => ArgTerm::Inr(from_term(a, fresh).boxed(), ty.clone()),
        Term::Case(s, hl, l, hr, r) => ArgTerm::Case(
            from_term(s, fresh).boxed(),
            *hl,
            from_term(l, fresh).boxed(),
            *hr,
            from_term(r, fresh).boxed(),
        ),
        Term::Abort(a, goal) => {
            let bot_proof = from_term(a, fresh);
            expand_bot(&bot_proof, goal, fresh)
        }
    }
}

fn expand_bot(bot_proof: &ArgTerm, goal: &Formula, fresh: &mut u32) -> ArgTerm {
    match goal {
        Formula::Atom(a) if a.is_bot() => bot_proof.clone(),
        Formula::Atom(a) => ArgTerm::RuleApp {
            rule: AtomicRule::compound(
                vec![crate::rules::RulePremise {
                    discharged: Vec::new(),
                    atom: crate::syntax::Atom::bot(),
                }],
                a.clone(),
            ),
            children: vec![bot_proof.clone()],
            discharged: false,
        },
        Formula::Conj(l, r) => ArgTerm::Pair(
            expand_bot(bot_proof, l, fresh).boxed(),
            expand_bot(bot_proof, r, fresh).boxed(),
        ),
        Formula::Disj(l, r) => {
            ArgTerm::Inl(expand_bot(bot_proof, l, fresh).boxed(), (**r).clone())
        }
        Formula::Imp(l, r) => {
            let h = *fresh;
            *fresh += 1;
            ArgTerm::Lam(h, (**l).clone(), expand_bot(bot_proof, r, fresh).boxed())
        }
    }
}

fn fold_conj(parts: &[Formula]) -> Formula {
    let mut it = parts.iter().cloned();
    let first = it.next().expect("nonempty");
    it.fold(first, Formula::conj)
}

fn pair_fold(parts: Vec<ArgTerm>) -> ArgTerm {
    let mut it = parts.into_iter();
    let first = it.next().expect("nonempty");
    it.fold(first, |acc, t| ArgTerm::Pair(acc.boxed(), t.boxed()))
}

/// Projections of a hypothesis typed by a left-folded conjunction.
fn projections(h: ArgTerm, n: usize) -> Vec<ArgTerm> {
    if n == 1 {
        vec![h]
    } else {
        let mut out = projections(ArgTerm::Fst(h.clone().boxed()), n - 1);
        out.push(ArgTerm::Snd(h.boxed()));
        out
    }
}

/// A proof of the rule's translation built from the rule itself: for a
/// level-0 rule, its use; for a compound rule, a lambda over the conjoined
/// premise translations whose body applies the rule, deriving each premise
/// atom from the matching projection and, where the premise discharges
/// rules, from recursively built proofs of their translations, marked as
/// discharged uses.
fn star_term(rule: &AtomicRule, discharged: bool, fresh: &mut u32) -> ArgTerm {
    let premises = rule.premises();
    if premises.is_empty() {
        return ArgTerm::RuleApp {
            rule: rule.clone(),
            children: Vec::new(),
            discharged,
        };
    }
    let premise_tys: Vec<Formula> = premises
        .iter()
        .map(|p| {
            if p.discharged.is_empty() {
                Formula::Atom(p.atom.clone())
            } else {
                let parts: Vec<Formula> = p.discharged.iter().map(translate::star).collect();
                Formula::imp(fold_conj(&parts), Formula::Atom(p.atom.clone()))
            }
        })
        .collect();
    let h = *fresh;
    *fresh += 1;
    let projs = projections(ArgTerm::Hyp(h), premises.len());
    let children: Vec<ArgTerm> = premises
        .iter()
        .zip(projs)
        .map(|(p, proj)| {
            if p.discharged.is_empty() {
                proj
            } else {
                let args: Vec<ArgTerm> = p
                    .discharged
                    .iter()
                    .map(|s| star_term(s, true, fresh))
                    .collect();
                ArgTerm::App(proj.boxed(), pair_fold(args).boxed())
            }
        })
        .collect();
    ArgTerm::Lam(
        h,
        fold_conj(&premise_tys),
        ArgTerm::RuleApp {
            rule: rule.clone(),
            children,
            discharged,
        }
        .boxed(),
    )
}

// ---------------------------------------------------------------------------
// Terms to structures
// ---------------------------------------------------------------------------

struct TreeBuilder {
    b: StructureBuilder,
    hyp_leaves: HashMap<u32, Vec<NodeId>>,
    /// scope frames: (token of the discharging application, rules granted)
    scope: Vec<(usize, Vec<AtomicRule>)>,
    /// discharge entries waiting for their application node: (node, token)
    pending: Vec<(NodeId, usize, NodeKind)>,
    next_token: usize,
}

impl TreeBuilder {
    fn build(
        &mut self,
        term: &ArgTerm,
        env: &mut HashMap<u32, Formula>,
    ) -> Result<(NodeId, Formula)> {
        let internal_err =
            |msg: &str| Error::IllFormedStructure(format!("synthesis produced {msg}"));
        match term {
            ArgTerm::Hyp(h) => {
                let ty = env
                    .get(h)
                    .cloned()
                    .ok_or_else(|| internal_err("an unbound hypothesis"))?;
                let id = self.b.leaf(ty.clone(), NodeKind::Assumption);
                self.hyp_leaves.entry(*h).or_default().push(id);
                Ok((id, ty))
            }
            ArgTerm::Lam(h, ty, body) => {
                let shadowed = env.insert(*h, ty.clone());
                let saved = self.hyp_leaves.remove(h);
                let (body_id, body_ty) = self.build(body, env)?;
                match shadowed {
                    Some(old) => {
                        env.insert(*h, old);
                    }
                    None => {
                        env.remove(h);
                    }
                }
                let conclusion = Formula::imp(ty.clone(), body_ty);
                let node = self.b.internal(conclusion.clone(), vec![body_id]);
                for leaf in self.hyp_leaves.remove(h).unwrap_or_default() {
                    self.b.discharge_assumption(leaf, node);
                }
                if let Some(saved) = saved {
                    self.hyp_leaves.insert(*h, saved);
                }
                Ok((node, conclusion))
            }
            ArgTerm::App(fun, arg) => {
                let (f_id, f_ty) = self.build(fun, env)?;
                let (a_id, a_ty) = self.build(arg, env)?;
                match f_ty {
                    Formula::Imp(l, r) if *l == a_ty => {
                        let node = self.b.internal((*r).clone(), vec![f_id, a_id]);
                        Ok((node, *r))
                    }
                    _ => Err(internal_err("an ill-typed application")),
                }
            }
            ArgTerm::Pair(a, b) => {
                let (a_id, a_ty) = self.build(a, env)?;
                let (b_id, b_ty) = self.build(b, env)?;
                let ty = Formula::conj(a_ty, b_ty);
                let node = self.b.internal(ty.clone(), vec![a_id, b_id]);
                Ok((node, ty))
            }
            ArgTerm::Fst(p) => {
                let (p_id, p_ty) = self.build(p, env)?;
                match p_ty {
                    Formula::Conj(l, _) => {
                        let node = self.b.internal((*l).clone(), vec![p_id]);
                        Ok((node, *l))
                    }
                    _ => Err(internal_err("a projection of a non-pair")),
                }
            }
            ArgTerm::Snd(p) => {
                let (p_id, p_ty) = self.build(p, env)?;
                match p_ty {
                    Formula::Conj(_, r) => {
                        let node = self.b.internal((*r).clone(), vec![p_id]);
                        Ok((node, *r))
                    }
                    _ => Err(internal_err("a projection of a non-pair")),
                }
            }
            ArgTerm::Inl(t, right) => {
                let (t_id, t_ty) = self.build(t, env)?;
                let ty = Formula::disj(t_ty, right.clone());
                let node = self.b.internal(ty.clone(), vec![t_id]);
                Ok((node, ty))
            }
            ArgTerm::Inr(t, left) => {
                let (t_id, t_ty) = self.build(t, env)?;
                let ty = Formula::disj(left.clone(), t_ty);
                let node = self.b.internal(ty.clone(), vec![t_id]);
                Ok((node, ty))
            }
            ArgTerm::Case(s, hl, l, hr, r) => {
                let (s_id, s_ty) = self.build(s, env)?;
                let (lt, rt) = match s_ty {
                    Formula::Disj(l, r) => (*l, *r),
                    _ => return Err(internal_err("a case split on a non-disjunction")),
                };
                let saved_l = self.hyp_leaves.remove(hl);
                env.insert(*hl, lt);
                let (l_id, l_ty) = self.build(l, env)?;
                env.remove(hl);
                let left_leaves = self.hyp_leaves.remove(hl).unwrap_or_default();
                if let Some(s) = saved_l {
                    self.hyp_leaves.insert(*hl, s);
                }
                let saved_r = self.hyp_leaves.remove(hr);
                env.insert(*hr, rt);
                let (r_id, r_ty) = self.build(r, env)?;
                env.remove(hr);
                let right_leaves = self.hyp_leaves.remove(hr).unwrap_or_default();
                if let Some(s) = saved_r {
                    self.hyp_leaves.insert(*hr, s);
                }
                if l_ty != r_ty {
                    return Err(internal_err("case branches with different conclusions"));
                }
                let node = self.b.internal(l_ty.clone(), vec![s_id, l_id, r_id]);
                for leaf in left_leaves.into_iter().chain(right_leaves) {
                    self.b.discharge_assumption(leaf, node);
                }
                Ok((node, l_ty))
            }
            ArgTerm::RuleApp {
                rule,
                children,
                discharged,
            } => {
                let token = self.next_token;
                self.next_token += 1;
                let premises = rule.premises();
                if children.len() != premises.len() {
                    return Err(internal_err("a rule application with bad arity"));
                }
                let mut child_ids = Vec::new();
                for (child, premise) in children.iter().zip(premises) {
                    self.scope.push((token, premise.discharged.clone()));
                    let (c_id, c_ty) = self.build(child, env)?;
                    self.scope.pop();
                    if c_ty != Formula::Atom(premise.atom.clone()) {
                        return Err(internal_err("a rule premise of the wrong atom"));
                    }
                    child_ids.push(c_id);
                }
                let conclusion = Formula::Atom(rule.conclusion().clone());
                let (node, kind) = if child_ids.is_empty() {
                    (self.b.leaf(conclusion.clone(), NodeKind::Axiom), NodeKind::Axiom)
                } else {
                    (
                        self.b.internal(conclusion.clone(), child_ids),
                        NodeKind::Internal,
                    )
                };
                // resolve discharges waiting for this application
                let mut remaining = Vec::new();
                for (n, t, k) in std::mem::take(&mut self.pending) {
                    if t == token {
                        match k {
                            NodeKind::Axiom => self.b.discharge_axiom(n, node),
                            NodeKind::Internal => self.b.discharge_rule(n, node),
                            NodeKind::Assumption => unreachable!(),
                        }
                    } else {
                        remaining.push((n, t, k));
                    }
                }
                self.pending = remaining;
                if *discharged {
                    let frame = self
                        .scope
                        .iter()
                        .rev()
                        .find(|(_, rules)| rules.contains(rule))
                        .ok_or_else(|| internal_err("a discharged use with no discharger"))?;
                    self.pending.push((node, frame.0, kind));
                }
                Ok((node, conclusion))
            }
        }
    }
}

/// Builds an argument structure from a derivation of `goal` from `gamma`
/// over the base, paired with the standard reductions. Fails with
/// `NotDerivable` when no derivation exists.
pub fn synthesize_witness(
    gamma: &[Formula],
    goal: &Formula,
    base: &Base,
) -> Result<(ArgumentStructure, Justification)> {
    let derivable = prove_extended(&ExtendedSequent {
        context: gamma.to_vec(),
        assumed_rules: Vec::new(),
        base: base.clone(),
        goal: goal.clone(),
    })?;
    if !derivable {
        return Err(Error::NotDerivable(format!(
            "no derivation of `{goal}` over the base"
        )));
    }
    let mut ctx: Vec<(u32, Formula)> = Vec::new();
    let mut next_hyp = 0u32;
    for g in gamma {
        ctx.push((next_hyp, g.clone()));
        next_hyp += 1;
    }
    let delta = translate::star_base(base);
    let delta_start = next_hyp;
    for d in &delta {
        ctx.push((next_hyp, d.clone()));
        next_hyp += 1;
    }
    let term = TermProver::new()
        .prove(&ctx, goal)
        .ok_or_else(|| Error::NotDerivable(format!("no proof term for `{goal}`")))?;
    let mut fresh = max_hyp(&term).max(next_hyp) + 1;
    let mut arg_term = from_term(&term, &mut fresh);
    // base-translation hypotheses become proofs from the rules themselves
    let mut delta_of: HashMap<Formula, &AtomicRule> = HashMap::new();
    for r in base.rules() {
        delta_of.insert(translate::star(r), r);
    }
    for (i, d) in delta.iter().enumerate() {
        let rule = delta_of[d];
        let replacement = star_term(rule, false, &mut fresh);
        arg_term = arg_term.subst(delta_start + i as u32, &replacement);
    }
    let mut tb = TreeBuilder {
        b: StructureBuilder::new(),
        hyp_leaves: HashMap::new(),
        scope: Vec::new(),
        pending: Vec::new(),
        next_token: 0,
    };
    let mut env: HashMap<u32, Formula> = gamma
        .iter()
        .enumerate()
        .map(|(i, g)| (i as u32, g.clone()))
        .collect();
    let (root, ty) = tb.build(&arg_term, &mut env)?;
    if &ty != goal {
        return Err(Error::ConclusionMismatch {
            expected: goal.to_string(),
            got: ty.to_string(),
        });
    }
    if !tb.pending.is_empty() {
        return Err(Error::IllFormedStructure(
            "synthesis left unresolved discharges".into(),
        ));
    }
    let structure = tb.b.finish(root)?;
    Ok((structure, Justification::standard()))
}

fn max_hyp(t: &Term) -> u32 {
    match t {
        Term::Hyp(h) => *h,
        Term::Lam(h, _, b) => (*h).max(max_hyp(b)),
        Term::App(a, b) | Term::Pair(a, b) => max_hyp(a).max(max_hyp(b)),
        Term::Fst(a) | Term::Snd(a) | Term::Inl(a, _) | Term::Inr(a, _) | Term::Abort(a, _) => {
            max_hyp(a)
        }
        Term::Case(s, hl, l, hr, r) => max_hyp(s)
            .max(*hl)
            .max(max_hyp(l))
            .max(*hr)
            .max(max_hyp(r)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_rule, Atom};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn identity_witness_is_the_one_discharge_introduction() {
        let base = Base::empty(&[Atom::new("p").unwrap()]);
        let (d, _) = synthesize_witness(&[], &f("p -> p"), &base).unwrap();
        assert!(d.is_closed());
        assert_eq!(d.conclusion(), &f("p -> p"));
        let expected =
            ArgumentStructure::imp_intro(f("p"), ArgumentStructure::assumption(f("p")));
        assert!(d.structurally_equal(&expected), "got:\n{d}");
    }

    #[test]
    fn underivable_goals_are_refused() {
        let base = Base::empty(&[Atom::new("p").unwrap()]);
        assert!(matches!(
            synthesize_witness(&[], &f("p"), &base),
            Err(Error::NotDerivable(_))
        ));
        // the disjunction-splitting rule is not derivable
        let err = synthesize_witness(
            &[],
            &f("(~p -> q \\/ r) -> (~p -> q) \\/ (~p -> r)"),
            &Base::empty(&[
                Atom::new("p").unwrap(),
                Atom::new("q").unwrap(),
                Atom::new("r").unwrap(),
            ]),
        );
        assert!(matches!(err, Err(Error::NotDerivable(_))));
    }

    #[test]
    fn base_rules_become_rule_applications() {
        use super::super::reduction::{reduces_to, ReductionOutcome, SearchBounds};
        use super::super::validity::is_closed_derivation;
        let base = Base::new(
            vec![parse_rule("p").unwrap(), parse_rule("(p => q)").unwrap()],
            &[],
        );
        let (d, j) = synthesize_witness(&[], &f("q"), &base).unwrap();
        assert!(d.is_closed());
        assert_eq!(d.conclusion(), &f("q"));
        // the witness reduces to a closed derivation over the base
        let outcome = reduces_to(
            &d,
            &j,
            &mut |s| is_closed_derivation(&base, s),
            &SearchBounds::default(),
        )
        .unwrap();
        assert!(
            matches!(outcome, ReductionOutcome::Reached(_)),
            "witness does not reduce to a derivation:\n{d}"
        );
    }

    #[test]
    fn discharging_rules_are_used_and_marked() {
        // the rule ([p] q => r) lets q-from-p derive r
        let base = Base::new(vec![parse_rule("([p] q => r)").unwrap()], &[]);
        // gamma supplies p -> q, so r follows
        let gamma = [f("p -> q")];
        let (d, _) = synthesize_witness(&gamma, &f("r"), &base).unwrap();
        assert_eq!(d.conclusion(), &f("r"));
        assert_eq!(d.assumption_set(), vec![f("p -> q")]);
        // the p-axiom use inside must be discharged somewhere
        assert!(!d.h_map().is_empty(), "got:\n{d}");
    }

    #[test]
    fn open_witnesses_keep_gamma_assumptions() {
        let base = Base::empty(&[Atom::new("p").unwrap(), Atom::new("q").unwrap()]);
        let (d, _) = synthesize_witness(&[f("p"), f("p -> q")], &f("q"), &base).unwrap();
        assert_eq!(d.assumption_set(), vec![f("p"), f("p -> q")]);
        assert_eq!(d.conclusion(), &f("q"));
    }
}
