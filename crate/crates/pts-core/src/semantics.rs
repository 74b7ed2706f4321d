//! Exact evaluation of the two base-extension consequence relations over a
//! finite universe: the standard reading, where disjunction holds through
//! one of its disjuncts, and the Sandqvist reading, where disjunction holds
//! when every atom that follows from both disjuncts over every extension
//! already holds.
//!
//! Every "for every extension" quantifier ranges over the supersets of the
//! current base within the universe's candidate rules, and every "for every
//! atom" quantifier over the universe alphabet plus `bot`. Verdicts are
//! memoized per (selector, base mask, formula); a fact proved at a base is
//! reused at supersets, which is sound because both relations are monotone
//! under base extension.

use crate::derive::{self, Engine};
use crate::error::Error;
use crate::ipc::{Arena, FId, Node};
use crate::rules::{Base, BaseMask, Universe};
use crate::syntax::{Atom, Formula};
use crate::Result;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Which disjunction clause the evaluator uses.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum SemanticsSelector {
    Standard,
    Sandqvist,
}

impl SemanticsSelector {
    pub fn parse(text: &str) -> Result<SemanticsSelector> {
        match text {
            "std" | "standard" => Ok(SemanticsSelector::Standard),
            "sand" | "sandqvist" => Ok(SemanticsSelector::Sandqvist),
            other => Err(Error::Syntax {
                pos: 1,
                msg: format!("unknown semantics `{other}` (use std or sand)"),
            }),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SemanticsSelector::Standard => "standard",
            SemanticsSelector::Sandqvist => "sandqvist",
        }
    }
}

/// Counters exposed through the CLI `--stats` flag.
#[derive(Clone, Copy, Default, Debug, Serialize)]
pub struct EvalStats {
    pub cache_hits: u64,
    pub extensions_visited: u64,
    pub derivability_queries: u64,
}

/// An interned formula inside one evaluation context.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct FormulaId(pub(crate) FId);

/// Evaluation context over one universe: shared derivability engine,
/// formula arena and verdict memos.
pub struct EvalContext<'u> {
    universe: &'u Universe,
    arena: Arena,
    engine: Engine,
    atom_ids: Vec<FId>,
    atom_of: HashMap<FId, Atom>,
    mask_bits: HashMap<BaseMask, derive::Bits>,
    derivable_memo: HashMap<(BaseMask, FId), bool>,
    valid_memo: HashMap<(SemanticsSelector, BaseMask, FId), bool>,
    cons_memo: HashMap<(SemanticsSelector, BaseMask, Box<[FId]>, FId), bool>,
    /// masks already known to validate a formula, for the monotone shortcut
    known_true: HashMap<(SemanticsSelector, FId), Vec<BaseMask>>,
    pub stats: EvalStats,
}

impl<'u> EvalContext<'u> {
    pub fn new(universe: &'u Universe) -> EvalContext<'u> {
        let engine = Engine::new(universe.candidates().to_vec(), universe.alphabet());
        let mut arena = Arena::new();
        let mut atom_ids = Vec::new();
        let mut atom_of = HashMap::new();
        for a in universe.atoms_with_bot() {
            let id = arena.intern(&Formula::Atom(a.clone()));
            atom_ids.push(id);
            atom_of.insert(id, a);
        }
        EvalContext {
            universe,
            arena,
            engine,
            atom_ids,
            atom_of,
            mask_bits: HashMap::new(),
            derivable_memo: HashMap::new(),
            valid_memo: HashMap::new(),
            cons_memo: HashMap::new(),
            known_true: HashMap::new(),
            stats: EvalStats::default(),
        }
    }

    pub fn universe(&self) -> &'u Universe {
        self.universe
    }

    /// Encodes a base, failing when it lies outside the universe.
    pub fn mask_for(&self, base: &Base) -> Result<BaseMask> {
        self.universe.base_mask(base)
    }

    /// Interns a formula, rejecting atoms outside the universe alphabet.
    pub fn intern(&mut self, f: &Formula) -> Result<FormulaId> {
        for a in f.atoms() {
            if !a.is_bot() && !self.universe.alphabet().contains(&a) {
                return Err(Error::UniverseMismatch(format!(
                    "atom `{a}` is not in the universe alphabet"
                )));
            }
        }
        Ok(FormulaId(self.arena.intern(f)))
    }

    fn derivable(&mut self, mask: BaseMask, atom_fid: FId) -> bool {
        if let Some(&v) = self.derivable_memo.get(&(mask, atom_fid)) {
            self.stats.cache_hits += 1;
            return v;
        }
        self.stats.derivability_queries += 1;
        let atom = self.atom_of[&atom_fid].clone();
        let bits = match self.mask_bits.get(&mask) {
            Some(b) => b.clone(),
            None => {
                let b = self.engine.bits_for_mask(self.universe, mask);
                self.mask_bits.insert(mask, b.clone());
                b
            }
        };
        let v = self.engine.solve(&bits, &atom);
        self.derivable_memo.insert((mask, atom_fid), v);
        v
    }

    /// Validity of a formula at a base.
    pub fn valid(
        &mut self,
        sel: SemanticsSelector,
        mask: BaseMask,
        f: &Formula,
    ) -> Result<bool> {
        let id = self.intern(f)?;
        Ok(self.valid_id(sel, mask, id))
    }

    pub fn valid_id(&mut self, sel: SemanticsSelector, mask: BaseMask, f: FormulaId) -> bool {
        let fid = f.0;
        if let Some(&v) = self.valid_memo.get(&(sel, mask, fid)) {
            self.stats.cache_hits += 1;
            return v;
        }
        // monotone shortcut: a fact established at a subset persists
        if let Some(masks) = self.known_true.get(&(sel, fid)) {
            if masks.iter().any(|&m| m & mask == m) {
                self.stats.cache_hits += 1;
                self.valid_memo.insert((sel, mask, fid), true);
                return true;
            }
        }
        let v = match self.arena.node(fid) {
            Node::Atom(_) => self.derivable(mask, fid),
            Node::Conj(l, r) => self.valid_conj_parts(sel, mask, FormulaId(l), FormulaId(r)),
            Node::Disj(l, r) => self.valid_disj_parts(sel, mask, FormulaId(l), FormulaId(r)),
            Node::Imp(l, r) => self.valid_imp_parts(sel, mask, FormulaId(l), FormulaId(r)),
        };
        self.valid_memo.insert((sel, mask, fid), v);
        if v {
            self.known_true.entry((sel, fid)).or_default().push(mask);
        }
        v
    }

    /// The conjunction clause on already-interned components.
    pub fn valid_conj_parts(
        &mut self,
        sel: SemanticsSelector,
        mask: BaseMask,
        l: FormulaId,
        r: FormulaId,
    ) -> bool {
        self.valid_id(sel, mask, l) && self.valid_id(sel, mask, r)
    }

    /// The disjunction clause on already-interned components: by a disjunct
    /// under the standard reading; by atomic elimination over all
    /// extensions and all atoms under the Sandqvist reading.
    pub fn valid_disj_parts(
        &mut self,
        sel: SemanticsSelector,
        mask: BaseMask,
        l: FormulaId,
        r: FormulaId,
    ) -> bool {
        match sel {
            SemanticsSelector::Standard => {
                self.valid_id(sel, mask, l) || self.valid_id(sel, mask, r)
            }
            SemanticsSelector::Sandqvist => {
                let exts = self.universe.extensions(mask);
                let atom_ids = self.atom_ids.clone();
                for ext in exts {
                    self.stats.extensions_visited += 1;
                    for &d in &atom_ids {
                        let both = self.consequence_parts(sel, ext, &[l.0], d)
                            && self.consequence_parts(sel, ext, &[r.0], d);
                        if both && !self.valid_id(sel, ext, FormulaId(d)) {
                            return false;
                        }
                    }
                }
                true
            }
        }
    }

    /// The implication clause on already-interned components.
    pub fn valid_imp_parts(
        &mut self,
        sel: SemanticsSelector,
        mask: BaseMask,
        l: FormulaId,
        r: FormulaId,
    ) -> bool {
        self.consequence_parts(sel, mask, &[l.0], r.0)
    }

    /// Consequence of a premise set at a base: empty premises reduce to
    /// validity; otherwise every extension validating all premises must
    /// validate the conclusion.
    pub fn consequence(
        &mut self,
        sel: SemanticsSelector,
        mask: BaseMask,
        gamma: &[Formula],
        a: &Formula,
    ) -> Result<bool> {
        let mut ids = Vec::with_capacity(gamma.len());
        for g in gamma {
            ids.push(self.intern(g)?.0);
        }
        let a = self.intern(a)?;
        Ok(self.consequence_parts(sel, mask, &ids, a.0))
    }

    pub fn consequence_id(
        &mut self,
        sel: SemanticsSelector,
        mask: BaseMask,
        gamma: &[FormulaId],
        a: FormulaId,
    ) -> bool {
        let ids: Vec<FId> = gamma.iter().map(|g| g.0).collect();
        self.consequence_parts(sel, mask, &ids, a.0)
    }

    fn consequence_parts(
        &mut self,
        sel: SemanticsSelector,
        mask: BaseMask,
        gamma: &[FId],
        a: FId,
    ) -> bool {
        if gamma.is_empty() {
            return self.valid_id(sel, mask, FormulaId(a));
        }
        let mut key: Vec<FId> = gamma.to_vec();
        key.sort_unstable();
        key.dedup();
        let key = key.into_boxed_slice();
        if let Some(&v) = self.cons_memo.get(&(sel, mask, key.clone(), a)) {
            self.stats.cache_hits += 1;
            return v;
        }
        let mut result = true;
        for ext in self.universe.extensions(mask) {
            self.stats.extensions_visited += 1;
            let premises_hold = key
                .iter()
                .all(|&g| self.valid_id(sel, ext, FormulaId(g)));
            if premises_hold && !self.valid_id(sel, ext, FormulaId(a)) {
                result = false;
                break;
            }
        }
        self.cons_memo.insert((sel, mask, key, a), result);
        result
    }

    /// Logical consequence over the universe: consequence at the empty
    /// base, which agrees with quantifying over every base.
    pub fn logical_consequence(
        &mut self,
        sel: SemanticsSelector,
        gamma: &[Formula],
        a: &Formula,
    ) -> Result<bool> {
        self.consequence(sel, 0, gamma, a)
    }

    /// The argument-level consequence relation read through its equivalence
    /// with the standard reading; exposed so reports can name it.
    pub fn alpha_consequence(
        &mut self,
        mask: BaseMask,
        gamma: &[Formula],
        a: &Formula,
    ) -> Result<bool> {
        self.consequence(SemanticsSelector::Standard, mask, gamma, a)
    }

    /// Evaluates a query at every base of the universe; returns the masks
    /// where it holds.
    pub fn sweep(
        &mut self,
        sel: SemanticsSelector,
        gamma: &[Formula],
        a: &Formula,
    ) -> Result<Vec<BaseMask>> {
        let mut ids = Vec::with_capacity(gamma.len());
        for g in gamma {
            ids.push(self.intern(g)?.0);
        }
        let a = self.intern(a)?.0;
        let mut out = Vec::new();
        for mask in self.universe.all_bases() {
            if self.consequence_parts(sel, mask, &ids, a) {
                out.push(mask);
            }
        }
        Ok(out)
    }
}

/// The inclusion-minimal masks of a validating set.
pub fn minimal_masks(masks: &[BaseMask]) -> Vec<BaseMask> {
    masks
        .iter()
        .copied()
        .filter(|&m| !masks.iter().any(|&o| o != m && o & m == o))
        .collect()
}

// ---------------------------------------------------------------------------
// Reference evaluator
// ---------------------------------------------------------------------------

/// Plain recursive evaluation with no memoization, no pruning and no shared
/// engine: derivability is recomputed from materialized bases on every
/// query. Exists as the independent route for cache-coherence checks.
pub fn valid_plain(
    universe: &Universe,
    sel: SemanticsSelector,
    mask: BaseMask,
    f: &Formula,
) -> bool {
    match f {
        Formula::Atom(a) => {
            let base = universe.base_from_mask(mask);
            derive::derives(&base, &[], a)
        }
        Formula::Conj(l, r) => {
            valid_plain(universe, sel, mask, l) && valid_plain(universe, sel, mask, r)
        }
        Formula::Disj(l, r) => match sel {
            SemanticsSelector::Standard => {
                valid_plain(universe, sel, mask, l) || valid_plain(universe, sel, mask, r)
            }
            SemanticsSelector::Sandqvist => {
                let atoms = universe.atoms_with_bot();
                universe.extensions(mask).into_iter().all(|ext| {
                    atoms.iter().all(|d| {
                        let d = Formula::Atom(d.clone());
                        let both = consequence_plain(universe, sel, ext, &[(**l).clone()], &d)
                            && consequence_plain(universe, sel, ext, &[(**r).clone()], &d);
                        !both || valid_plain(universe, sel, ext, &d)
                    })
                })
            }
        },
        Formula::Imp(l, r) => consequence_plain(universe, sel, mask, &[(**l).clone()], r),
    }
}

/// Reference consequence evaluation; see [`valid_plain`].
pub fn consequence_plain(
    universe: &Universe,
    sel: SemanticsSelector,
    mask: BaseMask,
    gamma: &[Formula],
    a: &Formula,
) -> bool {
    if gamma.is_empty() {
        return valid_plain(universe, sel, mask, a);
    }
    universe.extensions(mask).into_iter().all(|ext| {
        let premises_hold = gamma.iter().all(|g| valid_plain(universe, sel, ext, g));
        !premises_hold || valid_plain(universe, sel, ext, a)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::parse_universe_file;
    use crate::syntax::{parse_formula, parse_rule};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn small_universe() -> Universe {
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

    /// The universe instantiating the second-level scheme over {a, b, c},
    /// with the atom axioms as further candidates.
    fn scheme_universe() -> Universe {
        let text = "@level 2\n@alphabet a b c\n@candidates\na\nb\nc\n@scheme (a, [b] D, [c] D => D) over D\n";
        parse_universe_file(text, "r.univ").unwrap()
    }

    fn scheme_base(u: &Universe) -> BaseMask {
        let rules: Vec<_> = u
            .candidates()
            .iter()
            .filter(|r| !r.is_axiom())
            .cloned()
            .collect();
        assert_eq!(rules.len(), 4);
        u.base_mask(&Base::new(rules, u.alphabet())).unwrap()
    }

    #[test]
    fn atoms_need_derivability() {
        let u = small_universe();
        let mut ctx = EvalContext::new(&u);
        for sel in [SemanticsSelector::Standard, SemanticsSelector::Sandqvist] {
            assert!(!ctx.valid(sel, 0, &f("p")).unwrap());
            let p_axiom = u.base_mask(&Base::new(vec![parse_rule("p").unwrap()], u.alphabet())).unwrap();
            assert!(ctx.valid(sel, p_axiom, &f("p")).unwrap());
        }
    }

    #[test]
    fn standard_disjunction_is_introduction_based() {
        let u = small_universe();
        let mut ctx = EvalContext::new(&u);
        let p_axiom = u
            .base_mask(&Base::new(vec![parse_rule("p").unwrap()], u.alphabet()))
            .unwrap();
        assert!(ctx
            .valid(SemanticsSelector::Standard, p_axiom, &f("p \\/ q"))
            .unwrap());
        // and valid disjuncts suffice for the Sandqvist reading as well
        assert!(ctx
            .valid(SemanticsSelector::Sandqvist, p_axiom, &f("p \\/ q"))
            .unwrap());
    }

    #[test]
    fn identity_consequence_holds_everywhere() {
        let u = small_universe();
        let mut ctx = EvalContext::new(&u);
        for sel in [SemanticsSelector::Standard, SemanticsSelector::Sandqvist] {
            for mask in u.all_bases() {
                assert!(ctx.consequence(sel, mask, &[f("p")], &f("p")).unwrap());
                assert!(ctx.valid(sel, mask, &f("p -> p")).unwrap());
            }
        }
    }

    #[test]
    fn bot_validity_means_every_atom_derivable() {
        let u = Universe::infer(
            vec![
                parse_rule("p").unwrap(),
                parse_rule("(p => bot)").unwrap(),
                parse_rule("q").unwrap(),
            ],
            &[],
        )
        .unwrap();
        let mut ctx = EvalContext::new(&u);
        for sel in [SemanticsSelector::Standard, SemanticsSelector::Sandqvist] {
            for mask in u.all_bases() {
                let bot_valid = ctx.valid(sel, mask, &Formula::bot()).unwrap();
                let all_atoms = u
                    .atoms_with_bot()
                    .iter()
                    .all(|a| ctx.valid(sel, mask, &Formula::Atom(a.clone())).unwrap());
                assert_eq!(bot_valid, all_atoms, "mask {mask}");
            }
        }
    }

    #[test]
    fn scheme_universe_separates_the_selectors() {
        let u = scheme_universe();
        let base = scheme_base(&u);
        let mut ctx = EvalContext::new(&u);
        let gamma = [f("a")];
        let goal = f("b \\/ c");
        assert!(ctx
            .consequence(SemanticsSelector::Sandqvist, base, &gamma, &goal)
            .unwrap());
        assert!(!ctx
            .consequence(SemanticsSelector::Standard, base, &gamma, &goal)
            .unwrap());
        // neither disjunct is a Sandqvist consequence on its own
        assert!(!ctx
            .consequence(SemanticsSelector::Sandqvist, base, &gamma, &f("b"))
            .unwrap());
        assert!(!ctx
            .consequence(SemanticsSelector::Sandqvist, base, &gamma, &f("c"))
            .unwrap());
    }

    #[test]
    fn memoized_and_plain_evaluators_agree() {
        let u = small_universe();
        let mut ctx = EvalContext::new(&u);
        let formulas = [
            f("p"),
            f("q"),
            f("bot"),
            f("p -> q"),
            f("p \\/ q"),
            f("p /\\ q"),
            f("~p"),
            f("(p -> q) -> q"),
            f("p \\/ q -> q"),
        ];
        for sel in [SemanticsSelector::Standard, SemanticsSelector::Sandqvist] {
            for mask in u.all_bases() {
                for g in &formulas {
                    assert_eq!(
                        ctx.valid(sel, mask, g).unwrap(),
                        valid_plain(&u, sel, mask, g),
                        "sel {sel:?} mask {mask} formula {g}"
                    );
                }
            }
        }
    }

    #[test]
    fn logical_consequence_is_empty_base_consequence() {
        let u = small_universe();
        let mut ctx = EvalContext::new(&u);
        assert!(ctx
            .logical_consequence(SemanticsSelector::Standard, &[], &f("p -> p"))
            .unwrap());
        assert!(!ctx
            .logical_consequence(SemanticsSelector::Standard, &[], &f("p"))
            .unwrap());
        // alpha is the standard reading under a different name
        assert!(ctx.alpha_consequence(0, &[], &f("p -> p")).unwrap());
    }

    #[test]
    fn foreign_atoms_are_rejected() {
        let u = small_universe();
        let mut ctx = EvalContext::new(&u);
        assert!(matches!(
            ctx.valid(SemanticsSelector::Standard, 0, &f("zz")),
            Err(Error::UniverseMismatch(_))
        ));
    }

    #[test]
    fn sweep_finds_minimal_validating_bases() {
        let u = small_universe();
        let mut ctx = EvalContext::new(&u);
        let masks = ctx
            .sweep(SemanticsSelector::Standard, &[], &f("q"))
            .unwrap();
        // q is valid where the q axiom is present, or where p and p => q are
        let minimal = minimal_masks(&masks);
        assert_eq!(minimal.len(), 2);
    }
}
