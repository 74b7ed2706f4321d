//! Reductions, justifications, and the rewriting relation they generate.
//!
//! A reduction is a partial map on argument structures tied to a rule: it
//! preserves the conclusion and can only shrink the open assumptions; both
//! halves of that contract are checked on every application. The standard
//! set holds the three detour reductions for conjunction, disjunction and
//! implication; the weakening and left-disjunct reductions used by the
//! golden examples are available by name; constant reductions with a fixed
//! domain and image can be built for oracle-style tests.
//!
//! Transforms rebuild the whole structure around the redex so that
//! discharge links from inside the redex to outer targets survive the
//! rewrite (or disappear exactly when their nodes do).

use super::structure::{
    classify_intro, ArgumentStructure, IntroRule, NodeId, NodeKind, StructureBuilder,
};
use crate::error::Error;
use crate::syntax::{print_formula, Formula};
use crate::Result;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

#[derive(Clone, Debug)]
enum ReductionKind {
    /// projection over a canonical pair
    ConjDetour,
    /// application over a canonical lambda
    ImpDetour,
    /// case split over a canonical injection
    DisjDetour,
    /// weakening of a canonical implication to a conjoined antecedent
    WkRho,
    /// left projection of a disjunction introduced from its left disjunct
    DisjLambdaRho,
    /// fixed map from one closed structure to another
    Constant {
        domain: Box<ArgumentStructure>,
        image: Box<ArgumentStructure>,
    },
}

/// A named reduction; see the module docs.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub name: String,
    kind: ReductionKind,
}

// ---------------------------------------------------------------------------
// Context-aware rewriting
// ---------------------------------------------------------------------------

/// Builds the rewritten whole structure: the new redex subtree is assembled
/// from copied pieces of the old structure, then the outer context is
/// copied around it. Entries from copied pieces to outer targets are kept
/// pending and re-threaded once the outer context exists; pending entries
/// whose target vanished with the redex are dropped.
struct Surgeon<'a> {
    whole: &'a ArgumentStructure,
    b: StructureBuilder,
    pending: Vec<(NodeId, NodeId, NodeKind)>,
}

impl<'a> Surgeon<'a> {
    fn new(whole: &'a ArgumentStructure) -> Surgeon<'a> {
        Surgeon {
            whole,
            b: StructureBuilder::new(),
            pending: Vec::new(),
        }
    }

    fn leaf(&mut self, formula: Formula, kind: NodeKind) -> NodeId {
        self.b.leaf(formula, kind)
    }

    fn internal(&mut self, formula: Formula, children: Vec<NodeId>) -> NodeId {
        self.b.internal(formula, children)
    }

    /// Copies the subtree of the old structure at `n` as an independent
    /// piece. `replace` may swap designated old leaves for freshly built
    /// subtrees (their construction goes through the surgeon again).
    fn copy_piece(
        &mut self,
        n: NodeId,
        replace: &mut dyn FnMut(&mut Surgeon<'a>, NodeId) -> Option<NodeId>,
    ) -> NodeId {
        let mut local: BTreeMap<NodeId, NodeId> = BTreeMap::new();
        let root = self.copy_piece_nodes(n, replace, &mut local);
        // entries with the domain in this copy: internal targets re-link
        // now, outer targets wait for the context
        for (src_map, kind) in [
            (self.whole.f_map().clone(), NodeKind::Assumption),
            (self.whole.h_map().clone(), NodeKind::Axiom),
            (self.whole.g_map().clone(), NodeKind::Internal),
        ] {
            for (&d, &t) in &src_map {
                if let Some(&nd) = local.get(&d) {
                    if let Some(&nt) = local.get(&t) {
                        match kind {
                            NodeKind::Assumption => self.b.discharge_assumption(nd, nt),
                            NodeKind::Axiom => self.b.discharge_axiom(nd, nt),
                            NodeKind::Internal => self.b.discharge_rule(nd, nt),
                        }
                    } else {
                        self.pending.push((nd, t, kind));
                    }
                }
            }
        }
        root
    }

    fn copy_piece_nodes(
        &mut self,
        n: NodeId,
        replace: &mut dyn FnMut(&mut Surgeon<'a>, NodeId) -> Option<NodeId>,
        local: &mut BTreeMap<NodeId, NodeId>,
    ) -> NodeId {
        if let Some(id) = replace(self, n) {
            return id;
        }
        let node = self.whole.node(n);
        let children: Vec<NodeId> = node
            .children
            .iter()
            .map(|&c| self.copy_piece_nodes(c, replace, local))
            .collect();
        let id = if children.is_empty() && node.kind != NodeKind::Internal {
            self.b.leaf(node.formula.clone(), node.kind)
        } else {
            self.b.internal(node.formula.clone(), children)
        };
        local.insert(n, id);
        id
    }

    /// Copies the outer context around the redex at `at`, plugs in the new
    /// subtree, resolves pending links, and validates.
    fn finish(mut self, at: NodeId, new_subtree: NodeId) -> Result<ArgumentStructure> {
        let mut outer: BTreeMap<NodeId, NodeId> = BTreeMap::new();
        let root = copy_context(
            self.whole,
            self.whole.root(),
            at,
            new_subtree,
            &mut self.b,
            &mut outer,
        );
        for (src_map, kind) in [
            (self.whole.f_map().clone(), NodeKind::Assumption),
            (self.whole.h_map().clone(), NodeKind::Axiom),
            (self.whole.g_map().clone(), NodeKind::Internal),
        ] {
            for (&d, &t) in &src_map {
                if let (Some(&nd), Some(&nt)) = (outer.get(&d), outer.get(&t)) {
                    match kind {
                        NodeKind::Assumption => self.b.discharge_assumption(nd, nt),
                        NodeKind::Axiom => self.b.discharge_axiom(nd, nt),
                        NodeKind::Internal => self.b.discharge_rule(nd, nt),
                    }
                }
            }
        }
        for (nd, old_t, kind) in std::mem::take(&mut self.pending) {
            if let Some(&nt) = outer.get(&old_t) {
                match kind {
                    NodeKind::Assumption => self.b.discharge_assumption(nd, nt),
                    NodeKind::Axiom => self.b.discharge_axiom(nd, nt),
                    NodeKind::Internal => self.b.discharge_rule(nd, nt),
                }
            }
            // otherwise the discharging node vanished with the redex and
            // the link disappears with it
        }
        self.b.finish(root)
    }
}

fn copy_context(
    src: &ArgumentStructure,
    n: NodeId,
    at: NodeId,
    new_subtree: NodeId,
    b: &mut StructureBuilder,
    outer: &mut BTreeMap<NodeId, NodeId>,
) -> NodeId {
    if n == at {
        return new_subtree;
    }
    let node = src.node(n);
    let children: Vec<NodeId> = node
        .children
        .iter()
        .map(|&c| copy_context(src, c, at, new_subtree, b, outer))
        .collect();
    let id = if children.is_empty() && node.kind != NodeKind::Internal {
        b.leaf(node.formula.clone(), node.kind)
    } else {
        b.internal(node.formula.clone(), children)
    };
    outer.insert(n, id);
    id
}

fn no_replacement<'a>() -> impl FnMut(&mut Surgeon<'a>, NodeId) -> Option<NodeId> {
    |_, _| None
}

impl Reduction {
    pub fn conj_detour() -> Reduction {
        Reduction {
            name: "conj-detour".into(),
            kind: ReductionKind::ConjDetour,
        }
    }

    pub fn imp_detour() -> Reduction {
        Reduction {
            name: "imp-detour".into(),
            kind: ReductionKind::ImpDetour,
        }
    }

    pub fn disj_detour() -> Reduction {
        Reduction {
            name: "disj-detour".into(),
            kind: ReductionKind::DisjDetour,
        }
    }

    pub fn wk_rho() -> Reduction {
        Reduction {
            name: "wk".into(),
            kind: ReductionKind::WkRho,
        }
    }

    pub fn disj_lambda_rho() -> Reduction {
        Reduction {
            name: "orl".into(),
            kind: ReductionKind::DisjLambdaRho,
        }
    }

    /// A reduction defined on exactly one closed structure. The contract is
    /// validated up front; closedness keeps it stable under substitution.
    pub fn constant(
        name: &str,
        domain: ArgumentStructure,
        image: ArgumentStructure,
    ) -> Result<Reduction> {
        if domain.conclusion() != image.conclusion() {
            return Err(Error::ContractViolation {
                reduction: name.into(),
                msg: "constant reduction changes the conclusion".into(),
            });
        }
        let dom_as: BTreeSet<Formula> = domain.assumption_set().into_iter().collect();
        let img_as: BTreeSet<Formula> = image.assumption_set().into_iter().collect();
        if !img_as.is_subset(&dom_as) {
            return Err(Error::ContractViolation {
                reduction: name.into(),
                msg: "constant reduction grows the assumptions".into(),
            });
        }
        if !domain.is_closed() {
            return Err(Error::ContractViolation {
                reduction: name.into(),
                msg: "constant reductions need a closed domain".into(),
            });
        }
        Ok(Reduction {
            name: name.into(),
            kind: ReductionKind::Constant {
                domain: Box::new(domain),
                image: Box::new(image),
            },
        })
    }

    /// Applies the reduction to the substructure rooted at `at`, when that
    /// substructure is in the domain; the result is the rewritten whole
    /// structure. The reduction contract is asserted on every application.
    pub fn apply_at(
        &self,
        whole: &ArgumentStructure,
        at: NodeId,
    ) -> Result<Option<ArgumentStructure>> {
        let Some(out) = self.transform(whole, at)? else {
            return Ok(None);
        };
        out.validate()?;
        if out.conclusion() != whole.conclusion() {
            return Err(Error::ContractViolation {
                reduction: self.name.clone(),
                msg: format!(
                    "conclusion changed from `{}` to `{}`",
                    print_formula(whole.conclusion()),
                    print_formula(out.conclusion())
                ),
            });
        }
        let before: BTreeSet<Formula> = whole.assumption_set().into_iter().collect();
        let after: BTreeSet<Formula> = out.assumption_set().into_iter().collect();
        if !after.is_subset(&before) {
            return Err(Error::ContractViolation {
                reduction: self.name.clone(),
                msg: "assumptions grew across the reduction".into(),
            });
        }
        Ok(Some(out))
    }

    fn transform(
        &self,
        whole: &ArgumentStructure,
        at: NodeId,
    ) -> Result<Option<ArgumentStructure>> {
        match &self.kind {
            ReductionKind::ConjDetour => conj_detour(whole, at),
            ReductionKind::ImpDetour => imp_detour(whole, at),
            ReductionKind::DisjDetour => disj_detour(whole, at),
            ReductionKind::WkRho => wk_rho(whole, at),
            ReductionKind::DisjLambdaRho => disj_lambda_rho(whole, at),
            ReductionKind::Constant { domain, image } => {
                let sub = whole.substructure(at);
                if !sub.structurally_equal(domain) {
                    return Ok(None);
                }
                let mut s = Surgeon::new(whole);
                let mut map = BTreeMap::new();
                let new_root = s.b.graft(image, &mut map);
                s.finish(at, new_root).map(Some)
            }
        }
    }
}

/// No discharge entry from anywhere in the structure may target `n` for it
/// to instantiate a discharge-free rule.
fn discharge_free(whole: &ArgumentStructure, n: NodeId) -> bool {
    let (f, h, g) = whole.entries_targeting(n);
    f.is_empty() && h.is_empty() && g.is_empty()
}

/// Canonical-in-context: the subtree at `child` is an introduction and no
/// entry from outside the subtree targets its interior except the intro
/// discharges at `child` itself.
fn intro_at(whole: &ArgumentStructure, child: NodeId) -> Option<IntroRule> {
    classify_intro(&whole.substructure(child))
}

fn conj_detour(whole: &ArgumentStructure, at: NodeId) -> Result<Option<ArgumentStructure>> {
    let node = whole.node(at);
    if node.kind != NodeKind::Internal || node.children.len() != 1 || !discharge_free(whole, at) {
        return Ok(None);
    }
    let child = node.children[0];
    if intro_at(whole, child) != Some(IntroRule::ConjIntro) {
        return Ok(None);
    }
    let (l, r) = match &whole.node(child).formula {
        Formula::Conj(l, r) => ((**l).clone(), (**r).clone()),
        _ => return Ok(None),
    };
    let side = if node.formula == l {
        0
    } else if node.formula == r {
        1
    } else {
        return Ok(None);
    };
    let grandchild = whole.node(child).children[side];
    let mut s = Surgeon::new(whole);
    let new_root = s.copy_piece(grandchild, &mut no_replacement());
    s.finish(at, new_root).map(Some)
}

fn imp_detour(whole: &ArgumentStructure, at: NodeId) -> Result<Option<ArgumentStructure>> {
    let node = whole.node(at);
    if node.kind != NodeKind::Internal || node.children.len() != 2 || !discharge_free(whole, at) {
        return Ok(None);
    }
    let (fun_id, arg_id) = (node.children[0], node.children[1]);
    if intro_at(whole, fun_id) != Some(IntroRule::ImpIntro) {
        return Ok(None);
    }
    let (antecedent, consequent) = match &whole.node(fun_id).formula {
        Formula::Imp(l, r) => ((**l).clone(), (**r).clone()),
        _ => return Ok(None),
    };
    if whole.node(arg_id).formula != antecedent || node.formula != consequent {
        return Ok(None);
    }
    let body_id = whole.node(fun_id).children[0];
    // leaves discharged by the lambda
    let discharged: Vec<NodeId> = whole.entries_targeting(fun_id).0;
    let mut s = Surgeon::new(whole);
    let new_root = s.copy_piece(body_id, &mut |s, n| {
        discharged
            .contains(&n)
            .then(|| s.copy_piece(arg_id, &mut no_replacement()))
    });
    s.finish(at, new_root).map(Some)
}

fn disj_detour(whole: &ArgumentStructure, at: NodeId) -> Result<Option<ArgumentStructure>> {
    let node = whole.node(at);
    if node.kind != NodeKind::Internal || node.children.len() != 3 {
        return Ok(None);
    }
    let (fs, hs, gs) = whole.entries_targeting(at);
    if !hs.is_empty() || !gs.is_empty() {
        return Ok(None);
    }
    let major_id = node.children[0];
    let (left_branch, right_branch) = (node.children[1], node.children[2]);
    let side = match intro_at(whole, major_id) {
        Some(IntroRule::DisjIntroLeft) => 0,
        Some(IntroRule::DisjIntroRight) => 1,
        _ => return Ok(None),
    };
    let (l, r) = match &whole.node(major_id).formula {
        Formula::Disj(l, r) => ((**l).clone(), (**r).clone()),
        _ => return Ok(None),
    };
    let goal = node.formula.clone();
    if whole.node(left_branch).formula != goal || whole.node(right_branch).formula != goal {
        return Ok(None);
    }
    // every assumption discharged here must be a case hypothesis of the
    // matching branch, or this is not an elimination instance
    let in_subtree = |root: NodeId, n: NodeId| n == root || whole.is_proper_ancestor(root, n);
    for &leaf in &fs {
        let ok = (whole.node(leaf).formula == l && in_subtree(left_branch, leaf))
            || (whole.node(leaf).formula == r && in_subtree(right_branch, leaf));
        if !ok {
            return Ok(None);
        }
    }
    let branch_id = if side == 0 { left_branch } else { right_branch };
    let case_label = if side == 0 { l } else { r };
    let injected_id = whole.node(major_id).children[0];
    let replaced: Vec<NodeId> = fs
        .iter()
        .copied()
        .filter(|&leaf| {
            whole.node(leaf).formula == case_label && in_subtree(branch_id, leaf)
        })
        .collect();
    let mut s = Surgeon::new(whole);
    let new_root = s.copy_piece(branch_id, &mut |s, n| {
        replaced
            .contains(&n)
            .then(|| s.copy_piece(injected_id, &mut no_replacement()))
    });
    s.finish(at, new_root).map(Some)
}

fn wk_rho(whole: &ArgumentStructure, at: NodeId) -> Result<Option<ArgumentStructure>> {
    let node = whole.node(at);
    if node.kind != NodeKind::Internal || node.children.len() != 1 || !discharge_free(whole, at) {
        return Ok(None);
    }
    let (conj, b_out) = match &node.formula {
        Formula::Imp(l, r) => match &**l {
            Formula::Conj(_, _) => ((**l).clone(), (**r).clone()),
            _ => return Ok(None),
        },
        _ => return Ok(None),
    };
    let a = match &conj {
        Formula::Conj(a, _) => (**a).clone(),
        _ => unreachable!(),
    };
    let fun_id = node.children[0];
    if intro_at(whole, fun_id) != Some(IntroRule::ImpIntro) {
        return Ok(None);
    }
    match &whole.node(fun_id).formula {
        Formula::Imp(l, r) if **l == a && **r == b_out => {}
        _ => return Ok(None),
    }
    let body_id = whole.node(fun_id).children[0];
    let discharged: Vec<NodeId> = whole.entries_targeting(fun_id).0;
    let mut s = Surgeon::new(whole);
    let mut new_leaves = Vec::new();
    let body_root = s.copy_piece(body_id, &mut |s, n| {
        if discharged.contains(&n) {
            let leaf = s.leaf(conj.clone(), NodeKind::Assumption);
            new_leaves.push(leaf);
            Some(s.internal(a.clone(), vec![leaf]))
        } else {
            None
        }
    });
    let new_root = s.internal(node.formula.clone(), vec![body_root]);
    for leaf in new_leaves {
        s.b.discharge_assumption(leaf, new_root);
    }
    s.finish(at, new_root).map(Some)
}

fn disj_lambda_rho(whole: &ArgumentStructure, at: NodeId) -> Result<Option<ArgumentStructure>> {
    let node = whole.node(at);
    if node.kind != NodeKind::Internal || node.children.len() != 1 || !discharge_free(whole, at) {
        return Ok(None);
    }
    let child_id = node.children[0];
    if intro_at(whole, child_id) != Some(IntroRule::DisjIntroLeft) {
        return Ok(None);
    }
    let left = match &whole.node(child_id).formula {
        Formula::Disj(l, _) => (**l).clone(),
        _ => return Ok(None),
    };
    if node.formula != left {
        return Ok(None);
    }
    let injected = whole.node(child_id).children[0];
    let mut s = Surgeon::new(whole);
    let new_root = s.copy_piece(injected, &mut no_replacement());
    s.finish(at, new_root).map(Some)
}

/// A named finite set of reductions.
#[derive(Clone, Debug)]
pub struct Justification {
    pub name: String,
    pub reductions: Vec<Reduction>,
}

impl Justification {
    pub fn empty() -> Justification {
        Justification {
            name: "empty".into(),
            reductions: Vec::new(),
        }
    }

    /// The detour reductions for the three connectives.
    pub fn standard() -> Justification {
        Justification {
            name: "std".into(),
            reductions: vec![
                Reduction::conj_detour(),
                Reduction::imp_detour(),
                Reduction::disj_detour(),
            ],
        }
    }

    pub fn with(mut self, r: Reduction) -> Justification {
        self.reductions.push(r);
        self
    }

    pub fn union(&self, other: &Justification) -> Justification {
        let mut reductions = self.reductions.clone();
        for r in &other.reductions {
            if !reductions.iter().any(|x| x.name == r.name) {
                reductions.push(r.clone());
            }
        }
        Justification {
            name: format!("{}+{}", self.name, other.name),
            reductions,
        }
    }

    /// Named reduction sets for the CLI: comma-separated `std`, `wk`, `orl`.
    pub fn by_names(names: &str) -> Result<Justification> {
        let mut out = Justification {
            name: names.to_string(),
            reductions: Vec::new(),
        };
        for name in names.split(',') {
            match name.trim() {
                "std" => out
                    .reductions
                    .extend(Justification::standard().reductions),
                "wk" => out.reductions.push(Reduction::wk_rho()),
                "orl" => out.reductions.push(Reduction::disj_lambda_rho()),
                other => {
                    return Err(Error::Syntax {
                        pos: 1,
                        msg: format!("unknown justification `{other}`"),
                    })
                }
            }
        }
        Ok(out)
    }
}

/// All one-step reducts: every reduction applied at every substructure.
/// Deduplicated canonically, ordered by size then canonical key.
pub fn reduce_step(d: &ArgumentStructure, j: &Justification) -> Result<Vec<ArgumentStructure>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for node in d.node_ids() {
        for r in &j.reductions {
            if let Some(next) = r.apply_at(d, node)? {
                let key = next.canonical_key();
                if seen.insert(key) {
                    out.push(next);
                }
            }
        }
    }
    out.sort_by_key(|s| (s.size(), s.canonical_key()));
    Ok(out)
}

/// Bounds for reduction searches.
#[derive(Clone, Copy, Debug)]
pub struct SearchBounds {
    pub max_steps: usize,
    pub max_size: usize,
    pub max_visited: usize,
}

impl Default for SearchBounds {
    fn default() -> SearchBounds {
        SearchBounds {
            max_steps: 10_000,
            max_size: 1_000,
            max_visited: 1 << 20,
        }
    }
}

/// Result of a bounded closure search.
#[derive(Clone, Debug)]
pub enum ReductionOutcome {
    /// A structure satisfying the target, with the path leading to it
    /// (starting from the input).
    Reached(Vec<ArgumentStructure>),
    /// The whole reduction closure was enumerated; nothing satisfied the
    /// target.
    Exhausted,
    /// A resource bound cut the search short.
    BoundHit(String),
}

/// Breadth-first closure of one-step reduction up to the bounds, looking
/// for a structure satisfying `target`. Reflexive: the input itself counts.
pub fn reduces_to(
    d: &ArgumentStructure,
    j: &Justification,
    target: &mut dyn FnMut(&ArgumentStructure) -> bool,
    bounds: &SearchBounds,
) -> Result<ReductionOutcome> {
    let mut visited: BTreeSet<String> = BTreeSet::new();
    let mut arena: Vec<(ArgumentStructure, Option<usize>)> = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    visited.insert(d.canonical_key());
    arena.push((d.clone(), None));
    queue.push_back(0);
    let mut steps = 0usize;
    while let Some(idx) = queue.pop_front() {
        let current = arena[idx].0.clone();
        if target(&current) {
            let mut path = Vec::new();
            let mut cur = Some(idx);
            while let Some(i) = cur {
                path.push(arena[i].0.clone());
                cur = arena[i].1;
            }
            path.reverse();
            return Ok(ReductionOutcome::Reached(path));
        }
        if steps >= bounds.max_steps {
            return Ok(ReductionOutcome::BoundHit(format!(
                "step bound {} reached",
                bounds.max_steps
            )));
        }
        steps += 1;
        for next in reduce_step(&current, j)? {
            if next.size() > bounds.max_size {
                return Ok(ReductionOutcome::BoundHit(format!(
                    "size bound {} exceeded",
                    bounds.max_size
                )));
            }
            if arena.len() >= bounds.max_visited {
                return Ok(ReductionOutcome::BoundHit(format!(
                    "visit bound {} reached",
                    bounds.max_visited
                )));
            }
            if visited.insert(next.canonical_key()) {
                arena.push((next, Some(idx)));
                queue.push_back(arena.len() - 1);
            }
        }
    }
    Ok(ReductionOutcome::Exhausted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn pair_detour_structure() -> ArgumentStructure {
        let pair = ArgumentStructure::infer(
            vec![
                ArgumentStructure::assumption(f("p")),
                ArgumentStructure::assumption(f("q")),
            ],
            f("p /\\ q"),
        );
        ArgumentStructure::infer(vec![pair], f("p"))
    }

    #[test]
    fn conj_detour_projects() {
        let d = pair_detour_structure();
        let j = Justification::standard();
        let reducts = reduce_step(&d, &j).unwrap();
        assert_eq!(reducts.len(), 1);
        assert!(reducts[0].structurally_equal(&ArgumentStructure::assumption(f("p"))));
    }

    #[test]
    fn imp_detour_grafts_argument() {
        let lam = ArgumentStructure::imp_intro(f("p"), ArgumentStructure::assumption(f("p")));
        let app = ArgumentStructure::infer(vec![lam, ArgumentStructure::axiom(f("p"))], f("p"));
        let reducts = reduce_step(&app, &Justification::standard()).unwrap();
        assert_eq!(reducts.len(), 1);
        assert!(reducts[0].structurally_equal(&ArgumentStructure::axiom(f("p"))));
    }

    #[test]
    fn disj_detour_uses_the_injected_branch() {
        // case (inl q : q \/ r) of [q]: q | [r]: q-from-r
        let inl = ArgumentStructure::infer(vec![ArgumentStructure::axiom(f("q"))], f("q \\/ r"));
        let d = {
            let mut b = StructureBuilder::new();
            let major = b.graft(&inl, &mut BTreeMap::new());
            let lb = b.leaf(f("q"), NodeKind::Assumption);
            let rb_leaf = b.leaf(f("r"), NodeKind::Assumption);
            let rb = b.internal(f("q"), vec![rb_leaf]);
            let root = b.internal(f("q"), vec![major, lb, rb]);
            b.discharge_assumption(lb, root);
            b.discharge_assumption(rb_leaf, root);
            b.finish(root).unwrap()
        };
        let reducts = reduce_step(&d, &Justification::standard()).unwrap();
        assert_eq!(reducts.len(), 1);
        assert!(reducts[0].structurally_equal(&ArgumentStructure::axiom(f("q"))));
    }

    #[test]
    fn disj_detour_rethreads_outer_discharges() {
        // the reduction happens under an implication introduction whose
        // discharge must survive: \a. case (inl a-proof) of b: use-a | c: ...
        // body: from a (assumed) infer b; inject to b \/ c; case on it with
        // branches concluding d using the case hypotheses
        let mut b = StructureBuilder::new();
        let a_leaf = b.leaf(f("a"), NodeKind::Assumption);
        let b_node = b.internal(f("b"), vec![a_leaf]);
        let inj = b.internal(f("b \\/ c"), vec![b_node]);
        let lb = b.leaf(f("b"), NodeKind::Assumption);
        let d_left = b.internal(f("d"), vec![lb]);
        let rb = b.leaf(f("c"), NodeKind::Assumption);
        let d_right = b.internal(f("d"), vec![rb]);
        let case = b.internal(f("d"), vec![inj, d_left, d_right]);
        let root = b.internal(f("a -> d"), vec![case]);
        b.discharge_assumption(lb, case);
        b.discharge_assumption(rb, case);
        b.discharge_assumption(a_leaf, root);
        let d = b.finish(root).unwrap();
        assert!(d.is_closed());
        let reducts = reduce_step(&d, &Justification::standard()).unwrap();
        assert_eq!(reducts.len(), 1);
        let got = &reducts[0];
        // the a-assumption inside the moved subproof stays discharged at
        // the outer implication introduction
        assert!(got.is_closed(), "outer discharge was lost:\n{got}");
        assert_eq!(got.conclusion(), &f("a -> d"));
        assert_eq!(got.f_map().len(), 1);
    }

    #[test]
    fn wk_reduct_matches_the_figure() {
        let lam = ArgumentStructure::imp_intro(
            f("p"),
            ArgumentStructure::infer(vec![ArgumentStructure::assumption(f("p"))], f("q")),
        );
        let wk = ArgumentStructure::infer(vec![lam], f("p /\\ r -> q"));
        let reducts =
            reduce_step(&wk, &Justification::empty().with(Reduction::wk_rho())).unwrap();
        assert_eq!(reducts.len(), 1);
        let got = &reducts[0];
        assert_eq!(got.conclusion(), &f("p /\\ r -> q"));
        assert!(got.is_closed());
        let expected = {
            let mut b = StructureBuilder::new();
            let leaf = b.leaf(f("p /\\ r"), NodeKind::Assumption);
            let proj = b.internal(f("p"), vec![leaf]);
            let q = b.internal(f("q"), vec![proj]);
            let root = b.internal(f("p /\\ r -> q"), vec![q]);
            b.discharge_assumption(leaf, root);
            b.finish(root).unwrap()
        };
        assert!(got.structurally_equal(&expected));
    }

    #[test]
    fn left_disjunct_reduction_applies_only_to_left_injections() {
        let left = ArgumentStructure::infer(vec![ArgumentStructure::axiom(f("a"))], f("a \\/ b"));
        let proj = ArgumentStructure::infer(vec![left], f("a"));
        let j = Justification::empty().with(Reduction::disj_lambda_rho());
        let reducts = reduce_step(&proj, &j).unwrap();
        assert_eq!(reducts.len(), 1);
        assert!(reducts[0].structurally_equal(&ArgumentStructure::axiom(f("a"))));
        let right = ArgumentStructure::infer(vec![ArgumentStructure::axiom(f("b"))], f("a \\/ b"));
        let proj = ArgumentStructure::infer(vec![right], f("a"));
        assert!(reduce_step(&proj, &j).unwrap().is_empty());
    }

    #[test]
    fn no_redex_means_no_reducts() {
        let d = ArgumentStructure::assumption(f("p"));
        assert!(reduce_step(&d, &Justification::standard())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn reduces_to_is_reflexive_and_terminates() {
        let d = pair_detour_structure();
        let bounds = SearchBounds::default();
        match reduces_to(&d, &Justification::standard(), &mut |_| true, &bounds).unwrap() {
            ReductionOutcome::Reached(path) => assert_eq!(path.len(), 1),
            other => panic!("expected immediate hit, got {other:?}"),
        }
        match reduces_to(
            &d,
            &Justification::standard(),
            &mut |s| s.node(s.root()).kind == NodeKind::Axiom,
            &bounds,
        )
        .unwrap()
        {
            ReductionOutcome::Exhausted => {}
            other => panic!("expected exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn constant_reduction_checks_its_contract() {
        let dom = pair_detour_structure();
        assert!(Reduction::constant("c", dom, ArgumentStructure::axiom(f("p"))).is_err());
        let closed =
            ArgumentStructure::infer(vec![ArgumentStructure::axiom(f("p"))], f("p \\/ q"));
        let image =
            ArgumentStructure::infer(vec![ArgumentStructure::axiom(f("p"))], f("p \\/ q"));
        let c = Reduction::constant("c", closed.clone(), image).unwrap();
        let applied = c.apply_at(&closed, closed.root()).unwrap();
        assert!(applied.is_some());
        assert!(
            Reduction::constant("bad", closed, ArgumentStructure::axiom(f("p"))).is_err()
        );
    }
}
