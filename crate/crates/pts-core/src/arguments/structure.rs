//! Labelled finite trees with three discharge maps.
//!
//! A structure's tree grows upward from the root (the conclusion); leaves
//! are assumptions or axiom uses (level-0 rules). The `f` map discharges
//! assumption leaves, `h` discharges axiom leaves, and `g` discharges
//! whole rule applications (an internal node read together with its atomic
//! children); each map sends its item to a node strictly nearer the root.
//!
//! The textual format is an s-expression per node:
//!
//! ```text
//! (infer "FORMULA" [:tag N] [:d M] CHILD...)
//! (assume "FORMULA" [:d M])
//! (axiom "ATOM" [:d M])
//! ```
//!
//! `:tag N` names a node so that discharge annotations `:d M` elsewhere can
//! point at it. The printer always tags with preorder indices, so printed
//! text doubles as a canonical form: two structures are equal exactly when
//! their printed forms coincide.

use crate::error::Error;
use crate::syntax::{parse_formula, print_formula, Formula};
use crate::Result;
use std::collections::BTreeMap;
use std::fmt;

pub type NodeId = usize;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum NodeKind {
    Internal,
    Assumption,
    Axiom,
}

#[derive(Clone, Debug)]
pub struct ArgNode {
    pub formula: Formula,
    pub children: Vec<NodeId>,
    pub kind: NodeKind,
}

/// A rooted labelled tree with discharge maps; see the module docs.
#[derive(Clone, Debug)]
pub struct ArgumentStructure {
    nodes: Vec<ArgNode>,
    root: NodeId,
    f: BTreeMap<NodeId, NodeId>,
    h: BTreeMap<NodeId, NodeId>,
    g: BTreeMap<NodeId, NodeId>,
}

/// Incremental construction with explicit node ids; `finish` validates.
#[derive(Default)]
pub struct StructureBuilder {
    nodes: Vec<ArgNode>,
    f: BTreeMap<NodeId, NodeId>,
    h: BTreeMap<NodeId, NodeId>,
    g: BTreeMap<NodeId, NodeId>,
}

impl StructureBuilder {
    pub fn new() -> StructureBuilder {
        StructureBuilder::default()
    }

    pub fn leaf(&mut self, formula: Formula, kind: NodeKind) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(ArgNode {
            formula,
            children: Vec::new(),
            kind,
        });
        id
    }

    pub fn internal(&mut self, formula: Formula, children: Vec<NodeId>) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(ArgNode {
            formula,
            children,
            kind: NodeKind::Internal,
        });
        id
    }

    pub fn discharge_assumption(&mut self, leaf: NodeId, target: NodeId) {
        self.f.insert(leaf, target);
    }

    pub fn discharge_axiom(&mut self, leaf: NodeId, target: NodeId) {
        self.h.insert(leaf, target);
    }

    pub fn discharge_rule(&mut self, node: NodeId, target: NodeId) {
        self.g.insert(node, target);
    }

    /// Copies a whole structure into this builder; returns the new root and
    /// fills `map` with old-to-new ids. Discharge entries are copied along.
    pub fn graft(&mut self, src: &ArgumentStructure, map: &mut BTreeMap<NodeId, NodeId>) -> NodeId {
        self.graft_subtree(src, src.root, map)
    }

    /// Copies the subtree of `src` rooted at `n`. Entries with both ends
    /// inside the subtree are kept; entries whose target lies outside are
    /// dropped (the copied leaves become open).
    pub fn graft_subtree(
        &mut self,
        src: &ArgumentStructure,
        n: NodeId,
        map: &mut BTreeMap<NodeId, NodeId>,
    ) -> NodeId {
        let before: Vec<NodeId> = map.keys().copied().collect();
        let id = self.copy_nodes(src, n, map);
        self.copy_entries(src, map, &before);
        id
    }

    fn copy_nodes(
        &mut self,
        src: &ArgumentStructure,
        n: NodeId,
        map: &mut BTreeMap<NodeId, NodeId>,
    ) -> NodeId {
        let node = &src.nodes[n];
        let children: Vec<NodeId> = node
            .children
            .iter()
            .map(|&c| self.copy_nodes(src, c, map))
            .collect();
        let id = if children.is_empty() && node.kind != NodeKind::Internal {
            self.leaf(node.formula.clone(), node.kind)
        } else {
            self.internal(node.formula.clone(), children)
        };
        map.insert(n, id);
        id
    }

    /// Copies every discharge entry whose endpoints were both added to the
    /// map by the present copy (i.e. are not in `before`).
    fn copy_entries(
        &mut self,
        src: &ArgumentStructure,
        map: &BTreeMap<NodeId, NodeId>,
        before: &[NodeId],
    ) {
        let fresh = |n: NodeId| map.contains_key(&n) && !before.contains(&n);
        for (&d, &t) in &src.f {
            if fresh(d) && fresh(t) {
                self.f.insert(map[&d], map[&t]);
            }
        }
        for (&d, &t) in &src.h {
            if fresh(d) && fresh(t) {
                self.h.insert(map[&d], map[&t]);
            }
        }
        for (&d, &t) in &src.g {
            if fresh(d) && fresh(t) {
                self.g.insert(map[&d], map[&t]);
            }
        }
    }

    pub fn finish(self, root: NodeId) -> Result<ArgumentStructure> {
        let s = ArgumentStructure {
            nodes: self.nodes,
            root,
            f: self.f,
            h: self.h,
            g: self.g,
        };
        s.validate()?;
        Ok(s)
    }
}

impl ArgumentStructure {
    pub fn assumption(formula: Formula) -> ArgumentStructure {
        let mut b = StructureBuilder::new();
        let root = b.leaf(formula, NodeKind::Assumption);
        b.finish(root).expect("single leaf is well-formed")
    }

    pub fn axiom(formula: Formula) -> ArgumentStructure {
        let mut b = StructureBuilder::new();
        let root = b.leaf(formula, NodeKind::Axiom);
        b.finish(root).expect("single leaf is well-formed")
    }

    /// Conjoins subtrees under a fresh root with no discharge extension.
    pub fn infer(children: Vec<ArgumentStructure>, conclusion: Formula) -> ArgumentStructure {
        let mut b = StructureBuilder::new();
        let ids: Vec<NodeId> = children
            .iter()
            .map(|c| b.graft(c, &mut BTreeMap::new()))
            .collect();
        let root = b.internal(conclusion, ids);
        b.finish(root).expect("conjoining well-formed parts")
    }

    /// An implication introduction discharging every open assumption leaf
    /// labelled by the antecedent.
    pub fn imp_intro(antecedent: Formula, body: ArgumentStructure) -> ArgumentStructure {
        let conclusion = Formula::imp(antecedent.clone(), body.conclusion().clone());
        let mut b = StructureBuilder::new();
        let mut map = BTreeMap::new();
        let child = b.graft(&body, &mut map);
        let root = b.internal(conclusion, vec![child]);
        for (leaf, _) in body.assumptions() {
            if body.nodes[leaf].formula == antecedent {
                b.discharge_assumption(map[&leaf], root);
            }
        }
        b.finish(root).expect("implication introduction")
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, n: NodeId) -> &ArgNode {
        &self.nodes[n]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        0..self.nodes.len()
    }

    pub fn conclusion(&self) -> &Formula {
        &self.nodes[self.root].formula
    }

    pub fn f_map(&self) -> &BTreeMap<NodeId, NodeId> {
        &self.f
    }

    pub fn h_map(&self) -> &BTreeMap<NodeId, NodeId> {
        &self.h
    }

    pub fn g_map(&self) -> &BTreeMap<NodeId, NodeId> {
        &self.g
    }

    /// Entries of any discharge map targeting `n`.
    pub fn entries_targeting(&self, n: NodeId) -> (Vec<NodeId>, Vec<NodeId>, Vec<NodeId>) {
        let pick = |m: &BTreeMap<NodeId, NodeId>| {
            m.iter()
                .filter(|(_, &t)| t == n)
                .map(|(&d, _)| d)
                .collect::<Vec<_>>()
        };
        (pick(&self.f), pick(&self.h), pick(&self.g))
    }

    fn parents(&self) -> Vec<Option<NodeId>> {
        let mut p = vec![None; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            for &c in &n.children {
                p[c] = Some(i);
            }
        }
        p
    }

    /// True when `a` lies strictly on the path from `n` to the root.
    pub fn is_proper_ancestor(&self, a: NodeId, n: NodeId) -> bool {
        let parents = self.parents();
        let mut cur = parents[n];
        while let Some(p) = cur {
            if p == a {
                return true;
            }
            cur = parents[p];
        }
        false
    }

    /// Open assumptions: assumption leaves outside the domain of `f`.
    pub fn assumptions(&self) -> Vec<(NodeId, &Formula)> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(i, n)| n.kind == NodeKind::Assumption && !self.f.contains_key(i))
            .map(|(i, n)| (i, &n.formula))
            .collect()
    }

    /// Open assumption labels, deduplicated and sorted.
    pub fn assumption_set(&self) -> Vec<Formula> {
        let mut out: Vec<Formula> = self
            .assumptions()
            .into_iter()
            .map(|(_, f)| f.clone())
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn is_closed(&self) -> bool {
        self.assumptions().is_empty()
    }

    /// Well-formedness: a genuine tree plus the discharge side conditions.
    pub fn validate(&self) -> Result<()> {
        let err = |msg: String| Err(Error::IllFormedStructure(msg));
        if self.nodes.is_empty() {
            return err("empty structure".into());
        }
        if self.root >= self.nodes.len() {
            return err("root out of range".into());
        }
        // every node except the root has exactly one parent
        let mut seen = vec![0usize; self.nodes.len()];
        for n in &self.nodes {
            for &c in &n.children {
                if c >= self.nodes.len() {
                    return err("child out of range".into());
                }
                seen[c] += 1;
            }
        }
        for (i, &count) in seen.iter().enumerate() {
            let expected = if i == self.root { 0 } else { 1 };
            if count != expected {
                return err(format!("node {i} has {count} parents"));
            }
        }
        // acyclicity and reachability follow from the parent counts plus a
        // walk from the root
        let mut reach = vec![false; self.nodes.len()];
        let mut stack = vec![self.root];
        while let Some(n) = stack.pop() {
            if reach[n] {
                return err("cycle in tree".into());
            }
            reach[n] = true;
            stack.extend(self.nodes[n].children.iter().copied());
        }
        if !reach.iter().all(|&r| r) {
            return err("unreachable nodes".into());
        }
        for (i, n) in self.nodes.iter().enumerate() {
            match n.kind {
                NodeKind::Internal => {
                    if n.children.is_empty() {
                        return err(format!("internal node {i} has no children"));
                    }
                }
                NodeKind::Assumption | NodeKind::Axiom => {
                    if !n.children.is_empty() {
                        return err(format!("leaf {i} has children"));
                    }
                    if n.kind == NodeKind::Axiom && !n.formula.is_atomic() {
                        return err(format!("axiom leaf {i} is not atomic"));
                    }
                }
            }
        }
        let atomic_with_children_atomic = |n: NodeId| {
            self.nodes[n].formula.is_atomic()
                && self.nodes[n]
                    .children
                    .iter()
                    .all(|&c| self.nodes[c].formula.is_atomic())
        };
        for (&d, &t) in &self.f {
            if self.nodes[d].kind != NodeKind::Assumption {
                return err(format!("assumption discharge on non-assumption {d}"));
            }
            if !self.is_proper_ancestor(t, d) {
                return err(format!("assumption discharge target {t} not below {d}"));
            }
        }
        let f_targets: Vec<NodeId> = self.f.values().copied().collect();
        for (&d, &t) in &self.h {
            if self.nodes[d].kind != NodeKind::Axiom {
                return err(format!("axiom discharge on non-axiom {d}"));
            }
            if !self.is_proper_ancestor(t, d) {
                return err(format!("axiom discharge target {t} not below {d}"));
            }
            if !atomic_with_children_atomic(t) {
                return err(format!("axiom discharge target {t} not an atomic inference"));
            }
            if f_targets.contains(&t) {
                return err(format!(
                    "assumption discharge collides with axiom discharge at {t}"
                ));
            }
        }
        for (&d, &t) in &self.g {
            if self.nodes[d].kind != NodeKind::Internal {
                return err(format!("rule discharge on leaf {d}"));
            }
            if !atomic_with_children_atomic(d) {
                return err(format!("rule discharge source {d} not an atomic inference"));
            }
            if f_targets.contains(&d) {
                return err(format!(
                    "assumption discharge collides with rule application at {d}"
                ));
            }
            if !self.is_proper_ancestor(t, d) {
                return err(format!("rule discharge target {t} not below {d}"));
            }
            if !atomic_with_children_atomic(t) {
                return err(format!("rule discharge target {t} not an atomic inference"));
            }
            if f_targets.contains(&t) {
                return err(format!(
                    "assumption discharge collides with rule discharge at {t}"
                ));
            }
        }
        Ok(())
    }

    /// The subtree at `n` as a standalone structure; discharge entries whose
    /// target lies outside become open.
    pub fn substructure(&self, n: NodeId) -> ArgumentStructure {
        let mut b = StructureBuilder::new();
        let mut map = BTreeMap::new();
        let root = b.graft_subtree(self, n, &mut map);
        b.finish(root).expect("subtree of a well-formed structure")
    }

    /// The immediate substructures: the root's children as standalone
    /// structures.
    pub fn immediate_substructures(&self) -> Vec<ArgumentStructure> {
        self.nodes[self.root]
            .children
            .iter()
            .map(|&c| self.substructure(c))
            .collect()
    }

    /// Replaces the subtree at `at` with `replacement`, keeping all
    /// discharge entries that survive (entries into the removed subtree
    /// disappear; entries of the replacement come along).
    pub fn replace_subtree(
        &self,
        at: NodeId,
        replacement: &ArgumentStructure,
    ) -> Result<ArgumentStructure> {
        let mut b = StructureBuilder::new();
        let mut map = BTreeMap::new();
        let root = copy_except(self, self.root, at, replacement, &mut b, &mut map);
        b.copy_entries(self, &map, &[]);
        b.finish(root)
    }

    /// Canonical rendering; equality of structures is equality of these
    /// strings.
    pub fn canonical_key(&self) -> String {
        self.to_sexpr_compact()
    }

    pub fn structurally_equal(&self, other: &ArgumentStructure) -> bool {
        self.canonical_key() == other.canonical_key()
    }

    /// Total node count of the tree (its size measure in searches).
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    // -- s-expression format ------------------------------------------------

    pub fn to_sexpr(&self) -> String {
        let order = self.preorder();
        let mut out = String::new();
        self.write_sexpr(self.root, &order, 0, false, &mut out);
        out.push('\n');
        out
    }

    fn to_sexpr_compact(&self) -> String {
        let order = self.preorder();
        let mut out = String::new();
        self.write_sexpr(self.root, &order, 0, true, &mut out);
        out
    }

    fn preorder(&self) -> BTreeMap<NodeId, usize> {
        let mut order = BTreeMap::new();
        let mut next = 0;
        let mut stack = vec![self.root];
        while let Some(n) = stack.pop() {
            order.insert(n, next);
            next += 1;
            for &c in self.nodes[n].children.iter().rev() {
                stack.push(c);
            }
        }
        order
    }

    fn write_sexpr(
        &self,
        n: NodeId,
        order: &BTreeMap<NodeId, usize>,
        depth: usize,
        compact: bool,
        out: &mut String,
    ) {
        let node = &self.nodes[n];
        if !compact {
            for _ in 0..depth {
                out.push_str("  ");
            }
        }
        let head = match node.kind {
            NodeKind::Internal => "infer",
            NodeKind::Assumption => "assume",
            NodeKind::Axiom => "axiom",
        };
        out.push('(');
        out.push_str(head);
        out.push_str(" \"");
        out.push_str(&print_formula(&node.formula));
        out.push('"');
        let is_target = self
            .f
            .values()
            .chain(self.h.values())
            .chain(self.g.values())
            .any(|&t| t == n);
        if is_target {
            out.push_str(&format!(" :tag {}", order[&n]));
        }
        let entry = match node.kind {
            NodeKind::Assumption => self.f.get(&n),
            NodeKind::Axiom => self.h.get(&n),
            NodeKind::Internal => self.g.get(&n),
        };
        if let Some(&t) = entry {
            out.push_str(&format!(" :d {}", order[&t]));
        }
        for &c in &node.children {
            if compact {
                out.push(' ');
            } else {
                out.push('\n');
            }
            self.write_sexpr(c, order, depth + 1, compact, out);
        }
        out.push(')');
    }

    pub fn parse_sexpr(text: &str) -> Result<ArgumentStructure> {
        let toks = sexpr_lex(text)?;
        let mut b = StructureBuilder::new();
        let mut tags: BTreeMap<usize, NodeId> = BTreeMap::new();
        let mut pending: Vec<(NodeId, usize, NodeKind)> = Vec::new();
        let mut at = 0;
        let root = parse_node(&toks, &mut at, &mut b, &mut tags, &mut pending)?;
        if at != toks.len() {
            return Err(Error::syntax(1, "trailing input after structure"));
        }
        for (node, tag, kind) in pending {
            let target = *tags.get(&tag).ok_or_else(|| {
                Error::IllFormedStructure(format!("discharge points at unknown tag {tag}"))
            })?;
            match kind {
                NodeKind::Assumption => b.discharge_assumption(node, target),
                NodeKind::Axiom => b.discharge_axiom(node, target),
                NodeKind::Internal => b.discharge_rule(node, target),
            }
        }
        b.finish(root)
    }
}

// Copies `src` into `b` except that the subtree at `at` is swapped for
// `replacement` (grafted with its own entries). The caller then copies the
// surviving `src` entries in one pass: nodes in the removed subtree never
// enter `map`, so their entries drop out; the replacement position maps to
// the grafted root, which is deliberately not reused for `src` entries.
fn copy_except(
    src: &ArgumentStructure,
    n: NodeId,
    at: NodeId,
    replacement: &ArgumentStructure,
    b: &mut StructureBuilder,
    map: &mut BTreeMap<NodeId, NodeId>,
) -> NodeId {
    if n == at {
        let mut inner = BTreeMap::new();
        return b.graft(replacement, &mut inner);
    }
    let node = src.node(n);
    let children: Vec<NodeId> = node
        .children
        .iter()
        .map(|&c| copy_except(src, c, at, replacement, b, map))
        .collect();
    let id = if children.is_empty() && node.kind != NodeKind::Internal {
        b.leaf(node.formula.clone(), node.kind)
    } else {
        b.internal(node.formula.clone(), children)
    };
    map.insert(n, id);
    id
}

// -- substitution ------------------------------------------------------------

/// Grafts closed (or open) replacements at every open assumption leaf whose
/// label is in the substitution's domain; a replacement must conclude the
/// label it replaces.
pub fn substitute(
    d: &ArgumentStructure,
    sigma: &BTreeMap<Formula, ArgumentStructure>,
) -> Result<ArgumentStructure> {
    for (label, rep) in sigma {
        if rep.conclusion() != label {
            return Err(Error::ConclusionMismatch {
                expected: print_formula(label),
                got: print_formula(rep.conclusion()),
            });
        }
    }
    let open: Vec<NodeId> = d.assumptions().into_iter().map(|(i, _)| i).collect();
    let mut b = StructureBuilder::new();
    let mut map = BTreeMap::new();
    let root = subst_copy(d, d.root(), sigma, &open, &mut b, &mut map);
    b.copy_entries(d, &map, &[]);
    b.finish(root)
}

fn subst_copy(
    src: &ArgumentStructure,
    n: NodeId,
    sigma: &BTreeMap<Formula, ArgumentStructure>,
    open: &[NodeId],
    b: &mut StructureBuilder,
    map: &mut BTreeMap<NodeId, NodeId>,
) -> NodeId {
    let node = src.node(n);
    if node.kind == NodeKind::Assumption && open.contains(&n) {
        if let Some(rep) = sigma.get(&node.formula) {
            let mut inner = BTreeMap::new();
            return b.graft(rep, &mut inner);
        }
    }
    let children: Vec<NodeId> = node
        .children
        .iter()
        .map(|&c| subst_copy(src, c, sigma, open, b, map))
        .collect();
    let id = if children.is_empty() && node.kind != NodeKind::Internal {
        b.leaf(node.formula.clone(), node.kind)
    } else {
        b.internal(node.formula.clone(), children)
    };
    map.insert(n, id);
    id
}

// -- canonical form detection -------------------------------------------------

/// The introduction rule a root inference instantiates, when it does.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum IntroRule {
    ConjIntro,
    DisjIntroLeft,
    DisjIntroRight,
    ImpIntro,
}

/// Classifies the root inference as an introduction, if it is one.
pub fn classify_intro(d: &ArgumentStructure) -> Option<IntroRule> {
    let root = d.root();
    let node = d.node(root);
    if node.kind != NodeKind::Internal {
        return None;
    }
    let (fs, hs, gs) = d.entries_targeting(root);
    match (&node.formula, node.children.as_slice()) {
        (Formula::Conj(l, r), [c1, c2]) => {
            let ok = d.node(*c1).formula == **l
                && d.node(*c2).formula == **r
                && fs.is_empty()
                && hs.is_empty()
                && gs.is_empty();
            ok.then_some(IntroRule::ConjIntro)
        }
        (Formula::Disj(l, r), [c]) => {
            if !(hs.is_empty() && gs.is_empty() && fs.is_empty()) {
                return None;
            }
            if d.node(*c).formula == **l {
                Some(IntroRule::DisjIntroLeft)
            } else if d.node(*c).formula == **r {
                Some(IntroRule::DisjIntroRight)
            } else {
                None
            }
        }
        (Formula::Imp(l, r), [c]) => {
            if d.node(*c).formula != **r || !hs.is_empty() || !gs.is_empty() {
                return None;
            }
            let ok = fs.iter().all(|&leaf| d.node(leaf).formula == **l);
            ok.then_some(IntroRule::ImpIntro)
        }
        _ => None,
    }
}

/// A structure is canonical when its root inference is an instance of an
/// introduction rule.
pub fn is_canonical(d: &ArgumentStructure) -> bool {
    classify_intro(d).is_some()
}

// -- s-expression lexer/parser -------------------------------------------------

#[derive(Debug, PartialEq, Clone)]
enum SexprTok {
    LParen,
    RParen,
    Word(String),
    Str(String),
    Key(String),
    Num(usize),
}

fn sexpr_lex(text: &str) -> Result<Vec<SexprTok>> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        match chars[i] {
            c if c.is_whitespace() => i += 1,
            ';' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '(' => {
                toks.push(SexprTok::LParen);
                i += 1;
            }
            ')' => {
                toks.push(SexprTok::RParen);
                i += 1;
            }
            '"' => {
                i += 1;
                let start = i;
                while i < chars.len() && chars[i] != '"' {
                    i += 1;
                }
                if i == chars.len() {
                    return Err(Error::syntax(start, "unterminated string"));
                }
                toks.push(SexprTok::Str(chars[start..i].iter().collect()));
                i += 1;
            }
            ':' => {
                i += 1;
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                toks.push(SexprTok::Key(chars[start..i].iter().collect()));
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let n: usize = chars[start..i]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| Error::syntax(start + 1, "bad number"))?;
                toks.push(SexprTok::Num(n));
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                toks.push(SexprTok::Word(chars[start..i].iter().collect()));
            }
            other => return Err(Error::syntax(i + 1, format!("unexpected `{other}`"))),
        }
    }
    Ok(toks)
}

fn parse_node(
    toks: &[SexprTok],
    at: &mut usize,
    b: &mut StructureBuilder,
    tags: &mut BTreeMap<usize, NodeId>,
    pending: &mut Vec<(NodeId, usize, NodeKind)>,
) -> Result<NodeId> {
    let bad = |msg: &str| Error::IllFormedStructure(msg.to_string());
    if toks.get(*at) != Some(&SexprTok::LParen) {
        return Err(bad("expected `(`"));
    }
    *at += 1;
    let kind = match toks.get(*at) {
        Some(SexprTok::Word(w)) if w == "infer" => NodeKind::Internal,
        Some(SexprTok::Word(w)) if w == "assume" => NodeKind::Assumption,
        Some(SexprTok::Word(w)) if w == "axiom" => NodeKind::Axiom,
        _ => return Err(bad("expected infer, assume or axiom")),
    };
    *at += 1;
    let formula = match toks.get(*at) {
        Some(SexprTok::Str(s)) => parse_formula(s)?,
        _ => return Err(bad("expected a quoted formula")),
    };
    *at += 1;
    let mut tag = None;
    let mut discharge = None;
    while let Some(SexprTok::Key(k)) = toks.get(*at) {
        let k = k.clone();
        *at += 1;
        let n = match toks.get(*at) {
            Some(SexprTok::Num(n)) => *n,
            _ => return Err(bad("expected a number after keyword")),
        };
        *at += 1;
        match k.as_str() {
            "tag" => tag = Some(n),
            "d" => discharge = Some(n),
            other => return Err(bad(&format!("unknown keyword :{other}"))),
        }
    }
    let mut children = Vec::new();
    while toks.get(*at) == Some(&SexprTok::LParen) {
        children.push(parse_node(toks, at, b, tags, pending)?);
    }
    if toks.get(*at) != Some(&SexprTok::RParen) {
        return Err(bad("expected `)`"));
    }
    *at += 1;
    let id = match kind {
        NodeKind::Internal => {
            if children.is_empty() {
                return Err(bad("infer node needs children"));
            }
            b.internal(formula, children)
        }
        _ => {
            if !children.is_empty() {
                return Err(bad("leaf node cannot have children"));
            }
            b.leaf(formula, kind)
        }
    };
    if let Some(t) = tag {
        tags.insert(t, id);
    }
    if let Some(t) = discharge {
        pending.push((id, t, kind));
    }
    Ok(id)
}

impl PartialEq for ArgumentStructure {
    fn eq(&self, other: &Self) -> bool {
        self.structurally_equal(other)
    }
}
impl Eq for ArgumentStructure {}

impl fmt::Display for ArgumentStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sexpr())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn identity_structure() -> ArgumentStructure {
        ArgumentStructure::imp_intro(f("p"), ArgumentStructure::assumption(f("p")))
    }

    #[test]
    fn imp_intro_discharges_and_closes() {
        let d = identity_structure();
        assert!(d.is_closed());
        assert_eq!(d.conclusion(), &f("p -> p"));
        assert!(is_canonical(&d));
        assert_eq!(classify_intro(&d), Some(IntroRule::ImpIntro));
    }

    #[test]
    fn assumptions_are_the_undischarged_leaves() {
        let body = ArgumentStructure::infer(
            vec![
                ArgumentStructure::assumption(f("p")),
                ArgumentStructure::assumption(f("q")),
            ],
            f("p /\\ q"),
        );
        assert_eq!(body.assumption_set(), vec![f("p"), f("q")]);
        let d = ArgumentStructure::imp_intro(f("p"), body);
        assert_eq!(d.assumption_set(), vec![f("q")]);
        assert!(!d.is_closed());
    }

    #[test]
    fn sexpr_round_trip() {
        let d = identity_structure();
        let text = d.to_sexpr();
        let back = ArgumentStructure::parse_sexpr(&text).unwrap();
        assert!(d.structurally_equal(&back));
        // a deeper structure with an axiom leaf
        let inner = ArgumentStructure::infer(
            vec![ArgumentStructure::axiom(f("s"))],
            f("t"),
        );
        let d2 = ArgumentStructure::imp_intro(f("q"), inner);
        let back2 = ArgumentStructure::parse_sexpr(&d2.to_sexpr()).unwrap();
        assert!(d2.structurally_equal(&back2));
    }

    #[test]
    fn canonical_detection_rejects_non_intros() {
        // a bare assumption is not canonical
        assert!(!is_canonical(&ArgumentStructure::assumption(f("p"))));
        // a one-child inference to an unrelated formula is not canonical
        let d = ArgumentStructure::infer(
            vec![ArgumentStructure::assumption(f("p \\/ q"))],
            f("p"),
        );
        assert!(!is_canonical(&d));
        // disjunction introduction from the right disjunct
        let d = ArgumentStructure::infer(
            vec![ArgumentStructure::assumption(f("q"))],
            f("p \\/ q"),
        );
        assert_eq!(classify_intro(&d), Some(IntroRule::DisjIntroRight));
    }

    #[test]
    fn substitution_grafts_and_rethreads() {
        // open structure: from p and p -> q conclude q, then close over q -> r
        let body = ArgumentStructure::infer(
            vec![
                ArgumentStructure::assumption(f("p -> q")),
                ArgumentStructure::assumption(f("p")),
            ],
            f("q"),
        );
        let d = ArgumentStructure::imp_intro(f("p"), body);
        assert_eq!(d.assumption_set(), vec![f("p -> q")]);
        // substitute a closed proof of p -> q
        let rep = identity_structure();
        assert_eq!(rep.conclusion(), &f("p -> p"));
        let sigma: BTreeMap<Formula, ArgumentStructure> =
            [(f("p -> q"), rep)].into_iter().collect();
        // conclusion mismatch is caught
        assert!(matches!(
            substitute(&d, &sigma),
            Err(Error::ConclusionMismatch { .. })
        ));
        // p -> q built from an undischarged q: open, concluding p -> q
        let good = ArgumentStructure::imp_intro(f("p"), ArgumentStructure::assumption(f("q")));
        let sigma: BTreeMap<Formula, ArgumentStructure> =
            [(f("p -> q"), good)].into_iter().collect();
        let inst = substitute(&d, &sigma).unwrap();
        assert_eq!(inst.conclusion(), d.conclusion());
        assert_eq!(inst.assumption_set(), vec![f("q")]);
        // the empty substitution leaves the structure unchanged
        let same = substitute(&d, &BTreeMap::new()).unwrap();
        assert!(same.structurally_equal(&d));
    }

    #[test]
    fn validation_rejects_bad_discharges() {
        // discharge target must be a proper ancestor
        let mut b = StructureBuilder::new();
        let leaf = b.leaf(f("p"), NodeKind::Assumption);
        let other = b.leaf(f("q"), NodeKind::Assumption);
        let root = b.internal(f("p /\\ q"), vec![leaf, other]);
        b.discharge_assumption(leaf, other);
        assert!(b.finish(root).is_err());
        // axiom discharge target and its children must be atomic
        let mut b = StructureBuilder::new();
        let ax = b.leaf(f("s"), NodeKind::Axiom);
        let root = b.internal(f("p -> p"), vec![ax]);
        b.discharge_axiom(ax, root);
        assert!(b.finish(root).is_err());
    }

    #[test]
    fn replace_subtree_preserves_outer_entries() {
        let body = ArgumentStructure::infer(
            vec![
                ArgumentStructure::assumption(f("p")),
                ArgumentStructure::assumption(f("q")),
            ],
            f("r"),
        );
        let d = ArgumentStructure::imp_intro(f("p"), body);
        // replace the q leaf by an axiom leaf labelled q
        let q_leaf = d
            .node_ids()
            .find(|&n| d.node(n).formula == f("q") && d.node(n).kind == NodeKind::Assumption)
            .unwrap();
        let replaced = d
            .replace_subtree(q_leaf, &ArgumentStructure::axiom(f("q")))
            .unwrap();
        // the p discharge at the root survives, and with the open q leaf
        // gone the structure is now closed
        assert!(!d.is_closed());
        assert!(replaced.is_closed());
        assert_eq!(replaced.conclusion(), d.conclusion());
        assert_eq!(replaced.f_map().len(), 1);
    }
}
