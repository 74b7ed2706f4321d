//! Finite Kripke countermodel search, the independent oracle for the
//! propositional prover.
//!
//! Models are rooted finite posets with monotone valuations. Search is
//! breadth-first by point count; among equal sizes, frames are enumerated in
//! ascending order-relation encoding and valuations lexicographically, so
//! the first model found is deterministic.

use crate::ipc::ILSequent;
use crate::syntax::{Atom, Formula};
use serde::Serialize;

/// A finite rooted Kripke model. Point 0 is the root; `leq` is the full
/// partial order; valuations are upward closed point masks per atom.
#[derive(Clone, Debug, Serialize)]
pub struct KripkeModel {
    pub points: usize,
    /// `order[i]` is the bitmask of points `j` with `i <= j`.
    pub order: Vec<u32>,
    pub atoms: Vec<Atom>,
    /// `valuation[k]` is the point mask where `atoms[k]` holds.
    pub valuation: Vec<u32>,
}

impl KripkeModel {
    pub fn le(&self, i: usize, j: usize) -> bool {
        self.order[i] & (1 << j) != 0
    }

    fn atom_mask(&self, a: &Atom) -> u32 {
        self.atoms
            .iter()
            .position(|x| x == a)
            .map(|k| self.valuation[k])
            .unwrap_or(0)
    }

    /// The standard forcing clauses; `bot` is forced nowhere.
    pub fn forces(&self, point: usize, f: &Formula) -> bool {
        match f {
            Formula::Atom(a) => {
                if a.is_bot() {
                    false
                } else {
                    self.atom_mask(a) & (1 << point) != 0
                }
            }
            Formula::Conj(l, r) => self.forces(point, l) && self.forces(point, r),
            Formula::Disj(l, r) => self.forces(point, l) || self.forces(point, r),
            Formula::Imp(l, r) => (0..self.points)
                .filter(|&q| self.le(point, q))
                .all(|q| !self.forces(q, l) || self.forces(q, r)),
        }
    }

    /// True when the root forces every premise but not the conclusion.
    pub fn falsifies(&self, context: &[Formula], goal: &Formula) -> bool {
        context.iter().all(|p| self.forces(0, p)) && !self.forces(0, goal)
    }

    pub fn render(&self) -> String {
        let mut out = format!("points: {}\n", self.points);
        let mut pairs = Vec::new();
        for i in 0..self.points {
            for j in 0..self.points {
                if i != j && self.le(i, j) {
                    pairs.push(format!("{i}<={j}"));
                }
            }
        }
        out.push_str(&format!("order: {}\n", pairs.join(" ")));
        for (k, a) in self.atoms.iter().enumerate() {
            let holds: Vec<String> = (0..self.points)
                .filter(|&p| self.valuation[k] & (1 << p) != 0)
                .map(|p| p.to_string())
                .collect();
            out.push_str(&format!("{a}: {{{}}}\n", holds.join(", ")));
        }
        out
    }
}

/// Enumerates rooted frames and monotone valuations up to a point bound,
/// caching frames per size. One enumerator can serve many queries over the
/// same atom list.
pub struct ModelEnumerator {
    atoms: Vec<Atom>,
    /// frames by point count: each is the `order` masks plus its upsets
    frames: Vec<Vec<(Vec<u32>, Vec<u32>)>>,
}

impl ModelEnumerator {
    pub fn new(atoms: Vec<Atom>) -> ModelEnumerator {
        ModelEnumerator {
            atoms,
            frames: vec![Vec::new()],
        }
    }

    fn ensure_frames(&mut self, k: usize) {
        while self.frames.len() <= k {
            let n = self.frames.len();
            self.frames.push(enumerate_frames(n));
        }
    }

    /// Visits models of exactly `k` points in deterministic order; stops
    /// early when the visitor returns true and reports whether it did.
    pub fn visit_models(
        &mut self,
        k: usize,
        mut visitor: impl FnMut(&KripkeModel) -> bool,
    ) -> Option<KripkeModel> {
        self.ensure_frames(k);
        let n_atoms = self.atoms.len();
        for (order, upsets) in &self.frames[k] {
            let mut model = KripkeModel {
                points: k,
                order: order.clone(),
                atoms: self.atoms.clone(),
                valuation: vec![upsets[0]; n_atoms],
            };
            // odometer over upset choices, lexicographic in atom order
            let mut idx = vec![0usize; n_atoms];
            loop {
                for (slot, &i) in idx.iter().enumerate() {
                    model.valuation[slot] = upsets[i];
                }
                if visitor(&model) {
                    return Some(model.clone());
                }
                let mut carry = n_atoms;
                while carry > 0 {
                    let slot = carry - 1;
                    idx[slot] += 1;
                    if idx[slot] < upsets.len() {
                        break;
                    }
                    idx[slot] = 0;
                    carry -= 1;
                }
                if carry == 0 {
                    break;
                }
            }
            if n_atoms == 0 {
                // a single valuation-free model per frame
                continue;
            }
        }
        None
    }
}

fn enumerate_frames(k: usize) -> Vec<(Vec<u32>, Vec<u32>)> {
    if k == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    // strict-order bits among points 1..k-1; the root is below everything
    let mut pairs = Vec::new();
    for i in 1..k {
        for j in 1..k {
            if i != j {
                pairs.push((i, j));
            }
        }
    }
    let bits = pairs.len();
    'masks: for mask in 0u64..(1u64 << bits) {
        let mut lt = vec![0u32; k];
        for (b, &(i, j)) in pairs.iter().enumerate() {
            if mask & (1 << b) != 0 {
                lt[i] |= 1 << j;
            }
        }
        // antisymmetry and transitivity
        for i in 1..k {
            for j in 1..k {
                if i == j {
                    continue;
                }
                if lt[i] & (1 << j) != 0 {
                    if lt[j] & (1 << i) != 0 {
                        continue 'masks;
                    }
                    for l in 1..k {
                        if lt[j] & (1 << l) != 0 && lt[i] & (1 << l) == 0 {
                            continue 'masks;
                        }
                    }
                }
            }
        }
        let mut order = vec![0u32; k];
        let all = (1u32 << k) - 1;
        order[0] = all;
        for i in 1..k {
            order[i] = lt[i] | (1 << i);
        }
        let upsets = enumerate_upsets(k, &order);
        out.push((order, upsets));
    }
    out
}

fn enumerate_upsets(k: usize, order: &[u32]) -> Vec<u32> {
    let mut out = Vec::new();
    'sets: for s in 0u32..(1u32 << k) {
        for i in 0..k {
            if s & (1 << i) != 0 && (order[i] & s) != order[i] {
                continue 'sets;
            }
        }
        out.push(s);
    }
    out
}

fn sequent_atoms(context: &[Formula], goal: &Formula) -> Vec<Atom> {
    let mut atoms = Vec::new();
    for f in context.iter().chain(std::iter::once(goal)) {
        for a in f.atoms() {
            if !a.is_bot() && !atoms.contains(&a) {
                atoms.push(a);
            }
        }
    }
    atoms.sort();
    atoms
}

pub const DEFAULT_MAX_POINTS: usize = 6;

/// Searches for a finite rooted model whose root forces the context but not
/// the goal. Breadth-first by point count.
pub fn countermodel(
    context: &[Formula],
    goal: &Formula,
    max_points: usize,
) -> Option<KripkeModel> {
    let mut enumerator = ModelEnumerator::new(sequent_atoms(context, goal));
    for k in 1..=max_points {
        if let Some(m) = enumerator.visit_models(k, |m| m.falsifies(context, goal)) {
            return Some(m);
        }
    }
    None
}

/// Countermodel search for an [`ILSequent`]; `None` when none exists within
/// the point bound.
pub fn countermodel_il(s: &ILSequent, max_points: usize) -> Option<KripkeModel> {
    countermodel(&s.context, &s.goal, max_points)
}

/// Classical truth-table refutation: some boolean assignment makes the
/// context true and the goal false. A necessary condition for
/// intuitionistic refutability, used as a cross-check.
pub fn classical_refutes(context: &[Formula], goal: &Formula) -> bool {
    let atoms = sequent_atoms(context, goal);
    let n = atoms.len();
    for assignment in 0u32..(1u32 << n) {
        let eval_atom =
            |a: &Atom| -> bool {
                !a.is_bot()
                    && atoms.iter().position(|x| x == a).is_some_and(|i| {
                        assignment & (1 << i) != 0
                    })
            };
        fn eval(f: &Formula, v: &dyn Fn(&Atom) -> bool) -> bool {
            match f {
                Formula::Atom(a) => v(a),
                Formula::Conj(l, r) => eval(l, v) && eval(r, v),
                Formula::Disj(l, r) => eval(l, v) || eval(r, v),
                Formula::Imp(l, r) => !eval(l, v) || eval(r, v),
            }
        }
        if context.iter().all(|f| eval(f, &eval_atom)) && !eval(goal, &eval_atom) {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ipc::prove_sequent;
    use crate::syntax::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn double_negation_gets_a_two_point_model() {
        let m = countermodel(&[], &f("~~p -> p"), DEFAULT_MAX_POINTS).unwrap();
        assert_eq!(m.points, 2);
        // p holds only at the non-root point
        assert_eq!(m.valuation[0], 0b10);
        assert!(m.falsifies(&[], &f("~~p -> p")));
    }

    #[test]
    fn theorems_have_no_countermodel() {
        assert!(countermodel(&[], &f("p -> p"), 4).is_none());
        assert!(countermodel(&[], &f("~~(p \\/ ~p)"), 4).is_none());
        assert!(countermodel(&[f("p"), f("p -> q")], &f("q"), 4).is_none());
    }

    #[test]
    fn harrop_instance_has_a_small_model() {
        let ctx = [f("~p -> q \\/ r")];
        let goal = f("(~p -> q) \\/ (~p -> r)");
        assert!(!prove_sequent(&ctx, &goal));
        let m = countermodel(&ctx, &goal, 4).unwrap();
        assert!(m.points <= 4);
        assert!(m.falsifies(&ctx, &goal));
    }

    #[test]
    fn excluded_middle_needs_two_points() {
        let m = countermodel(&[], &f("p \\/ ~p"), 4).unwrap();
        assert_eq!(m.points, 2);
    }

    #[test]
    fn weak_excluded_middle_needs_three_points() {
        let m = countermodel(&[], &f("~p \\/ ~~p"), 4).unwrap();
        assert_eq!(m.points, 3);
    }

    #[test]
    fn classical_refutation_implies_refutable() {
        assert!(classical_refutes(&[], &f("p")));
        assert!(!classical_refutes(&[], &f("p \\/ ~p")));
        assert!(!classical_refutes(&[], &f("~~p -> p")));
        assert!(classical_refutes(&[f("p \\/ q")], &f("p")));
    }

    #[test]
    fn upsets_are_monotone() {
        let mut e = ModelEnumerator::new(vec![Atom::new("p").unwrap()]);
        e.visit_models(3, |m| {
            for i in 0..m.points {
                for j in 0..m.points {
                    if m.le(i, j) && m.valuation[0] & (1 << i) != 0 {
                        assert!(m.valuation[0] & (1 << j) != 0);
                    }
                }
            }
            false
        });
    }
}
