//! Executable probes for metatheoretic properties over a finite universe:
//! the generalised disjunction property, validity of the disjunction-
//! splitting rule, compact export, base-soundness and base-completeness,
//! and the separation of the two disjunction readings.
//!
//! Every verdict is relative to the swept universe and pool; reports say
//! exactly what was swept, and a failing verdict always carries a
//! counterexample that re-runs.

use crate::ipc::{prove_extended, ExtendedSequent};
use crate::rules::BaseMask;
use crate::semantics::{EvalContext, SemanticsSelector};
use crate::syntax::{Atom, Formula};
use crate::translate;
use crate::Result;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum ReportVerdict {
    /// Established exactly for the stated universe.
    Holds,
    /// No violation across the swept pool.
    HoldsOnSweep,
    Fails,
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub base: String,
    pub base_mask: BaseMask,
    pub gamma: Vec<String>,
    pub conclusion: String,
    pub atom: Option<String>,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyReport {
    pub property: String,
    pub universe: String,
    pub swept: String,
    pub verdict: ReportVerdict,
    pub counterexample: Option<Counterexample>,
    pub notes: Vec<String>,
}

fn universe_summary(ctx: &EvalContext) -> String {
    let u = ctx.universe();
    format!(
        "alphabet {{{}}}, {} candidates, level bound {}",
        u.alphabet()
            .iter()
            .map(Atom::name)
            .collect::<Vec<_>>()
            .join(" "),
        u.candidates().len(),
        u.level_bound()
    )
}

fn render_gamma(gamma: &[Formula]) -> Vec<String> {
    gamma.iter().map(|f| f.to_string()).collect()
}

/// One pool entry: premises and conclusion.
pub type PoolEntry = (Vec<Formula>, Formula);

/// The generalised disjunction property at a base: disjunction-free
/// premises entailing a disjunction entail one of the disjuncts.
pub fn check_gdp(
    ctx: &mut EvalContext,
    sel: SemanticsSelector,
    mask: BaseMask,
    pool: &[PoolEntry],
) -> Result<PropertyReport> {
    let mut swept = 0;
    for (gamma, conclusion) in pool {
        let Formula::Disj(left, right) = conclusion else {
            continue;
        };
        if !gamma.iter().all(Formula::is_disjunction_free) {
            continue;
        }
        swept += 1;
        if !ctx.consequence(sel, mask, gamma, conclusion)? {
            continue;
        }
        let left_holds = ctx.consequence(sel, mask, gamma, left)?;
        let right_holds = ctx.consequence(sel, mask, gamma, right)?;
        if !left_holds && !right_holds {
            return Ok(PropertyReport {
                property: format!("gdp[{}]", sel.name()),
                universe: universe_summary(ctx),
                swept: format!("{swept} pool entries at base mask {mask}"),
                verdict: ReportVerdict::Fails,
                counterexample: Some(Counterexample {
                    base: ctx.universe().base_from_mask(mask).to_string(),
                    base_mask: mask,
                    gamma: render_gamma(gamma),
                    conclusion: conclusion.to_string(),
                    atom: None,
                    detail: "the disjunction is a consequence but neither disjunct is".into(),
                }),
                notes: Vec::new(),
            });
        }
    }
    Ok(PropertyReport {
        property: format!("gdp[{}]", sel.name()),
        universe: universe_summary(ctx),
        swept: format!("{swept} pool entries at base mask {mask}"),
        verdict: ReportVerdict::HoldsOnSweep,
        counterexample: None,
        notes: Vec::new(),
    })
}

/// The disjunction-splitting instance for given atoms: from `~a -> b \/ c`
/// infer `(~a -> b) \/ (~a -> c)`, as a logical consequence over the
/// universe.
pub fn harrop_instance(a: &Atom, b: &Atom, c: &Atom) -> Formula {
    let na = Formula::neg(Formula::Atom(a.clone()));
    let premise = Formula::imp(
        na.clone(),
        Formula::disj(Formula::Atom(b.clone()), Formula::Atom(c.clone())),
    );
    let conclusion = Formula::disj(
        Formula::imp(na.clone(), Formula::Atom(b.clone())),
        Formula::imp(na, Formula::Atom(c.clone())),
    );
    Formula::imp(premise, conclusion)
}

pub fn check_harrop(
    ctx: &mut EvalContext,
    sel: SemanticsSelector,
    instances: &[(Atom, Atom, Atom)],
) -> Result<PropertyReport> {
    for (a, b, c) in instances {
        let inst = harrop_instance(a, b, c);
        if !ctx.logical_consequence(sel, &[], &inst)? {
            return Ok(PropertyReport {
                property: format!("harrop[{}]", sel.name()),
                universe: universe_summary(ctx),
                swept: format!("{} instances", instances.len()),
                verdict: ReportVerdict::Fails,
                counterexample: Some(Counterexample {
                    base: ctx.universe().base_from_mask(0).to_string(),
                    base_mask: 0,
                    gamma: Vec::new(),
                    conclusion: inst.to_string(),
                    atom: None,
                    detail: "instance is not logically valid over the universe".into(),
                }),
                notes: Vec::new(),
            });
        }
    }
    Ok(PropertyReport {
        property: format!("harrop[{}]", sel.name()),
        universe: universe_summary(ctx),
        swept: format!("{} instances", instances.len()),
        verdict: ReportVerdict::Holds,
        counterexample: None,
        notes: Vec::new(),
    })
}

/// The two directions of compact export for one pool entry.
#[derive(Clone, Debug, Serialize)]
pub struct ExportOutcome {
    pub gamma: Vec<String>,
    pub conclusion: String,
    pub consequence_at_base: bool,
    /// the smallest translated-base subset whose addition makes the entry
    /// a logical consequence, if any
    pub witness_delta: Option<Vec<String>>,
    pub export_direction_holds: bool,
    pub import_direction_holds: bool,
}

/// Compares consequence at the base with logical consequence helped by a
/// finite subset of the base's translation, both ways.
pub fn compact_export_outcomes(
    ctx: &mut EvalContext,
    sel: SemanticsSelector,
    mask: BaseMask,
    pool: &[PoolEntry],
) -> Result<Vec<ExportOutcome>> {
    let base = ctx.universe().base_from_mask(mask);
    let translated = translate::star_base(&base);
    let mut out = Vec::new();
    for (gamma, conclusion) in pool {
        let at_base = ctx.consequence(sel, mask, gamma, conclusion)?;
        // subsets by ascending size, so the witness is minimal
        let mut witness: Option<Vec<Formula>> = None;
        let n = translated.len();
        let mut subsets: Vec<u64> = (0..(1u64 << n)).collect();
        subsets.sort_by_key(|s| (s.count_ones(), *s));
        for subset in subsets {
            let delta: Vec<Formula> = translated
                .iter()
                .enumerate()
                .filter(|(i, _)| subset & (1 << i) != 0)
                .map(|(_, f)| f.clone())
                .collect();
            let mut premises = gamma.clone();
            premises.extend(delta.iter().cloned());
            if ctx.logical_consequence(sel, &premises, conclusion)? {
                witness = Some(delta);
                break;
            }
        }
        out.push(ExportOutcome {
            gamma: render_gamma(gamma),
            conclusion: conclusion.to_string(),
            consequence_at_base: at_base,
            export_direction_holds: !at_base || witness.is_some(),
            import_direction_holds: witness.is_none() || at_base,
            witness_delta: witness.map(|d| render_gamma(&d)),
        });
    }
    Ok(out)
}

pub fn check_compact_export(
    ctx: &mut EvalContext,
    sel: SemanticsSelector,
    mask: BaseMask,
    pool: &[PoolEntry],
) -> Result<PropertyReport> {
    let outcomes = compact_export_outcomes(ctx, sel, mask, pool)?;
    let universe = universe_summary(ctx);
    let swept = format!(
        "{} pool entries, translated-base subsets up to size {}",
        outcomes.len(),
        translate::star_base(&ctx.universe().base_from_mask(mask)).len()
    );
    let mut notes = Vec::new();
    let mut counterexample = None;
    for o in &outcomes {
        if let Some(delta) = &o.witness_delta {
            notes.push(format!(
                "{} |= {}: witness delta {{{}}}",
                o.gamma.join(", "),
                o.conclusion,
                delta.join(", ")
            ));
        }
        if counterexample.is_none() && !(o.export_direction_holds && o.import_direction_holds) {
            let direction = if !o.export_direction_holds {
                "export"
            } else {
                "import"
            };
            counterexample = Some(Counterexample {
                base: ctx.universe().base_from_mask(mask).to_string(),
                base_mask: mask,
                gamma: o.gamma.clone(),
                conclusion: o.conclusion.clone(),
                atom: None,
                detail: format!("{direction} direction fails"),
            });
        }
    }
    Ok(PropertyReport {
        property: format!("compact-export[{}]", sel.name()),
        universe,
        swept,
        verdict: if counterexample.is_some() {
            ReportVerdict::Fails
        } else {
            ReportVerdict::HoldsOnSweep
        },
        counterexample,
        notes,
    })
}

/// Searches all bases and pool entries for a semantic consequence that is
/// not derivable in the rule-extended system: a base-incompleteness
/// witness. `Fails` means such a witness exists.
pub fn check_base_completeness(
    ctx: &mut EvalContext,
    sel: SemanticsSelector,
    pool: &[PoolEntry],
) -> Result<PropertyReport> {
    let masks = ctx.universe().all_bases();
    let mut swept = 0usize;
    for mask in masks {
        let base = ctx.universe().base_from_mask(mask);
        for (gamma, conclusion) in pool {
            swept += 1;
            if !ctx.consequence(sel, mask, gamma, conclusion)? {
                continue;
            }
            let derivable = prove_extended(&ExtendedSequent {
                context: gamma.clone(),
                assumed_rules: Vec::new(),
                base: base.clone(),
                goal: conclusion.clone(),
            })?;
            if !derivable {
                return Ok(PropertyReport {
                    property: format!("base-completeness[{}]", sel.name()),
                    universe: universe_summary(ctx),
                    swept: format!("{swept} (base, entry) pairs"),
                    verdict: ReportVerdict::Fails,
                    counterexample: Some(Counterexample {
                        base: base.to_string(),
                        base_mask: mask,
                        gamma: render_gamma(gamma),
                        conclusion: conclusion.to_string(),
                        atom: None,
                        detail: "semantic consequence with no derivation".into(),
                    }),
                    notes: Vec::new(),
                });
            }
        }
    }
    Ok(PropertyReport {
        property: format!("base-completeness[{}]", sel.name()),
        universe: universe_summary(ctx),
        swept: format!("{swept} (base, entry) pairs"),
        verdict: ReportVerdict::HoldsOnSweep,
        counterexample: None,
        notes: Vec::new(),
    })
}

/// Samples derivable extended sequents and asserts each is a semantic
/// consequence at its base. A failure would contradict soundness and is
/// always a bug somewhere.
pub fn check_base_soundness(
    ctx: &mut EvalContext,
    sel: SemanticsSelector,
    sample_count: usize,
    seed: u64,
) -> Result<PropertyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let atoms = ctx.universe().atoms_with_bot();
    let masks = ctx.universe().all_bases();
    let mut found = 0usize;
    let mut attempts = 0usize;
    let max_attempts = sample_count.saturating_mul(400) + 100;
    while found < sample_count && attempts < max_attempts {
        attempts += 1;
        let mask = masks[rng.gen_range(0..masks.len())];
        let base = ctx.universe().base_from_mask(mask);
        let gamma: Vec<Formula> = (0..rng.gen_range(0..3usize))
            .map(|_| random_formula(&mut rng, &atoms, 2))
            .collect();
        let goal = random_formula(&mut rng, &atoms, 3);
        let derivable = prove_extended(&ExtendedSequent {
            context: gamma.clone(),
            assumed_rules: Vec::new(),
            base: base.clone(),
            goal: goal.clone(),
        })?;
        if !derivable {
            continue;
        }
        found += 1;
        if !ctx.consequence(sel, mask, &gamma, &goal)? {
            return Ok(PropertyReport {
                property: format!("base-soundness[{}]", sel.name()),
                universe: universe_summary(ctx),
                swept: format!("{found} derivable samples (seed {seed})"),
                verdict: ReportVerdict::Fails,
                counterexample: Some(Counterexample {
                    base: base.to_string(),
                    base_mask: mask,
                    gamma: render_gamma(&gamma),
                    conclusion: goal.to_string(),
                    atom: None,
                    detail: "derivable but not a semantic consequence".into(),
                }),
                notes: Vec::new(),
            });
        }
    }
    Ok(PropertyReport {
        property: format!("base-soundness[{}]", sel.name()),
        universe: universe_summary(ctx),
        swept: format!("{found} derivable samples in {attempts} attempts (seed {seed})"),
        verdict: ReportVerdict::HoldsOnSweep,
        counterexample: None,
        notes: if found < sample_count {
            vec![format!("only {found} of {sample_count} samples found")]
        } else {
            Vec::new()
        },
    })
}

/// Separation outcome: bases where the two readings disagree on a pool
/// entry, in either direction.
#[derive(Clone, Debug, Serialize)]
pub struct SeparationOutcome {
    pub sandqvist_not_standard: Option<Counterexample>,
    pub standard_not_sandqvist: Option<Counterexample>,
}

pub fn check_separation(
    ctx: &mut EvalContext,
    pool: &[PoolEntry],
) -> Result<(PropertyReport, SeparationOutcome)> {
    let masks = ctx.universe().all_bases();
    let mut sand_not_std = None;
    let mut std_not_sand = None;
    let mut swept = 0usize;
    for &mask in &masks {
        for (gamma, conclusion) in pool {
            swept += 1;
            let std =
                ctx.consequence(SemanticsSelector::Standard, mask, gamma, conclusion)?;
            let sand =
                ctx.consequence(SemanticsSelector::Sandqvist, mask, gamma, conclusion)?;
            let witness = |detail: &str| Counterexample {
                base: ctx.universe().base_from_mask(mask).to_string(),
                base_mask: mask,
                gamma: render_gamma(gamma),
                conclusion: conclusion.to_string(),
                atom: None,
                detail: detail.into(),
            };
            if sand && !std && sand_not_std.is_none() {
                sand_not_std = Some(witness("holds under sandqvist, fails under standard"));
            }
            if std && !sand && std_not_sand.is_none() {
                std_not_sand = Some(witness("holds under standard, fails under sandqvist"));
            }
        }
        if sand_not_std.is_some() && std_not_sand.is_some() {
            break;
        }
    }
    let outcome = SeparationOutcome {
        sandqvist_not_standard: sand_not_std.clone(),
        standard_not_sandqvist: std_not_sand.clone(),
    };
    let found = [&sand_not_std, &std_not_sand]
        .iter()
        .filter(|w| w.is_some())
        .count();
    let mut notes = Vec::new();
    if let Some(w) = &sand_not_std {
        notes.push(format!(
            "sandqvist-only: {} |= {} at {}",
            w.gamma.join(", "),
            w.conclusion,
            w.base
        ));
    }
    if let Some(w) = &std_not_sand {
        notes.push(format!(
            "standard-only: {} |= {} at {}",
            w.gamma.join(", "),
            w.conclusion,
            w.base
        ));
    }
    let report = PropertyReport {
        property: "separation".into(),
        universe: universe_summary(ctx),
        swept: format!("{swept} (base, entry) pairs"),
        verdict: match found {
            2 => ReportVerdict::Holds,
            1 => ReportVerdict::HoldsOnSweep,
            _ => ReportVerdict::Fails,
        },
        counterexample: sand_not_std,
        notes,
    };
    Ok((report, outcome))
}

// ---------------------------------------------------------------------------
// Random formula generation for sampled sweeps
// ---------------------------------------------------------------------------

pub fn random_formula(rng: &mut impl Rng, atoms: &[Atom], depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.35) {
        return Formula::Atom(atoms[rng.gen_range(0..atoms.len())].clone());
    }
    let l = random_formula(rng, atoms, depth - 1);
    let r = random_formula(rng, atoms, depth - 1);
    match rng.gen_range(0..3) {
        0 => Formula::conj(l, r),
        1 => Formula::disj(l, r),
        _ => Formula::imp(l, r),
    }
}

pub fn random_disjunction_free(rng: &mut impl Rng, atoms: &[Atom], depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.35) {
        return Formula::Atom(atoms[rng.gen_range(0..atoms.len())].clone());
    }
    let l = random_disjunction_free(rng, atoms, depth - 1);
    let r = random_disjunction_free(rng, atoms, depth - 1);
    if rng.gen_bool(0.5) {
        Formula::conj(l, r)
    } else {
        Formula::imp(l, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::{parse_universe_file, Base, Universe};
    use crate::syntax::{parse_formula, parse_rule};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn atom(s: &str) -> Atom {
        Atom::new(s).unwrap()
    }

    fn scheme_universe() -> Universe {
        let text = "@level 2\n@alphabet a b c\n@candidates\na\nb\nc\n@scheme (a, [b] D, [c] D => D) over D\n";
        parse_universe_file(text, "r.univ").unwrap()
    }

    fn scheme_base_mask(u: &Universe) -> BaseMask {
        let rules: Vec<_> = u
            .candidates()
            .iter()
            .filter(|r| !r.is_axiom())
            .cloned()
            .collect();
        u.base_mask(&Base::new(rules, u.alphabet())).unwrap()
    }

    fn harrop_universe() -> Universe {
        Universe::infer(
            vec![
                parse_rule("(a => bot)").unwrap(),
                parse_rule("a").unwrap(),
                parse_rule("b").unwrap(),
                parse_rule("c").unwrap(),
            ],
            &[],
        )
        .unwrap()
    }

    #[test]
    fn gdp_fails_for_sandqvist_at_the_scheme_base() {
        let u = scheme_universe();
        let mask = scheme_base_mask(&u);
        let mut ctx = EvalContext::new(&u);
        let pool = vec![(vec![f("a")], f("b \\/ c"))];
        let report =
            check_gdp(&mut ctx, SemanticsSelector::Sandqvist, mask, &pool).unwrap();
        assert_eq!(report.verdict, ReportVerdict::Fails);
        let ce = report.counterexample.unwrap();
        assert_eq!(ce.gamma, vec!["a".to_string()]);
        assert_eq!(ce.conclusion, "b \\/ c");
        // the counterexample replays
        assert!(ctx
            .consequence(SemanticsSelector::Sandqvist, ce.base_mask, &[f("a")], &f("b \\/ c"))
            .unwrap());
        assert!(!ctx
            .consequence(SemanticsSelector::Sandqvist, ce.base_mask, &[f("a")], &f("b"))
            .unwrap());
    }

    #[test]
    fn gdp_holds_for_standard_on_small_sweeps() {
        let u = harrop_universe();
        let mut ctx = EvalContext::new(&u);
        let pool = vec![
            (vec![f("a")], f("b \\/ c")),
            (vec![f("b")], f("b \\/ c")),
            (vec![f("~a")], f("b \\/ c")),
        ];
        let report = check_gdp(&mut ctx, SemanticsSelector::Standard, 0, &pool).unwrap();
        assert_eq!(report.verdict, ReportVerdict::HoldsOnSweep);
    }

    #[test]
    fn harrop_validity_splits_the_selectors() {
        let u = harrop_universe();
        let mut ctx = EvalContext::new(&u);
        let instances = vec![(atom("a"), atom("b"), atom("c"))];
        let report =
            check_harrop(&mut ctx, SemanticsSelector::Standard, &instances).unwrap();
        assert_eq!(report.verdict, ReportVerdict::Holds);
        // and the same instance is not derivable propositionally
        assert!(!crate::ipc::prove_sequent(
            &[],
            &harrop_instance(&atom("a"), &atom("b"), &atom("c"))
        ));
    }

    #[test]
    fn base_completeness_fails_where_harrop_is_valid() {
        let u = harrop_universe();
        let mut ctx = EvalContext::new(&u);
        let h = harrop_instance(&atom("a"), &atom("b"), &atom("c"));
        let pool = vec![(Vec::new(), h)];
        let report =
            check_base_completeness(&mut ctx, SemanticsSelector::Standard, &pool).unwrap();
        assert_eq!(report.verdict, ReportVerdict::Fails);
    }

    #[test]
    fn base_soundness_holds_on_samples() {
        let u = harrop_universe();
        for sel in [SemanticsSelector::Standard, SemanticsSelector::Sandqvist] {
            let mut ctx = EvalContext::new(&u);
            let report = check_base_soundness(&mut ctx, sel, 40, 7).unwrap();
            assert_eq!(report.verdict, ReportVerdict::HoldsOnSweep, "{report:?}");
        }
    }

    #[test]
    fn separation_finds_the_sandqvist_witness() {
        let u = scheme_universe();
        let mut ctx = EvalContext::new(&u);
        let pool = vec![(vec![f("a")], f("b \\/ c"))];
        let (report, outcome) = check_separation(&mut ctx, &pool).unwrap();
        assert!(outcome.sandqvist_not_standard.is_some());
        assert_ne!(report.verdict, ReportVerdict::Fails);
    }

    #[test]
    fn compact_export_trivial_at_the_empty_base() {
        let u = harrop_universe();
        let mut ctx = EvalContext::new(&u);
        let pool = vec![(vec![f("a")], f("a")), (vec![f("b")], f("b \\/ c"))];
        let report =
            check_compact_export(&mut ctx, SemanticsSelector::Standard, 0, &pool).unwrap();
        assert_eq!(report.verdict, ReportVerdict::HoldsOnSweep);
    }
}
