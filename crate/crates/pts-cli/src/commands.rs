//! Command implementations. Everything writes to the supplied writer so the
//! repro runner can capture output in-process.

use crate::{BoundsArgs, Command};
use pts_core::arguments::{
    check_validity, reduce_step, Justification, SearchBounds, Verdict3,
};
use pts_core::arguments::ArgumentStructure;
use pts_core::ipc::{prove_sequent, ExtendedSequent};
use pts_core::kripke;
use pts_core::props;
use pts_core::rules::{load_base, load_rule_set, load_universe, Base, BaseMask, Universe};
use pts_core::semantics::{minimal_masks, EvalContext, SemanticsSelector};
use pts_core::syntax::{
    parse_formula, parse_rule, parse_sequent, print_formula, Atom,
};
use pts_core::translate::{self, DisjunctionFreeFormula};
use pts_core::{Error, Result};
use serde_json::json;
use std::io::Write;

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_ERROR: i32 = 3;

pub fn execute(cmd: &Command, out: &mut dyn Write) -> i32 {
    match run(cmd, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            EXIT_ERROR
        }
    }
}

/// A sequent, or a bare formula standing for an empty-premise sequent.
fn parse_sequent_or_formula(text: &str) -> Result<pts_core::SequentQuery> {
    parse_sequent(text).or_else(|seq_err| {
        parse_formula(text)
            .map(|f| pts_core::SequentQuery {
                premises: Vec::new(),
                conclusion: f,
                turnstile: pts_core::syntax::TurnstileKind::Proves,
            })
            .map_err(|_| seq_err)
    })
}

/// Resolves a path, consulting `PTS_UNIVERSE_DIR` for relative paths that
/// do not exist as given.
fn resolve(path: &str) -> String {
    if std::path::Path::new(path).exists() {
        return path.to_string();
    }
    if let Ok(dir) = std::env::var("PTS_UNIVERSE_DIR") {
        let joined = std::path::Path::new(&dir).join(path);
        if joined.exists() {
            return joined.to_string_lossy().into_owned();
        }
    }
    path.to_string()
}

fn load_universe_at(path: &str) -> Result<Universe> {
    load_universe(&resolve(path))
}

fn load_base_at(path: &str) -> Result<Base> {
    load_base(&resolve(path))
}

fn mask_of(universe: &Universe, base: &Option<String>) -> Result<BaseMask> {
    match base {
        None => Ok(0),
        Some(path) => universe.base_mask(&load_base_at(path)?),
    }
}

fn parse_pool(path: &str) -> Result<Vec<props::PoolEntry>> {
    let text = std::fs::read_to_string(resolve(path))?;
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let seq = parse_sequent(line).map_err(|e| e.in_file(path, lineno + 1))?;
        out.push((seq.premises, seq.conclusion));
    }
    Ok(out)
}

fn parse_harrop_pool(path: &str) -> Result<Vec<(Atom, Atom, Atom)>> {
    let text = std::fs::read_to_string(resolve(path))?;
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let atoms: Vec<&str> = line.split_whitespace().collect();
        if atoms.len() != 3 {
            return Err(Error::syntax(1, "expected three atoms per line")
                .in_file(path, lineno + 1));
        }
        out.push((
            Atom::new(atoms[0])?,
            Atom::new(atoms[1])?,
            Atom::new(atoms[2])?,
        ));
    }
    Ok(out)
}

fn emit(out: &mut dyn Write, value: serde_json::Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(&value).unwrap())?;
    Ok(())
}

fn run(cmd: &Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Parse { input, rule, json } => {
            if *rule {
                let r = parse_rule(input)?;
                if *json {
                    emit(
                        out,
                        json!({"schema": "pts/1", "command": "parse", "kind": "rule",
                               "input": input, "canonical": r.to_string(), "level": r.level()}),
                    )?;
                } else {
                    writeln!(out, "{r}")?;
                    writeln!(out, "level: {}", r.level())?;
                }
            } else {
                let f = parse_formula(input)?;
                if *json {
                    emit(
                        out,
                        json!({"schema": "pts/1", "command": "parse", "kind": "formula",
                               "input": input, "canonical": print_formula(&f)}),
                    )?;
                } else {
                    writeln!(out, "{}", print_formula(&f))?;
                }
            }
            Ok(EXIT_YES)
        }

        Command::Derive {
            base,
            assume,
            goal,
            witness,
            json,
        } => {
            let base = load_base_at(base)?;
            let assumed = match assume {
                Some(path) => load_rule_set(&resolve(path))?,
                None => Vec::new(),
            };
            let goal = Atom::new(goal)?;
            let derivable = pts_core::derive::derives(&base, &assumed, &goal);
            let tree = if derivable && *witness {
                pts_core::derive::derive_witness(&base, &assumed, &goal)
            } else {
                None
            };
            if *json {
                emit(
                    out,
                    json!({"schema": "pts/1", "command": "derive",
                           "base": base.to_string(),
                           "assumed": assumed.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
                           "goal": goal.to_string(),
                           "derivable": derivable,
                           "witness": tree.as_ref().map(|t| t.render())}),
                )?;
            } else {
                writeln!(out, "{}", if derivable { "derivable" } else { "not derivable" })?;
                if let Some(t) = tree {
                    write!(out, "{}", t.render())?;
                }
            }
            Ok(if derivable { EXIT_YES } else { EXIT_NO })
        }

        Command::Prove {
            sequent,
            countermodel,
            max_points,
            json,
        } => {
            let seq = parse_sequent_or_formula(sequent)?;
            let provable = prove_sequent(&seq.premises, &seq.conclusion);
            let model = if !provable && *countermodel {
                kripke::countermodel(&seq.premises, &seq.conclusion, *max_points)
            } else {
                None
            };
            if *json {
                emit(
                    out,
                    json!({"schema": "pts/1", "command": "prove",
                           "sequent": seq.to_string(), "provable": provable,
                           "countermodel": model}),
                )?;
            } else {
                writeln!(out, "{}", if provable { "provable" } else { "not provable" })?;
                if let Some(m) = model {
                    write!(out, "{}", m.render())?;
                }
            }
            Ok(if provable { EXIT_YES } else { EXIT_NO })
        }

        Command::ProveExt {
            base,
            assume,
            sequent,
            json,
        } => {
            let base = load_base_at(base)?;
            let assumed = match assume {
                Some(path) => load_rule_set(&resolve(path))?,
                None => Vec::new(),
            };
            let seq = parse_sequent(sequent)?;
            let ext = ExtendedSequent {
                context: seq.premises.clone(),
                assumed_rules: assumed,
                base,
                goal: seq.conclusion.clone(),
            };
            let provable = pts_core::ipc::prove_extended(&ext)?;
            if *json {
                let translated: Vec<String> = pts_core::ipc::extended_context(&ext)?
                    .iter()
                    .map(print_formula)
                    .collect();
                emit(
                    out,
                    json!({"schema": "pts/1", "command": "prove-ext",
                           "sequent": seq.to_string(), "provable": provable,
                           "translated_context": translated}),
                )?;
            } else {
                writeln!(out, "{}", if provable { "provable" } else { "not provable" })?;
            }
            Ok(if provable { EXIT_YES } else { EXIT_NO })
        }

        Command::Eval {
            universe,
            base,
            semantics,
            level,
            sequent,
            stats,
            sweep,
            json,
        } => {
            let mut u = load_universe_at(universe)?;
            if let Some(n) = *level {
                u = Universe::new(u.alphabet().to_vec(), u.candidates().to_vec(), n)?;
            }
            let sel = SemanticsSelector::parse(semantics)?;
            let mask = mask_of(&u, base)?;
            let seq = parse_sequent(sequent)?;
            let mut ctx = EvalContext::new(&u);
            let holds = ctx.consequence(sel, mask, &seq.premises, &seq.conclusion)?;
            let sweep_result = if *sweep {
                let masks = ctx.sweep(sel, &seq.premises, &seq.conclusion)?;
                let minimal = minimal_masks(&masks);
                Some(
                    minimal
                        .iter()
                        .map(|&m| u.base_from_mask(m).to_string())
                        .collect::<Vec<_>>(),
                )
            } else {
                None
            };
            if *json {
                emit(
                    out,
                    json!({"schema": "pts/1", "command": "eval",
                           "semantics": sel.name(),
                           "base": u.base_from_mask(mask).to_string(),
                           "level": u.level_bound(),
                           "query": seq.to_string(),
                           "verdict": holds,
                           "minimal_validating_bases": sweep_result,
                           "stats": if *stats { Some(ctx.stats) } else { None }}),
                )?;
            } else {
                writeln!(out, "{}", if holds { "holds" } else { "fails" })?;
                if let Some(frontier) = sweep_result {
                    writeln!(out, "minimal validating bases:")?;
                    for b in frontier {
                        writeln!(out, "  {b}")?;
                    }
                }
                if *stats {
                    writeln!(
                        out,
                        "stats: {} extensions visited, {} cache hits, {} derivability queries",
                        ctx.stats.extensions_visited,
                        ctx.stats.cache_hits,
                        ctx.stats.derivability_queries
                    )?;
                }
            }
            Ok(if holds { EXIT_YES } else { EXIT_NO })
        }

        Command::Translate {
            sharp,
            circ,
            star,
            input,
            json,
        } => {
            if *star {
                let rule = parse_rule(input)?;
                let f = translate::star(&rule);
                if *json {
                    emit(
                        out,
                        json!({"schema": "pts/1", "command": "translate", "map": "star",
                               "input": rule.to_string(), "output": print_formula(&f)}),
                    )?;
                } else {
                    writeln!(out, "{}", print_formula(&f))?;
                }
            } else if *circ {
                let f = DisjunctionFreeFormula::new(parse_formula(input)?)?;
                let rules = translate::circ(&f);
                if *json {
                    emit(
                        out,
                        json!({"schema": "pts/1", "command": "translate", "map": "circ",
                               "input": f.to_string(),
                               "output": rules.iter().map(|r| r.to_string()).collect::<Vec<_>>()}),
                    )?;
                } else {
                    for r in rules {
                        writeln!(out, "{r}")?;
                    }
                }
            } else if *sharp {
                let f = DisjunctionFreeFormula::new(parse_formula(input)?)?;
                let n = translate::sharp(&f);
                if *json {
                    emit(
                        out,
                        json!({"schema": "pts/1", "command": "translate", "map": "sharp",
                               "input": f.to_string(), "output": n.to_string()}),
                    )?;
                } else {
                    writeln!(out, "{n}")?;
                }
            } else {
                return Err(Error::Syntax {
                    pos: 1,
                    msg: "pick one of --sharp, --circ, --star".into(),
                });
            }
            Ok(EXIT_YES)
        }

        Command::Reduce {
            just,
            file,
            bounds,
            json,
        } => {
            let j = Justification::by_names(just)?;
            let text = std::fs::read_to_string(resolve(file))?;
            let mut d = ArgumentStructure::parse_sexpr(&text)?;
            let mut sequence = vec![d.to_sexpr()];
            for _ in 0..bounds.max_steps {
                let reducts = reduce_step(&d, &j)?;
                match reducts.into_iter().next() {
                    Some(next) => {
                        sequence.push(next.to_sexpr());
                        d = next;
                    }
                    None => break,
                }
            }
            if *json {
                emit(
                    out,
                    json!({"schema": "pts/1", "command": "reduce",
                           "justification": j.name, "steps": sequence.len() - 1,
                           "sequence": sequence}),
                )?;
            } else {
                for (i, s) in sequence.iter().enumerate() {
                    if i > 0 {
                        writeln!(out, "--- step {i} ---")?;
                    }
                    write!(out, "{s}")?;
                }
            }
            Ok(EXIT_YES)
        }

        Command::Argcheck {
            universe,
            base,
            just,
            file,
            bounds,
            json,
        } => {
            let u = load_universe_at(universe)?;
            let mask = mask_of(&u, base)?;
            let j = Justification::by_names(just)?;
            let text = std::fs::read_to_string(resolve(file))?;
            let d = ArgumentStructure::parse_sexpr(&text)?;
            let mut ctx = EvalContext::new(&u);
            let vb = validity_bounds(bounds);
            let verdict = check_validity(&d, &j, mask, &mut ctx, &vb)?;
            let (word, code) = match &verdict {
                Verdict3::Valid => ("valid", EXIT_YES),
                Verdict3::Invalid => ("invalid", EXIT_NO),
                Verdict3::Unknown { .. } => ("unknown", EXIT_UNKNOWN),
            };
            if *json {
                emit(
                    out,
                    json!({"schema": "pts/1", "command": "argcheck",
                           "base": u.base_from_mask(mask).to_string(),
                           "justification": j.name,
                           "conclusion": print_formula(d.conclusion()),
                           "assumptions": d.assumption_set().iter().map(print_formula).collect::<Vec<_>>(),
                           "verdict": verdict,
                           "bounds": {"max_steps": bounds.max_steps, "max_size": bounds.max_size,
                                       "max_visited": bounds.max_visited, "max_depth": bounds.max_depth}}),
                )?;
            } else {
                writeln!(out, "{word}")?;
                if let Verdict3::Unknown { reason } = &verdict {
                    writeln!(out, "reason: {reason}")?;
                }
            }
            Ok(code)
        }

        Command::Check {
            probe,
            universe,
            semantics,
            base,
            pool,
            samples,
            seed,
            report,
            json,
        } => {
            let u = load_universe_at(universe)?;
            let sel = SemanticsSelector::parse(semantics)?;
            let mut ctx = EvalContext::new(&u);
            let need_pool = || -> Result<Vec<props::PoolEntry>> {
                match pool {
                    Some(p) => parse_pool(p),
                    None => Err(Error::Syntax {
                        pos: 1,
                        msg: format!("probe `{probe}` needs --pool"),
                    }),
                }
            };
            let prop_report = match probe.as_str() {
                "gdp" => {
                    let mask = mask_of(&u, base)?;
                    props::check_gdp(&mut ctx, sel, mask, &need_pool()?)?
                }
                "harrop" => {
                    let instances = match pool {
                        Some(p) => parse_harrop_pool(p)?,
                        None => {
                            let alphabet = u.alphabet();
                            if alphabet.len() < 3 {
                                return Err(Error::Syntax {
                                    pos: 1,
                                    msg: "harrop needs three alphabet atoms or --pool".into(),
                                });
                            }
                            vec![(alphabet[0].clone(), alphabet[1].clone(), alphabet[2].clone())]
                        }
                    };
                    props::check_harrop(&mut ctx, sel, &instances)?
                }
                "export" => {
                    let mask = mask_of(&u, base)?;
                    props::check_compact_export(&mut ctx, sel, mask, &need_pool()?)?
                }
                "basecomp" => props::check_base_completeness(&mut ctx, sel, &need_pool()?)?,
                "basesound" => props::check_base_soundness(&mut ctx, sel, *samples, *seed)?,
                "separation" => props::check_separation(&mut ctx, &need_pool()?)?.0,
                other => {
                    return Err(Error::Syntax {
                        pos: 1,
                        msg: format!("unknown probe `{other}`"),
                    })
                }
            };
            let value = serde_json::to_value(&prop_report).unwrap();
            let wrapped = json!({"schema": "pts/1", "command": "check", "report": value});
            if let Some(path) = report {
                std::fs::write(path, serde_json::to_string_pretty(&wrapped).unwrap())?;
            }
            if *json {
                emit(out, wrapped)?;
            } else {
                writeln!(out, "{}: {:?}", prop_report.property, prop_report.verdict)?;
                writeln!(out, "universe: {}", prop_report.universe)?;
                writeln!(out, "swept: {}", prop_report.swept)?;
                if let Some(ce) = &prop_report.counterexample {
                    writeln!(
                        out,
                        "counterexample: {} |= {} at {} ({})",
                        ce.gamma.join(", "),
                        ce.conclusion,
                        ce.base,
                        ce.detail
                    )?;
                }
                for note in &prop_report.notes {
                    writeln!(out, "note: {note}")?;
                }
            }
            Ok(match prop_report.verdict {
                props::ReportVerdict::Holds | props::ReportVerdict::HoldsOnSweep => EXIT_YES,
                props::ReportVerdict::Fails => EXIT_NO,
            })
        }

        Command::Repro { suite, json } => crate::repro::run(suite, *json, out),
    }
}

pub fn validity_bounds(b: &BoundsArgs) -> pts_core::arguments::ValidityBounds {
    pts_core::arguments::ValidityBounds {
        search: SearchBounds {
            max_steps: b.max_steps,
            max_size: b.max_size,
            max_visited: b.max_visited,
        },
        max_depth: b.max_depth,
    }
}
