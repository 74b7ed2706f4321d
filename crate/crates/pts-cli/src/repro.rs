//! Fixture runner: executes every `*.json` fixture in a suite directory
//! through the normal command dispatch and prints a pass/fail matrix.
//!
//! A fixture names a command line and its expected outcome:
//!
//! ```json
//! {
//!   "name": "worked-derivation",
//!   "description": "the level-0..3 base derives y from four assumed rules",
//!   "argv": ["derive", "--base", "universes/worked.base", "--goal", "y"],
//!   "expect_exit": 0,
//!   "expect_stdout_contains": "derivable"
//! }
//! ```
//!
//! Relative paths inside fixtures resolve against the suite directory via
//! `PTS_UNIVERSE_DIR`.

use crate::commands;
use crate::Cli;
use clap::Parser;
use serde::Deserialize;
use serde_json::json;
use std::io::Write;

#[derive(Deserialize)]
struct Fixture {
    name: String,
    #[serde(default)]
    description: String,
    argv: Vec<String>,
    expect_exit: i32,
    #[serde(default)]
    expect_stdout_contains: Option<String>,
}

struct Outcome {
    name: String,
    description: String,
    passed: bool,
    detail: String,
}

pub fn run(suite: &str, as_json: bool, out: &mut dyn Write) -> pts_core::Result<i32> {
    let dir = std::path::Path::new(suite);
    if !dir.is_dir() {
        return Err(pts_core::Error::Io(format!(
            "suite directory `{suite}` not found"
        )));
    }
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(pts_core::Error::Io(format!(
            "suite directory `{suite}` has no fixtures"
        )));
    }
    // fixture-relative paths resolve against the suite directory
    std::env::set_var("PTS_UNIVERSE_DIR", dir);
    let mut outcomes = Vec::new();
    for path in &paths {
        let text = std::fs::read_to_string(path)?;
        let fixture: Fixture = serde_json::from_str(&text)
            .map_err(|e| pts_core::Error::Io(format!("{}: {e}", path.display())))?;
        outcomes.push(run_fixture(fixture));
    }
    let failed: Vec<&Outcome> = outcomes.iter().filter(|o| !o.passed).collect();
    if as_json {
        let rows: Vec<_> = outcomes
            .iter()
            .map(|o| {
                json!({"name": o.name, "description": o.description,
                       "passed": o.passed, "detail": o.detail})
            })
            .collect();
        writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&json!({
                "schema": "pts/1", "command": "repro",
                "total": outcomes.len(), "failed": failed.len(), "fixtures": rows
            }))
            .unwrap()
        )?;
    } else {
        for o in &outcomes {
            writeln!(
                out,
                "{} {} — {}",
                if o.passed { "pass" } else { "FAIL" },
                o.name,
                if o.passed { &o.description } else { &o.detail }
            )?;
        }
        writeln!(out, "{} fixtures, {} failed", outcomes.len(), failed.len())?;
    }
    Ok(if failed.is_empty() {
        commands::EXIT_YES
    } else {
        commands::EXIT_NO
    })
}

fn run_fixture(fixture: Fixture) -> Outcome {
    let mut argv = vec!["pts".to_string()];
    argv.extend(fixture.argv.iter().cloned());
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            return Outcome {
                name: fixture.name,
                description: fixture.description,
                passed: false,
                detail: format!("bad argv: {e}"),
            }
        }
    };
    let mut buffer: Vec<u8> = Vec::new();
    let code = commands::execute(&cli.command, &mut buffer);
    let stdout = String::from_utf8_lossy(&buffer).into_owned();
    let mut passed = code == fixture.expect_exit;
    let mut detail = format!("exit {code}, expected {}", fixture.expect_exit);
    if passed {
        if let Some(needle) = &fixture.expect_stdout_contains {
            if !stdout.contains(needle) {
                passed = false;
                detail = format!("stdout missing `{needle}`; got: {}", stdout.trim());
            }
        }
    }
    Outcome {
        name: fixture.name,
        description: fixture.description,
        passed,
        detail,
    }
}
