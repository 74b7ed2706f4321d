//! Command-line front end: parse, derive, prove, eval, translate, reduce,
//! argcheck, check and repro subcommands over the library.
//!
//! Exit codes: 0 affirmative/holds, 1 negative/fails, 2 unknown (a resource
//! bound was hit), 3 usage or input errors.

mod commands;
mod repro;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "pts",
    about = "workbench for proof-theoretic semantics over finite rule universes",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Clone)]
pub struct BoundsArgs {
    /// maximum reduction steps explored per search
    #[arg(long, default_value_t = 10_000)]
    pub max_steps: usize,
    /// maximum structure size reachable by rewriting
    #[arg(long, default_value_t = 1_000)]
    pub max_size: usize,
    /// cap on visited structures / extension sweeps
    #[arg(long, default_value_t = 1 << 20)]
    pub max_visited: usize,
    /// recursion depth for validity checking
    #[arg(long, default_value_t = 24)]
    pub max_depth: usize,
}

#[derive(Subcommand)]
pub enum Command {
    /// Parse a formula (or a rule with --rule) and print it canonically
    Parse {
        input: String,
        /// parse an atomic rule instead of a formula
        #[arg(long)]
        rule: bool,
        #[arg(long)]
        json: bool,
    },
    /// Decide derivability of an atom over a base
    Derive {
        #[arg(long)]
        base: String,
        #[arg(long)]
        assume: Option<String>,
        #[arg(long)]
        goal: String,
        /// print a derivation tree when one exists
        #[arg(long)]
        witness: bool,
        #[arg(long)]
        json: bool,
    },
    /// Decide propositional derivability of a sequent
    Prove {
        sequent: String,
        /// search for a finite countermodel when the sequent fails
        #[arg(long)]
        countermodel: bool,
        /// countermodel point bound
        #[arg(long, default_value_t = 6)]
        max_points: usize,
        #[arg(long)]
        json: bool,
    },
    /// Decide derivability in the system extended with a base
    ProveExt {
        #[arg(long)]
        base: String,
        /// additional assumed rules, disjoint from the base
        #[arg(long)]
        assume: Option<String>,
        sequent: String,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a consequence over a finite universe
    Eval {
        #[arg(long)]
        universe: String,
        /// base file; the empty base when absent
        #[arg(long)]
        base: Option<String>,
        #[arg(long, default_value = "std")]
        semantics: String,
        /// override the universe level bound
        #[arg(long)]
        level: Option<usize>,
        sequent: String,
        /// print evaluator statistics
        #[arg(long)]
        stats: bool,
        /// evaluate at every base and print the minimal validating ones
        #[arg(long)]
        sweep: bool,
        #[arg(long)]
        json: bool,
    },
    /// Apply a syntactic translation
    Translate {
        /// normalize a disjunction-free formula
        #[arg(long, conflicts_with_all = ["circ", "star"])]
        sharp: bool,
        /// translate a disjunction-free formula to rules
        #[arg(long, conflicts_with = "star")]
        circ: bool,
        /// translate a rule to a formula
        #[arg(long)]
        star: bool,
        input: String,
        #[arg(long)]
        json: bool,
    },
    /// Print a reduction sequence for a structure file
    Reduce {
        /// justification: comma-separated std, wk, orl
        #[arg(long, default_value = "std")]
        just: String,
        file: String,
        #[command(flatten)]
        bounds: BoundsArgs,
        #[arg(long)]
        json: bool,
    },
    /// Check argumental validity of a structure file over a base
    Argcheck {
        #[arg(long)]
        universe: String,
        #[arg(long)]
        base: Option<String>,
        #[arg(long, default_value = "std")]
        just: String,
        file: String,
        #[command(flatten)]
        bounds: BoundsArgs,
        #[arg(long)]
        json: bool,
    },
    /// Run a metatheory probe
    Check {
        /// gdp | harrop | export | basecomp | basesound | separation
        probe: String,
        #[arg(long)]
        universe: String,
        #[arg(long, default_value = "std")]
        semantics: String,
        #[arg(long)]
        base: Option<String>,
        /// pool file of `Γ |= A` lines (atom triples for harrop)
        #[arg(long)]
        pool: Option<String>,
        #[arg(long, default_value_t = 300)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// write the JSON report here
        #[arg(long)]
        report: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Run every fixture in a suite directory and print a pass/fail matrix
    Repro {
        suite: String,
        #[arg(long)]
        json: bool,
    },
}

fn main() {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout();
    let code = commands::execute(&cli.command, &mut stdout);
    std::process::exit(code);
}
