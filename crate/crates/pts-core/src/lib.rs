//! A workbench for proof-theoretic semantics over finite atomic-rule universes.
//!
//! The library decides derivability of atoms from higher-level atomic rules
//! ([`derive`]), evaluates two base-extension consequence relations over a
//! finite universe of candidate rules ([`semantics`]), decides intuitionistic
//! propositional derivability with an independent Kripke countermodel oracle
//! ([`ipc`], [`kripke`]), implements the syntactic translations between
//! disjunction-free formulas and rule sets ([`translate`]), makes argument
//! structures, reductions and bounded argumental validity executable
//! ([`arguments`]), and probes metatheoretic properties such as the
//! generalised disjunction property, Harrop validity, compact export and
//! base-completeness ([`props`]).
//!
//! All "for every extension" and "for every atom" quantifiers are evaluated
//! over a user-supplied finite [`rules::Universe`]; verdicts are always
//! relative to that finite carrier.

pub mod arguments;
pub mod derive;
pub mod error;
pub mod ipc;
pub mod kripke;
pub mod props;
pub mod rules;
pub mod semantics;
pub mod syntax;
pub mod translate;

pub use error::Error;
pub use rules::{AtomicRule, Base, RulePremise, RuleScheme, Universe};
pub use semantics::{EvalContext, SemanticsSelector};
pub use syntax::{Atom, Formula, SequentQuery};

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
