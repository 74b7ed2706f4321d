//! Argument structures with discharge maps, reductions, justifications,
//! the rewriting relation they generate, and a bounded validity checker.

mod reduction;
mod structure;
mod synth;
mod validity;

pub use reduction::{
    reduce_step, reduces_to, Justification, Reduction, ReductionOutcome, SearchBounds,
};
pub use structure::{
    is_canonical, substitute, ArgNode, ArgumentStructure, IntroRule, NodeId, NodeKind,
    StructureBuilder,
};
pub use synth::synthesize_witness;
pub use validity::{check_validity, is_closed_derivation, ValidityBounds, Verdict3};
