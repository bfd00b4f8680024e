//! Play-data refinement of red dots.
//!
//! Each iteration derives plays from the interactions collected at a red
//! dot, drops noise and outliers, decides whether the dot sits after its
//! highlight (Type I) or not (Type II), and either steps it back or
//! aggregates the plays into a span.

mod classify;
mod filter;
mod plays;
mod refine;

pub use classify::{accuracy, position_features, PositionFeatures, TypeClassifier, TypeLabel};
pub use filter::{filter_plays, overlap_center, ExtractorConfig};
pub use plays::{derive_plays, plays_from_log, EventKind, InteractionEvent, Play};
pub use refine::{
    aggregate_type2, derived_play_count, median, refine, step_type1, RefineOutcome, RefineReport, Refinement,
};
