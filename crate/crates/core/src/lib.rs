//! Highlight extraction for live-streamed videos.
//!
//! Chat bursts place coarse red dots near likely highlights; viewer play
//! data around each dot then pulls it onto the highlight and estimates the
//! span. Simulators for both signals are included for testing.

pub mod chat;
pub mod error;
pub mod evaluation;
pub mod extractor;
pub mod histogram;
pub mod initializer;
pub mod logistic;
pub mod model;
pub mod simulator;
pub mod span;

pub use chat::{build_windows, parse_chat_log, parse_labels, write_chat_log, write_labels, ChatLog, ChatMessage, VideoMeta, Window, WindowBounds};
pub use error::{Error, Result};
pub use extractor::{
    derive_plays, filter_plays, plays_from_log, refine, EventKind, ExtractorConfig, InteractionEvent, Play,
    PositionFeatures, RefineOutcome, RefineReport, Refinement, TypeClassifier, TypeLabel,
};
pub use initializer::{initialize, InitializerModel, RedDot, RedDotState};
pub use logistic::LogisticModel;
pub use model::ModelFile;
pub use span::{GroundTruth, HighlightSpan};
