use serde::{Deserialize, Serialize};

use super::classify::{position_features, PositionFeatures, TypeClassifier, TypeLabel};
use super::filter::{filter_plays, ExtractorConfig};
use super::plays::{plays_from_log, InteractionEvent, Play};
use crate::error::{Error, Result};
use crate::initializer::{RedDot, RedDotState};
use crate::span::HighlightSpan;

/// Median; even counts average the two central values.
pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 0 {
        (values[mid - 1] + values[mid]) / 2.0
    } else {
        values[mid]
    })
}

/// Drops plays that end before the dot and takes the median start and end
/// of the rest.
pub fn aggregate_type2(plays: &[Play], red_dot_s: f64) -> Result<HighlightSpan> {
    let kept: Vec<&Play> = plays.iter().filter(|p| p.e >= red_dot_s).collect();
    let mut starts: Vec<f64> = kept.iter().map(|p| p.s).collect();
    let mut ends: Vec<f64> = kept.iter().map(|p| p.e).collect();
    match (median(&mut starts), median(&mut ends)) {
        (Some(s), Some(e)) if s < e => Ok(HighlightSpan { start_s: s, end_s: e }),
        (Some(s), Some(e)) => Err(Error::InsufficientData(format!("median span [{s}, {e}] is empty"))),
        _ => Err(Error::InsufficientData("every play ends before the red dot".into())),
    }
}

pub fn step_type1(red_dot_s: f64, m: f64) -> f64 {
    (red_dot_s - m).max(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "reason")]
pub enum RefineOutcome {
    /// Judged Type I and moved back by `m`.
    SteppedBack,
    /// Judged Type II and moved to the median start.
    Moved,
    Converged,
    /// No state change.
    Deferred(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefineReport {
    pub red_dot_id: u32,
    pub old_position: f64,
    pub new_position: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<TypeLabel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span: Option<HighlightSpan>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub features: Option<PositionFeatures>,
    pub plays_used: usize,
    pub outcome: RefineOutcome,
}

/// Outcome of one refinement iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    pub dot: RedDot,
    pub report: RefineReport,
}

/// Number of plays a batch of events yields, the quantity the quorum is
/// checked against.
pub fn derived_play_count(events: &[InteractionEvent]) -> usize {
    plays_from_log(events).len()
}

/// Runs one extractor iteration on `dot` using the interactions collected
/// at its current position.
pub fn refine(
    dot: &RedDot,
    events: &[InteractionEvent],
    cfg: &ExtractorConfig,
    classifier: &TypeClassifier,
) -> Refinement {
    let r = dot.position_s;
    let deferred = |reason: String, plays_used: usize| Refinement {
        dot: dot.clone(),
        report: RefineReport {
            red_dot_id: dot.id,
            old_position: r,
            new_position: r,
            label: None,
            span: None,
            features: None,
            plays_used,
            outcome: RefineOutcome::Deferred(reason),
        },
    };

    if dot.state == RedDotState::Converged {
        return deferred("already converged".into(), 0);
    }
    if dot.iterations() >= cfg.max_iterations {
        return deferred("iteration cap reached".into(), 0);
    }
    let plays = plays_from_log(events);
    if plays.len() < cfg.min_plays {
        return deferred(format!("quorum not met: {} of {} plays", plays.len(), cfg.min_plays), plays.len());
    }
    let kept = match filter_plays(&plays, r, cfg) {
        Ok(kept) => kept,
        Err(e) => return deferred(e.to_string(), 0),
    };
    let features = position_features(&kept, r);
    let label = match classifier.classify(&features) {
        Ok(label) => label,
        Err(e) => return deferred(e.to_string(), kept.len()),
    };

    let mut next = dot.clone();
    next.history.push(r);
    let (outcome, span) = match label {
        TypeLabel::TypeI => {
            next.position_s = step_type1(r, cfg.m);
            next.state = RedDotState::Refining;
            next.span = None;
            (RefineOutcome::SteppedBack, None)
        }
        TypeLabel::TypeII => {
            let span = match aggregate_type2(&kept, r) {
                Ok(span) => span,
                Err(e) => return deferred(e.to_string(), kept.len()),
            };
            next.position_s = span.start_s;
            next.span = Some(span);
            if (r - span.start_s).abs() < cfg.epsilon {
                next.state = RedDotState::Converged;
                (RefineOutcome::Converged, Some(span))
            } else {
                next.state = RedDotState::Refining;
                (RefineOutcome::Moved, Some(span))
            }
        }
    };

    Refinement {
        report: RefineReport {
            red_dot_id: dot.id,
            old_position: r,
            new_position: next.position_s,
            label: Some(label),
            span,
            features: Some(features),
            plays_used: kept.len(),
            outcome,
        },
        dot: next,
    }
}
