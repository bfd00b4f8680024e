//! Learning the constant delay `c` between a highlight's start and the chat
//! peak it provokes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::in_start_tolerance;
use crate::span::HighlightSpan;

/// Candidate values of `c`, in whole seconds.
pub const ADJUSTMENT_GRID: std::ops::RangeInclusive<u32> = 0..=60;

/// How to choose among several `c` that place equally many good red dots.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdjustmentTieBreak {
    /// The maximiser with the smallest total `|peak - c - start|`, then the
    /// smallest such `c`.
    #[default]
    NearestFit,
    /// The smallest maximiser.
    Smallest,
}

/// Number of pairs whose shifted peak lands in `[s - 10, e]`.
pub fn adjustment_reward(pairs: &[(f64, HighlightSpan)], c: f64) -> usize {
    pairs
        .iter()
        .filter(|(peak, span)| in_start_tolerance(peak - c, span))
        .count()
}

fn fit_error(pairs: &[(f64, HighlightSpan)], c: f64) -> f64 {
    pairs.iter().map(|(peak, span)| (peak - c - span.start_s).abs()).sum()
}

pub fn learn_adjustment(pairs: &[(f64, HighlightSpan)], tie_break: AdjustmentTieBreak) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let mut best: Option<(f64, usize, f64)> = None;
    for c in ADJUSTMENT_GRID.map(f64::from) {
        let reward = adjustment_reward(pairs, c);
        let err = match tie_break {
            AdjustmentTieBreak::NearestFit => fit_error(pairs, c),
            AdjustmentTieBreak::Smallest => 0.0,
        };
        let better = match best {
            None => true,
            Some((_, r, e)) => reward > r || (reward == r && err < e),
        };
        if better {
            best = Some((c, reward, err));
        }
    }
    Ok(best.map(|(c, _, _)| c).unwrap_or(0.0))
}
