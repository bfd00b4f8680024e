use serde::{Deserialize, Serialize};

use super::plays::Play;
use crate::error::{Error, Result};
use crate::logistic::LogisticModel;

/// Where plays sit relative to a red dot.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositionFeatures {
    /// Start at or after the dot.
    pub after: usize,
    /// End before the dot.
    pub before: usize,
    /// Start before the dot and end at or after it.
    pub across: usize,
}

impl PositionFeatures {
    pub fn total(&self) -> usize {
        self.after + self.before + self.across
    }

    /// Counts as shares of the total, ordered (after, before, across).
    pub fn proportions(&self) -> Option<[f64; 3]> {
        let n = self.total();
        (n > 0).then(|| {
            let n = n as f64;
            [self.after as f64 / n, self.before as f64 / n, self.across as f64 / n]
        })
    }
}

pub fn position_features(plays: &[Play], red_dot_s: f64) -> PositionFeatures {
    let mut f = PositionFeatures::default();
    for p in plays {
        if p.s >= red_dot_s {
            f.after += 1;
        } else if p.e < red_dot_s {
            f.before += 1;
        } else {
            f.across += 1;
        }
    }
    f
}

/// Type I: the dot sits after the highlight's end. Type II: at or before it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TypeLabel {
    #[serde(rename = "type_i")]
    TypeI,
    #[serde(rename = "type_ii")]
    TypeII,
}

/// Logistic model over play-position proportions; scores the probability of
/// Type I.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypeClassifier {
    #[serde(flatten)]
    pub model: LogisticModel<3>,
}

impl TypeClassifier {
    pub fn train(labeled: &[(PositionFeatures, TypeLabel)]) -> Result<Self> {
        let samples: Vec<([f64; 3], bool)> = labeled
            .iter()
            .filter_map(|(f, y)| f.proportions().map(|x| (x, *y == TypeLabel::TypeI)))
            .collect();
        Ok(Self {
            model: LogisticModel::fit(&samples)?,
        })
    }

    pub fn type_i_probability(&self, f: &PositionFeatures) -> Result<f64> {
        let x = f
            .proportions()
            .ok_or_else(|| Error::InsufficientData("no plays to classify".into()))?;
        Ok(self.model.predict(&x))
    }

    pub fn classify(&self, f: &PositionFeatures) -> Result<TypeLabel> {
        Ok(if self.type_i_probability(f)? >= 0.5 {
            TypeLabel::TypeI
        } else {
            TypeLabel::TypeII
        })
    }
}

pub fn accuracy(classifier: &TypeClassifier, labeled: &[(PositionFeatures, TypeLabel)]) -> f64 {
    let scored: Vec<bool> = labeled
        .iter()
        .filter_map(|(f, y)| classifier.classify(f).ok().map(|p| p == *y))
        .collect();
    // unclassifiable examples count as misses
    scored.iter().filter(|ok| **ok).count() as f64 / labeled.len().max(1) as f64
}
