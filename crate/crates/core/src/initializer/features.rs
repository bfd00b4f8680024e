//! Window features: message number, average message length and message
//! similarity, min-max normalised per video.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::chat::Window;
use crate::error::{Error, Result};

/// Un-normalised features of one window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawFeatures {
    pub num: f64,
    pub len: f64,
    pub sim: f64,
}

/// Normalised features, each in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub num: f64,
    pub len: f64,
    pub sim: f64,
}

impl FeatureVector {
    pub fn as_array(&self) -> [f64; 3] {
        [self.num, self.len, self.sim]
    }
}

pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_lowercase).collect()
}

/// Mean cosine similarity between each message's binary bag-of-words and
/// the centroid of all of them. Messages without tokens score zero.
pub fn message_similarity<S: AsRef<str>>(texts: &[S]) -> f64 {
    if texts.is_empty() {
        return 0.0;
    }
    let mut vocab: BTreeMap<String, usize> = BTreeMap::new();
    let bags: Vec<Vec<usize>> = texts
        .iter()
        .map(|t| {
            let mut ids: Vec<usize> = tokenize(t.as_ref())
                .into_iter()
                .map(|tok| {
                    let next = vocab.len();
                    *vocab.entry(tok).or_insert(next)
                })
                .collect();
            ids.sort_unstable();
            ids.dedup();
            ids
        })
        .collect();

    let n = bags.len() as f64;
    let mut centroid = vec![0.0; vocab.len()];
    for bag in &bags {
        for &i in bag {
            centroid[i] += 1.0 / n;
        }
    }
    let centroid_norm = centroid.iter().map(|c| c * c).sum::<f64>().sqrt();
    if centroid_norm == 0.0 {
        return 0.0;
    }

    bags.iter()
        .map(|bag| {
            if bag.is_empty() {
                return 0.0;
            }
            let dot: f64 = bag.iter().map(|&i| centroid[i]).sum();
            dot / ((bag.len() as f64).sqrt() * centroid_norm)
        })
        .sum::<f64>()
        / n
}

pub fn raw_features(w: &Window) -> Result<RawFeatures> {
    if w.messages.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let n = w.messages.len() as f64;
    let total_tokens: usize = w.messages.iter().map(|m| m.text.split_whitespace().count()).sum();
    let texts: Vec<&str> = w.messages.iter().map(|m| m.text.as_str()).collect();
    Ok(RawFeatures {
        num: n,
        len: total_tokens as f64 / n,
        sim: message_similarity(&texts),
    })
}

/// Per-video min/max of each raw feature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationStats {
    min: [f64; 3],
    max: [f64; 3],
}

impl NormalizationStats {
    pub fn from_raw(raw: &[RawFeatures]) -> Self {
        let mut min = [f64::INFINITY; 3];
        let mut max = [f64::NEG_INFINITY; 3];
        for r in raw {
            for (i, v) in [r.num, r.len, r.sim].into_iter().enumerate() {
                min[i] = min[i].min(v);
                max[i] = max[i].max(v);
            }
        }
        Self { min, max }
    }

    pub fn normalize(&self, r: &RawFeatures) -> FeatureVector {
        let scale = |i: usize, v: f64| {
            let range = self.max[i] - self.min[i];
            if range > 0.0 {
                ((v - self.min[i]) / range).clamp(0.0, 1.0)
            } else {
                0.0
            }
        };
        FeatureVector {
            num: scale(0, r.num),
            len: scale(1, r.len),
            sim: scale(2, r.sim),
        }
    }
}

pub fn extract_features(w: &Window, stats: &NormalizationStats) -> Result<FeatureVector> {
    Ok(stats.normalize(&raw_features(w)?))
}

/// Normalised features for every window of one video.
pub fn video_features(windows: &[Window]) -> Result<Vec<FeatureVector>> {
    let raw = windows.iter().map(raw_features).collect::<Result<Vec<_>>>()?;
    let stats = NormalizationStats::from_raw(&raw);
    Ok(raw.iter().map(|r| stats.normalize(r)).collect())
}
