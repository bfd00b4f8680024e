use serde::{Deserialize, Serialize};

use super::plays::Play;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtractorConfig {
    /// Plays must touch `[r - Δ, r + Δ]`.
    pub delta_neighborhood: f64,
    pub min_play_s: f64,
    pub max_play_s: f64,
    /// Backward step for a dot judged to sit after its highlight.
    pub m: f64,
    pub epsilon: f64,
    /// Derived plays needed before an iteration runs.
    pub min_plays: usize,
    pub max_iterations: usize,
}

impl Default for ExtractorConfig {
    fn default() -> Self {
        Self {
            delta_neighborhood: 60.0,
            min_play_s: 5.0,
            max_play_s: 180.0,
            m: 20.0,
            epsilon: 5.0,
            min_plays: 10,
            max_iterations: 10,
        }
    }
}

impl ExtractorConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.delta_neighborhood > 0.0
            && 0.0 < self.min_play_s
            && self.min_play_s < self.max_play_s
            && self.m > 0.0
            && self.epsilon > 0.0
            && self.max_iterations > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid extractor config {self:?}")))
        }
    }
}

/// Index of the max-degree node of the overlap graph; ties go to the
/// earliest start, then the earliest index.
pub fn overlap_center(plays: &[Play]) -> Option<usize> {
    let degree = |i: usize| {
        plays
            .iter()
            .enumerate()
            .filter(|&(j, p)| j != i && p.overlaps(&plays[i]))
            .count()
    };
    (0..plays.len())
        .map(|i| (i, degree(i)))
        .min_by(|a, b| {
            b.1.cmp(&a.1)
                .then(plays[a.0].s.total_cmp(&plays[b.0].s))
                .then(a.0.cmp(&b.0))
        })
        .map(|(i, _)| i)
}

/// Drops plays far from the red dot, plays of implausible length, and
/// plays that do not overlap the overlap graph's center.
pub fn filter_plays(plays: &[Play], red_dot_s: f64, cfg: &ExtractorConfig) -> Result<Vec<Play>> {
    let lo = red_dot_s - cfg.delta_neighborhood;
    let hi = red_dot_s + cfg.delta_neighborhood;
    let kept: Vec<Play> = plays
        .iter()
        .filter(|p| p.s <= hi && p.e >= lo)
        .filter(|p| (cfg.min_play_s..=cfg.max_play_s).contains(&p.duration()))
        .cloned()
        .collect();

    let center = overlap_center(&kept)
        .ok_or_else(|| Error::InsufficientData("no plays survive filtering".into()))?;
    let center_play = kept[center].clone();
    Ok(kept
        .into_iter()
        .enumerate()
        .filter(|(i, p)| *i == center || p.overlaps(&center_play))
        .map(|(_, p)| p)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plays(v: &[(f64, f64)]) -> Vec<Play> {
        v.iter().map(|&(s, e)| Play::new("u", s, e)).collect()
    }

    fn spans(p: &[Play]) -> Vec<(f64, f64)> {
        p.iter().map(|p| (p.s, p.e)).collect()
    }

    #[test]
    fn neighbourhood_drops_far_play() {
        let p = plays(&[(1990.0, 2010.0), (1992.0, 2012.0), (1700.0, 1720.0)]);
        let out = filter_plays(&p, 2000.0, &ExtractorConfig::default()).unwrap();
        assert_eq!(spans(&out), vec![(1990.0, 2010.0), (1992.0, 2012.0)]);
    }

    #[test]
    fn short_play_dropped() {
        let p = plays(&[(2000.0, 2003.0), (1995.0, 2010.0)]);
        let out = filter_plays(&p, 2000.0, &ExtractorConfig::default()).unwrap();
        assert_eq!(spans(&out), vec![(1995.0, 2010.0)]);
    }

    #[test]
    fn long_play_dropped() {
        let p = plays(&[(1800.0, 2100.0), (1995.0, 2010.0)]);
        let out = filter_plays(&p, 2000.0, &ExtractorConfig::default()).unwrap();
        assert_eq!(spans(&out), vec![(1995.0, 2010.0)]);
    }

    #[test]
    fn non_neighbour_of_center_removed() {
        let p = plays(&[(1990.0, 2010.0), (1995.0, 2015.0), (2040.0, 2055.0)]);
        assert_eq!(overlap_center(&p), Some(0));
        let out = filter_plays(&p, 2000.0, &ExtractorConfig::default()).unwrap();
        assert_eq!(spans(&out), vec![(1990.0, 2010.0), (1995.0, 2015.0)]);
    }

    #[test]
    fn touching_plays_overlap() {
        let p = plays(&[(1990.0, 2000.0), (2000.0, 2010.0)]);
        assert!(p[0].overlaps(&p[1]));
        assert_eq!(filter_plays(&p, 2000.0, &ExtractorConfig::default()).unwrap().len(), 2);
    }

    #[test]
    fn nothing_left_is_insufficient() {
        assert!(matches!(
            filter_plays(&plays(&[(100.0, 110.0)]), 2000.0, &ExtractorConfig::default()),
            Err(Error::InsufficientData(_))
        ));
        assert!(matches!(
            filter_plays(&[], 2000.0, &ExtractorConfig::default()),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn config_validation() {
        assert!(ExtractorConfig::default().validate().is_ok());
        let bad = ExtractorConfig { min_play_s: 200.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
