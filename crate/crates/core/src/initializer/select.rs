use crate::chat::Window;

/// A window with its predicted highlight probability and message-rate peak.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredWindow {
    pub window: Window,
    pub probability: f64,
    pub peak_s: f64,
}

/// Greedy top-k: walk windows by descending probability (ties to the
/// earlier peak) and keep one unless its peak is within `delta_sep` of a
/// peak already kept. Returns at most `k` windows in selection order.
pub fn top_k(scored: &[ScoredWindow], k: usize, delta_sep: f64) -> Vec<&ScoredWindow> {
    let mut order: Vec<usize> = (0..scored.len()).collect();
    order.sort_by(|&a, &b| {
        scored[b]
            .probability
            .total_cmp(&scored[a].probability)
            .then(scored[a].peak_s.total_cmp(&scored[b].peak_s))
            .then(a.cmp(&b))
    });

    let mut picked: Vec<&ScoredWindow> = Vec::with_capacity(k);
    for i in order {
        if picked.len() == k {
            break;
        }
        let cand = &scored[i];
        if picked.iter().all(|p| (p.peak_s - cand.peak_s).abs() > delta_sep) {
            picked.push(cand);
        }
    }
    picked
}
