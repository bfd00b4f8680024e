//! One-second bins centred on integer seconds and a centred moving average.

/// Bin index for a timestamp: bin `k` covers `[k - 0.5, k + 0.5)`.
pub fn bin_of(t: f64) -> i64 {
    (t + 0.5).floor() as i64
}

/// Width of the centred moving average, in bins.
pub const SMOOTHING_WIDTH: usize = 5;

/// Centred moving average with mirrored edges, so a flat series stays flat
/// and a spike near the edge is not inflated.
pub fn smooth(values: &[f64], width: usize) -> Vec<f64> {
    let n = values.len() as i64;
    let half = (width / 2) as i64;
    (0..n)
        .map(|i| {
            let sum: f64 = (i - half..=i + half).map(|j| values[reflect(j, n)]).sum();
            sum / (2 * half + 1) as f64
        })
        .collect()
}

/// Mirrors an out-of-range index back into `0..n`, repeating the edge
/// sample (`d c b a | a b c d`).
fn reflect(mut j: i64, n: i64) -> usize {
    loop {
        if j < 0 {
            j = -j - 1;
        } else if j >= n {
            j = 2 * n - j - 1;
        } else {
            return j as usize;
        }
    }
}

/// A dense histogram over bins `first_bin .. first_bin + counts.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedSeries {
    pub first_bin: i64,
    pub values: Vec<f64>,
}

impl BinnedSeries {
    pub fn zeros(first_bin: i64, last_bin: i64) -> Self {
        let len = (last_bin - first_bin + 1).max(0) as usize;
        Self {
            first_bin,
            values: vec![0.0; len],
        }
    }

    pub fn add(&mut self, bin: i64, amount: f64) {
        if let Some(v) = self.slot(bin) {
            *v += amount;
        }
    }

    /// Adds `amount` to every bin in `lo..=hi` that lies inside the series.
    pub fn add_range(&mut self, lo: i64, hi: i64, amount: f64) {
        for b in lo.max(self.first_bin)..=hi.min(self.last_bin()) {
            self.add(b, amount);
        }
    }

    fn slot(&mut self, bin: i64) -> Option<&mut f64> {
        let idx = bin - self.first_bin;
        (idx >= 0).then(|| self.values.get_mut(idx as usize)).flatten()
    }

    pub fn last_bin(&self) -> i64 {
        self.first_bin + self.values.len() as i64 - 1
    }

    pub fn smoothed(&self) -> Self {
        Self {
            first_bin: self.first_bin,
            values: smooth(&self.values, SMOOTHING_WIDTH),
        }
    }

    /// Index of the first maximal value.
    pub fn argmax_first(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, v) in self.values.iter().enumerate() {
            if best.is_none_or(|b| *v > self.values[b]) {
                best = Some(i);
            }
        }
        best
    }

    /// Index at the middle of the first run of maximal values.
    pub fn argmax_plateau_mid(&self) -> Option<usize> {
        let first = self.argmax_first()?;
        let top = self.values[first];
        let run = self.values[first..].iter().take_while(|v| **v == top).count();
        Some(first + (run - 1) / 2)
    }

    pub fn bin_at(&self, idx: usize) -> i64 {
        self.first_bin + idx as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bins_are_centred() {
        assert_eq!(bin_of(2331.6), 2332);
        assert_eq!(bin_of(2332.4), 2332);
        assert_eq!(bin_of(2332.5), 2333);
        assert_eq!(bin_of(0.0), 0);
    }

    #[test]
    fn flat_stays_flat() {
        assert_eq!(smooth(&[1.0; 7], 5), vec![1.0; 7]);
    }

    #[test]
    fn smoothing_spreads_spike() {
        let s = smooth(&[0.0, 0.0, 5.0, 0.0, 0.0, 0.0], 5);
        assert_eq!(s, vec![1.0, 1.0, 1.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn plateau_midpoint() {
        let s = BinnedSeries { first_bin: 10, values: vec![0.0, 3.0, 3.0, 3.0, 1.0] };
        assert_eq!(s.argmax_first(), Some(1));
        assert_eq!(s.argmax_plateau_mid(), Some(2));
    }
}
