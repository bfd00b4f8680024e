//! Binary logistic regression over fixed-size feature vectors, trained by
//! deterministic full-batch gradient descent on mean cross-entropy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_LEARNING_RATE: f64 = 0.5;
pub const DEFAULT_ITERATIONS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel<const N: usize> {
    #[serde(with = "array_serde")]
    pub weights: [f64; N],
    pub bias: f64,
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl<const N: usize> LogisticModel<N> {
    pub fn zeros() -> Self {
        Self {
            weights: [0.0; N],
            bias: 0.0,
        }
    }

    pub fn logit(&self, x: &[f64; N]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }

    pub fn predict(&self, x: &[f64; N]) -> f64 {
        sigmoid(self.logit(x))
    }

    pub fn fit(samples: &[([f64; N], bool)]) -> Result<Self> {
        Self::fit_with(samples, DEFAULT_LEARNING_RATE, DEFAULT_ITERATIONS)
    }

    pub fn fit_with(samples: &[([f64; N], bool)], learning_rate: f64, iterations: usize) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        let positives = samples.iter().filter(|(_, y)| *y).count();
        if positives == 0 || positives == samples.len() {
            return Err(Error::SingleClass);
        }

        let n = samples.len() as f64;
        let mut model = Self::zeros();
        for _ in 0..iterations {
            let mut grad_w = [0.0; N];
            let mut grad_b = 0.0;
            for (x, y) in samples {
                let err = model.predict(x) - if *y { 1.0 } else { 0.0 };
                for (g, v) in grad_w.iter_mut().zip(x) {
                    *g += err * v;
                }
                grad_b += err;
            }
            for (w, g) in model.weights.iter_mut().zip(grad_w) {
                *w -= learning_rate * g / n;
            }
            model.bias -= learning_rate * grad_b / n;
        }
        Ok(model)
    }

    /// Mean binary cross-entropy over `samples`.
    pub fn loss(&self, samples: &[([f64; N], bool)]) -> f64 {
        let eps = 1e-12;
        samples
            .iter()
            .map(|(x, y)| {
                let p = self.predict(x).clamp(eps, 1.0 - eps);
                if *y {
                    -p.ln()
                } else {
                    -(1.0 - p).ln()
                }
            })
            .sum::<f64>()
            / samples.len() as f64
    }
}

mod array_serde {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer, const N: usize>(v: &[f64; N], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter())
    }

    pub fn deserialize<'de, D: Deserializer<'de>, const N: usize>(d: D) -> Result<[f64; N], D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        let len = v.len();
        v.try_into()
            .map_err(|_| D::Error::custom(format!("expected {N} weights, got {len}")))
    }
}
