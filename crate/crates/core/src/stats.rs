//! Small statistics helpers shared by the simulators.

use serde::Serialize;

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl Estimate {
    /// i.i.d. samples. Standard error uses the unbiased variance; zero for a
    /// single sample.
    pub fn from_samples(xs: &[f64]) -> Estimate {
        let n = xs.len();
        if n == 0 {
            return Estimate { mean: f64::NAN, std_error: f64::NAN, samples: 0 };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let std_error = if n > 1 {
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Estimate { mean, std_error, samples: n }
    }

    /// Batch-means estimate for a serially correlated series: the series is cut
    /// into `batches` equal blocks (the tail remainder is dropped) and the
    /// block means are treated as i.i.d.
    pub fn batch_means(xs: &[f64], batches: usize) -> Estimate {
        let batches = batches.max(1);
        let len = xs.len() / batches;
        if len == 0 {
            return Estimate::from_samples(xs);
        }
        let means: Vec<f64> = xs
            .chunks_exact(len)
            .take(batches)
            .map(|c| c.iter().sum::<f64>() / len as f64)
            .collect();
        let mut e = Estimate::from_samples(&means);
        e.samples = len * batches;
        e
    }

    /// True when `target` lies within `k` standard errors of the mean.
    pub fn covers(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.std_error
    }
}

/// Upper empirical quantile: the order statistic at index `ceil(q·n) − 1`,
/// so `q = 1` returns the sample maximum.
pub fn upper_quantile(xs: &[f64], q: f64) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len();
    let idx = ((q.clamp(0.0, 1.0) * n as f64).ceil() as usize).clamp(1, n) - 1;
    sorted[idx]
}

/// Population mean and standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}
