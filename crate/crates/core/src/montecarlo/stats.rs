use serde::Serialize;

use crate::error::{Error, Result};

/// Power sums `Σ (x - shift)^k`, `k = 1..4`, of a block of samples.
///
/// Blocks with different shifts merge exactly through the binomial
/// re-centering, so merging is associative up to rounding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerSums {
    pub count: u64,
    pub shift: f64,
    pub sums: [f64; 4],
}

const BINOMIAL: [[f64; 5]; 5] = [
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0, 0.0],
    [1.0, 3.0, 3.0, 1.0, 0.0],
    [1.0, 4.0, 6.0, 4.0, 1.0],
];

impl PowerSums {
    pub fn new(shift: f64) -> Self {
        Self { count: 0, shift, sums: [0.0; 4] }
    }

    pub fn push(&mut self, x: f64) {
        let y = x - self.shift;
        let y2 = y * y;
        self.count += 1;
        self.sums[0] += y;
        self.sums[1] += y2;
        self.sums[2] += y2 * y;
        self.sums[3] += y2 * y2;
    }

    pub fn recentered(&self, shift: f64) -> Self {
        let delta = self.shift - shift;
        let s = [self.count as f64, self.sums[0], self.sums[1], self.sums[2], self.sums[3]];
        let mut sums = [0.0; 4];
        for (k, out) in sums.iter_mut().enumerate() {
            let k = k + 1;
            *out = (0..=k).map(|j| BINOMIAL[k][j] * delta.powi((k - j) as i32) * s[j]).sum();
        }
        Self { count: self.count, shift, sums }
    }

    pub fn merge(&self, other: &PowerSums) -> Self {
        if other.count == 0 {
            return *self;
        }
        if self.count == 0 {
            return *other;
        }
        let o = if other.shift == self.shift { *other } else { other.recentered(self.shift) };
        let mut sums = self.sums;
        for (a, b) in sums.iter_mut().zip(o.sums) {
            *a += b;
        }
        Self { count: self.count + o.count, shift: self.shift, sums }
    }

    pub fn mean(&self) -> f64 {
        self.shift + self.sums[0] / self.count as f64
    }

    /// Unbiased k-statistics `k_1..k_4`; entries needing more samples are NaN.
    pub fn k_statistics(&self) -> [f64; 4] {
        let n = self.count as f64;
        if self.count == 0 {
            return [f64::NAN; 4];
        }
        let mean = self.mean();
        let c = if self.sums[0] == 0.0 { *self } else { self.recentered(mean) };
        let (m2, m3, m4) = (c.sums[1] / n, c.sums[2] / n, c.sums[3] / n);
        let k2 = if n > 1.0 { n / (n - 1.0) * m2 } else { f64::NAN };
        let k3 = if n > 2.0 { n * n / ((n - 1.0) * (n - 2.0)) * m3 } else { f64::NAN };
        let k4 = if n > 3.0 {
            n * n * ((n + 1.0) * m4 - 3.0 * (n - 1.0) * m2 * m2) / ((n - 1.0) * (n - 2.0) * (n - 3.0))
        } else {
            f64::NAN
        };
        [mean, k2, k3, k4]
    }
}

pub fn merge_all(blocks: &[PowerSums]) -> PowerSums {
    blocks
        .iter()
        .fold(PowerSums::new(blocks.first().map_or(0.0, |b| b.shift)), |acc, b| acc.merge(b))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CumulantEstimate {
    pub order: usize,
    pub value: f64,
    pub std_error: f64,
}

/// Sample cumulants with batch-means (`k_1`) and jackknife (`k_{2..4}`)
/// errors, plus the integrated autocorrelation time in units of samples.
pub fn batch_estimates(batches: &[PowerSums]) -> Result<(Vec<CumulantEstimate>, f64)> {
    let b = batches.len();
    if b < 2 || batches.iter().any(|x| x.count < 4) {
        return Err(Error::InsufficientSamples(format!(
            "need at least 2 batches of 4 samples, got {b}"
        )));
    }
    let total = merge_all(batches);
    let k = total.k_statistics();
    let bf = b as f64;

    let means: Vec<f64> = batches.iter().map(PowerSums::mean).collect();
    let grand = means.iter().sum::<f64>() / bf;
    let var_means = means.iter().map(|m| (m - grand).powi(2)).sum::<f64>() / (bf - 1.0);

    let leave_out: Vec<[f64; 4]> = (0..b)
        .map(|i| {
            let rest: Vec<PowerSums> =
                batches.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| *x).collect();
            merge_all(&rest).k_statistics()
        })
        .collect();

    let mut out = vec![CumulantEstimate { order: 1, value: k[0], std_error: (var_means / bf).sqrt() }];
    for q in 1..4 {
        let avg = leave_out.iter().map(|l| l[q]).sum::<f64>() / bf;
        let spread = leave_out.iter().map(|l| (l[q] - avg).powi(2)).sum::<f64>();
        out.push(CumulantEstimate {
            order: q + 1,
            value: k[q],
            std_error: ((bf - 1.0) / bf * spread).sqrt(),
        });
    }

    let batch_len = total.count as f64 / bf;
    let tau = if k[1] > 0.0 { (batch_len * var_means / (2.0 * k[1])).max(0.5) } else { 0.5 };
    Ok((out, tau))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sums(xs: &[f64], shift: f64) -> PowerSums {
        let mut p = PowerSums::new(shift);
        xs.iter().for_each(|&x| p.push(x));
        p
    }

    #[test]
    fn merge_is_shift_independent() {
        let xs = [1.0, 2.5, -0.3, 4.2, 0.7, 3.3];
        let whole = sums(&xs, 0.0);
        let split = sums(&xs[..2], 10.0).merge(&sums(&xs[2..], -3.0));
        let (a, b) = (whole.k_statistics(), split.k_statistics());
        for q in 0..4 {
            assert!((a[q] - b[q]).abs() < 1e-11 * a[q].abs().max(1.0), "{a:?} {b:?}");
        }
    }

    #[test]
    fn k_statistics_small_sample() {
        let k = sums(&[1.0, 2.0, 3.0, 4.0], 0.0).k_statistics();
        assert!((k[0] - 2.5).abs() < 1e-15);
        assert!((k[1] - 5.0 / 3.0).abs() < 1e-14);
        assert!(k[2].abs() < 1e-14);
        // m2 = 1.25, m4 = 2.5625: k4 = 16(5·2.5625 - 9·1.5625)/6 = -3.3333
        assert!((k[3] + 10.0 / 3.0).abs() < 1e-12, "{}", k[3]);
    }

    #[test]
    fn constant_samples_have_zero_cumulants() {
        let batches: Vec<_> = (0..8).map(|_| sums(&[3.0; 10], 3.0)).collect();
        let (est, _) = batch_estimates(&batches).unwrap();
        assert_eq!(est[0].value, 3.0);
        assert!(est[1..].iter().all(|e| e.value == 0.0 && e.std_error == 0.0));
    }
}
