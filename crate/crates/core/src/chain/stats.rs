//! Stationary estimates shared by the simulator and the oracle.

use serde::{Deserialize, Serialize};

/// Names of the estimated quantities, in storage order.
pub const FIELDS: [&str; 12] = [
    "mean_q1",
    "mean_q2",
    "p_empty1",
    "p_empty2",
    "p_both_empty",
    "p_both_busy",
    "throughput1",
    "throughput2",
    "drop_rate1",
    "drop_rate2",
    "transfer_rate_1to2",
    "transfer_rate_2to1",
];

/// Estimated stationary quantities with standard errors.
///
/// Oracle results carry exact values and zero standard errors.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SimStats {
    pub mean_q1: f64,
    pub mean_q2: f64,
    pub p_empty1: f64,
    pub p_empty2: f64,
    pub p_both_empty: f64,
    pub p_both_busy: f64,
    pub throughput1: f64,
    pub throughput2: f64,
    pub drop_rate1: f64,
    pub drop_rate2: f64,
    pub transfer_rate_1to2: f64,
    pub transfer_rate_2to1: f64,
    pub se_mean_q1: f64,
    pub se_mean_q2: f64,
    pub se_p_empty1: f64,
    pub se_p_empty2: f64,
    pub se_p_both_empty: f64,
    pub se_p_both_busy: f64,
    pub se_throughput1: f64,
    pub se_throughput2: f64,
    pub se_drop_rate1: f64,
    pub se_drop_rate2: f64,
    pub se_transfer_rate_1to2: f64,
    pub se_transfer_rate_2to1: f64,
    /// Slots contributing to the estimates.
    pub slots: u64,
    /// Set when a queue is still growing at the end of the run.
    pub diverged: bool,
}

impl SimStats {
    pub fn values(&self) -> [f64; 12] {
        [
            self.mean_q1,
            self.mean_q2,
            self.p_empty1,
            self.p_empty2,
            self.p_both_empty,
            self.p_both_busy,
            self.throughput1,
            self.throughput2,
            self.drop_rate1,
            self.drop_rate2,
            self.transfer_rate_1to2,
            self.transfer_rate_2to1,
        ]
    }

    pub fn std_errors(&self) -> [f64; 12] {
        [
            self.se_mean_q1,
            self.se_mean_q2,
            self.se_p_empty1,
            self.se_p_empty2,
            self.se_p_both_empty,
            self.se_p_both_busy,
            self.se_throughput1,
            self.se_throughput2,
            self.se_drop_rate1,
            self.se_drop_rate2,
            self.se_transfer_rate_1to2,
            self.se_transfer_rate_2to1,
        ]
    }

    pub fn from_arrays(v: [f64; 12], se: [f64; 12], slots: u64, diverged: bool) -> Self {
        SimStats {
            mean_q1: v[0],
            mean_q2: v[1],
            p_empty1: v[2],
            p_empty2: v[3],
            p_both_empty: v[4],
            p_both_busy: v[5],
            throughput1: v[6],
            throughput2: v[7],
            drop_rate1: v[8],
            drop_rate2: v[9],
            transfer_rate_1to2: v[10],
            transfer_rate_2to1: v[11],
            se_mean_q1: se[0],
            se_mean_q2: se[1],
            se_p_empty1: se[2],
            se_p_empty2: se[3],
            se_p_both_empty: se[4],
            se_p_both_busy: se[5],
            se_throughput1: se[6],
            se_throughput2: se[7],
            se_drop_rate1: se[8],
            se_drop_rate2: se[9],
            se_transfer_rate_1to2: se[10],
            se_transfer_rate_2to1: se[11],
            slots,
            diverged,
        }
    }

    pub fn get(&self, name: &str) -> Option<(f64, f64)> {
        let i = FIELDS.iter().position(|f| *f == name)?;
        Some((self.values()[i], self.std_errors()[i]))
    }

    /// Fields whose difference exceeds `k` combined standard errors.
    ///
    /// `floor` keeps the comparison meaningful when both standard errors
    /// vanish, as for quantities that are exactly zero in both runs.
    pub fn disagreements(&self, other: &SimStats, k: f64, floor: f64) -> Vec<(&'static str, f64, f64, f64)> {
        let (a, b) = (self.values(), other.values());
        let (sa, sb) = (self.std_errors(), other.std_errors());
        (0..12)
            .filter_map(|i| {
                let tol = k * (sa[i] * sa[i] + sb[i] * sb[i]).sqrt() + floor;
                let diff = (a[i] - b[i]).abs();
                (diff > tol).then_some((FIELDS[i], a[i], b[i], tol))
            })
            .collect()
    }
}

/// Batch-means accumulator for per-slot observations.
#[derive(Debug, Clone)]
pub(crate) struct BatchMeans {
    batch_len: u64,
    batches: usize,
    in_batch: u64,
    current: [f64; 12],
    total: [f64; 12],
    sum: [f64; 12],
    sum_sq: [f64; 12],
    done: usize,
    count: u64,
}

impl BatchMeans {
    pub(crate) fn new(slots: u64, batches: usize) -> Self {
        let batches = batches.max(2).min(slots.max(1) as usize);
        BatchMeans {
            batch_len: (slots / batches as u64).max(1),
            batches,
            in_batch: 0,
            current: [0.0; 12],
            total: [0.0; 12],
            sum: [0.0; 12],
            sum_sq: [0.0; 12],
            done: 0,
            count: 0,
        }
    }

    #[inline]
    pub(crate) fn push(&mut self, obs: &[f64; 12]) {
        for i in 0..12 {
            self.current[i] += obs[i];
            self.total[i] += obs[i];
        }
        self.count += 1;
        self.in_batch += 1;
        if self.in_batch == self.batch_len {
            if self.done < self.batches {
                for i in 0..12 {
                    let m = self.current[i] / self.batch_len as f64;
                    self.sum[i] += m;
                    self.sum_sq[i] += m * m;
                }
                self.done += 1;
            }
            self.current = [0.0; 12];
            self.in_batch = 0;
        }
    }

    /// Overall means and batch-means standard errors.
    pub(crate) fn finish(&self) -> ([f64; 12], [f64; 12]) {
        let n = self.count.max(1) as f64;
        let mean = self.total.map(|t| t / n);
        let mut se = [0.0; 12];
        if self.done >= 2 {
            let b = self.done as f64;
            for i in 0..12 {
                let m = self.sum[i] / b;
                let var = ((self.sum_sq[i] / b - m * m) * b / (b - 1.0)).max(0.0);
                se[i] = (var / b).sqrt();
            }
        }
        (mean, se)
    }
}
