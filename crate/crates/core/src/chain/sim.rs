//! Monte-Carlo simulation of the queue-length chain.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernel::{shift, KernelTable, KernelVariant, QueueState};
use super::stats::{BatchMeans, SimStats};
use crate::model::ModelParams;
use crate::regions::Dominant;

/// Queue length below which a run is never flagged as diverging.
pub const DIVERGENCE_FLOOR: f64 = 50.0;
/// Last-decile to overall mean ratio that flags divergence.
pub const DIVERGENCE_RATIO: f64 = 1.5;

/// Run controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Total slots including burn-in.
    pub slots: u64,
    pub burn_in: u64,
    pub seed: u64,
    /// Number of batches for the standard errors.
    pub batches: usize,
    pub variant: KernelVariant,
}

impl SimConfig {
    pub fn new(slots: u64, burn_in: u64, seed: u64) -> Self {
        SimConfig {
            slots,
            burn_in,
            seed,
            batches: 100,
            variant: KernelVariant::Explicit,
        }
    }
}

/// Simulates the network from the empty state.
///
/// # Panics
/// If `slots <= burn_in`.
pub fn simulate(p: &ModelParams, cfg: &SimConfig) -> SimStats {
    run(p, cfg, None, 0)
}

/// Simulates a dominant system in which one user sends dummy packets while
/// its queue is empty. Dummy successes and dummy deletions are not counted;
/// a dummy transfer delivers a real packet to the other queue, which is the
/// internal load the dominance argument charges to it.
pub fn simulate_dominant(p: &ModelParams, dominant: Dominant, cfg: &SimConfig) -> SimStats {
    run(p, cfg, Some(dominant), 0)
}

/// Independent replications on separate RNG streams of one seed, merged.
pub fn simulate_replications(p: &ModelParams, cfg: &SimConfig, replications: u64) -> SimStats {
    let runs: Vec<SimStats> = (0..replications.max(1))
        .into_par_iter()
        .map(|r| run(p, cfg, None, r))
        .collect();
    merge(&runs)
}

/// Equal-length runs combined: means averaged, variances of the means added.
pub fn merge(runs: &[SimStats]) -> SimStats {
    let r = runs.len() as f64;
    let mut v = [0.0; 12];
    let mut se2 = [0.0; 12];
    for s in runs {
        let (sv, ss) = (s.values(), s.std_errors());
        for i in 0..12 {
            v[i] += sv[i] / r;
            se2[i] += ss[i] * ss[i] / (r * r);
        }
    }
    SimStats::from_arrays(
        v,
        se2.map(f64::sqrt),
        runs.iter().map(|s| s.slots).sum(),
        runs.iter().any(|s| s.diverged),
    )
}

fn run(p: &ModelParams, cfg: &SimConfig, dominant: Option<Dominant>, stream: u64) -> SimStats {
    assert!(cfg.slots > cfg.burn_in, "slots must exceed burn_in");
    let table = KernelTable::new(p, cfg.variant);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);

    let measured = cfg.slots - cfg.burn_in;
    let tail_start = cfg.burn_in + measured - (measured / 10).max(1);
    let mut acc = BatchMeans::new(measured, cfg.batches);
    let mut tail = [0.0f64; 2];
    let mut tail_n = 0u64;
    let mut state = QueueState::default();

    for t in 0..cfg.slots {
        let class = match dominant {
            None => state.class(),
            Some(Dominant::R1) => QueueState::new(1, state.q2).class(),
            Some(Dominant::R2) => QueueState::new(state.q1, 1).class(),
        };
        let out = table.pick(class, rng.random::<f64>());
        let mut c = out.event.counts();
        let mut deltas = (out.delta1, out.delta2);
        if let Some(d) = dominant {
            let k = match d {
                Dominant::R1 => 0,
                Dominant::R2 => 1,
            };
            let empty = if k == 0 { state.q1 == 0 } else { state.q2 == 0 };
            if empty {
                let removed = (c.success[k] + c.drop[k] + if k == 0 { c.transfer_1to2 } else { c.transfer_2to1 }) as i8;
                if k == 0 {
                    deltas.0 += removed;
                } else {
                    deltas.1 += removed;
                }
                c.success[k] = 0;
                c.drop[k] = 0;
            }
        }
        let a1 = (rng.random::<f64>() < p.lambda1) as i64;
        let a2 = (rng.random::<f64>() < p.lambda2) as i64;

        if t >= cfg.burn_in {
            let (q1, q2) = (state.q1 as f64, state.q2 as f64);
            let e1 = (state.q1 == 0) as u8 as f64;
            let e2 = (state.q2 == 0) as u8 as f64;
            acc.push(&[
                q1,
                q2,
                e1,
                e2,
                e1 * e2,
                (1.0 - e1) * (1.0 - e2),
                c.success[0] as f64,
                c.success[1] as f64,
                c.drop[0] as f64,
                c.drop[1] as f64,
                c.transfer_1to2 as f64,
                c.transfer_2to1 as f64,
            ]);
            if t >= tail_start {
                tail[0] += q1;
                tail[1] += q2;
                tail_n += 1;
            }
        }
        state = shift(state, deltas, (a1, a2));
    }

    let (mean, se) = acc.finish();
    let diverged = (0..2).any(|k| {
        let last = tail[k] / tail_n.max(1) as f64;
        last > DIVERGENCE_FLOOR && last > DIVERGENCE_RATIO * mean[k]
    });
    SimStats::from_arrays(mean, se, measured, diverged)
}
