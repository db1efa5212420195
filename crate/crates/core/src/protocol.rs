//! Finite-statistics simulation of the referee.
//!
//! Each shot draws a question `i ~ p`, then the pair of answers from the
//! Born rule: `(1, 1)` with probability `Tr[Z11 (tau_i (x) rho (x) omega_i)]`,
//! otherwise `(0, 0)`. The referee only sees the labels.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::game::{win_probabilities, Game};
use crate::qops::QuantumOperator;
use crate::random::stream;
use crate::strategy::Strategy;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShotRecord {
    pub i: usize,
    pub x: u8,
    pub y: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProtocolOptions {
    /// Shots are split into this many independently seeded partitions.
    pub partitions: usize,
    pub execution: Execution,
    pub transcript: bool,
}

impl Default for ProtocolOptions {
    fn default() -> Self {
        Self { partitions: 1, execution: Execution::Auto, transcript: false }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateReport {
    pub mean: f64,
    pub stderr: f64,
    pub shots: u64,
    /// `(n_i, wins_i)` per question.
    pub per_question_counts: Vec<(u64, u64)>,
    pub seed: u64,
    pub partitions: usize,
    /// Questions whose win probability had to be clamped into `[0, 1]`.
    pub clamped: usize,
    pub transcript: Option<Vec<ShotRecord>>,
}

struct Partial {
    counts: Vec<(u64, u64)>,
    transcript: Vec<ShotRecord>,
}

fn simulate_partition(
    sampler: &WeightedIndex<f64>,
    wins: &[f64],
    shots: u64,
    seed: u64,
    index: usize,
    keep: bool,
) -> Partial {
    let mut rng = stream(seed, index as u64);
    let mut counts = vec![(0u64, 0u64); wins.len()];
    let mut transcript = Vec::new();
    for _ in 0..shots {
        let i = sampler.sample(&mut rng);
        let win = rng.random::<f64>() < wins[i];
        counts[i].0 += 1;
        counts[i].1 += win as u64;
        if keep {
            let a = win as u8;
            transcript.push(ShotRecord { i, x: a, y: a });
        }
    }
    Partial { counts, transcript }
}

pub fn run(game: &Game, rho: &QuantumOperator, strategy: &Strategy, shots: u64, seed: u64) -> Result<EstimateReport> {
    run_with(game, rho, strategy, shots, seed, &ProtocolOptions::default())
}

pub fn run_with(
    game: &Game,
    rho: &QuantumOperator,
    strategy: &Strategy,
    shots: u64,
    seed: u64,
    opts: &ProtocolOptions,
) -> Result<EstimateReport> {
    if shots == 0 {
        return Err(Error::Validation("need at least one shot".into()));
    }
    if opts.partitions == 0 {
        return Err(Error::Validation("need at least one partition".into()));
    }
    let raw = win_probabilities(game, rho, strategy)?;
    let clamped = raw.iter().filter(|p| !(0.0..=1.0).contains(*p)).count();
    let wins: Vec<f64> = raw.iter().map(|p| p.clamp(0.0, 1.0)).collect();
    let probs: Vec<f64> = game.ensemble().items().iter().map(|q| q.p).collect();
    let sampler = WeightedIndex::new(&probs).map_err(|e| Error::Validation(format!("question weights: {e}")))?;
    let parts = opts.partitions as u64;
    let partials = map_indexed(opts.partitions, opts.execution, |k| {
        let n = shots / parts + u64::from((k as u64) < shots % parts);
        simulate_partition(&sampler, &wins, n, seed, k, opts.transcript)
    });

    let mut counts = vec![(0u64, 0u64); wins.len()];
    let mut transcript = opts.transcript.then(Vec::new);
    for p in partials {
        for (c, pc) in counts.iter_mut().zip(&p.counts) {
            c.0 += pc.0;
            c.1 += pc.1;
        }
        if let Some(t) = transcript.as_mut() {
            t.extend(p.transcript);
        }
    }
    let rewards = game.reward11();
    let (mut sum, mut sumsq) = (0.0, 0.0);
    for (&(_, w), &r) in counts.iter().zip(rewards) {
        sum += r * w as f64;
        sumsq += r * r * w as f64;
    }
    let n = shots as f64;
    let mean = sum / n;
    let stderr = if shots > 1 {
        let var = ((sumsq - n * mean * mean) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(EstimateReport {
        mean,
        stderr,
        shots,
        per_question_counts: counts,
        seed,
        partitions: opts.partitions,
        clamped,
        transcript,
    })
}

/// `mean -/+ z stderr`.
pub fn estimate_ci(report: &EstimateReport, z: f64) -> Result<(f64, f64)> {
    if !(z >= 0.0) {
        return Err(Error::Validation(format!("z = {z} must be nonnegative")));
    }
    Ok((report.mean - z * report.stderr, report.mean + z * report.stderr))
}
