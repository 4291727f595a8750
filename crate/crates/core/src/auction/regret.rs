//! Stationary synthetic bandit for measuring how the selection rule's regret
//! grows with the number of rounds.
//!
//! Each arm is a group with a fixed declared cost and a true mean utility.
//! The selector sees only the empirical mean of noisy utility observations
//! and scores arms with the same rule the auction uses.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::cstp_score;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BanditArm {
    pub mean_utility: f64,
    pub cost: f64,
}

impl BanditArm {
    pub fn ratio(&self) -> f64 {
        self.mean_utility / self.cost
    }
}

/// Default arms: utility-to-cost ratios 1.0, 0.6, 0.4 and 0.2.
pub fn default_arms() -> Vec<BanditArm> {
    vec![
        BanditArm { mean_utility: 0.8, cost: 0.8 },
        BanditArm { mean_utility: 0.6, cost: 1.0 },
        BanditArm { mean_utility: 0.5, cost: 1.25 },
        BanditArm { mean_utility: 0.3, cost: 1.5 },
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BanditRun {
    /// Cumulative ratio regret after each round.
    pub cumulative_regret: Vec<f64>,
    pub pulls: Vec<u64>,
}

impl BanditRun {
    pub fn regret_at(&self, rounds: usize) -> f64 {
        if rounds == 0 {
            0.0
        } else {
            self.cumulative_regret[rounds - 1]
        }
    }
}

/// Plays `rounds` rounds. Each arm starts with one observation and a count of
/// one; observations are the true mean plus uniform noise of half-width `noise`.
pub fn run_bandit(arms: &[BanditArm], rounds: usize, noise: f64, seed: u64) -> BanditRun {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let observe = |arm: &BanditArm, rng: &mut ChaCha8Rng| {
        if noise > 0.0 {
            arm.mean_utility + rng.gen_range(-noise..=noise)
        } else {
            arm.mean_utility
        }
    };
    let mut sums: Vec<f64> = arms.iter().map(|a| observe(a, &mut rng)).collect();
    let mut counts = vec![1u64; arms.len()];
    let best = arms.iter().map(BanditArm::ratio).fold(f64::NEG_INFINITY, f64::max);

    let mut regret = 0.0;
    let mut cumulative_regret = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        let n_sum = (counts.iter().sum::<u64>() as f64).ln().max(0.0);
        let chosen = (0..arms.len())
            .map(|i| {
                let mean = sums[i] / counts[i] as f64;
                (i, cstp_score(mean, arms[i].cost, n_sum, counts[i]))
            })
            .fold(None::<(usize, f64)>, |acc, (i, s)| match acc {
                Some((_, bs)) if bs >= s => acc,
                _ => Some((i, s)),
            })
            .map(|(i, _)| i)
            .expect("at least one arm");
        sums[chosen] += observe(&arms[chosen], &mut rng);
        counts[chosen] += 1;
        regret += best - arms[chosen].ratio();
        cumulative_regret.push(regret);
    }
    BanditRun {
        cumulative_regret,
        pulls: counts.into_iter().map(|c| c - 1).collect(),
    }
}

/// regret(2R) / regret(R), averaged over `seeds` independent runs.
pub fn regret_growth_ratio(arms: &[BanditArm], rounds: usize, noise: f64, seeds: u64) -> f64 {
    let (mut r1, mut r2) = (0.0, 0.0);
    for s in 0..seeds {
        let run = run_bandit(arms, 2 * rounds, noise, s);
        r1 += run.regret_at(rounds);
        r2 += run.regret_at(2 * rounds);
    }
    if r1 == 0.0 {
        1.0
    } else {
        r2 / r1
    }
}
