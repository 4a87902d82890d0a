//! Slow independent recomputations: a quadratic nondominated pass and Monte-Carlo adversaries.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attribute::{dominates_by_spec, Tolerances};
use crate::catalog::ProtocolInstance;
use crate::pareto::{nondominated, sort_members, SolutionSet};

pub const DEFAULT_NAIVE_CAP: usize = 5000;
pub const MAX_SIM_ROUNDS: u32 = 20;
pub const RNG_NAME: &str = "ChaCha8Rng";
const CHUNKS: u64 = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error(
        "{size} instances exceed the naive oracle cap of {cap}; sample a subset or raise the cap"
    )]
    CapExceeded { size: usize, cap: usize },
    #[error("simulators take 0..={MAX_SIM_ROUNDS} rounds, got {0}")]
    Rounds(u32),
    #[error("trials must be positive")]
    NoTrials,
}

/// Quadratic double loop over the per-attribute relations.
pub fn naive_nondominated(
    set: &[ProtocolInstance],
    tol: &Tolerances,
    cap: usize,
) -> Result<SolutionSet, OracleError> {
    if set.len() > cap {
        return Err(OracleError::CapExceeded {
            size: set.len(),
            cap,
        });
    }
    let mut members = Vec::new();
    for x in set {
        let mut dominated = false;
        for y in set {
            if dominates_by_spec(&y.vector, &x.vector, tol) {
                dominated = true;
                break;
            }
        }
        if !dominated {
            members.push(x.clone());
        }
    }
    sort_members(&mut members);
    Ok(SolutionSet {
        members,
        source: format!("{} instances (naive)", set.len()),
    })
}

/// Compares the engine against the naive oracle on one set.
pub fn engine_agrees(set: &[ProtocolInstance], tol: &Tolerances) -> Result<bool, OracleError> {
    let naive = naive_nondominated(set, tol, DEFAULT_NAIVE_CAP.max(set.len()))?;
    Ok(naive.ids() == nondominated(set, tol).ids())
}

/// A seeded random subset, kept in input order.
pub fn random_subset(set: &[ProtocolInstance], size: usize, seed: u64) -> Vec<ProtocolInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = sample(&mut rng, set.len(), size.min(set.len())).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|i| set[i].clone()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub trials: u64,
    pub stderr: f64,
    pub seed: u64,
    pub rng: String,
}

impl McEstimate {
    fn from_hits(hits: u64, trials: u64, seed: u64) -> Self {
        let mean = hits as f64 / trials as f64;
        McEstimate {
            mean,
            trials,
            stderr: (mean * (1.0 - mean) / trials as f64).sqrt(),
            seed,
            rng: RNG_NAME.to_string(),
        }
    }

    /// `|mean - expected| <= k * stderr`; an exact match passes when stderr is 0.
    pub fn within(&self, expected: f64, k: f64) -> bool {
        (self.mean - expected).abs() <= k * self.stderr
    }
}

fn run<F>(n: u32, trials: u64, seed: u64, trial: F) -> Result<McEstimate, OracleError>
where
    F: Fn(&mut ChaCha8Rng, u32) -> bool + Sync,
{
    if n > MAX_SIM_ROUNDS {
        return Err(OracleError::Rounds(n));
    }
    if trials == 0 {
        return Err(OracleError::NoTrials);
    }
    if n == 0 {
        return Ok(McEstimate::from_hits(trials, trials, seed));
    }
    let hits: u64 = (0..CHUNKS)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let count = trials / CHUNKS + u64::from(chunk < trials % CHUNKS);
            (0..count).filter(|_| trial(&mut rng, n)).count() as u64
        })
        .sum();
    Ok(McEstimate::from_hits(hits, trials, seed))
}

fn mask(n: u32) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// The adversary answers every round with a fair coin.
pub fn simulate_random_answer(n: u32, trials: u64, seed: u64) -> Result<McEstimate, OracleError> {
    run(n, trials, seed, |rng, n| {
        let expected: u32 = rng.random();
        let guess: u32 = rng.random();
        (expected ^ guess) & mask(n) == 0
    })
}

/// Pre-ask adversary against two-register responses.
pub fn simulate_hk_mafia(n: u32, trials: u64, seed: u64) -> Result<McEstimate, OracleError> {
    run(n, trials, seed, |rng, n| {
        let (r0, r1): (u32, u32) = (rng.random(), rng.random());
        let guessed_challenge: u32 = rng.random();
        let challenge: u32 = rng.random();
        let coin: u32 = rng.random();
        let correct = (challenge & r1) | (!challenge & r0);
        let learned = (guessed_challenge & r1) | (!guessed_challenge & r0);
        let answer =
            (!(challenge ^ guessed_challenge) & learned) | ((challenge ^ guessed_challenge) & coin);
        (answer ^ correct) & mask(n) == 0
    })
}

/// Lonely prover replying before the challenge arrives.
pub fn simulate_hk_distance(n: u32, trials: u64, seed: u64) -> Result<McEstimate, OracleError> {
    hk_distance(n, trials, seed, false)
}

/// As [`simulate_hk_distance`], with the two registers forced equal.
pub fn simulate_hk_distance_equal_registers(
    n: u32,
    trials: u64,
    seed: u64,
) -> Result<McEstimate, OracleError> {
    hk_distance(n, trials, seed, true)
}

fn hk_distance(n: u32, trials: u64, seed: u64, equal: bool) -> Result<McEstimate, OracleError> {
    run(n, trials, seed, move |rng, n| {
        let r0: u32 = rng.random();
        let r1: u32 = if equal { r0 } else { rng.random() };
        let challenge: u32 = rng.random();
        let coin: u32 = rng.random();
        let correct = (challenge & r1) | (!challenge & r0);
        let agree = !(r0 ^ r1);
        let answer = (agree & r0) | (!agree & coin);
        (answer ^ correct) & mask(n) == 0
    })
}
