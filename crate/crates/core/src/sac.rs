//! Strict-avalanche measurements.
//!
//! A trial runs the automaton twice in lockstep from `(q0, p)` and
//! `(q0, p ^ e_j)` for a random bit `j`, recording after every iteration the
//! fraction of cells in which the two current configurations differ. A cipher
//! satisfies the strict avalanche criterion once that fraction sits at 1/2.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::engine::{Automaton, CaState, NeighborhoodMode};
use crate::rule::RulePair;
use crate::{Bits, Error, Result};

/// Default number of trials per curve.
pub const DEFAULT_TRIALS: usize = 10_000;
/// Default half-width of the band around 1/2.
pub const DEFAULT_EPSILON: f64 = 0.02;
/// Default number of consecutive in-band iterations.
pub const DEFAULT_WINDOW: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleChoice {
    /// One rule pair shared by every trial.
    Fixed(RulePair),
    /// A fresh uniformly random rule for each trial.
    RandomPerTrial,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SacConfig {
    pub block_size: usize,
    pub radius: usize,
    pub mode: NeighborhoodMode,
    pub max_iterations: usize,
    pub trials: usize,
    pub rule: RuleChoice,
    pub seed: u64,
}

impl SacConfig {
    pub fn new(block_size: usize, radius: usize, mode: NeighborhoodMode, rule: RuleChoice, seed: u64) -> Self {
        Self {
            block_size,
            radius,
            mode,
            max_iterations: 64,
            trials: DEFAULT_TRIALS,
            rule,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter("max_iterations must be at least 1".into()));
        }
        if let RuleChoice::Fixed(rules) = &self.rule {
            if rules.radius() != self.radius {
                return Err(Error::RadiusMismatch(rules.radius(), self.radius));
            }
        }
        let probe = RulePair::from_rule(crate::rule::RuleTable::from_number(self.radius, 0)?);
        Automaton::new(probe, self.block_size, self.mode).map(|_| ())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SacCurve {
    /// Entry `t - 1` is the mean flip fraction after `t` iterations.
    pub mean_flip_fraction: Vec<f64>,
    pub trials: usize,
    pub config: SacConfig,
}

impl SacCurve {
    pub fn iterations_to_sac(&self, epsilon: f64, window: usize) -> Option<usize> {
        iterations_to_sac(&self.mean_flip_fraction, epsilon, window)
    }

    /// `iteration,mean_flip_fraction` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("iteration,mean_flip_fraction\n");
        for (t, v) in self.mean_flip_fraction.iter().enumerate() {
            s.push_str(&format!("{},{:.6}\n", t + 1, v));
        }
        s
    }
}

/// Hamming distance between the two trajectories after each iteration.
fn trial_distances(automaton: &Automaton, plain: &Bits, q0: &Bits, flip: Option<usize>, max_iter: usize) -> Vec<u32> {
    let mut flipped = plain.clone();
    if let Some(j) = flip {
        flipped.flip(j);
    }
    let mut a = CaState::new(q0.clone(), plain.clone()).expect("equal lengths");
    let mut b = CaState::new(q0.clone(), flipped).expect("equal lengths");
    (0..max_iter)
        .map(|_| {
            automaton.step_forward(&mut a).expect("size checked");
            automaton.step_forward(&mut b).expect("size checked");
            a.curr().hamming_distance(b.curr()) as u32
        })
        .collect()
}

/// Flip fraction after each of `max_iter` iterations; `flip = None` runs the
/// two trajectories from identical plaintexts.
pub fn sac_trial(
    automaton: &Automaton,
    plain: &Bits,
    q0: &Bits,
    flip: Option<usize>,
    max_iter: usize,
) -> Result<Vec<f64>> {
    let n = automaton.size();
    for b in [plain, q0] {
        if b.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: b.len(),
            });
        }
    }
    if let Some(j) = flip {
        if j >= n {
            return Err(Error::InvalidParameter(format!("flip position {j} outside block of {n}")));
        }
    }
    Ok(trial_distances(automaton, plain, q0, flip, max_iter)
        .into_iter()
        .map(|d| d as f64 / n as f64)
        .collect())
}

/// Inputs of trial `index`, drawn from its own stream of the configured seed.
pub struct TrialInputs {
    pub automaton: Automaton,
    pub plain: Bits,
    pub q0: Bits,
    pub flip: usize,
}

fn trial_inputs(config: &SacConfig, fixed: Option<&Automaton>, index: usize) -> Result<TrialInputs> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64);
    let automaton = match fixed {
        Some(a) => a.clone(),
        None => Automaton::new(RulePair::random(config.radius, &mut rng)?, config.block_size, config.mode)?,
    };
    let plain = Bits::random(config.block_size, &mut rng);
    let q0 = Bits::random(config.block_size, &mut rng);
    let flip = rng.gen_range(0..config.block_size);
    Ok(TrialInputs {
        automaton,
        plain,
        q0,
        flip,
    })
}

/// Reproduces the inputs of one trial of `config`.
pub fn trial_inputs_for(config: &SacConfig, index: usize) -> Result<TrialInputs> {
    let fixed = match &config.rule {
        RuleChoice::Fixed(rules) => Some(Automaton::new(rules.clone(), config.block_size, config.mode)?),
        RuleChoice::RandomPerTrial => None,
    };
    trial_inputs(config, fixed.as_ref(), index)
}

/// Mean flip-fraction curve over `config.trials` independent trials.
///
/// Trials run in parallel; per-iteration distances are summed as integers,
/// so the result does not depend on scheduling.
pub fn sac_curve(config: &SacConfig) -> Result<SacCurve> {
    config.validate()?;
    let fixed = match &config.rule {
        RuleChoice::Fixed(rules) => Some(Automaton::new(rules.clone(), config.block_size, config.mode)?),
        RuleChoice::RandomPerTrial => None,
    };
    let max_iter = config.max_iterations;
    let totals = (0..config.trials)
        .into_par_iter()
        .map(|index| -> Result<Vec<u64>> {
            let t = trial_inputs(config, fixed.as_ref(), index)?;
            Ok(trial_distances(&t.automaton, &t.plain, &t.q0, Some(t.flip), max_iter)
                .into_iter()
                .map(u64::from)
                .collect())
        })
        .try_reduce(
            || vec![0u64; max_iter],
            |mut acc, d| {
                acc.iter_mut().zip(d).for_each(|(a, b)| *a += b);
                Ok(acc)
            },
        )?;
    let denom = (config.trials * config.block_size) as f64;
    Ok(SacCurve {
        mean_flip_fraction: totals.into_iter().map(|s| s as f64 / denom).collect(),
        trials: config.trials,
        config: config.clone(),
    })
}

/// First iteration `t` (1-based) from which `window` consecutive values lie
/// within `epsilon` of 1/2, or `None`.
pub fn iterations_to_sac(curve: &[f64], epsilon: f64, window: usize) -> Option<usize> {
    if window == 0 || curve.len() < window {
        return None;
    }
    let in_band: Vec<bool> = curve.iter().map(|v| (v - 0.5).abs() <= epsilon).collect();
    in_band.windows(window).position(|w| w.iter().all(|&b| b)).map(|t| t + 1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveComparison {
    pub baseline: SacCurve,
    pub candidate: SacCurve,
    pub baseline_iterations: Option<usize>,
    pub candidate_iterations: Option<usize>,
}

impl CurveComparison {
    /// `candidate / baseline` iterations to SAC, when both converge.
    pub fn ratio(&self) -> Option<f64> {
        match (self.candidate_iterations, self.baseline_iterations) {
            (Some(c), Some(b)) => Some(c as f64 / b as f64),
            _ => None,
        }
    }
}

/// Runs two configurations and compares their convergence.
pub fn compare_configs(baseline: &SacConfig, candidate: &SacConfig, epsilon: f64, window: usize) -> Result<CurveComparison> {
    let baseline = sac_curve(baseline)?;
    let candidate = sac_curve(candidate)?;
    Ok(CurveComparison {
        baseline_iterations: baseline.iterations_to_sac(epsilon, window),
        candidate_iterations: candidate.iterations_to_sac(epsilon, window),
        baseline,
        candidate,
    })
}

/// Standard (baseline) against spread (candidate) neighborhood, with the same
/// rule and trial seeds.
pub fn compare_modes(config: &SacConfig, epsilon: f64, window: usize) -> Result<CurveComparison> {
    NeighborhoodMode::Spread.validate(config.block_size)?;
    let standard = SacConfig {
        mode: NeighborhoodMode::Standard,
        ..config.clone()
    };
    let spread = SacConfig {
        mode: NeighborhoodMode::Spread,
        ..config.clone()
    };
    compare_configs(&standard, &spread, epsilon, window)
}
