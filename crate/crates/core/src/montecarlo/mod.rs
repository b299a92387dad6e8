//! Monte Carlo check of the Cramér–Rao bound.
//!
//! A trial prepares the system and pointer once, succeeds post-selection with
//! probability `A_m`, and on success yields a pointer reading drawn from the
//! conditional density by rejection sampling. The coupling is then estimated
//! from the accepted readings alone by maximum likelihood.

mod mle;

pub use mle::{log_likelihood, mle_estimate, MLE_XTOL};

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::fisher::{cramer_rao_bound, fisher_numeric_auto, fisher_std_closed};
use crate::model::{postselect_probability, Basis, ConditionalDensity, Scenario};

const ENVELOPE_SLACK: f64 = 1e-10;

/// Search half-width of the estimator, in Cramér–Rao standard deviations.
pub const SEARCH_SIGMAS: f64 = 10.0;

/// Outcome of one preparation; `reading` is present iff post-selection succeeded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    pub reading: Option<f64>,
}

impl TrialRecord {
    pub fn postselected(&self) -> bool {
        self.reading.is_some()
    }
}

#[derive(Debug, Clone, Copy)]
enum Envelope {
    /// Thermal Gaussian proposal with doubled variance; `scale` bounds the
    /// ratio of the numerator to the proposal density.
    Fringe { std: f64, scale: f64 },
    /// Mixture of the three Gaussians of the momentum density with absolute weights.
    Mixture {
        std: f64,
        centers: [f64; 3],
        weights: [f64; 3],
        total: f64,
    },
}

/// Per-scenario sampler with a precomputed rejection envelope.
#[derive(Debug, Clone)]
pub struct TrialSampler {
    scenario: Scenario,
    postselect: f64,
    density: ConditionalDensity,
    envelope: Envelope,
}

impl TrialSampler {
    pub fn new(sc: &Scenario) -> Result<Self> {
        let postselect = postselect_probability(sc)?;
        let density = ConditionalDensity::for_scenario(sc)?;
        let (r, t) = (sc.system.r(), sc.system.t());
        let envelope = match sc.basis {
            Basis::Q => Envelope::Fringe {
                std: (2.0 * sc.pointer.var_q()).sqrt(),
                scale: fringe_envelope_scale(sc),
            },
            Basis::P => {
                let (a1, a2, chi) = (sc.system.a1, sc.system.a2, sc.chi);
                let coherence = 2.0 * r * t * sc.system.phi.cos() * (-0.5 * sc.k2()).exp();
                let weights = [r * r, t * t, coherence.abs()];
                Envelope::Mixture {
                    std: sc.pointer.var_p().sqrt(),
                    centers: [-a1 * chi, -a2 * chi, -0.5 * (a1 + a2) * chi],
                    weights,
                    total: weights.iter().sum(),
                }
            }
        };
        Ok(Self {
            scenario: *sc,
            postselect,
            density,
            envelope,
        })
    }

    pub fn postselect_probability(&self) -> f64 {
        self.postselect
    }

    pub fn density(&self) -> &ConditionalDensity {
        &self.density
    }

    /// Draws a reading from the conditional density.
    pub fn sample_reading<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        let chi = self.scenario.chi;
        loop {
            let (s, bound) = match self.envelope {
                Envelope::Fringe { std, scale } => {
                    let s = std * rng.sample::<f64, _>(StandardNormal);
                    let gauss = (-0.5 * (s / std).powi(2)).exp() / (std * (2.0 * PI).sqrt());
                    (s, gauss * scale)
                }
                Envelope::Mixture {
                    std,
                    centers,
                    weights,
                    total,
                } => {
                    let mut u = rng.random::<f64>() * total;
                    let mut k = 2;
                    for (i, w) in weights.iter().enumerate() {
                        if u < *w {
                            k = i;
                            break;
                        }
                        u -= w;
                    }
                    let s = centers[k] + std * rng.sample::<f64, _>(StandardNormal);
                    let bound: f64 = centers
                        .iter()
                        .zip(weights)
                        .map(|(c, w)| w * (-0.5 * ((s - c) / std).powi(2)).exp())
                        .sum::<f64>()
                        / (std * (2.0 * PI).sqrt());
                    (s, bound)
                }
            };
            let target = self.density.numerator(s, chi);
            if target > bound * (1.0 + ENVELOPE_SLACK) + f64::MIN_POSITIVE {
                return Err(Error::InternalConsistency(format!(
                    "rejection envelope {bound} below target {target} at s = {s}"
                )));
            }
            if rng.random::<f64>() * bound < target {
                return Ok(s);
            }
        }
    }

    pub fn sample_trial<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<TrialRecord> {
        if rng.random::<f64>() < self.postselect {
            Ok(TrialRecord {
                reading: Some(self.sample_reading(rng)?),
            })
        } else {
            Ok(TrialRecord { reading: None })
        }
    }
}

/// Bound on `N(q; 0, v) fringe(q) / N(q; 0, 2v)`.
///
/// The ratio is `sqrt(2) exp(-q²/4v) fringe(q)`. Besides the global bound
/// `(|r| + |t|)²` on the fringe, when `rt < 0` the fringe is at most
/// `(r + t)² + |rt| θ²` with `θ = φ + (a1 - a2) chi q`, and
/// `exp(-q²/4v) q² <= 4v/e`. Near-orthogonal selections, where the fringe
/// vanishes at the origin, rely on the second bound to keep the acceptance
/// rate reasonable.
fn fringe_envelope_scale(sc: &Scenario) -> f64 {
    let (r, t) = (sc.system.r(), sc.system.t());
    let global = (r.abs() + t.abs()).powi(2);
    let local = if r * t < 0.0 {
        let phi = (sc.system.phi + PI).rem_euclid(2.0 * PI) - PI;
        let slope = (sc.system.a1 - sc.system.a2) * sc.chi;
        let v = sc.pointer.var_q();
        (r + t).powi(2) + (r * t).abs() * (2.0 * phi * phi + 8.0 * slope * slope * v / std::f64::consts::E)
    } else {
        global
    };
    std::f64::consts::SQRT_2 * global.min(local)
}

/// One trial of scenario `sc`. Builds the sampler on each call; use
/// [`TrialSampler`] directly for repeated draws.
pub fn sample_trial<R: Rng + ?Sized>(sc: &Scenario, rng: &mut R) -> Result<TrialRecord> {
    TrialSampler::new(sc)?.sample_trial(rng)
}

/// Generator for replicate `replicate` of an experiment seeded with `seed`.
pub fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    /// Preparations summed over replicates.
    pub n_total: u64,
    pub n_postselected: u64,
    pub n_replicates: u64,
    pub chi_true: f64,
    /// Mean of the per-replicate estimates.
    pub chi_hat: f64,
    /// Unbiased sample variance of the per-replicate estimates.
    pub empirical_variance: f64,
    /// `1 / (n_trials A_m F_accepted)`.
    pub crb: f64,
    /// Bound of the filtered standard strategy with a pure pointer, `1 / (n_trials F_std(0))`.
    pub std_crb: f64,
    pub postselect_probability: f64,
    pub fisher_accepted: f64,
    pub seed: u64,
}

impl RunReport {
    /// `empirical_variance / crb`; 1 for an efficient estimator.
    pub fn efficiency_ratio(&self) -> f64 {
        self.empirical_variance / self.crb
    }

    /// `std_crb / empirical_variance`: how much the amplification strategy
    /// beats the pure-pointer standard strategy.
    pub fn advantage_over_standard(&self) -> f64 {
        self.std_crb / self.empirical_variance
    }
}

/// Runs `n_replicates` independent experiments of `n_trials` preparations and
/// compares the spread of the estimates with the Cramér–Rao bound.
///
/// Replicate `k` draws from [`replicate_rng`]`(seed, k)`, so the report is
/// identical for a given seed regardless of thread scheduling.
pub fn crb_experiment(sc: &Scenario, n_trials: u64, n_replicates: u64, seed: u64) -> Result<RunReport> {
    if n_trials < 1000 {
        return Err(domain(format!("n_trials must be at least 1000, got {n_trials}")));
    }
    if n_replicates < 50 {
        return Err(domain(format!(
            "n_replicates must be at least 50, got {n_replicates}"
        )));
    }
    let sampler = TrialSampler::new(sc)?;
    let am = sampler.postselect_probability();
    let fisher_accepted = fisher_numeric_auto(sampler.density(), sc.chi)?.value;
    let crb = cramer_rao_bound(am * fisher_accepted, n_trials)?;
    let std_crb = cramer_rao_bound(fisher_std_closed(sc, 0.0)?, n_trials)?;
    let halfwidth = SEARCH_SIGMAS * crb.sqrt();
    let interval = (sc.chi - halfwidth, sc.chi + halfwidth);

    let runs = (0..n_replicates)
        .into_par_iter()
        .map(|k| {
            let mut rng = replicate_rng(seed, k);
            let mut readings = Vec::new();
            for _ in 0..n_trials {
                if let Some(s) = sampler.sample_trial(&mut rng)?.reading {
                    readings.push(s);
                }
            }
            let estimate = mle_estimate(&readings, sc, interval)?;
            Ok((estimate, readings.len() as u64))
        })
        .collect::<Result<Vec<_>>>()?;

    let r = runs.len() as f64;
    let chi_hat = runs.iter().map(|(e, _)| e).sum::<f64>() / r;
    let empirical_variance = runs.iter().map(|(e, _)| (e - chi_hat).powi(2)).sum::<f64>() / (r - 1.0);
    Ok(RunReport {
        n_total: n_trials * n_replicates,
        n_postselected: runs.iter().map(|(_, n)| n).sum(),
        n_replicates,
        chi_true: sc.chi,
        chi_hat,
        empirical_variance,
        crb,
        std_crb,
        postselect_probability: am,
        fisher_accepted,
        seed,
    })
}
