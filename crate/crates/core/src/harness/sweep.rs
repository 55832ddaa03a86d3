//! δ-uniformity sweeps: one continuum profile sampled at each δ of a ladder.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::admissible::AdmissiblePair;
use crate::harness::estimates::{dispersive_ratio, homogeneous_ratio};
use crate::harness::records::RatioRecord;
use crate::lattice::{make_state, Exponent, SpinorField, StateKind, WalkParams, DEFAULT_SITES};
use crate::walk::time_to_steps;

/// A function of the continuous position x, sampled at x = jδ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Profile {
    /// (1, 0) at x = 0 on every lattice.
    Impulse,
    Gaussian {
        width: f64,
        carrier: f64,
    },
    /// Seeded sum of a few Gaussian bumps with random centres, widths and phases
    /// in both components; the seed comes from the sweep.
    Random {
        width: f64,
    },
}

const RANDOM_BUMPS: usize = 4;

impl Profile {
    pub fn sample(&self, params: WalkParams, sites: usize, seed: u64) -> Result<SpinorField> {
        match *self {
            Profile::Impulse => make_state(StateKind::Impulse { site: 0 }, params, sites),
            Profile::Gaussian { width, carrier } => {
                make_state(StateKind::Gaussian { width, carrier }, params, sites)
            }
            Profile::Random { width } => {
                if !(width.is_finite() && width > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "width must be positive, got {width}"
                    )));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let bumps: Vec<(f64, f64, [f64; 2], [f64; 2])> = (0..RANDOM_BUMPS)
                    .map(|_| {
                        let centre = rng.gen_range(-2.0..2.0) * width;
                        let w = rng.gen_range(0.5..1.0) * width;
                        let amp = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
                        let phase = [rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI)];
                        (centre, w, amp, phase)
                    })
                    .collect();
                let mut u = SpinorField::zeros(params, sites)?;
                let values: Vec<_> = (0..sites)
                    .map(|i| {
                        let x = u.position(i);
                        let mut v = crate::lattice::ZERO_SPINOR;
                        for &(c, w, a, ph) in &bumps {
                            let g = (-(x - c) * (x - c) / (2.0 * w * w)).exp();
                            for comp in 0..2 {
                                v[comp] +=
                                    num_complex::Complex64::from_polar(a[comp] * g, ph[comp]);
                            }
                        }
                        v
                    })
                    .collect();
                u = SpinorField::from_values(params, values)?;
                Ok(u)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub delta_ladder: Vec<f64>,
    pub mass: f64,
    pub lambda_ladder: Vec<f64>,
    /// Physical horizon T of every Strichartz window, and the time of the dispersive samples.
    pub t_max: f64,
    pub pairs: Vec<AdmissiblePair>,
    pub ring_size: usize,
    pub seeds: Vec<u64>,
    pub profile: Profile,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            delta_ladder: vec![1.0, 0.5, 0.25, 0.125, 0.0625],
            mass: 1.0,
            lambda_ladder: vec![],
            t_max: 256.0,
            pairs: vec![
                AdmissiblePair::energy(),
                AdmissiblePair::discrete(Exponent::Finite(6.0), Exponent::Infinite)
                    .expect("(6, inf) is admissible"),
            ],
            ring_size: DEFAULT_SITES,
            seeds: vec![0],
            profile: Profile::Gaussian {
                width: 4.0,
                carrier: 0.0,
            },
        }
    }
}

impl SweepConfig {
    /// Checks every invariant and reports all violations at once.
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if self.delta_ladder.is_empty() {
            bad.push("delta_ladder is empty".to_string());
        }
        if !self.mass.is_finite() {
            bad.push(format!("mass = {} is not finite", self.mass));
        }
        for &d in &self.delta_ladder {
            if !(d > 0.0 && d <= 1.0) {
                bad.push(format!("delta = {d} outside (0, 1]"));
                continue;
            }
            let angle = d * self.mass.abs();
            if !(angle > 0.0 && angle < PI / 2.0) {
                bad.push(format!(
                    "delta*|mass| = {angle} outside (0, pi/2) at delta = {d}"
                ));
            }
            for &l in &self.lambda_ladder {
                if !(l > 0.0 && l < 2.0 * PI / d) {
                    bad.push(format!(
                        "lambda = {l} outside (0, 2*pi/delta) at delta = {d}"
                    ));
                }
            }
            if !(self.t_max >= 0.0) || time_to_steps(self.t_max, d).is_err() {
                bad.push(format!(
                    "t_max = {} is not on the time grid of delta = {d}",
                    self.t_max
                ));
            } else if !self.lambda_ladder.is_empty() && self.t_max < d {
                bad.push(format!(
                    "t_max = {} below delta = {d} with a lambda ladder",
                    self.t_max
                ));
            }
        }
        for &l in &self.lambda_ladder {
            let dyadic = l > 0.0 && l.log2().fract() == 0.0;
            if !dyadic {
                bad.push(format!("lambda = {l} is not a power of two"));
            }
        }
        if self.pairs.is_empty() && self.lambda_ladder.is_empty() {
            bad.push("no pairs and no lambda ladder: nothing to measure".to_string());
        }
        for pair in &self.pairs {
            if pair.require_discrete().is_err() {
                bad.push(format!(
                    "pair ({}, {}) is not discrete admissible",
                    pair.p, pair.q
                ));
            }
        }
        if self.ring_size < 2 || !self.ring_size.is_power_of_two() {
            bad.push(format!(
                "ring_size = {} is not a power of two >= 2",
                self.ring_size
            ));
        }
        if self.seeds.is_empty() {
            bad.push("seeds is empty".to_string());
        }
        match self.profile {
            Profile::Gaussian { width, .. } | Profile::Random { width }
                if !(width.is_finite() && width > 0.0) =>
            {
                bad.push(format!("width = {width} must be positive"));
            }
            Profile::Gaussian { carrier, .. } if !carrier.is_finite() => {
                bad.push(format!("carrier = {carrier} must be finite"));
            }
            _ => {}
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(bad.join("; ")))
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Measure {
    Strichartz(AdmissiblePair),
    Dispersive(f64),
}

/// One record per (δ, seed, pair) followed by one per (δ, seed, λ), in that
/// key order regardless of scheduling.
pub fn uniformity_sweep(config: &SweepConfig) -> Result<Vec<RatioRecord>> {
    config.validate()?;
    let mut tasks = Vec::new();
    for &delta in &config.delta_ladder {
        for &seed in &config.seeds {
            for &pair in &config.pairs {
                tasks.push((delta, seed, Measure::Strichartz(pair)));
            }
            for &lambda in &config.lambda_ladder {
                tasks.push((delta, seed, Measure::Dispersive(lambda)));
            }
        }
    }
    tasks
        .into_par_iter()
        .map(|(delta, seed, m)| {
            let params = WalkParams::new(delta, config.mass)?;
            let u = config.profile.sample(params, config.ring_size, seed)?;
            let mut r = match m {
                Measure::Strichartz(pair) => homogeneous_ratio(&u, pair, config.t_max)?,
                Measure::Dispersive(lambda) => dispersive_ratio(&u, lambda, config.t_max)?,
            };
            r.seed = seed;
            Ok(r)
        })
        .collect()
}

/// `uniformity_sweep` on a dedicated pool of `jobs` threads (0 = rayon default).
pub fn uniformity_sweep_with_jobs(config: &SweepConfig, jobs: usize) -> Result<Vec<RatioRecord>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    pool.install(|| uniformity_sweep(config))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SweepConfig {
        SweepConfig {
            ring_size: 1 << 10,
            t_max: 16.0,
            ..SweepConfig::default()
        }
    }

    #[test]
    fn energy_pair_is_one_on_every_rung() {
        let cfg = SweepConfig {
            pairs: vec![AdmissiblePair::energy()],
            ..small()
        };
        let recs = uniformity_sweep(&cfg).unwrap();
        assert_eq!(recs.len(), 5);
        for r in recs {
            assert!((r.ratio - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn order_and_content_do_not_depend_on_jobs() {
        let cfg = SweepConfig {
            lambda_ladder: vec![0.5, 1.0],
            seeds: vec![1, 2],
            profile: Profile::Random { width: 3.0 },
            ..small()
        };
        let a = uniformity_sweep_with_jobs(&cfg, 1).unwrap();
        let b = uniformity_sweep_with_jobs(&cfg, 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 5 * 2 * 4);
        assert_eq!(a[0].delta, 1.0);
        assert_eq!(a[0].seed, 1);
        assert!(a[2].lambda.is_some() && a[1].lambda.is_none());
    }

    #[test]
    fn empty_lambda_ladder_runs_pairs_only() {
        let recs = uniformity_sweep(&small()).unwrap();
        assert!(recs.iter().all(|r| r.lambda.is_none() && r.p.is_some()));
    }

    #[test]
    fn validation_lists_every_offence() {
        let cfg = SweepConfig {
            delta_ladder: vec![1.0, 2.0, 0.5],
            mass: 2.0,
            lambda_ladder: vec![3.0, 8.0],
            ring_size: 100,
            ..SweepConfig::default()
        };
        let Err(Error::Config(msg)) = cfg.validate() else {
            panic!("expected config error")
        };
        assert!(msg.contains("delta = 2 outside"));
        assert!(msg.contains("delta*|mass| = 2"));
        assert!(msg.contains("lambda = 8 outside"));
        assert!(msg.contains("lambda = 3 is not a power of two"));
        assert!(msg.contains("ring_size = 100"));
    }

    #[test]
    fn random_profile_is_seeded_and_continuum() {
        let p = WalkParams::new(0.5, 1.0).unwrap();
        let prof = Profile::Random { width: 2.0 };
        let a = prof.sample(p, 256, 7).unwrap();
        assert_eq!(a, prof.sample(p, 256, 7).unwrap());
        assert_ne!(a, prof.sample(p, 256, 8).unwrap());
        // the same x on a finer lattice carries the same value
        let fine = prof
            .sample(WalkParams::new(0.25, 1.0).unwrap(), 512, 7)
            .unwrap();
        for j in -20..20 {
            assert_eq!(a.at_site(j), fine.at_site(2 * j));
        }
    }
}
