//! Slot realization, scoring and seeded parallel campaigns.

use std::collections::HashSet;

use rand::{Rng, RngCore, SeedableRng};
use rand_xoshiro::{SplitMix64, Xoshiro256PlusPlus};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::config::{ConfigError, Precision, SimConfig};
use super::stats::{plr, PlrEstimate, TrialResult};
use crate::beams::{dft_codebook, select_replicas, usable_directions, BeamCodebook};
use crate::channel::{beam_responses, synthesize_slot, ChannelError, LinkBudget, ReceivedSlot, Transmission, UserRecord};
use crate::geometry::{place_users, ScenarioGeometry};
use crate::phy::{pilot_set, BchCodec, MessageBits, PilotSet, SymbolBlock};
use crate::receiver::{csra_decode, DecodeOutcome, Receiver, ReceiverParams, Scheme};
use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("slot synthesis failed: {0}")]
    Channel(#[from] ChannelError),
    #[error("worker pool: {0}")]
    Pool(String),
    #[error("writing results: {0}")]
    Output(String),
}

/// One user's draw for a slot: position along the user segment, message,
/// and the beams and pilots of its replicas.
#[derive(Debug, Clone, PartialEq)]
pub struct UserDraw<T> {
    pub y: T,
    pub message: MessageBits,
    pub beams: Vec<i32>,
    pub pilots: Vec<usize>,
}

/// Fixed per-configuration state shared by every trial.
#[derive(Debug, Clone)]
pub struct Scenario<T> {
    pub config: SimConfig,
    pub geometry: ScenarioGeometry<T>,
    pub codebook: BeamCodebook<T>,
    pub pilots: PilotSet<T>,
    pub budget: LinkBudget,
    pub params: ReceiverParams<T>,
}

impl<T: Real> Scenario<T> {
    pub fn new(config: &SimConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let invalid = |e: &dyn std::fmt::Display| ConfigError::Invalid(e.to_string());
        Ok(Self {
            config: config.clone(),
            geometry: config.geometry()?,
            codebook: dft_codebook(config.n_t).map_err(|e| invalid(&e))?,
            pilots: pilot_set(config.n_p, config.pilot_count).map_err(|e| invalid(&e))?,
            budget: config.link_budget(),
            params: ReceiverParams {
                threshold: T::from_f64(config.threshold()),
                pt: T::from_f64(config.pt),
                max_rounds: config.max_rounds,
                scheme: config.scheme,
                sic: config.sic,
                footprint: config.footprint,
            },
        })
    }

    /// Draws `k` users with `r` replicas each and synthesizes their slot.
    pub fn realize<R: Rng + ?Sized>(&self, rng: &mut R, k: usize, r: usize) -> Result<ReceivedSlot<T>, ChannelError> {
        let users = self.draw_users(rng, k, r);
        self.synthesize(rng, &users)
    }

    /// Positions, messages, beams and pilots of `k` users. A user with no
    /// usable beam gets an empty replica set.
    pub fn draw_users<R: Rng + ?Sized>(&self, rng: &mut R, k: usize, r: usize) -> Vec<UserDraw<T>> {
        let arrays = place_users(rng, k, &self.geometry);
        arrays
            .iter()
            .enumerate()
            .map(|(i, user)| {
                let message = MessageBits::random(rng);
                let usable = usable_directions(user.center(), &self.geometry.elaa, &self.codebook, self.config.intercept_rule);
                let (beams, pilots) = select_replicas(rng, i, &usable, r, self.pilots.len(), self.config.pilot_mode)
                    .map_or_else(|_| (Vec::new(), Vec::new()), |p| (p.chosen, p.pilot_per_replica));
                UserDraw {
                    y: user.center().y,
                    message,
                    beams,
                    pilots,
                }
            })
            .collect()
    }

    /// Synthesizes the slot carrying `users`, recorded as its ground truth.
    /// Users with no replicas stay silent.
    pub fn synthesize<R: Rng + ?Sized>(&self, rng: &mut R, users: &[UserDraw<T>]) -> Result<ReceivedSlot<T>, ChannelError> {
        let codec = BchCodec::shared();
        let elaa = &self.geometry.elaa;
        let mut truth = Vec::with_capacity(users.len());
        let mut sent = Vec::with_capacity(users.len());
        for (i, u) in users.iter().enumerate() {
            let array = self
                .geometry
                .user_at(u.y)
                .map_err(|e| ChannelError::Dimension(e.to_string()))?;
            if !u.beams.is_empty() {
                let beams = u
                    .beams
                    .iter()
                    .map(|&n| self.codebook.vector(n).ok_or(ChannelError::Dimension(format!("no beam {n}"))))
                    .collect::<Result<Vec<_>, _>>()?;
                sent.push(Transmission {
                    responses: beam_responses(&array, elaa, self.geometry.wavelength, &beams)?,
                    pilots: u.pilots.clone(),
                    payload: SymbolBlock::from_codeword(&codec.encode(&u.message)),
                });
            }
            truth.push(UserRecord {
                user_index: i,
                center: array.center(),
                message: u.message,
                beams: u.beams.clone(),
                pilots: u.pilots.clone(),
            });
        }
        let mut slot = synthesize_slot(rng, elaa.n_elements(), self.config.n_d, &sent, &self.pilots, &self.budget)?;
        slot.ground_truth = truth;
        Ok(slot)
    }

    pub fn receiver(&self, scheme: Scheme, sic: bool) -> Receiver<'_, T> {
        Receiver {
            elaa: &self.geometry.elaa,
            n_t: self.config.n_t,
            pilots: &self.pilots,
            codec: BchCodec::shared(),
            params: ReceiverParams {
                scheme,
                sic,
                ..self.params
            },
        }
    }

    /// Runs the receiver on `slot` (consumed by cancellation).
    pub fn decode(&self, slot: &mut ReceivedSlot<T>, scheme: Scheme, sic: bool) -> DecodeOutcome<T> {
        let truth = std::mem::take(&mut slot.ground_truth);
        let out = csra_decode(slot, &self.receiver(scheme, sic), &truth);
        slot.ground_truth = truth;
        out
    }
}

/// Scores the first `upto` decoded messages against what the users sent.
pub fn score<T: Real>(trial: u64, truth: &[UserRecord<T>], outcome: &DecodeOutcome<T>, upto: usize, sic_rounds: usize) -> TrialResult {
    let decoded: HashSet<&MessageBits> = outcome.entries[..upto].iter().map(|e| &e.message).collect();
    let sent: HashSet<&MessageBits> = truth.iter().map(|u| &u.message).collect();
    TrialResult {
        trial,
        k: truth.len(),
        recovered: truth.iter().filter(|u| decoded.contains(&u.message)).count(),
        false_decodes: decoded.iter().filter(|m| !sent.contains(*m)).count(),
        sic_rounds,
    }
}

fn mix(a: u64, b: u64) -> u64 {
    SplitMix64::seed_from_u64(a ^ b.wrapping_mul(0x9e37_79b9_7f4a_7c15)).next_u64()
}

/// Seed of trial `trial` in stream `stream` under `master`.
pub fn trial_seed(master: u64, stream: u64, trial: u64) -> u64 {
    mix(mix(master, stream), trial)
}

/// Stream shared by every point with the same (K, R) when pairing.
pub fn realization_stream(k: usize, r: usize) -> u64 {
    ((k as u64) << 32) | r as u64
}

fn point_stream(p: &SweepPoint) -> u64 {
    mix(realization_stream(p.k, p.r), ((p.scheme == Scheme::CsraSe) as u64) << 1 | p.sic as u64)
}

/// One slot with `config`'s K, R, scheme and SIC setting.
pub fn run_slot(seed: u64, config: &SimConfig) -> Result<TrialResult, HarnessError> {
    fn go<T: Real>(seed: u64, config: &SimConfig) -> Result<TrialResult, HarnessError> {
        let sc = Scenario::<T>::new(config)?;
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        let mut slot = sc.realize(&mut rng, config.k, config.r)?;
        let out = sc.decode(&mut slot, config.scheme, config.sic);
        Ok(score(seed, &slot.ground_truth, &out, out.entries.len(), out.diagnostics.rounds))
    }
    match config.precision {
        Precision::F64 => go::<f64>(seed, config),
        Precision::F32 => go::<f32>(seed, config),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SweepPoint {
    pub k: usize,
    pub r: usize,
    pub scheme: Scheme,
    pub sic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub point: SweepPoint,
    pub trials: usize,
    pub estimate: PlrEstimate,
    pub seed: u64,
    pub mean_sic_rounds: f64,
    /// False decodes per slot.
    pub false_decode_rate: f64,
    /// Per-trial outcomes in trial order.
    #[serde(skip)]
    pub per_trial: Vec<TrialResult>,
}

/// Points sharing a slot realization, and the receiver runs they need.
struct Group {
    k: usize,
    r: usize,
    stream: u64,
    // (point index, scheme, sic)
    members: Vec<(usize, Scheme, bool)>,
}

fn groups(config: &SimConfig, sweep: &[SweepPoint]) -> Vec<Group> {
    let mut out: Vec<Group> = Vec::new();
    for (i, p) in sweep.iter().enumerate() {
        let stream = if config.paired {
            realization_stream(p.k, p.r)
        } else {
            point_stream(p)
        };
        match out.iter_mut().find(|g| g.stream == stream && g.k == p.k && g.r == p.r) {
            Some(g) => g.members.push((i, p.scheme, p.sic)),
            None => out.push(Group {
                k: p.k,
                r: p.r,
                stream,
                members: vec![(i, p.scheme, p.sic)],
            }),
        }
    }
    out
}

/// Trial `t` of a group: one realization, one receiver run per scheme (the
/// no-SIC outcome is the first pass of the SIC run).
fn group_trial<T: Real>(sc: &Scenario<T>, g: &Group, t: u64) -> Result<Vec<(usize, TrialResult)>, ChannelError> {
    let seed = trial_seed(sc.config.seed, g.stream, t);
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let slot = sc.realize(&mut rng, g.k, g.r)?;
    let mut schemes: Vec<Scheme> = g.members.iter().map(|m| m.1).collect();
    schemes.dedup();
    let mut out = Vec::with_capacity(g.members.len());
    let mut slot = Some(slot);
    for (i_scheme, &scheme) in schemes.iter().enumerate() {
        let any_sic = g.members.iter().any(|m| m.1 == scheme && m.2);
        let source = slot.as_ref().expect("slot kept until the last scheme");
        let truth = source.ground_truth.clone();
        // the last scheme may consume the realization itself
        let mut work = if i_scheme + 1 == schemes.len() {
            slot.take().expect("slot kept until the last scheme")
        } else {
            source.clone()
        };
        let res = sc.decode(&mut work, scheme, any_sic);
        for &(i, _, sic) in g.members.iter().filter(|m| m.1 == scheme) {
            let (upto, rounds) = if sic {
                (res.entries.len(), res.diagnostics.rounds)
            } else {
                (res.diagnostics.first_pass, 0)
            };
            out.push((i, score(t, &truth, &res, upto, rounds)));
        }
    }
    Ok(out)
}

fn campaign<T: Real>(config: &SimConfig, sweep: &[SweepPoint]) -> Result<Vec<PointResult>, HarnessError> {
    let sc = Scenario::<T>::new(config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| HarnessError::Pool(e.to_string()))?;
    let mut per_point: Vec<Vec<TrialResult>> = vec![Vec::with_capacity(config.trials); sweep.len()];
    for g in groups(config, sweep) {
        let trials: Vec<Vec<(usize, TrialResult)>> = pool.install(|| {
            (0..config.trials as u64)
                .into_par_iter()
                .map(|t| group_trial(&sc, &g, t))
                .collect::<Result<_, _>>()
        })?;
        for row in trials {
            for (i, r) in row {
                per_point[i].push(r);
            }
        }
    }
    Ok(sweep
        .iter()
        .zip(per_point)
        .map(|(&point, results)| {
            let n = results.len() as f64;
            PointResult {
                point,
                trials: results.len(),
                estimate: plr(&results).expect("trials ≥ 1"),
                seed: config.seed,
                mean_sic_rounds: results.iter().map(|t| t.sic_rounds as f64).sum::<f64>() / n,
                false_decode_rate: results.iter().map(|t| t.false_decodes as f64).sum::<f64>() / n,
                per_trial: results,
            }
        })
        .collect())
}

/// Runs `config.trials` slots for every sweep point. Per-trial seeds depend
/// only on the master seed, the realization stream and the trial index, and
/// results are reduced in trial order, so output does not depend on the
/// worker count.
pub fn run_campaign(config: &SimConfig, sweep: &[SweepPoint]) -> Result<Vec<PointResult>, HarnessError> {
    match config.precision {
        Precision::F64 => campaign::<f64>(config, sweep),
        Precision::F32 => campaign::<f32>(config, sweep),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(k: usize, r: usize) -> SimConfig {
        SimConfig {
            k,
            r,
            trials: 1,
            ..SimConfig::default()
        }
    }

    #[test]
    fn single_noiseless_user_is_recovered() {
        let c = SimConfig {
            noise_scale: 0.0,
            ..small(1, 1)
        };
        for seed in 0..5 {
            let t = run_slot(seed, &c).unwrap();
            assert_eq!((t.k, t.recovered, t.false_decodes), (1, 1, 0));
        }
    }

    #[test]
    fn run_slot_is_deterministic() {
        let c = small(6, 2);
        assert_eq!(run_slot(42, &c).unwrap(), run_slot(42, &c).unwrap());
    }

    #[test]
    fn seeds_are_distinct_across_streams_and_trials() {
        let mut seen = HashSet::new();
        for k in 1..20 {
            for r in 1..8 {
                for t in 0..50 {
                    assert!(seen.insert(trial_seed(7, realization_stream(k, r), t)));
                }
            }
        }
    }

    #[test]
    fn one_point_one_trial() {
        let c = small(3, 2);
        let sweep = [SweepPoint { k: 3, r: 2, scheme: Scheme::Csra, sic: true }];
        let out = run_campaign(&c, &sweep).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].trials, 1);
        assert_eq!(out[0].estimate.msgs_total, 3);
    }
}
