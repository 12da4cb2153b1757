#![allow(dead_code)]

use csra::beams::predict_footprint;
use csra::channel::ReceivedSlot;
use csra::harness::{Scenario, SimConfig, UserDraw};
use csra::phy::MessageBits;
use csra::receiver::{DecodeOutcome, Scheme};
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

pub fn rng(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

pub fn scenario(config: SimConfig) -> Scenario<f64> {
    Scenario::new(&config).expect("valid test configuration")
}

pub fn noiseless() -> SimConfig {
    SimConfig {
        noise_scale: 0.0,
        ..SimConfig::default()
    }
}

pub fn user(rng: &mut Xoshiro256PlusPlus, y: f64, beams: &[i32], pilots: &[usize]) -> UserDraw<f64> {
    UserDraw {
        y,
        message: MessageBits::random(rng),
        beams: beams.to_vec(),
        pilots: pilots.to_vec(),
    }
}

pub fn decode(sc: &Scenario<f64>, slot: &ReceivedSlot<f64>, scheme: Scheme, sic: bool) -> DecodeOutcome<f64> {
    let mut work = slot.clone();
    sc.decode(&mut work, scheme, sic)
}

pub fn recovered(slot: &ReceivedSlot<f64>, out: &DecodeOutcome<f64>) -> Vec<bool> {
    slot.ground_truth
        .iter()
        .map(|u| out.messages().any(|m| *m == u.message))
        .collect()
}

/// Element ranges of every replica of every user.
pub fn footprints(sc: &Scenario<f64>, users: &[UserDraw<f64>]) -> Vec<std::ops::Range<usize>> {
    users
        .iter()
        .flat_map(|u| {
            let center = sc.geometry.user_at(u.y).unwrap().center();
            u.beams
                .iter()
                .map(move |&n| predict_footprint(center, n, &sc.geometry.elaa, sc.config.n_t))
                .collect::<Vec<_>>()
        })
        .collect()
}

pub fn pairwise_disjoint(ranges: &[std::ops::Range<usize>]) -> bool {
    let mut sorted: Vec<_> = ranges.iter().filter(|r| !r.is_empty()).cloned().collect();
    sorted.sort_by_key(|r| r.start);
    sorted.windows(2).all(|w| w[0].end <= w[1].start)
}
