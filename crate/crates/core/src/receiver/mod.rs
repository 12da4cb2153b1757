//! Access point processing: energy detection and clustering on pilot
//! estimates, MRC decoding per cluster, and successive interference
//! cancellation with global re-detection.

mod decoding;
mod detection;
mod sic;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::ReceivedSlot;
use crate::geometry::UlaSpec;
use crate::phy::{BchCodec, MessageBits, PilotSet, SymbolBlock};
use crate::scalar::Real;

pub use decoding::{attempt_decode, combine_cluster, mrc_combine, reestimate_channel_payload};
pub use detection::{
    build_clusters, energy_detect, estimate_channel_pilot, singleton_clusters, Cluster, Detection,
    DetectionMap,
};
pub use sic::{
    set_elements, sic_cancel, CancelSegment, DecodedEntry, FootprintMode, NoDirectory, UserDirectory,
    UserInfo,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReceiverError {
    #[error("channel estimate vector has zero norm")]
    ZeroEstimate,
    #[error("detection threshold must be positive and finite")]
    Threshold,
    #[error("at least one SIC round is required")]
    Rounds,
}

/// Clustered processing or the single-element baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    #[default]
    Csra,
    CsraSe,
}

impl Scheme {
    pub fn label(self) -> &'static str {
        match self {
            Scheme::Csra => "csra",
            Scheme::CsraSe => "csra-se",
        }
    }
}

/// How the detection threshold is derived from the link budget.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdMode {
    /// `scale · σ²/(P_t·N_P)`: a multiple of the estimator noise floor.
    #[default]
    NoiseFloor,
    /// `scale · σ/N_P` taken as printed, with σ the noise standard deviation.
    Literal,
}

/// Detection threshold on `|ĥ|²`.
pub fn detection_threshold(mode: ThresholdMode, scale: f64, sigma2: f64, pt: f64, n_p: usize) -> f64 {
    match mode {
        ThresholdMode::NoiseFloor => scale * sigma2 / (pt * n_p as f64),
        ThresholdMode::Literal => scale * sigma2.sqrt() / n_p as f64,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceiverParams<T> {
    /// `η` on `|ĥ|²`.
    pub threshold: T,
    pub pt: T,
    pub max_rounds: usize,
    pub scheme: Scheme,
    pub sic: bool,
    pub footprint: FootprintMode,
}

impl<T: Real> ReceiverParams<T> {
    pub fn validate(&self) -> Result<(), ReceiverError> {
        if !(self.threshold > T::zero() && self.threshold.is_finite()) {
            return Err(ReceiverError::Threshold);
        }
        if self.max_rounds == 0 {
            return Err(ReceiverError::Rounds);
        }
        Ok(())
    }
}

/// Everything the access point knows before the slot arrives.
#[derive(Debug, Clone)]
pub struct Receiver<'a, T> {
    pub elaa: &'a UlaSpec<T>,
    pub n_t: usize,
    pub pilots: &'a PilotSet<T>,
    pub codec: &'a BchCodec,
    pub params: ReceiverParams<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Diagnostics {
    /// Messages in the list after the initial pass (the no-SIC outcome).
    pub first_pass: usize,
    /// Cancel-and-redetect rounds executed.
    pub rounds: usize,
    /// Cluster decoding attempts.
    pub attempts: usize,
    /// Element cancellations performed.
    pub cancellations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome<T> {
    /// The decoded list in the order messages were appended.
    pub entries: Vec<DecodedEntry<T>>,
    pub diagnostics: Diagnostics,
}

impl<T: Real> DecodeOutcome<T> {
    pub fn messages(&self) -> impl Iterator<Item = &MessageBits> {
        self.entries.iter().map(|e| &e.message)
    }

    /// Messages decoded before any cancellation.
    pub fn first_pass_messages(&self) -> impl Iterator<Item = &MessageBits> {
        self.entries[..self.diagnostics.first_pass].iter().map(|e| &e.message)
    }
}

/// Decoding state across passes.
struct Session<'r, 'a, T> {
    rx: &'r Receiver<'a, T>,
    directory: &'r dyn UserDirectory<T>,
    entries: Vec<DecodedEntry<T>>,
    index: HashMap<MessageBits, usize>,
    // attempted clusters keyed by (pilot, start, end), with the sum of the
    // element versions at the time of the attempt
    attempted: HashMap<(usize, usize, usize), u64>,
    version: Vec<u64>,
    attempts: usize,
}

impl<T: Real> Session<'_, '_, T> {
    fn pass(&mut self, slot: &ReceivedSlot<T>, map: &DetectionMap<T>, round: usize) {
        let per_pilot = match self.rx.params.scheme {
            Scheme::Csra => build_clusters(map),
            Scheme::CsraSe => singleton_clusters(map),
        };
        let mut clusters: Vec<Cluster<T>> = per_pilot.into_iter().flatten().collect();
        clusters.sort_by_key(|c| (c.elements.start, c.pilot));

        let mut prefix = Vec::with_capacity(self.version.len() + 1);
        prefix.push(0u64);
        for &v in &self.version {
            prefix.push(prefix.last().unwrap() + v);
        }
        for c in clusters {
            let key = (c.pilot, c.elements.start, c.elements.end);
            let stamp = prefix[c.elements.end] - prefix[c.elements.start];
            if self.attempted.insert(key, stamp) == Some(stamp) {
                continue;
            }
            self.attempts += 1;
            let Ok(z) = combine_cluster(&c, &slot.payload) else {
                continue;
            };
            let Ok(message) = attempt_decode(&z, self.rx.codec) else {
                continue;
            };
            match self.index.get(&message) {
                Some(&i) => self.entries[i].sources.push((c.pilot, c.elements)),
                None => {
                    let symbols = SymbolBlock::from_codeword(&self.rx.codec.encode(&message));
                    self.index.insert(message, self.entries.len());
                    self.entries.push(DecodedEntry {
                        message,
                        symbols,
                        user: self.directory.lookup(&message),
                        sources: vec![(c.pilot, c.elements)],
                        round,
                    });
                }
            }
        }
    }
}

/// Full receiver: initial pass, then (if enabled) SIC rounds until no new
/// message appears or `max_rounds` is reached. The slot is consumed by the
/// cancellations.
pub fn csra_decode<T: Real>(
    slot: &mut ReceivedSlot<T>,
    rx: &Receiver<'_, T>,
    directory: &dyn UserDirectory<T>,
) -> DecodeOutcome<T> {
    let p = &rx.params;
    let n_r = slot.n_elements();
    let mut map = DetectionMap::from_slot(slot, rx.pilots, p.pt, p.threshold);
    let mut s = Session {
        rx,
        directory,
        entries: Vec::new(),
        index: HashMap::new(),
        attempted: HashMap::new(),
        version: vec![0; n_r],
        attempts: 0,
    };
    s.pass(slot, &map, 0);
    let first_pass = s.entries.len();
    let mut cancelled = 0;
    let mut rounds = 0;
    let mut cancellations = 0;
    if p.sic {
        while cancelled < s.entries.len() && rounds < p.max_rounds {
            rounds += 1;
            let mut dirty = vec![false; n_r];
            for e in &s.entries[cancelled..] {
                let set = match p.footprint {
                    FootprintMode::Geometric => e.geometric_set(rx.elaa, rx.n_t),
                    FootprintMode::DataDriven => {
                        e.data_driven_set(slot, rx.elaa, rx.n_t, p.pt, p.threshold)
                    }
                };
                cancellations += sic_cancel(slot, &e.symbols, &set, rx.pilots);
                for u in set_elements(&set) {
                    dirty[u] = true;
                    s.version[u] += 1;
                }
            }
            cancelled = s.entries.len();
            let rows = dirty.iter().enumerate().filter(|(_, &d)| d).map(|(r, _)| r);
            map.update_rows(slot, rx.pilots, p.pt, p.threshold, rows);
            s.pass(slot, &map, rounds);
        }
    }
    DecodeOutcome {
        diagnostics: Diagnostics {
            first_pass,
            rounds,
            attempts: s.attempts,
            cancellations,
        },
        entries: s.entries,
    }
}

/// Single-element baseline: every detected (pilot, element) pair is decoded
/// on its own, with the same list and SIC handling as [`csra_decode`].
pub fn csra_se_decode<T: Real>(
    slot: &mut ReceivedSlot<T>,
    rx: &Receiver<'_, T>,
    directory: &dyn UserDirectory<T>,
) -> DecodeOutcome<T> {
    let se = Receiver {
        params: ReceiverParams {
            scheme: Scheme::CsraSe,
            ..rx.params
        },
        ..rx.clone()
    };
    csra_decode(slot, &se, directory)
}
