//! Decoded-message list entries and interference cancellation.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::beams::{nearest_beam, predict_footprint};
use crate::channel::{ReceivedSlot, UserRecord};
use crate::geometry::{Point3, UlaSpec};
use crate::matrix::dot_conj;
use crate::phy::{MessageBits, PilotSet, SymbolBlock};
use crate::scalar::Real;

/// How the cancellation element set of a decoded message is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FootprintMode {
    /// Predicted footprints of the sender's replica beams.
    #[default]
    Geometric,
    /// Geometric footprints plus every element whose payload re-estimate
    /// passes the detection threshold.
    DataDriven,
}

/// What the access point learns about a sender once its message is decoded.
#[derive(Debug, Clone, PartialEq)]
pub struct UserInfo<T> {
    pub user_index: usize,
    pub center: Point3<T>,
    pub beams: Vec<i32>,
    pub pilots: Vec<usize>,
}

/// Maps a decoded message to its sender's position and replica set.
pub trait UserDirectory<T> {
    fn lookup(&self, message: &MessageBits) -> Option<UserInfo<T>>;
}

impl<T: Real> UserDirectory<T> for [UserRecord<T>] {
    fn lookup(&self, message: &MessageBits) -> Option<UserInfo<T>> {
        self.iter().find(|u| u.message == *message).map(|u| UserInfo {
            user_index: u.user_index,
            center: u.center,
            beams: u.beams.clone(),
            pilots: u.pilots.clone(),
        })
    }
}

impl<T: Real> UserDirectory<T> for Vec<UserRecord<T>> {
    fn lookup(&self, message: &MessageBits) -> Option<UserInfo<T>> {
        self.as_slice().lookup(message)
    }
}

/// A directory that knows nobody; every decode falls back to its clusters.
pub struct NoDirectory;

impl<T: Real> UserDirectory<T> for NoDirectory {
    fn lookup(&self, _: &MessageBits) -> Option<UserInfo<T>> {
        None
    }
}

/// Contiguous elements cancelled with one pilot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CancelSegment {
    pub elements: Range<usize>,
    pub pilot: usize,
}

/// One entry of the decoded list.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodedEntry<T> {
    pub message: MessageBits,
    /// Re-encoded payload `s(W)`.
    pub symbols: SymbolBlock<T>,
    pub user: Option<UserInfo<T>>,
    /// Clusters (pilot, elements) this message was decoded from.
    pub sources: Vec<(usize, Range<usize>)>,
    /// Decoding round; 0 is the initial pass.
    pub round: usize,
}

impl<T: Real> DecodedEntry<T> {
    /// Cancellation set from the sender's predicted footprints, or from the
    /// source clusters when the sender is unknown.
    pub fn geometric_set(&self, elaa: &UlaSpec<T>, n_t: usize) -> Vec<CancelSegment> {
        let mut segs: Vec<CancelSegment> = match &self.user {
            Some(u) => u
                .beams
                .iter()
                .zip(&u.pilots)
                .map(|(&n, &pilot)| CancelSegment {
                    elements: predict_footprint(u.center, n, elaa, n_t),
                    pilot,
                })
                .filter(|s| !s.elements.is_empty())
                .collect(),
            None => self
                .sources
                .iter()
                .map(|(pilot, r)| CancelSegment {
                    elements: r.clone(),
                    pilot: *pilot,
                })
                .collect(),
        };
        segs.sort_by_key(|s| s.elements.start);
        // keep the element sets disjoint so nothing is cancelled twice
        let mut out: Vec<CancelSegment> = Vec::with_capacity(segs.len());
        for mut s in segs {
            if let Some(last) = out.last() {
                s.elements.start = s.elements.start.max(last.elements.end);
            }
            if !s.elements.is_empty() {
                out.push(s);
            }
        }
        out
    }

    /// Geometric set extended with every other element whose payload
    /// re-estimate exceeds the detection threshold. The added elements take
    /// the pilot of the replica pointing closest to them.
    pub fn data_driven_set(
        &self,
        slot: &ReceivedSlot<T>,
        elaa: &UlaSpec<T>,
        n_t: usize,
        pt: T,
        threshold: T,
    ) -> Vec<CancelSegment> {
        let base = self.geometric_set(elaa, n_t);
        let mut assigned: Vec<Option<usize>> = vec![None; slot.n_elements()];
        for s in &base {
            for r in s.elements.clone() {
                assigned[r] = Some(s.pilot);
            }
        }
        let fallback = self.sources.first().map(|s| s.0).unwrap_or(0);
        let inv_energy = T::one() / self.symbols.energy();
        for (r, slot_pilot) in assigned.iter_mut().enumerate() {
            if slot_pilot.is_some() {
                continue;
            }
            let (re, im) = slot.payload.row(r);
            let h = dot_conj(re, im, &self.symbols.re, &self.symbols.im) * inv_energy;
            if h.norm_sqr() / pt > threshold {
                let pilot = match &self.user {
                    Some(u) => nearest_beam(u.center, &u.beams, elaa, n_t, r)
                        .map_or(fallback, |k| u.pilots[k]),
                    None => fallback,
                };
                *slot_pilot = Some(pilot);
            }
        }
        let mut out: Vec<CancelSegment> = Vec::new();
        for (r, a) in assigned.into_iter().enumerate() {
            let Some(pilot) = a else { continue };
            match out.last_mut() {
                Some(s) if s.elements.end == r && s.pilot == pilot => s.elements.end = r + 1,
                _ => out.push(CancelSegment {
                    elements: r..r + 1,
                    pilot,
                }),
            }
        }
        out
    }
}

/// Subtracts `h̃_u·[p, s]` from each element `u` of `set`, with `h̃_u` the
/// payload re-estimate. Returns the number of elements touched.
pub fn sic_cancel<T: Real>(
    slot: &mut ReceivedSlot<T>,
    symbols: &SymbolBlock<T>,
    set: &[CancelSegment],
    pilots: &PilotSet<T>,
) -> usize {
    let mut touched = 0;
    let inv_energy = T::one() / symbols.energy();
    for seg in set {
        let p = pilots.sequence(seg.pilot);
        for u in seg.elements.clone() {
            let h = {
                let (re, im) = slot.payload.row(u);
                dot_conj(re, im, &symbols.re, &symbols.im) * inv_energy
            };
            let (re, im) = slot.payload.row_mut(u);
            crate::matrix::axpy(re, im, -h, &symbols.re, &symbols.im);
            let (re, im) = slot.pilot.row_mut(u);
            for ((a, b), &q) in re.iter_mut().zip(im.iter_mut()).zip(p) {
                *a -= h.re * q;
                *b -= h.im * q;
            }
            touched += 1;
        }
    }
    touched
}

/// Element indices covered by a cancellation set, ascending.
pub fn set_elements(set: &[CancelSegment]) -> impl Iterator<Item = usize> + '_ {
    set.iter().flat_map(|s| s.elements.clone())
}

#[cfg(test)]
pub(crate) fn unit_entry<T: Real>(message: MessageBits, symbols: SymbolBlock<T>) -> DecodedEntry<T> {
    DecodedEntry {
        message,
        symbols,
        user: None,
        sources: Vec::new(),
        round: 0,
    }
}
