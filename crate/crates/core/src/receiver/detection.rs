//! Pilot-based channel estimation, energy detection and clustering.

use std::ops::Range;

use num_complex::Complex;

use crate::channel::ReceivedSlot;
use crate::phy::PilotSet;
use crate::scalar::Real;

/// Outcome of the energy test on one estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detection {
    /// Nothing detected.
    D0,
    /// Pilot present.
    D1,
}

/// `ĥ = y·p^H / (√P_t·‖p‖²)`.
pub fn estimate_channel_pilot<T: Real>(y: &[Complex<T>], pilot: &[Complex<T>], pt: T) -> Complex<T> {
    let corr: Complex<T> = y.iter().zip(pilot).map(|(a, b)| a * b.conj()).sum();
    let energy: T = pilot.iter().map(|p| p.norm_sqr()).sum();
    corr / (pt.sqrt() * energy)
}

/// Strict test `|ĥ|² > η`.
#[inline]
pub fn energy_detect<T: Real>(h: Complex<T>, threshold: T) -> Detection {
    if h.norm_sqr() > threshold {
        Detection::D1
    } else {
        Detection::D0
    }
}

/// Per-pilot, per-element estimates and detection flags.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionMap<T> {
    n_pilots: usize,
    n_elements: usize,
    // pilot-major: index j * n_elements + r
    estimates: Vec<Complex<T>>,
    detected: Vec<bool>,
}

impl<T: Real> DetectionMap<T> {
    pub fn new(n_pilots: usize, n_elements: usize) -> Self {
        Self {
            n_pilots,
            n_elements,
            estimates: vec![Complex::default(); n_pilots * n_elements],
            detected: vec![false; n_pilots * n_elements],
        }
    }

    /// Estimates and tests every pilot on every element of `slot`.
    pub fn from_slot(slot: &ReceivedSlot<T>, pilots: &PilotSet<T>, pt: T, threshold: T) -> Self {
        let mut map = Self::new(pilots.len(), slot.n_elements());
        map.update_rows(slot, pilots, pt, threshold, 0..slot.n_elements());
        map
    }

    pub fn n_pilots(&self) -> usize {
        self.n_pilots
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn is_detected(&self, pilot: usize, element: usize) -> bool {
        self.detected[pilot * self.n_elements + element]
    }

    /// The stored estimate, present only where the pilot was detected.
    pub fn estimate(&self, pilot: usize, element: usize) -> Option<Complex<T>> {
        let i = pilot * self.n_elements + element;
        self.detected[i].then(|| self.estimates[i])
    }

    pub fn detected_count(&self) -> usize {
        self.detected.iter().filter(|&&d| d).count()
    }

    /// Marks detections by hand; used to build maps for tests and tools.
    pub fn set(&mut self, pilot: usize, element: usize, estimate: Option<Complex<T>>) {
        let i = pilot * self.n_elements + element;
        self.detected[i] = estimate.is_some();
        self.estimates[i] = estimate.unwrap_or_default();
    }

    fn detected_row(&self, pilot: usize) -> &[bool] {
        &self.detected[pilot * self.n_elements..(pilot + 1) * self.n_elements]
    }

    fn estimates_of(&self, pilot: usize, elements: Range<usize>) -> Vec<Complex<T>> {
        let base = pilot * self.n_elements;
        self.estimates[base + elements.start..base + elements.end].to_vec()
    }

    /// Re-estimates the given elements from the current pilot part of `slot`.
    pub fn update_rows(
        &mut self,
        slot: &ReceivedSlot<T>,
        pilots: &PilotSet<T>,
        pt: T,
        threshold: T,
        rows: impl IntoIterator<Item = usize>,
    ) {
        let scale = T::one() / (pt.sqrt() * pilots.energy());
        for r in rows {
            let (y_re, y_im) = slot.pilot.row(r);
            for j in 0..self.n_pilots {
                let p = pilots.sequence(j);
                let mut acc = Complex::<T>::default();
                for ((&a, &b), &q) in y_re.iter().zip(y_im).zip(p) {
                    acc.re += a * q;
                    acc.im += b * q;
                }
                let h = acc * scale;
                let i = j * self.n_elements + r;
                self.estimates[i] = h;
                self.detected[i] = energy_detect(h, threshold) == Detection::D1;
            }
        }
    }
}

/// A maximal run of contiguous elements on which one pilot was detected.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster<T> {
    pub pilot: usize,
    pub elements: Range<usize>,
    pub estimates: Vec<Complex<T>>,
}

impl<T: Real> Cluster<T> {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

fn runs(flags: &[bool]) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, &f) in flags.iter().enumerate() {
        match (f, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push(s..i);
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(s..flags.len());
    }
    out
}

/// Clusters of every pilot, indexed by pilot, each list ascending by first element.
pub fn build_clusters<T: Real>(map: &DetectionMap<T>) -> Vec<Vec<Cluster<T>>> {
    (0..map.n_pilots())
        .map(|j| {
            runs(map.detected_row(j))
                .into_iter()
                .map(|elements| Cluster {
                    pilot: j,
                    estimates: map.estimates_of(j, elements.clone()),
                    elements,
                })
                .collect()
        })
        .collect()
}

/// Every detected (pilot, element) pair as its own one-element cluster.
pub fn singleton_clusters<T: Real>(map: &DetectionMap<T>) -> Vec<Vec<Cluster<T>>> {
    (0..map.n_pilots())
        .map(|j| {
            map.detected_row(j)
                .iter()
                .enumerate()
                .filter(|(_, &d)| d)
                .map(|(r, _)| Cluster {
                    pilot: j,
                    elements: r..r + 1,
                    estimates: map.estimates_of(j, r..r + 1),
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::CMatrix;
    use crate::phy::pilot_set;
    use crate::scalar::complex_gaussian;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn complex_pilots(j: usize) -> Vec<Complex<f64>> {
        pilot_set::<f64>(8, 8).unwrap().complex_sequence(j)
    }

    #[test]
    fn noiseless_projection_recovers_gain() {
        let g = Complex::new(3e-5, -1.2e-5);
        let pt = 1e-4f64;
        let p = complex_pilots(5);
        let y: Vec<_> = p.iter().map(|&x| x * g * pt.sqrt()).collect();
        let h = estimate_channel_pilot(&y, &p, pt);
        assert!((h - g).norm() < 1e-15 * g.norm() * 10.0);
        // exact arithmetic: other pilots contribute exactly nothing
        let y: Vec<_> = p.iter().map(|&x| x * Complex::new(3.0, -2.0)).collect();
        for j in (0..8).filter(|&j| j != 5) {
            assert_eq!(estimate_channel_pilot(&y, &complex_pilots(j), 1.0), Complex::default());
        }
    }

    #[test]
    fn detection_is_strict() {
        assert_eq!(energy_detect(Complex::<f64>::default(), 1e-12), Detection::D0);
        let h = Complex::new(2f64.sqrt(), 0.0);
        assert_eq!(energy_detect(h, 1.0), Detection::D1);
        assert_eq!(energy_detect(Complex::new(1.0, 0.0), 1.0), Detection::D0);
    }

    #[test]
    fn noise_only_estimate_statistics() {
        // variance σ²/(P_t·N_P) and false-alarm rate exp(−η·P_t·N_P/σ²)
        let (sigma2, pt, draws) = (4.0039e-15f64, 1e-4, 1_000_000usize);
        let pilots = pilot_set::<f64>(8, 1).unwrap();
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(17);
        let mut y = CMatrix::zeros(draws, 8);
        for r in 0..draws {
            for n in 0..8 {
                y.set(r, n, complex_gaussian(&mut rng, sigma2));
            }
        }
        let slot = ReceivedSlot {
            pilot: y,
            payload: CMatrix::zeros(draws, 0),
            ground_truth: Vec::new(),
        };
        let floor = sigma2 / (pt * 8.0);
        let eta = 2.0 * floor;
        let map = DetectionMap::from_slot(&slot, &pilots, pt, eta);
        let mean: f64 = map.estimates.iter().map(|h| h.norm_sqr()).sum::<f64>() / draws as f64;
        assert!((mean / floor - 1.0).abs() < 0.02, "variance ratio {}", mean / floor);
        let rate = map.detected_count() as f64 / draws as f64;
        let want = (-eta * pt * 8.0 / sigma2).exp();
        assert!((rate / want - 1.0).abs() < 0.05, "false alarm {rate} vs {want}");
    }

    fn map_with(n: usize, pilot: usize, detected: &[usize]) -> DetectionMap<f64> {
        let mut m = DetectionMap::new(2, n);
        for &r in detected {
            m.set(pilot, r, Some(Complex::new(r as f64, 1.0)));
        }
        m
    }

    #[test]
    fn clustering_examples() {
        let m = map_with(12, 1, &[3, 4, 5, 9, 10]);
        let c = build_clusters(&m);
        assert!(c[0].is_empty());
        let spans: Vec<_> = c[1].iter().map(|x| x.elements.clone()).collect();
        assert_eq!(spans, vec![3..6, 9..11]);
        assert_eq!(c[1][1].estimates, vec![Complex::new(9.0, 1.0), Complex::new(10.0, 1.0)]);
        let all: Vec<usize> = (0..12).collect();
        let c = build_clusters(&map_with(12, 0, &all));
        assert_eq!(c[0].len(), 1);
        assert_eq!(c[0][0].len(), 12);
        assert_eq!(m.estimate(1, 2), None);
        assert_eq!(m.estimate(1, 3), Some(Complex::new(3.0, 1.0)));
        let s = singleton_clusters(&m);
        assert_eq!(s[1].len(), 5);
        assert!(s[1].iter().all(|c| c.len() == 1));
    }

    proptest! {
        #[test]
        fn clusters_are_maximal_and_cover_detections(flags in proptest::collection::vec(any::<bool>(), 1..200)) {
            let mut m = DetectionMap::<f64>::new(1, flags.len());
            for (r, &f) in flags.iter().enumerate() {
                if f {
                    m.set(0, r, Some(Complex::new(1.0, 0.0)));
                }
            }
            let c = &build_clusters(&m)[0];
            let covered: usize = c.iter().map(|x| x.len()).sum();
            prop_assert_eq!(covered, flags.iter().filter(|&&f| f).count());
            for w in c.windows(2) {
                prop_assert!(w[0].elements.end < w[1].elements.start);
            }
            for x in c {
                prop_assert!(x.elements.clone().all(|r| flags[r]));
                prop_assert!(x.elements.start == 0 || !flags[x.elements.start - 1]);
                prop_assert!(x.elements.end == flags.len() || !flags[x.elements.end]);
            }
        }
    }
}
