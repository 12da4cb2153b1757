//! DFT beam codebook, beam directions, direction selection and the geometric
//! footprint of a beam on the access point array.
//!
//! Beam `n` of an `N_T`-element array has element `i` equal to
//! `exp(−jπ·i·n·2/N_T) / √N_T` and points at `θ_n = arcsin(2n/N_T)` from
//! broadside, positive toward the array's +axis side. Indices run over
//! `±1, …, ±⌊N_T/2⌋`; broadside (`n = 0`) is not part of the set.

use std::ops::Range;

use num_complex::Complex;
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{ApertureConvention, Point3, UlaSpec};
use crate::scalar::{lit, Real};

#[derive(Debug, Error, PartialEq)]
pub enum BeamError {
    #[error("a DFT codebook needs at least 2 antennas, got {0}")]
    TooFewAntennas(usize),
    #[error("beam {n} has |2n/N_T| = {ratio} > 1 for N_T = {n_t}")]
    Domain { n: i32, n_t: usize, ratio: f64 },
    #[error("user {0} has no usable direction toward the access point")]
    NoUsableDirection(usize),
    #[error("replica count must be at least 1")]
    NoReplicas,
    #[error("pilot set is empty")]
    NoPilots,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamCodebook<T> {
    n_t: usize,
    indices: Vec<i32>,
    vectors: Vec<Vec<Complex<T>>>,
}

impl<T: Real> BeamCodebook<T> {
    pub fn n_t(&self) -> usize {
        self.n_t
    }

    /// Beam indices in ascending order.
    pub fn indices(&self) -> &[i32] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn vector(&self, n: i32) -> Option<&[Complex<T>]> {
        self.indices
            .iter()
            .position(|&i| i == n)
            .map(|k| self.vectors[k].as_slice())
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, &[Complex<T>])> {
        self.indices
            .iter()
            .copied()
            .zip(self.vectors.iter().map(Vec::as_slice))
    }
}

/// Steering vector for beam `n` (any integer index).
pub fn dft_vector<T: Real>(n: i32, n_t: usize) -> Vec<Complex<T>> {
    let norm = T::one() / T::from_usize(n_t).sqrt();
    (0..n_t)
        .map(|i| {
            // reduce the phase index modulo 2·N_T before going to floating point
            let k = (i as i64 * n as i64 * 2).rem_euclid(2 * n_t as i64);
            let phase = -T::PI() * T::from_f64(k as f64) / T::from_usize(n_t);
            Complex::from_polar(norm, phase)
        })
        .collect()
}

pub fn dft_codebook<T: Real>(n_t: usize) -> Result<BeamCodebook<T>, BeamError> {
    if n_t < 2 {
        return Err(BeamError::TooFewAntennas(n_t));
    }
    let half = (n_t / 2) as i32;
    let indices: Vec<i32> = (-half..=half).filter(|&n| n != 0).collect();
    let vectors = indices.iter().map(|&n| dft_vector(n, n_t)).collect();
    Ok(BeamCodebook {
        n_t,
        indices,
        vectors,
    })
}

/// Sine of the steering angle of beam `n`.
pub fn beam_sine<T: Real>(n: i32, n_t: usize) -> T {
    T::from_f64(2.0 * n as f64) / T::from_usize(n_t)
}

pub fn beam_angle<T: Real>(n: i32, n_t: usize) -> Result<T, BeamError> {
    let s = beam_sine::<T>(n, n_t);
    if s.abs() > T::one() {
        return Err(BeamError::Domain {
            n,
            n_t,
            ratio: s.to_f64(),
        });
    }
    Ok(s.asin())
}

/// Criterion for a beam to count as intercepting the access point array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InterceptRule {
    /// The beam axis hits the array.
    #[default]
    Boresight,
    /// Both edges of the beam's sine-space cell hit the array.
    FullCell,
}

/// Position along the ELAA axis where a ray with direction sine `u` from
/// `origin` crosses the array line, relative to the array center.
fn axis_intercept<T: Real>(origin: Point3<T>, u: T, elaa: &UlaSpec<T>) -> Option<T> {
    if u.abs() >= T::one() {
        return None;
    }
    let rel = origin - elaa.center();
    let along = rel.dot(elaa.axis());
    let perp = (rel - elaa.axis() * along).norm();
    let tan = u / (T::one() - u * u).sqrt();
    Some(along + perp * tan)
}

/// Beams whose ray from `user_center` lands on the ELAA, in ascending index order.
pub fn usable_directions<T: Real>(
    user_center: Point3<T>,
    elaa: &UlaSpec<T>,
    codebook: &BeamCodebook<T>,
    rule: InterceptRule,
) -> Vec<i32> {
    let n_t = codebook.n_t();
    let half = elaa.aperture(ApertureConvention::ElementCells) / lit(2.0);
    let hits = |u: T| matches!(axis_intercept(user_center, u, elaa), Some(y) if y.abs() <= half);
    codebook
        .indices()
        .iter()
        .copied()
        .filter(|&n| {
            let c = beam_sine::<T>(n, n_t);
            match rule {
                InterceptRule::Boresight => hits(c),
                InterceptRule::FullCell => {
                    let (lo, hi) = cell_edges::<T>(n, n_t);
                    hits(c) && hits(lo) && hits(hi)
                }
            }
        })
        .collect()
}

/// How pilots are drawn for a user's replicas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PilotMode {
    /// Independent uniform pilot for every replica.
    #[default]
    PerReplica,
    /// One uniform pilot shared by all replicas of a user.
    PerUser,
}

/// Beams and pilots chosen by one user for the current slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectionPlan {
    pub user_index: usize,
    pub usable: Vec<i32>,
    /// Chosen beam indices, ascending.
    pub chosen: Vec<i32>,
    pub pilot_per_replica: Vec<usize>,
}

impl DirectionPlan {
    pub fn replicas(&self) -> impl Iterator<Item = (i32, usize)> + '_ {
        self.chosen
            .iter()
            .copied()
            .zip(self.pilot_per_replica.iter().copied())
    }
}

/// Uniform subset of `min(r, |usable|)` beams without replacement, plus pilots.
pub fn select_replicas<R: Rng + ?Sized>(
    rng: &mut R,
    user_index: usize,
    usable: &[i32],
    r: usize,
    pilot_count: usize,
    mode: PilotMode,
) -> Result<DirectionPlan, BeamError> {
    if r == 0 {
        return Err(BeamError::NoReplicas);
    }
    if pilot_count == 0 {
        return Err(BeamError::NoPilots);
    }
    if usable.is_empty() {
        return Err(BeamError::NoUsableDirection(user_index));
    }
    let take = r.min(usable.len());
    let mut chosen: Vec<i32> = sample(rng, usable.len(), take)
        .into_iter()
        .map(|i| usable[i])
        .collect();
    chosen.sort_unstable();
    let pilot_per_replica = match mode {
        PilotMode::PerReplica => (0..take).map(|_| rng.random_range(0..pilot_count)).collect(),
        PilotMode::PerUser => vec![rng.random_range(0..pilot_count); take],
    };
    Ok(DirectionPlan {
        user_index,
        usable: usable.to_vec(),
        chosen,
        pilot_per_replica,
    })
}

/// Sine-space cell `[(2n − 1)/N_T, (2n + 1)/N_T)` owned by beam `n`.
pub fn cell_edges<T: Real>(n: i32, n_t: usize) -> (T, T) {
    let nt = T::from_usize(n_t);
    (
        T::from_f64((2 * n - 1) as f64) / nt,
        T::from_f64((2 * n + 1) as f64) / nt,
    )
}

/// Direction sine of ELAA element `e` seen from `from`, measured along the array axis.
#[inline]
pub fn element_sine<T: Real>(from: Point3<T>, elaa: &UlaSpec<T>, e: usize) -> T {
    let rel = elaa.element_position(e) - from;
    rel.dot(elaa.axis()) / rel.norm()
}

/// Contiguous ELAA elements whose direction sine from `user_center` falls in
/// beam `n`'s cell. Empty when the cell misses the array.
pub fn predict_footprint<T: Real>(
    user_center: Point3<T>,
    n: i32,
    elaa: &UlaSpec<T>,
    n_t: usize,
) -> Range<usize> {
    let (lo, hi) = cell_edges::<T>(n, n_t);
    let count = elaa.n_elements();
    // element sines increase monotonically with the element index
    let first = partition_point(count, |e| element_sine(user_center, elaa, e) < lo);
    let end = partition_point(count, |e| element_sine(user_center, elaa, e) < hi);
    first..end.max(first)
}

fn partition_point(len: usize, pred: impl Fn(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0usize, len);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Index of the beam in `beams` whose steering sine is closest to the
/// direction of element `e`.
pub fn nearest_beam<T: Real>(
    user_center: Point3<T>,
    beams: &[i32],
    elaa: &UlaSpec<T>,
    n_t: usize,
    e: usize,
) -> Option<usize> {
    let u = element_sine(user_center, elaa, e);
    beams
        .iter()
        .enumerate()
        .map(|(k, &n)| (k, (beam_sine::<T>(n, n_t) - u).abs()))
        .min_by(|a, b| a.1.partial_cmp(&b.1).expect("finite sines"))
        .map(|(k, _)| k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ScenarioGeometry;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn geo() -> ScenarioGeometry<f64> {
        ScenarioGeometry::with_half_wavelength_arrays(0.005, 20.0, 8.0, 20, (-3.0, 3.0)).unwrap()
    }

    fn inner(a: &[Complex<f64>], b: &[Complex<f64>]) -> Complex<f64> {
        a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
    }

    #[test]
    fn codebook_gram_is_identity_for_distinct_beams() {
        let cb = dft_codebook::<f64>(20).unwrap();
        assert_eq!(cb.len(), 20);
        for (n, a) in cb.iter() {
            assert!((inner(a, a).norm() - 1.0).abs() < 1e-12);
            assert_relative_eq!(a[0].re, 1.0 / 20f64.sqrt(), max_relative = 1e-15);
            assert_eq!(a[0].im, 0.0);
            for (m, b) in cb.iter() {
                // ±N_T/2 are the same endfire vector
                if n != m && (n - m).rem_euclid(20) != 0 {
                    assert!(inner(a, b).norm() < 1e-12, "<b{n}, b{m}>");
                }
            }
        }
    }

    #[test]
    fn two_antenna_codebook() {
        let cb = dft_codebook::<f64>(2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for n in [-1, 1] {
            let v = cb.vector(n).unwrap();
            assert!((v[0] - Complex::new(s, 0.0)).norm() < 1e-15);
            assert!((v[1] - Complex::new(-s, 0.0)).norm() < 1e-15);
        }
        assert_eq!(dft_codebook::<f64>(1), Err(BeamError::TooFewAntennas(1)));
    }

    #[test]
    fn angles() {
        assert_relative_eq!(beam_angle::<f64>(5, 20).unwrap().to_degrees(), 30.0, max_relative = 1e-14);
        assert_relative_eq!(beam_angle::<f64>(1, 20).unwrap().to_degrees(), 5.739170477266787, max_relative = 1e-12);
        assert_eq!(beam_angle::<f64>(10, 20).unwrap().to_degrees(), 90.0);
        assert!(matches!(beam_angle::<f64>(11, 20), Err(BeamError::Domain { .. })));
    }

    #[test]
    fn centered_user_has_fourteen_usable_beams() {
        let g = geo();
        let cb = dft_codebook::<f64>(20).unwrap();
        let u = usable_directions(Point3::origin(), &g.elaa, &cb, InterceptRule::Boresight);
        let want: Vec<i32> = (-7..=7).filter(|&n| n != 0).collect();
        assert_eq!(u, want);
        // n = 8 lands at 8·tan(asin 0.8) = 10.67 m, beyond the 10 m half-length
        assert_relative_eq!(8.0 * (0.8f64.asin()).tan(), 10.666666666666666, max_relative = 1e-12);
    }

    #[test]
    fn infinite_array_uses_every_finite_angle_beam() {
        let elaa = UlaSpec::new(Point3::new(0.0, 0.0, 8.0), Point3::unit_y(), 8_000_000, 0.0025).unwrap();
        let cb = dft_codebook::<f64>(20).unwrap();
        let u = usable_directions(Point3::origin(), &elaa, &cb, InterceptRule::Boresight);
        assert_eq!(u.len(), 18);
        assert!(!u.contains(&10) && !u.contains(&-10));
    }

    #[test]
    fn replica_selection_contracts() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(1);
        let usable: Vec<i32> = (1..=5).collect();
        let p = select_replicas(&mut rng, 0, &usable, 9, 8, PilotMode::PerReplica).unwrap();
        assert_eq!(p.chosen, usable);
        let p = select_replicas(&mut rng, 0, &usable, 1, 8, PilotMode::PerReplica).unwrap();
        assert_eq!((p.chosen.len(), p.pilot_per_replica.len()), (1, 1));
        let p = select_replicas(&mut rng, 0, &usable, 4, 8, PilotMode::PerUser).unwrap();
        assert!(p.pilot_per_replica.iter().all(|&x| x == p.pilot_per_replica[0]));
        assert_eq!(
            select_replicas(&mut rng, 3, &[], 2, 8, PilotMode::PerReplica),
            Err(BeamError::NoUsableDirection(3))
        );
        let mut a = Xoshiro256PlusPlus::seed_from_u64(5);
        let mut b = Xoshiro256PlusPlus::seed_from_u64(5);
        assert_eq!(
            select_replicas(&mut a, 0, &usable, 3, 8, PilotMode::PerReplica),
            select_replicas(&mut b, 0, &usable, 3, 8, PilotMode::PerReplica)
        );
    }

    #[test]
    fn replica_selection_is_uniform() {
        // each of 14 beams should appear with frequency 4/14
        let usable: Vec<i32> = (-7..=7).filter(|&n| n != 0).collect();
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(99);
        let mut hits = [0usize; 14];
        let draws = 100_000;
        for _ in 0..draws {
            let p = select_replicas(&mut rng, 0, &usable, 4, 8, PilotMode::PerReplica).unwrap();
            for n in p.chosen {
                hits[usable.iter().position(|&x| x == n).unwrap()] += 1;
            }
        }
        for h in hits {
            let f = h as f64 / draws as f64;
            assert!((f - 4.0 / 14.0).abs() < 0.01, "frequency {f}");
        }
    }

    #[test]
    fn first_beam_footprint_location() {
        let g = geo();
        let fp = predict_footprint(Point3::origin(), 1, &g.elaa, 20);
        assert!(!fp.is_empty());
        let mid = (g.elaa.element_position(fp.start).y + g.elaa.element_position(fp.end - 1).y) / 2.0;
        let want = 8.0 * (0.1f64.asin()).tan();
        assert_relative_eq!(want, 0.804, max_relative = 1e-3);
        assert!((mid - want).abs() < 0.05, "mid {mid}");
    }

    #[test]
    fn footprints_mirror_and_tile() {
        let g = geo();
        let n_r = g.elaa.n_elements();
        for n in 1..=7 {
            let p = predict_footprint(Point3::origin(), n, &g.elaa, 20);
            let m = predict_footprint(Point3::origin(), -n, &g.elaa, 20);
            assert_eq!(p.start, n_r - m.end);
            assert_eq!(p.end, n_r - m.start);
        }
        let user = Point3::new(0.0, 1.234, 0.0);
        for n in -7..7 {
            let a = predict_footprint(user, n, &g.elaa, 20);
            let b = predict_footprint(user, n + 1, &g.elaa, 20);
            assert_eq!(a.end, b.start, "beams {n} and {}", n + 1);
        }
    }

    #[test]
    fn predicted_footprint_matches_brute_force_scan() {
        let g = geo();
        let user = Point3::new(0.0, -2.2, 0.0);
        for n in -9..=9 {
            let (lo, hi) = cell_edges::<f64>(n, 20);
            let scan: Vec<usize> = (0..g.elaa.n_elements())
                .filter(|&e| {
                    let u = element_sine(user, &g.elaa, e);
                    u >= lo && u < hi
                })
                .collect();
            let fp = predict_footprint(user, n, &g.elaa, 20);
            assert_eq!(scan, fp.collect::<Vec<_>>());
        }
    }

    proptest! {
        #[test]
        fn usable_count_in_range_over_segment(y in -3.0f64..=3.0) {
            let g = geo();
            let cb = dft_codebook::<f64>(20).unwrap();
            let n = usable_directions(Point3::new(0.0, y, 0.0), &g.elaa, &cb, InterceptRule::Boresight).len();
            prop_assert!((12..=16).contains(&n), "count {}", n);
        }

        #[test]
        fn chosen_footprints_are_disjoint(y in -3.0f64..=3.0, seed in 0u64..1000, r in 1usize..8) {
            let g = geo();
            let cb = dft_codebook::<f64>(20).unwrap();
            let c = Point3::new(0.0, y, 0.0);
            let usable = usable_directions(c, &g.elaa, &cb, InterceptRule::Boresight);
            let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
            let plan = select_replicas(&mut rng, 0, &usable, r, 8, PilotMode::PerReplica).unwrap();
            let mut sorted = plan.chosen.clone();
            sorted.dedup();
            prop_assert_eq!(sorted.len(), plan.chosen.len());
            let fps: Vec<_> = plan.chosen.iter().map(|&n| predict_footprint(c, n, &g.elaa, 20)).collect();
            for i in 0..fps.len() {
                for j in i + 1..fps.len() {
                    prop_assert!(fps[i].end <= fps[j].start || fps[j].end <= fps[i].start);
                }
            }
        }
    }
}
