//! Sweeps reproducing the published figure grids.

use super::campaign::SweepPoint;
use crate::receiver::Scheme;

fn grid(ks: &[usize], rs: &[usize], schemes: &[Scheme]) -> Vec<SweepPoint> {
    let mut out = Vec::new();
    for &scheme in schemes {
        for &r in rs {
            for &sic in &[true, false] {
                for &k in ks {
                    out.push(SweepPoint { k, r, scheme, sic });
                }
            }
        }
    }
    out
}

/// PLR vs K ∈ {20, …, 50} for R = 2..5, with and without SIC.
pub fn figure2() -> Vec<SweepPoint> {
    grid(&[20, 25, 30, 35, 40, 45, 50], &[2, 3, 4, 5], &[Scheme::Csra])
}

/// PLR vs R = 2..7 for K = 25 and 45, with and without SIC.
pub fn figure3() -> Vec<SweepPoint> {
    let mut out = Vec::new();
    for k in [25, 45] {
        for sic in [true, false] {
            for r in 2..=7 {
                out.push(SweepPoint { k, r, scheme: Scheme::Csra, sic });
            }
        }
    }
    out
}

/// CSRA and CSRA-SE vs K ∈ {5, …, 50} for R = 4 and 5, with and without SIC.
pub fn figure4() -> Vec<SweepPoint> {
    let ks: Vec<usize> = (1..=10).map(|i| 5 * i).collect();
    grid(&ks, &[4, 5], &[Scheme::Csra, Scheme::CsraSe])
}
