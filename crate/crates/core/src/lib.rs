//! Coded spatial random access (CSRA) over a near-field extremely large
//! aperture array: geometry, line-of-sight channel synthesis, DFT beams, BCH
//! and QPSK coding, the clustering/MRC/SIC receiver, and a Monte Carlo
//! campaign harness for packet loss rate.
//!
//! The numerical core is generic over [`scalar::Real`] (`f32` or `f64`); the
//! aliases below fix the scalar for the common cases.

pub mod beams;
pub mod channel;
pub mod geometry;
pub mod harness;
pub mod matrix;
pub mod phy;
pub mod receiver;
pub mod scalar;

pub use scalar::Real;

pub type C64 = num_complex::Complex<f64>;
pub type C32 = num_complex::Complex<f32>;
pub type Point = geometry::Point3<f64>;
pub type Ula = geometry::UlaSpec<f64>;
pub type Geometry = geometry::ScenarioGeometry<f64>;
pub type Slot = channel::ReceivedSlot<f64>;
pub type Slot32 = channel::ReceivedSlot<f32>;
pub type Codebook = beams::BeamCodebook<f64>;
