//! Line-of-sight near-field channel, receiver noise, and synthesis of the
//! samples one slot leaves on every ELAA element.

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Point3, UlaSpec};
use crate::matrix::{axpy, CMatrix};
use crate::phy::{MessageBits, PilotSet, SymbolBlock};
use crate::scalar::{lit, Real};

pub const BOLTZMANN: f64 = 1.380649e-23;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("user element {tx} coincides with ELAA element {rx}")]
    Coincident { tx: usize, rx: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("beam vector has squared norm {0}, expected 1")]
    BeamNorm(f64),
    #[error("pilot index {index} outside a set of {count}")]
    Pilot { index: usize, count: usize },
}

/// Free-space gain `λ/(4πd)·exp(−j2πd/λ)` at distance `d`.
#[inline]
pub fn los_gain<T: Real>(d: T, wavelength: T) -> Complex<T> {
    let cycles = d / wavelength;
    // whole wavelengths contribute nothing to the phase
    let frac = cycles - cycles.floor();
    let amp = wavelength / (lit::<T>(4.0) * T::PI() * d);
    Complex::from_polar(amp, -T::TAU() * frac)
}

/// Per-user `N_R × N_T` gain matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix<T> {
    pub user_index: usize,
    n_rx: usize,
    n_tx: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Real> ChannelMatrix<T> {
    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    pub fn get(&self, r: usize, t: usize) -> Complex<T> {
        self.entries[r * self.n_tx + t]
    }

    pub fn row(&self, r: usize) -> &[Complex<T>] {
        &self.entries[r * self.n_tx..(r + 1) * self.n_tx]
    }

    /// `H·b`: the gain each ELAA element sees from beam `b`.
    pub fn beam_response(&self, b: &[Complex<T>]) -> Result<Vec<Complex<T>>, ChannelError> {
        if b.len() != self.n_tx {
            return Err(ChannelError::Dimension(format!(
                "beam has {} entries, channel has {} columns",
                b.len(),
                self.n_tx
            )));
        }
        Ok((0..self.n_rx)
            .map(|r| self.row(r).iter().zip(b).map(|(h, x)| h * x).sum())
            .collect())
    }
}

pub fn los_channel<T: Real>(
    user_index: usize,
    user: &UlaSpec<T>,
    elaa: &UlaSpec<T>,
    wavelength: T,
) -> Result<ChannelMatrix<T>, ChannelError> {
    let tx: Vec<Point3<T>> = (0..user.n_elements()).map(|t| user.element_position(t)).collect();
    let mut entries = Vec::with_capacity(tx.len() * elaa.n_elements());
    for r in 0..elaa.n_elements() {
        let p = elaa.element_position(r);
        for (t, q) in tx.iter().enumerate() {
            let d = p.distance(*q);
            if d <= T::zero() {
                return Err(ChannelError::Coincident { tx: t, rx: r });
            }
            entries.push(los_gain(d, wavelength));
        }
    }
    Ok(ChannelMatrix {
        user_index,
        n_rx: elaa.n_elements(),
        n_tx: user.n_elements(),
        entries,
    })
}

fn check_beam<T: Real>(b: &[Complex<T>], n_t: usize) -> Result<(), ChannelError> {
    if b.len() != n_t {
        return Err(ChannelError::Dimension(format!(
            "beam has {} entries, user array has {n_t}",
            b.len()
        )));
    }
    let e: T = b.iter().map(|x| x.norm_sqr()).sum();
    if (e - T::one()).abs() > lit(1e-4) {
        return Err(ChannelError::BeamNorm(e.to_f64()));
    }
    Ok(())
}

/// Element responses `H·b` for several beams of one user, without forming `H`.
///
/// When the user array is parallel to the ELAA with the same spacing, the
/// distance between TX element `t` and RX element `r` only depends on `r − t`,
/// so the `N_R + N_T − 1` distinct gains are computed once and each response
/// is a short convolution. Other layouts fall back to the dense matrix.
pub fn beam_responses<T: Real>(
    user: &UlaSpec<T>,
    elaa: &UlaSpec<T>,
    wavelength: T,
    beams: &[&[Complex<T>]],
) -> Result<Vec<Vec<Complex<T>>>, ChannelError> {
    let n_t = user.n_elements();
    for b in beams {
        check_beam(b, n_t)?;
    }
    if user.axis() != elaa.axis() || user.spacing() != elaa.spacing() {
        let h = los_channel(0, user, elaa, wavelength)?;
        return beams.iter().map(|b| h.beam_response(b)).collect();
    }
    let n_r = elaa.n_elements();
    let axis = elaa.axis();
    let base = elaa.center() - user.center();
    let shift = (T::from_usize(n_r) - T::from_usize(n_t)) / lit(2.0);
    // lag index m = r − t + (N_T − 1)
    let lags = n_r + n_t - 1;
    let mut h_re = Vec::with_capacity(lags);
    let mut h_im = Vec::with_capacity(lags);
    for m in 0..lags {
        let k = T::from_f64(m as f64 - (n_t - 1) as f64) - shift;
        let d = (base + axis * (k * elaa.spacing())).norm();
        if d <= T::zero() {
            let r = m.min(n_r - 1);
            return Err(ChannelError::Coincident { tx: r + n_t - 1 - m, rx: r });
        }
        let g = los_gain(d, wavelength);
        h_re.push(g.re);
        h_im.push(g.im);
    }
    Ok(beams
        .iter()
        .map(|b| {
            let mut g_re = vec![T::zero(); n_r];
            let mut g_im = vec![T::zero(); n_r];
            for (t, &bt) in b.iter().enumerate() {
                let o = n_t - 1 - t;
                axpy(&mut g_re, &mut g_im, bt, &h_re[o..o + n_r], &h_im[o..o + n_r]);
            }
            g_re.into_iter().zip(g_im).map(|(re, im)| Complex::new(re, im)).collect()
        })
        .collect())
}

/// Thermal receiver noise plus an implementation loss on the signal path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub bandwidth: f64,
    pub temperature: f64,
    pub noise_figure_db: f64,
    pub implementation_loss_db: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            bandwidth: 1e5,
            temperature: 290.0,
            noise_figure_db: 10.0,
            implementation_loss_db: 10.0,
        }
    }
}

impl NoiseModel {
    pub fn variance(&self) -> f64 {
        noise_variance(self)
    }

    /// Linear power factor the implementation loss applies to received signals.
    pub fn signal_gain(&self) -> f64 {
        10f64.powf(-self.implementation_loss_db / 10.0)
    }
}

/// `σ² = k_B·T0·B·NF` in watts.
pub fn noise_variance(model: &NoiseModel) -> f64 {
    BOLTZMANN * model.temperature * model.bandwidth * 10f64.powf(model.noise_figure_db / 10.0)
}

/// How a user's transmit power is shared among its replicas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PowerPolicy {
    /// Amplitude `1/√R` per replica: total power `P_t` whatever `R` is.
    #[default]
    Split,
    /// Every replica at full `P_t`.
    Full,
}

impl PowerPolicy {
    pub fn amplitude<T: Real>(self, replicas: usize) -> T {
        match self {
            PowerPolicy::Split => T::one() / T::from_usize(replicas.max(1)).sqrt(),
            PowerPolicy::Full => T::one(),
        }
    }
}

/// Power and noise settings for synthesis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub pt: f64,
    pub noise: NoiseModel,
    pub power_policy: PowerPolicy,
    /// Multiplies the noise standard deviation; 0 gives a noiseless slot.
    pub noise_scale: f64,
}

impl LinkBudget {
    pub fn new(pt: f64, noise: NoiseModel, power_policy: PowerPolicy) -> Self {
        Self {
            pt,
            noise,
            power_policy,
            noise_scale: 1.0,
        }
    }

    /// Amplitude applied to every unit-norm replica before power splitting.
    pub fn signal_amplitude(&self) -> f64 {
        (self.pt * self.noise.signal_gain()).sqrt()
    }

    /// Variance of the noise actually added to each sample.
    pub fn sample_noise_variance(&self) -> f64 {
        self.noise.variance() * self.noise_scale * self.noise_scale
    }
}

/// One user's transmission as seen by the ELAA: a response `H·b` and a pilot
/// per replica, plus the shared payload.
#[derive(Debug, Clone, PartialEq)]
pub struct Transmission<T> {
    pub responses: Vec<Vec<Complex<T>>>,
    pub pilots: Vec<usize>,
    pub payload: SymbolBlock<T>,
}

impl<T: Real> Transmission<T> {
    pub fn from_channel(
        channel: &ChannelMatrix<T>,
        beams: &[&[Complex<T>]],
        pilots: Vec<usize>,
        payload: SymbolBlock<T>,
    ) -> Result<Self, ChannelError> {
        let responses = beams
            .iter()
            .map(|b| {
                check_beam(b, channel.n_tx())?;
                channel.beam_response(b)
            })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            responses,
            pilots,
            payload,
        })
    }
}

/// What a user actually sent; kept for scoring and for the position and
/// replica lookup the receiver is granted after decoding a message.
#[derive(Debug, Clone, PartialEq)]
pub struct UserRecord<T> {
    pub user_index: usize,
    pub center: Point3<T>,
    pub message: MessageBits,
    pub beams: Vec<i32>,
    pub pilots: Vec<usize>,
}

/// Pilot part (`N_R × N_P`) and payload part (`N_R × N_D`) of one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedSlot<T> {
    pub pilot: CMatrix<T>,
    pub payload: CMatrix<T>,
    pub ground_truth: Vec<UserRecord<T>>,
}

impl<T: Real> ReceivedSlot<T> {
    pub fn n_elements(&self) -> usize {
        self.pilot.rows()
    }

    /// Sum of both parts' squared Frobenius norms.
    pub fn energy(&self) -> T {
        self.pilot.frobenius_norm_sqr() + self.payload.frobenius_norm_sqr()
    }
}

/// Builds the received slot for `n_r` ELAA elements and `n_d` payload symbols.
///
/// Noise is drawn first, row by row (pilot samples then payload samples), so
/// the noise realization depends only on the rng state and the dimensions.
pub fn synthesize_slot<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    n_r: usize,
    n_d: usize,
    transmissions: &[Transmission<T>],
    pilots: &PilotSet<T>,
    budget: &LinkBudget,
) -> Result<ReceivedSlot<T>, ChannelError> {
    let n_p = pilots.pilot_length();
    for (k, x) in transmissions.iter().enumerate() {
        if x.responses.len() != x.pilots.len() {
            return Err(ChannelError::Dimension(format!(
                "user {k}: {} responses but {} pilots",
                x.responses.len(),
                x.pilots.len()
            )));
        }
        if x.payload.len() != n_d {
            return Err(ChannelError::Dimension(format!(
                "user {k}: payload of {} symbols, expected {n_d}",
                x.payload.len()
            )));
        }
        if let Some(resp) = x.responses.iter().find(|g| g.len() != n_r) {
            return Err(ChannelError::Dimension(format!(
                "user {k}: response of length {}, expected {n_r}",
                resp.len()
            )));
        }
        if let Some(&index) = x.pilots.iter().find(|&&j| j >= pilots.len()) {
            return Err(ChannelError::Pilot {
                index,
                count: pilots.len(),
            });
        }
    }

    let mut pilot = CMatrix::zeros(n_r, n_p);
    let mut payload = CMatrix::zeros(n_r, n_d);
    let var: T = lit(budget.sample_noise_variance());
    if var > T::zero() {
        let s = (var / lit(2.0)).sqrt();
        for r in 0..n_r {
            for part in [&mut pilot, &mut payload] {
                let (re, im) = part.row_mut(r);
                for (a, b) in re.iter_mut().zip(im.iter_mut()) {
                    *a = T::standard_normal(rng) * s;
                    *b = T::standard_normal(rng) * s;
                }
            }
        }
    }

    // per-element coefficient of each pilot and of each user's payload
    let amp: T = lit(budget.signal_amplitude());
    let p_count = pilots.len();
    let mut pilot_coef = vec![Complex::<T>::default(); n_r * p_count];
    let mut user_coef = vec![Complex::<T>::default(); n_r * transmissions.len()];
    for (k, x) in transmissions.iter().enumerate() {
        let a = amp * budget.power_policy.amplitude::<T>(x.responses.len());
        for (g, &j) in x.responses.iter().zip(&x.pilots) {
            for (r, &h) in g.iter().enumerate() {
                let c = h * a;
                pilot_coef[r * p_count + j] += c;
                user_coef[r * transmissions.len() + k] += c;
            }
        }
    }

    for r in 0..n_r {
        let (re, im) = pilot.row_mut(r);
        for (j, &c) in pilot_coef[r * p_count..(r + 1) * p_count].iter().enumerate() {
            if c == Complex::default() {
                continue;
            }
            for (n, &p) in pilots.sequence(j).iter().enumerate() {
                re[n] += c.re * p;
                im[n] += c.im * p;
            }
        }
        let (re, im) = payload.row_mut(r);
        let coefs = &user_coef[r * transmissions.len()..(r + 1) * transmissions.len()];
        for (x, &c) in transmissions.iter().zip(coefs) {
            axpy(re, im, c, &x.payload.re, &x.payload.im);
        }
    }

    Ok(ReceivedSlot {
        pilot,
        payload,
        ground_truth: Vec::new(),
    })
}
