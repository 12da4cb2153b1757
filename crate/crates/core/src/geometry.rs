//! Array layouts, user placement and near-field regime formulas.

use std::ops::{Add, Mul, Sub};

use rand::Rng;
use thiserror::Error;

use crate::scalar::{lit, Real};

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("array spacing must be positive and finite, got {0}")]
    Spacing(f64),
    #[error("array axis must have unit norm, got norm {0}")]
    Axis(f64),
    #[error("array must have at least one element")]
    Empty,
    #[error("non-finite coordinate in array center")]
    NonFinite,
    #[error("user arrays ({user}) must have fewer elements than the access point array ({ap})")]
    UserArrayTooLarge { user: usize, ap: usize },
    #[error("wavelength must be positive, got {0}")]
    Wavelength(f64),
    #[error("user segment [{0}, {1}] is empty or non-finite")]
    Segment(f64, f64),
}

/// A point (or direction) in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Point3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn origin() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn unit_y() -> Self {
        Self::new(T::zero(), T::one(), T::zero())
    }

    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(self) -> T {
        self.dot(self).sqrt()
    }

    pub fn distance(self, other: Self) -> T {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl<T: Real> Add for Point3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> Sub for Point3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> Mul<T> for Point3<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

/// Uniform linear array, symmetric about its center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UlaSpec<T> {
    center: Point3<T>,
    axis: Point3<T>,
    n_elements: usize,
    spacing: T,
}

impl<T: Real> UlaSpec<T> {
    pub fn new(
        center: Point3<T>,
        axis: Point3<T>,
        n_elements: usize,
        spacing: T,
    ) -> Result<Self, GeometryError> {
        if n_elements == 0 {
            return Err(GeometryError::Empty);
        }
        if !(spacing > T::zero() && spacing.is_finite()) {
            return Err(GeometryError::Spacing(spacing.to_f64()));
        }
        if !center.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        let norm = axis.norm();
        if !((norm - T::one()).abs() <= lit(1e-9)) {
            return Err(GeometryError::Axis(norm.to_f64()));
        }
        Ok(Self {
            center,
            axis,
            n_elements,
            spacing,
        })
    }

    pub fn center(&self) -> Point3<T> {
        self.center
    }

    pub fn axis(&self) -> Point3<T> {
        self.axis
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    /// Signed offset of element `i` from the center along the axis.
    #[inline]
    pub fn offset(&self, i: usize) -> T {
        (T::from_usize(i) - T::from_usize(self.n_elements - 1) / lit(2.0)) * self.spacing
    }

    #[inline]
    pub fn element_position(&self, i: usize) -> Point3<T> {
        self.center + self.axis * self.offset(i)
    }

    /// Extent between the outermost elements, `(n - 1) * spacing`.
    pub fn span(&self) -> T {
        T::from_usize(self.n_elements - 1) * self.spacing
    }

    /// Aperture length under the given convention.
    pub fn aperture(&self, convention: ApertureConvention) -> T {
        aperture_length(self.n_elements, self.spacing, convention)
    }
}

/// All element positions of `spec`, in index order.
pub fn element_positions<T: Real>(spec: &UlaSpec<T>) -> Vec<Point3<T>> {
    (0..spec.n_elements).map(|i| spec.element_position(i)).collect()
}

/// How an array's physical length is derived from its element count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ApertureConvention {
    /// `N * spacing`: each element owns one spacing cell (continuous-aperture view).
    #[default]
    ElementCells,
    /// `(N - 1) * spacing`: distance between the outermost element centers.
    CenterSpan,
}

pub fn aperture_length<T: Real>(n: usize, spacing: T, convention: ApertureConvention) -> T {
    match convention {
        ApertureConvention::ElementCells => T::from_usize(n) * spacing,
        ApertureConvention::CenterSpan => T::from_usize(n.saturating_sub(1)) * spacing,
    }
}

/// Far-field boundary `2 L² / λ`.
pub fn fraunhofer_distance<T: Real>(aperture: T, wavelength: T) -> T {
    lit::<T>(2.0) * aperture * aperture / wavelength
}

/// Number of strongly coupled communication modes between a short array of
/// length `l_t` and a long array of length `l_r` whose centers are `d` apart.
pub fn coupled_mode_count<T: Real>(l_t: T, l_r: T, d: T, wavelength: T) -> usize {
    let denom = wavelength * (lit::<T>(4.0) * d * d + l_r * l_r).sqrt();
    let v = (T::one() + lit::<T>(2.0) * l_t * l_r / denom).floor();
    v.to_f64() as usize
}

/// Access point array plus the law used to place user arrays.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioGeometry<T> {
    pub elaa: UlaSpec<T>,
    pub wavelength: T,
    pub user_elements: usize,
    pub user_spacing: T,
    /// Interval on the y-axis (meters) from which user centers are drawn.
    pub user_segment: (T, T),
}

impl<T: Real> ScenarioGeometry<T> {
    /// ELAA of `elaa_length` meters along +y at height `height`, with half-wavelength
    /// spacing at both ends of the link.
    pub fn with_half_wavelength_arrays(
        wavelength: T,
        elaa_length: T,
        height: T,
        user_elements: usize,
        user_segment: (T, T),
    ) -> Result<Self, GeometryError> {
        if !(wavelength > T::zero() && wavelength.is_finite()) {
            return Err(GeometryError::Wavelength(wavelength.to_f64()));
        }
        let spacing = wavelength / lit(2.0);
        let n_r = (elaa_length / spacing).round().to_f64() as usize;
        let elaa = UlaSpec::new(
            Point3::new(T::zero(), T::zero(), height),
            Point3::unit_y(),
            n_r,
            spacing,
        )?;
        let geo = Self {
            elaa,
            wavelength,
            user_elements,
            user_spacing: spacing,
            user_segment,
        };
        geo.validate()?;
        Ok(geo)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if self.user_elements == 0 {
            return Err(GeometryError::Empty);
        }
        if self.user_elements >= self.elaa.n_elements() {
            return Err(GeometryError::UserArrayTooLarge {
                user: self.user_elements,
                ap: self.elaa.n_elements(),
            });
        }
        let (lo, hi) = self.user_segment;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(GeometryError::Segment(lo.to_f64(), hi.to_f64()));
        }
        Ok(())
    }

    /// A user array centered at `y` on the floor, parallel to the ELAA.
    pub fn user_at(&self, y: T) -> Result<UlaSpec<T>, GeometryError> {
        UlaSpec::new(
            Point3::new(T::zero(), y, T::zero()),
            self.elaa.axis(),
            self.user_elements,
            self.user_spacing,
        )
    }

    /// Distance between a user center and the ELAA center.
    pub fn link_distance(&self, user: &UlaSpec<T>) -> T {
        user.center().distance(self.elaa.center())
    }
}

/// Draws `k` user arrays with centers i.i.d. uniform on the user segment.
pub fn place_users<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    k: usize,
    geometry: &ScenarioGeometry<T>,
) -> Vec<UlaSpec<T>> {
    let (lo, hi) = geometry.user_segment;
    (0..k)
        .map(|_| {
            let y = lo + (hi - lo) * T::unit_uniform(rng);
            geometry
                .user_at(y)
                .expect("validated geometry yields valid user arrays")
        })
        .collect()
}
