//! Synthetic forward data: exact boundary potentials of uniform disks and a
//! reproducible measurement-noise model.
//!
//! A uniform disk of density `rho` and radius `r` produces, at any exterior
//! point, the same logarithmic potential as a point mass `rho * pi * r^2` at
//! its center (mean-value property of the kernel), so observation data can
//! be synthesized in closed form. A brute-force polar quadrature of the area
//! integral is included as an independent cross-check.

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::rng::NormalSampler;
use crate::scalar::{real, real_usize, Real};

/// Uniform-density circular source.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SourceDisk<T> {
    pub center: Point2<T>,
    pub radius: T,
    pub density: T,
}

impl<T: Real> SourceDisk<T> {
    pub fn new(center: Point2<T>, radius: T, density: T) -> Result<Self> {
        let disk = Self {
            center,
            radius,
            density,
        };
        disk.validate()?;
        Ok(disk)
    }

    /// Checks the field invariants: positive finite radius, nonnegative
    /// finite density, finite center.
    pub fn validate(&self) -> Result<()> {
        if !self.center.is_finite() {
            return Err(Error::Invalid {
                what: "SourceDisk",
                reason: "center coordinates must be finite".into(),
            });
        }
        if !(self.radius.is_finite() && self.radius > T::zero()) {
            return Err(Error::Invalid {
                what: "SourceDisk",
                reason: "radius must be positive and finite".into(),
            });
        }
        if !(self.density.is_finite() && self.density >= T::zero()) {
            return Err(Error::Invalid {
                what: "SourceDisk",
                reason: "density must be nonnegative and finite".into(),
            });
        }
        Ok(())
    }
}

/// Boundary measurement set: points on the observation contour and one
/// potential value per point.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ObservationSet<T> {
    points: Vec<Point2<T>>,
    values: Vec<T>,
}

impl<T: Real> ObservationSet<T> {
    /// Pairs points with values; lengths must match and values be finite.
    pub fn new(points: Vec<Point2<T>>, values: Vec<T>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::DimensionMismatch {
                context: "ObservationSet::new",
                expected: points.len(),
                actual: values.len(),
            });
        }
        if !points.iter().all(|p| p.is_finite()) {
            return Err(Error::Invalid {
                what: "ObservationSet",
                reason: "point coordinates must be finite".into(),
            });
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::Invalid {
                what: "ObservationSet",
                reason: "values must be finite".into(),
            });
        }
        Ok(Self { points, values })
    }

    pub fn points(&self) -> &[Point2<T>] {
        &self.points
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Same points with replacement values (e.g. after adding noise).
    pub fn with_values(&self, values: Vec<T>) -> Result<Self> {
        Self::new(self.points.clone(), values)
    }
}

/// Multiplicative noise description: amplitude `delta` relative to the
/// sample spread of the data, and the generator seed.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NoiseSpec<T> {
    pub delta: T,
    pub seed: u64,
}

impl<T: Real> NoiseSpec<T> {
    pub fn new(delta: T, seed: u64) -> Result<Self> {
        if !(delta.is_finite() && delta >= T::zero()) {
            return Err(Error::Invalid {
                what: "NoiseSpec",
                reason: "delta must be nonnegative and finite".into(),
            });
        }
        Ok(Self { delta, seed })
    }
}

/// Exterior potential of a uniform disk: `-(density * radius^2 / 2) * ln|x - center|`.
///
/// Valid on and outside the rim; a strictly interior point is a domain
/// error (the interior formula is a different expression and out of scope).
pub fn disk_potential_exterior<T: Real>(disk: &SourceDisk<T>, x: Point2<T>) -> Result<T> {
    disk.validate()?;
    if !x.is_finite() {
        return Err(Error::Invalid {
            what: "evaluation point",
            reason: "coordinates must be finite".into(),
        });
    }
    let d = x.distance(disk.center);
    if d < disk.radius {
        let (x1, x2) = x.to_f64();
        return Err(Error::InsideDisk { x1, x2 });
    }
    Ok(disk_potential_at_distance(disk, d))
}

// Closed form for a checked exterior separation.
#[inline]
fn disk_potential_at_distance<T: Real>(disk: &SourceDisk<T>, d: T) -> T {
    let half = real::<T>(0.5);
    -(disk.density * disk.radius * disk.radius * half) * d.ln()
}

/// Brute-force area-integral evaluation of the disk potential by the
/// midpoint rule on a polar grid (`resolution` cells in radius times
/// `resolution` cells in angle). Converges to [`disk_potential_exterior`]
/// as the resolution grows; used as an independent cross-check.
///
/// Requires a strictly exterior evaluation point and `resolution >= 8`.
pub fn volume_quadrature_oracle<T: Real>(
    disk: &SourceDisk<T>,
    x: Point2<T>,
    resolution: usize,
) -> Result<T> {
    disk.validate()?;
    if resolution < 8 {
        return Err(Error::Invalid {
            what: "quadrature resolution",
            reason: format!("must be at least 8, got {resolution}"),
        });
    }
    if !x.is_finite() {
        return Err(Error::Invalid {
            what: "evaluation point",
            reason: "coordinates must be finite".into(),
        });
    }
    let d = x.distance(disk.center);
    if d <= disk.radius {
        let (x1, x2) = x.to_f64();
        return Err(Error::InsideDisk { x1, x2 });
    }

    let n = real_usize::<T>(resolution);
    let dr = disk.radius / n;
    let dtheta = T::PI() * real::<T>(2.0) / n;
    let half = real::<T>(0.5);
    let two_pi = T::PI() * real::<T>(2.0);

    let mut total = T::zero();
    for i in 0..resolution {
        let r = (real_usize::<T>(i) + half) * dr;
        let weight = r * dr * dtheta;
        let mut ring = T::zero();
        for j in 0..resolution {
            let theta = (real_usize::<T>(j) + half) * dtheta;
            let y = Point2::new(
                disk.center.x1 + r * theta.cos(),
                disk.center.x2 + r * theta.sin(),
            );
            let dist = x.distance(y);
            ring = ring - dist.ln() / two_pi;
        }
        total = total + weight * ring;
    }
    Ok(disk.density * total)
}

/// Sample standard deviation with the `n - 1` divisor; zero for fewer than
/// two values.
pub fn sample_std_dev<T: Real>(values: &[T]) -> T {
    let n = values.len();
    if n < 2 {
        return T::zero();
    }
    let nt = real_usize::<T>(n);
    let mean = values.iter().copied().sum::<T>() / nt;
    let ss = values
        .iter()
        .map(|&v| {
            let d = v - mean;
            d * d
        })
        .sum::<T>();
    (ss / (nt - T::one())).sqrt()
}

/// Exact boundary data for a superposition of disks: value `i` is the sum of
/// every disk's exterior potential at point `i`.
///
/// Every point must lie on or outside every disk; a violation reports the
/// offending point and disk indices.
pub fn synthesize_observations<T: Real>(
    disks: &[SourceDisk<T>],
    points: &[Point2<T>],
) -> Result<ObservationSet<T>> {
    for disk in disks {
        disk.validate()?;
    }
    if !points.iter().all(|p| p.is_finite()) {
        return Err(Error::Invalid {
            what: "observation points",
            reason: "coordinates must be finite".into(),
        });
    }
    for (i, p) in points.iter().enumerate() {
        for (k, disk) in disks.iter().enumerate() {
            if p.distance(disk.center) < disk.radius {
                return Err(Error::PointInsideDisk {
                    point_index: i,
                    disk_index: k,
                });
            }
        }
    }
    let mut values = Vec::with_capacity(points.len());
    for p in points {
        let mut acc = T::zero();
        for disk in disks {
            acc = acc + disk_potential_at_distance(disk, p.distance(disk.center));
        }
        values.push(acc);
    }
    ObservationSet::new(points.to_vec(), values)
}

/// Adds multiplicative Gaussian noise: each output is
/// `f_i + delta * s(f) * sigma_i` with `s(f)` the sample standard deviation
/// of the inputs and `sigma_i` independent standard normal draws from the
/// seeded generator (fixed algorithm: 64-bit splitmix state update with a
/// Box-Muller transform, see [`crate::rng`]). Zero `delta` returns the
/// input unchanged, regardless of the seed.
pub fn perturb<T: Real>(values: &[T], noise: &NoiseSpec<T>) -> Result<Vec<T>> {
    if values.is_empty() {
        return Err(Error::Invalid {
            what: "perturb input",
            reason: "values must be nonempty".into(),
        });
    }
    if !values.iter().all(|v| v.is_finite()) {
        return Err(Error::Invalid {
            what: "perturb input",
            reason: "values must be finite".into(),
        });
    }
    if !(noise.delta.is_finite() && noise.delta >= T::zero()) {
        return Err(Error::Invalid {
            what: "NoiseSpec",
            reason: "delta must be nonnegative and finite".into(),
        });
    }
    if noise.delta == T::zero() {
        return Ok(values.to_vec());
    }
    let scale = noise.delta * sample_std_dev(values);
    let mut sampler = NormalSampler::new(noise.seed);
    Ok(values
        .iter()
        .map(|&v| v + scale * real::<T>(sampler.next_normal()))
        .collect())
}
