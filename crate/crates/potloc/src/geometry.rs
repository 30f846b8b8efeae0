//! Observation and source-window geometry.
//!
//! Observations live on an ellipse; candidate source windows are axis-aligned
//! rectangles whose boundary is discretized into flat segments. All contours
//! are traversed counterclockwise.

use crate::error::{Error, Result};
use crate::scalar::{real, real_usize, Real};

/// Point in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Point2<T> {
    pub x1: T,
    pub x2: T,
}

impl<T: Real> Point2<T> {
    pub fn new(x1: T, x2: T) -> Self {
        Self { x1, x2 }
    }

    /// Euclidean distance to another point.
    pub fn distance(&self, other: Point2<T>) -> T {
        (self.x1 - other.x1).hypot(self.x2 - other.x2)
    }

    pub fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }

    pub(crate) fn to_f64(self) -> (f64, f64) {
        (
            self.x1.to_f64().unwrap_or(f64::NAN),
            self.x2.to_f64().unwrap_or(f64::NAN),
        )
    }
}

/// Flat contour segment represented by its midpoint and length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment<T> {
    pub center: Point2<T>,
    pub length: T,
}

impl<T: Real> Segment<T> {
    pub fn new(center: Point2<T>, length: T) -> Self {
        Self { center, length }
    }
}

/// Ordered list of segments forming a closed contour.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedContour<T> {
    segments: Vec<Segment<T>>,
}

impl<T: Real> DiscretizedContour<T> {
    /// Wraps a nonempty list of segments with positive, finite lengths.
    pub fn new(segments: Vec<Segment<T>>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Invalid {
                what: "DiscretizedContour",
                reason: "contour must contain at least one segment".into(),
            });
        }
        for (j, seg) in segments.iter().enumerate() {
            if !(seg.length.is_finite() && seg.length > T::zero()) || !seg.center.is_finite() {
                return Err(Error::Invalid {
                    what: "DiscretizedContour",
                    reason: format!("segment {j} must have a finite center and positive length"),
                });
            }
        }
        Ok(Self { segments })
    }

    pub fn segments(&self) -> &[Segment<T>] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Sum of all segment lengths.
    pub fn total_length(&self) -> T {
        self.segments.iter().map(|s| s.length).sum()
    }

    /// Cumulative arc-length position of each segment midpoint, starting from
    /// the first segment.
    pub fn arc_positions(&self) -> Vec<T> {
        let half = real::<T>(0.5);
        let mut acc = T::zero();
        self.segments
            .iter()
            .map(|s| {
                let pos = acc + half * s.length;
                acc = acc + s.length;
                pos
            })
            .collect()
    }
}

/// Elliptic observation contour with uniformly spaced parameter samples.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EllipseSpec<T> {
    pub center: Point2<T>,
    pub semi_axis_a: T,
    pub semi_axis_b: T,
    pub num_points: usize,
}

impl<T: Real> EllipseSpec<T> {
    pub fn new(center: Point2<T>, semi_axis_a: T, semi_axis_b: T, num_points: usize) -> Self {
        Self {
            center,
            semi_axis_a,
            semi_axis_b,
            num_points,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.center.is_finite() {
            return Err(Error::Invalid {
                what: "EllipseSpec",
                reason: "center must be finite".into(),
            });
        }
        for (name, v) in [
            ("semi_axis_a", self.semi_axis_a),
            ("semi_axis_b", self.semi_axis_b),
        ] {
            if !(v.is_finite() && v > T::zero()) {
                return Err(Error::Invalid {
                    what: "EllipseSpec",
                    reason: format!("{name} must be finite and positive"),
                });
            }
        }
        if self.num_points == 0 {
            return Err(Error::Invalid {
                what: "EllipseSpec",
                reason: "num_points must be at least 1".into(),
            });
        }
        Ok(())
    }

    /// True when the point lies strictly inside the ellipse.
    pub fn strictly_contains(&self, p: Point2<T>) -> bool {
        let u = (p.x1 - self.center.x1) / self.semi_axis_a;
        let v = (p.x2 - self.center.x2) / self.semi_axis_b;
        u * u + v * v < T::one()
    }
}

/// Axis-aligned rectangular window with per-side segment counts.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RectangleSpec<T> {
    pub center: Point2<T>,
    pub width: T,
    pub height: T,
    /// Segments per horizontal side (bottom and top).
    pub n_horizontal: usize,
    /// Segments per vertical side (left and right).
    pub n_vertical: usize,
}

impl<T: Real> RectangleSpec<T> {
    pub fn new(
        center: Point2<T>,
        width: T,
        height: T,
        n_horizontal: usize,
        n_vertical: usize,
    ) -> Self {
        Self {
            center,
            width,
            height,
            n_horizontal,
            n_vertical,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.center.is_finite() {
            return Err(Error::Invalid {
                what: "RectangleSpec",
                reason: "center must be finite".into(),
            });
        }
        for (name, v) in [("width", self.width), ("height", self.height)] {
            if !(v.is_finite() && v > T::zero()) {
                return Err(Error::Invalid {
                    what: "RectangleSpec",
                    reason: format!("{name} must be finite and positive"),
                });
            }
        }
        if self.n_horizontal == 0 || self.n_vertical == 0 {
            return Err(Error::Invalid {
                what: "RectangleSpec",
                reason: "n_horizontal and n_vertical must be at least 1".into(),
            });
        }
        Ok(())
    }

    /// Number of boundary segments produced by [`rectangle_boundary_segments`].
    pub fn total_segments(&self) -> usize {
        2 * (self.n_horizontal + self.n_vertical)
    }
}

/// Uniform parameter samples of the ellipse, counterclockwise from the point
/// at parameter zero (the positive horizontal axis).
pub fn ellipse_observation_points<T: Real>(spec: &EllipseSpec<T>) -> Result<Vec<Point2<T>>> {
    spec.validate()?;
    let m = spec.num_points;
    let two_pi = T::PI() * real(2.0);
    let denom = real_usize::<T>(m);
    let mut points = Vec::with_capacity(m);
    for i in 0..m {
        let theta = two_pi * real_usize::<T>(i) / denom;
        points.push(Point2::new(
            spec.center.x1 + spec.semi_axis_a * theta.cos(),
            spec.center.x2 + spec.semi_axis_b * theta.sin(),
        ));
    }
    Ok(points)
}

/// Midpoint discretization of the rectangle boundary.
///
/// Segments are ordered counterclockwise starting at the bottom-left corner:
/// bottom side left to right, right side bottom to top, top side right to
/// left, left side top to bottom. Segment centers are strictly interior to
/// their side, so corners never appear as centers.
pub fn rectangle_boundary_segments<T: Real>(
    spec: &RectangleSpec<T>,
) -> Result<DiscretizedContour<T>> {
    spec.validate()?;
    let half = real::<T>(0.5);
    let (cx, cy) = (spec.center.x1, spec.center.x2);
    let half_w = spec.width * half;
    let half_h = spec.height * half;
    let w_step = spec.width / real_usize::<T>(spec.n_horizontal);
    let h_step = spec.height / real_usize::<T>(spec.n_vertical);

    let mut segments = Vec::with_capacity(spec.total_segments());
    for i in 0..spec.n_horizontal {
        let t = (real_usize::<T>(i) + half) * w_step;
        segments.push(Segment {
            center: Point2::new(cx - half_w + t, cy - half_h),
            length: w_step,
        });
    }
    for i in 0..spec.n_vertical {
        let t = (real_usize::<T>(i) + half) * h_step;
        segments.push(Segment {
            center: Point2::new(cx + half_w, cy - half_h + t),
            length: h_step,
        });
    }
    for i in 0..spec.n_horizontal {
        let t = (real_usize::<T>(i) + half) * w_step;
        segments.push(Segment {
            center: Point2::new(cx + half_w - t, cy + half_h),
            length: w_step,
        });
    }
    for i in 0..spec.n_vertical {
        let t = (real_usize::<T>(i) + half) * h_step;
        segments.push(Segment {
            center: Point2::new(cx - half_w, cy + half_h - t),
            length: h_step,
        });
    }
    DiscretizedContour::new(segments)
}
