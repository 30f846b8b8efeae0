//! Logarithmic kernel evaluation and dense system assembly.
//!
//! The influence of a layer segment on an observation point is the free-space
//! kernel of the planar Laplacian, `G(x, y) = -ln|x - y| / (2 pi)`, scaled by
//! the segment length (midpoint rule on the layer integral). Stacking all
//! observation points against all window segments gives the dense system
//! matrix that the solvers consume.

use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::geometry::{DiscretizedContour, Point2};
use crate::linalg::DenseMatrix;
use crate::scalar::{real, Real};

/// Distance below which kernel evaluation is refused outright.
const KERNEL_DISTANCE_FLOOR: f64 = 1e-14;

/// Distance below which an observation/segment pairing is rejected during
/// assembly. Deliberately coarser than the kernel floor: at this separation
/// the midpoint rule has lost all accuracy, so the pairing is a modeling
/// error rather than merely a floating-point hazard.
const ASSEMBLY_DISTANCE_FLOOR: f64 = 1e-12;

/// Free-space kernel of the planar Laplacian, `-ln|x - y| / (2 pi)`.
///
/// Fails with [`Error::KernelSingularity`] when the points are closer than
/// `1e-14`, where the logarithm is effectively singular.
pub fn log_kernel<T: Real>(x: Point2<T>, y: Point2<T>) -> Result<T> {
    let d = x.distance(y);
    let floor = real::<T>(KERNEL_DISTANCE_FLOOR);
    // A NaN distance must fail too, so test for Greater rather than `<=`.
    if d.partial_cmp(&floor) != Some(Ordering::Greater) {
        return Err(Error::KernelSingularity {
            distance: d.to_f64().unwrap_or(f64::NAN),
            threshold: KERNEL_DISTANCE_FLOOR,
        });
    }
    Ok(log_kernel_at_distance(d))
}

/// Kernel value for a known positive separation; no singularity check.
#[inline]
pub(crate) fn log_kernel_at_distance<T: Real>(d: T) -> T {
    let two_pi = T::PI() * real::<T>(2.0);
    -d.ln() / two_pi
}

/// The dense observation-by-segment system matrix.
pub type KernelMatrix<T> = DenseMatrix<T>;

/// Assembles `a[i][j] = |segment_j| * G(point_i, center_j)`.
///
/// Rows follow the observation points in order; columns follow the window
/// segments in order. Every pairing closer than `1e-12` is rejected with
/// [`Error::CoincidentNodes`] naming the offending row and column.
pub fn assemble_matrix<T: Real>(
    points: &[Point2<T>],
    window: &DiscretizedContour<T>,
) -> Result<KernelMatrix<T>> {
    if points.is_empty() {
        return Err(Error::Invalid {
            what: "observation points",
            reason: "at least one observation point required".into(),
        });
    }
    if !points.iter().all(|p| p.is_finite()) {
        return Err(Error::Invalid {
            what: "observation points",
            reason: "coordinates must be finite".into(),
        });
    }
    let segments = window.segments();
    let floor = real::<T>(ASSEMBLY_DISTANCE_FLOOR);
    let mut data = Vec::with_capacity(points.len() * segments.len());
    for (i, p) in points.iter().enumerate() {
        for (j, seg) in segments.iter().enumerate() {
            let d = p.distance(seg.center);
            if d.partial_cmp(&floor) != Some(Ordering::Greater) {
                return Err(Error::CoincidentNodes {
                    row: i,
                    col: j,
                    distance: d.to_f64().unwrap_or(f64::NAN),
                    threshold: ASSEMBLY_DISTANCE_FLOOR,
                });
            }
            data.push(seg.length * log_kernel_at_distance(d));
        }
    }
    KernelMatrix::from_vec(points.len(), segments.len(), data)
}
