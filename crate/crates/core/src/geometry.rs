//! Randomized hyperstructures around a test instance, plus the planar
//! collinearity predicate behind the "random points form a quadrilateral"
//! argument.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{self, MembershipResult, BOUNDARY_FACTOR};
use crate::rng::Mt19937;

/// Redraws allowed in ensure-enclosure mode before giving up.
pub const ENCLOSURE_ATTEMPTS: usize = 32;

/// How the sampling box is derived from the test instance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoxMode {
    /// One scalar interval `[min(x) - t, max(x) + t]` for every dimension.
    #[default]
    Shared,
    /// `[x_j - t, x_j + t]` per dimension (experimental).
    PerDimension,
}

/// Default hull size for dimension `n`: `4n - 1`.
pub fn default_point_count(dim: usize) -> usize {
    4 * dim - 1
}

/// `(min(x) - threshold, max(x) + threshold)`.
pub fn bounding_interval(x: &[f64], threshold: f64) -> Result<(f64, f64)> {
    if x.is_empty() {
        return Err(Error::InvalidArgument("point has no coordinates".into()));
    }
    if x.iter().any(|v| !v.is_finite()) || !threshold.is_finite() {
        return Err(Error::NonFinite);
    }
    if threshold < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "threshold {threshold} is negative"
        )));
    }
    let min = x.iter().copied().fold(f64::INFINITY, f64::min);
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((min - threshold, max + threshold))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperstructure {
    pub points: Vec<Vec<f64>>,
    /// Per-dimension sampling bounds; identical entries in [`BoxMode::Shared`].
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub threshold: f64,
    pub test_instance: Vec<f64>,
    /// Seed of the generator that drew the points (0 for explicit hulls).
    pub child_seed: u32,
    /// Coordinate-wise extent of `points`, used to skip the LP for clear outsiders.
    hull_min: Vec<f64>,
    hull_max: Vec<f64>,
}

impl Hyperstructure {
    /// Hyperstructure with explicitly chosen points.
    pub fn from_points(points: Vec<Vec<f64>>, test_instance: Vec<f64>) -> Result<Self> {
        let dim = test_instance.len();
        if points.is_empty() {
            return Err(Error::InvalidArgument("hyperstructure needs points".into()));
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.len(),
            });
        }
        let (hull_min, hull_max) = extent(&points, dim);
        Ok(Self {
            lower: hull_min.clone(),
            upper: hull_max.clone(),
            points,
            threshold: 0.0,
            test_instance,
            child_seed: 0,
            hull_min,
            hull_max,
        })
    }

    pub fn dim(&self) -> usize {
        self.test_instance.len()
    }

    pub fn box_lo(&self) -> f64 {
        self.lower.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn box_hi(&self) -> f64 {
        self.upper.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn membership(&self, q: &[f64], eps: f64) -> Result<MembershipResult> {
        lp::feasible_convex_combination(&self.points, q, eps)
    }

    /// Whether `q` lies in the convex hull of the hyperstructure's points.
    pub fn contains(&self, q: &[f64], eps: f64) -> Result<bool> {
        if q.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: q.len(),
            });
        }
        // A coordinate beyond the hull's extent by more than the inclusion band
        // forces a phase-1 residual above it, so the LP would say outside too.
        let scale = self.scale_for(q);
        let band = BOUNDARY_FACTOR * eps * scale;
        let clearly_out = q
            .iter()
            .zip(self.hull_min.iter().zip(&self.hull_max))
            .any(|(&v, (&lo, &hi))| v < lo - band || v > hi + band);
        if clearly_out {
            return Ok(false);
        }
        Ok(self.membership(q, eps)?.inside)
    }

    fn scale_for(&self, q: &[f64]) -> f64 {
        q.iter()
            .zip(self.hull_min.iter().zip(&self.hull_max))
            .map(|(&v, (&lo, &hi))| (v - lo).abs().max((hi - v).abs()))
            .fold(1.0, f64::max)
    }
}

fn extent(points: &[Vec<f64>], dim: usize) -> (Vec<f64>, Vec<f64>) {
    let mut min = vec![f64::INFINITY; dim];
    let mut max = vec![f64::NEG_INFINITY; dim];
    for p in points {
        for (j, &v) in p.iter().enumerate() {
            min[j] = min[j].min(v);
            max[j] = max[j].max(v);
        }
    }
    (min, max)
}

/// Options for [`build_hyperstructure`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct HullShape {
    /// Number of random points; `None` means `4n - 1`.
    pub point_count: Option<usize>,
    pub box_mode: BoxMode,
    /// Redraw (up to [`ENCLOSURE_ATTEMPTS`] times) until the test instance is inside.
    pub ensure_enclosure: bool,
}

/// Samples a hyperstructure around `x` from the generator's current position.
pub fn build_hyperstructure(
    x: &[f64],
    threshold: f64,
    shape: &HullShape,
    rng: &mut Mt19937,
) -> Result<Hyperstructure> {
    let dim = x.len();
    let (lo, hi) = bounding_interval(x, threshold)?;
    let point_count = shape
        .point_count
        .unwrap_or_else(|| default_point_count(dim));
    if point_count < dim + 1 {
        return Err(Error::InvalidArgument(format!(
            "{point_count} hull points cannot span {dim} dimensions (need at least {})",
            dim + 1
        )));
    }
    let (lower, upper) = match shape.box_mode {
        BoxMode::Shared => (vec![lo; dim], vec![hi; dim]),
        BoxMode::PerDimension => (
            x.iter().map(|v| v - threshold).collect(),
            x.iter().map(|v| v + threshold).collect(),
        ),
    };
    if let Some(j) = (0..dim).find(|&j| lower[j] >= upper[j]) {
        return Err(Error::ZeroVolumeBox {
            lo: lower[j],
            hi: upper[j],
        });
    }

    let attempts = if shape.ensure_enclosure {
        ENCLOSURE_ATTEMPTS
    } else {
        1
    };
    for _ in 0..attempts {
        let points = rng.sample_ranges(&lower, &upper, point_count)?;
        let (hull_min, hull_max) = extent(&points, dim);
        let h = Hyperstructure {
            points,
            lower: lower.clone(),
            upper: upper.clone(),
            threshold,
            test_instance: x.to_vec(),
            child_seed: rng.seed(),
            hull_min,
            hull_max,
        };
        if !shape.ensure_enclosure || h.contains(x, lp::EPS_GEO)? {
            return Ok(h);
        }
    }
    Err(Error::EnclosureFailed { attempts })
}

/// Corners of an axis-aligned box `margin` beyond the extent of `points`
/// (and `x`). Its hull contains every one of them strictly.
pub fn enclosing_hyperstructure(
    points: &[Vec<f64>],
    x: &[f64],
    margin: f64,
) -> Result<Hyperstructure> {
    let dim = x.len();
    let mut all: Vec<Vec<f64>> = points.to_vec();
    all.push(x.to_vec());
    if let Some(p) = all.iter().find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: p.len(),
        });
    }
    let (min, max) = extent(&all, dim);
    let corners = (0..1usize << dim)
        .map(|mask| {
            (0..dim)
                .map(|j| {
                    let pad = margin + 0.1 * (max[j] - min[j]);
                    if mask & (1 << j) == 0 {
                        min[j] - pad
                    } else {
                        max[j] + pad
                    }
                })
                .collect()
        })
        .collect();
    Hyperstructure::from_points(corners, x.to_vec())
}

/// Determinant of `[[1, a, b], [1, m, n], [1, x, y]]` for `A = (a, b)`,
/// `B = (m, n)`, `C = (x, y)`, by cofactor expansion along the first column.
pub fn orientation_det(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] * c[1] - b[1] * c[0]) - (a[0] * c[1] - a[1] * c[0]) + (a[0] * b[1] - a[1] * b[0])
}

/// `(n - b)(x - m) - (y - n)(m - a)`: zero iff segments AB and BC share a slope.
/// Algebraically equal to `-orientation_det`.
pub fn slope_difference(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[1] - a[1]) * (c[0] - b[0]) - (c[1] - b[1]) * (b[0] - a[0])
}

/// True when the three points are collinear within `eps` relative to the
/// squared coordinate magnitude. `eps = 0` demands an exact zero.
pub fn collinear3(a: [f64; 2], b: [f64; 2], c: [f64; 2], eps: f64) -> bool {
    let scale = [a, b, c]
        .iter()
        .flat_map(|p| p.iter())
        .fold(1.0f64, |s, v| s.max(v.abs()));
    slope_difference(a, b, c).abs() <= eps * scale * scale
}
