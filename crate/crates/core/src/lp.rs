//! Convex-hull membership as a linear feasibility problem.
//!
//! `q` lies in `conv{p_1..p_m}` iff there is `alpha >= 0` with
//! `sum(alpha) = 1` and `sum(alpha_i * (p_i - q)) = 0`. We add one artificial
//! variable per equality row and minimize their sum with a dense phase-1
//! simplex; the optimum is zero exactly when the system is feasible.
//!
//! Before solving, points are translated by `-q` and divided by
//! `scale = max(1, max |p_ij - q_j|)`, so the residual is a relative quantity
//! regardless of feature magnitude.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative geometric tolerance on the phase-1 residual.
pub const EPS_GEO: f64 = 1e-9;
/// Tolerance on the convex-combination coefficients in certificate checks.
pub const EPS_ALPHA: f64 = 1e-7;
/// Residuals up to this multiple of the tolerance count as inside (closed hull).
pub const BOUNDARY_FACTOR: f64 = 2.0;

const PIVOT_TOL: f64 = 1e-12;
const COST_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipResult {
    pub inside: bool,
    /// Convex-combination certificate, present when `inside`.
    pub alpha: Option<Vec<f64>>,
    /// Phase-1 optimum in scaled units (sum of artificial variables).
    pub residual: f64,
    /// The `scale` used for preconditioning.
    pub scale: f64,
    pub pivots: usize,
}

impl MembershipResult {
    /// Largest coordinate error of `sum(alpha_i * p_i) - q`, or `None` when outside.
    pub fn reconstruction_error<P: AsRef<[f64]>>(&self, points: &[P], q: &[f64]) -> Option<f64> {
        let alpha = self.alpha.as_ref()?;
        let mut err = 0.0f64;
        for (j, &qj) in q.iter().enumerate() {
            let combo: f64 = points
                .iter()
                .zip(alpha)
                .map(|(p, &a)| a * p.as_ref()[j])
                .sum();
            err = err.max((combo - qj).abs());
        }
        Some(err)
    }
}

/// Decides whether `q` is a convex combination of `points`.
///
/// `eps` is the relative feasibility tolerance; residuals up to
/// `BOUNDARY_FACTOR * eps` are reported inside. Bland's rule guarantees
/// termination; a pivot budget guards against floating-point stalls.
pub fn feasible_convex_combination<P: AsRef<[f64]>>(
    points: &[P],
    q: &[f64],
    eps: f64,
) -> Result<MembershipResult> {
    if points.is_empty() {
        return Err(Error::InvalidArgument(
            "hull needs at least one point".into(),
        ));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance {eps} must be positive"
        )));
    }
    let dim = q.len();
    if q.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    for p in points {
        let p = p.as_ref();
        if p.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.len(),
            });
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
    }

    let mut scale = 1.0f64;
    for p in points {
        for (a, b) in p.as_ref().iter().zip(q) {
            scale = scale.max((a - b).abs());
        }
    }

    let mut tableau = Tableau::new(points, q, scale);
    let pivots = tableau.solve()?;
    let residual = tableau.residual();
    let inside = residual <= BOUNDARY_FACTOR * eps;
    Ok(MembershipResult {
        inside,
        alpha: inside.then(|| tableau.primal()),
        residual,
        scale,
        pivots,
    })
}

/// Dense tableau: `rows` constraint rows over `m` structural columns plus one
/// artificial column per row, with the right-hand side in the last column.
struct Tableau {
    rows: usize,
    m: usize,
    width: usize,
    cells: Vec<f64>,
    /// Reduced costs of the phase-1 objective, one per column (rhs slot unused).
    cost: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn new<P: AsRef<[f64]>>(points: &[P], q: &[f64], scale: f64) -> Self {
        let dim = q.len();
        let m = points.len();
        let rows = dim + 1;
        let width = m + rows + 1;
        let mut cells = vec![0.0; rows * width];
        for (i, p) in points.iter().enumerate() {
            for (j, (&pj, &qj)) in p.as_ref().iter().zip(q).enumerate() {
                cells[j * width + i] = (pj - qj) / scale;
            }
            cells[dim * width + i] = 1.0;
        }
        for r in 0..rows {
            cells[r * width + m + r] = 1.0;
        }
        cells[dim * width + width - 1] = 1.0;

        // Artificial basis: reduced cost of column c is -sum over rows.
        let mut cost = vec![0.0; width];
        for r in 0..rows {
            for c in 0..m {
                cost[c] -= cells[r * width + c];
            }
        }
        Self {
            rows,
            m,
            width,
            cells,
            cost,
            basis: (m..m + rows).collect(),
        }
    }

    fn at(&self, r: usize, c: usize) -> f64 {
        self.cells[r * self.width + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.width - 1)
    }

    fn solve(&mut self) -> Result<usize> {
        let limit = 50 * (self.m + self.rows) + 100;
        let mut pivots = 0;
        // Bland: lowest-index improving column, lowest-index leaving variable on ties.
        while let Some(enter) = (0..self.m).find(|&c| self.cost[c] < -COST_TOL) {
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, enter);
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(r).max(0.0) / a;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((best, best_ratio)) => {
                        if ratio < best_ratio
                            || (ratio == best_ratio && self.basis[r] < self.basis[best])
                        {
                            Some((r, ratio))
                        } else {
                            Some((best, best_ratio))
                        }
                    }
                };
            }
            // Phase 1 is bounded below by zero, so an improving column always
            // has a positive entry; its absence means the cost is roundoff.
            let Some((pivot_row, _)) = leave else {
                self.cost[enter] = 0.0;
                continue;
            };
            self.pivot(pivot_row, enter);
            pivots += 1;
            if pivots > limit {
                return Err(Error::PivotLimit(limit));
            }
        }
        Ok(pivots)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width;
        let p = self.at(row, col);
        for c in 0..w {
            self.cells[row * w + c] /= p;
        }
        self.cells[row * w + col] = 1.0;
        for r in 0..self.rows {
            if r == row {
                continue;
            }
            let factor = self.at(r, col);
            if factor == 0.0 {
                continue;
            }
            for c in 0..w {
                let v = self.cells[row * w + c];
                self.cells[r * w + c] -= factor * v;
            }
            self.cells[r * w + col] = 0.0;
        }
        let factor = self.cost[col];
        for c in 0..w - 1 {
            self.cost[c] -= factor * self.cells[row * w + c];
        }
        self.cost[col] = 0.0;
        self.basis[row] = col;
    }

    fn residual(&self) -> f64 {
        (0..self.rows)
            .filter(|&r| self.basis[r] >= self.m)
            .map(|r| self.rhs(r).max(0.0))
            .sum()
    }

    fn primal(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.m];
        for r in 0..self.rows {
            if self.basis[r] < self.m {
                x[self.basis[r]] = self.rhs(r).max(0.0);
            }
        }
        x
    }
}
