//! RBF-kernel SVM trained with SMO, one-vs-one for more than two classes.
//!
//! The binary solver works on the dual
//! `min 1/2 a'Qa - e'a  s.t. 0 <= a <= C, y'a = 0` with `Q_ij = y_i y_j K_ij`,
//! picking the maximal-violating pair with second-order working-set
//! selection, and stops once the KKT gap drops below `tol`.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::Label;

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub gamma: f64,
    pub c: f64,
    pub tol: f64,
    /// Iteration budget is `max_passes * n` SMO steps per binary problem.
    pub max_passes: usize,
}

impl SvmParams {
    pub fn new(gamma: f64) -> Self {
        Self {
            gamma,
            c: 1.0,
            tol: 1e-3,
            max_passes: 100,
        }
    }
}

pub fn rbf_kernel(a: &[f64], b: &[f64], gamma: f64) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    if !(gamma >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "gamma {gamma} must be non-negative"
        )));
    }
    Ok(rbf(a, b, gamma))
}

fn rbf(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * d2).exp()
}

/// One pairwise classifier: positive decision means `positive`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinarySvm {
    pub positive: Label,
    pub negative: Label,
    pub support_vectors: Vec<Vec<f64>>,
    /// Row of each support vector in the training set.
    pub support_indices: Vec<usize>,
    /// `alpha_i * y_i` per support vector.
    pub dual_coef: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
}

impl BinarySvm {
    pub fn decision(&self, x: &[f64], gamma: f64) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.dual_coef)
            .map(|(sv, &c)| c * rbf(sv, x, gamma))
            .sum::<f64>()
            + self.bias
    }

    /// `alpha` of training row `row`, zero for non-support vectors.
    pub fn alpha_of(&self, row: usize) -> f64 {
        self.support_indices
            .iter()
            .position(|&i| i == row)
            .map_or(0.0, |p| self.dual_coef[p].abs())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub params: SvmParams,
    pub dim: usize,
    pub n_classes: usize,
    pub pairwise: Vec<BinarySvm>,
}

/// Dual objective trajectory recorded during training (`sum a - 1/2 a'Qa`).
pub type DualTrace = Vec<f64>;

pub fn train_svm(train: &Dataset, params: SvmParams) -> Result<SvmModel> {
    train_inner(train, params, None)
}

/// Trains like [`train_svm`], also returning the dual objective after every
/// SMO step of every pairwise problem.
pub fn train_svm_traced(train: &Dataset, params: SvmParams) -> Result<(SvmModel, Vec<DualTrace>)> {
    let mut traces = Vec::new();
    let model = train_inner(train, params, Some(&mut traces))?;
    Ok((model, traces))
}

fn train_inner(
    train: &Dataset,
    params: SvmParams,
    mut traces: Option<&mut Vec<DualTrace>>,
) -> Result<SvmModel> {
    if !(params.gamma >= 0.0) || !(params.c > 0.0) || !(params.tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "gamma {}, C {} and tol {} must be positive",
            params.gamma, params.c, params.tol
        )));
    }
    let present: Vec<Label> = train
        .class_counts()
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > 0)
        .map(|(c, _)| c)
        .collect();
    if present.len() < 2 {
        return Err(Error::SingleClass);
    }

    let mut pairwise = Vec::new();
    for (i, &a) in present.iter().enumerate() {
        for &b in &present[i + 1..] {
            let rows: Vec<usize> = (0..train.len())
                .filter(|&r| train.labels[r] == a || train.labels[r] == b)
                .collect();
            let x: Vec<&[f64]> = rows.iter().map(|&r| train.features[r].as_slice()).collect();
            let y: Vec<f64> = rows
                .iter()
                .map(|&r| if train.labels[r] == a { 1.0 } else { -1.0 })
                .collect();
            let mut trace = traces.as_ref().map(|_| Vec::new());
            let sol = solve_binary(&x, &y, &params, trace.as_mut());
            if let (Some(all), Some(t)) = (traces.as_deref_mut(), trace) {
                all.push(t);
            }

            let mut model = BinarySvm {
                positive: a,
                negative: b,
                support_vectors: Vec::new(),
                support_indices: Vec::new(),
                dual_coef: Vec::new(),
                bias: -sol.rho,
                iterations: sol.iterations,
            };
            for (k, &alpha) in sol.alpha.iter().enumerate() {
                if alpha > 0.0 {
                    model.support_vectors.push(x[k].to_vec());
                    model.support_indices.push(rows[k]);
                    model.dual_coef.push(alpha * y[k]);
                }
            }
            pairwise.push(model);
        }
    }
    Ok(SvmModel {
        params,
        dim: train.dim(),
        n_classes: train.n_classes(),
        pairwise,
    })
}

struct Solution {
    alpha: Vec<f64>,
    rho: f64,
    iterations: usize,
}

fn solve_binary(
    x: &[&[f64]],
    y: &[f64],
    params: &SvmParams,
    mut trace: Option<&mut DualTrace>,
) -> Solution {
    let n = x.len();
    let c = params.c;
    let kernel: Vec<f64> = {
        let mut k = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = rbf(x[i], x[j], params.gamma);
                k[i * n + j] = v;
                k[j * n + i] = v;
            }
        }
        k
    };
    let q = |i: usize, j: usize| y[i] * y[j] * kernel[i * n + j];

    let mut alpha = vec![0.0; n];
    // Gradient of the dual objective: Q a - e.
    let mut grad = vec![-1.0; n];
    let is_upper = |a: f64| a >= c;
    let is_lower = |a: f64| a <= 0.0;
    let in_up = |t: usize, a: f64| {
        if y[t] > 0.0 {
            !is_upper(a)
        } else {
            !is_lower(a)
        }
    };
    let in_low = |t: usize, a: f64| {
        if y[t] > 0.0 {
            !is_lower(a)
        } else {
            !is_upper(a)
        }
    };

    let budget = params.max_passes.max(1) * n.max(1);
    let mut iterations = 0;
    while iterations < budget {
        // i: maximal -y G over I_up.
        let mut g_max = f64::NEG_INFINITY;
        let mut i_sel = None;
        for t in 0..n {
            if in_up(t, alpha[t]) && -y[t] * grad[t] >= g_max {
                g_max = -y[t] * grad[t];
                i_sel = Some(t);
            }
        }
        let Some(i) = i_sel else { break };

        // j: second-order choice over I_low; also track min -y G for the gap.
        let mut g_min = f64::INFINITY;
        let mut best_obj = f64::INFINITY;
        let mut j_sel = None;
        for t in 0..n {
            if !in_low(t, alpha[t]) {
                continue;
            }
            let v = -y[t] * grad[t];
            g_min = g_min.min(v);
            let b = g_max - v;
            if b > 0.0 {
                let mut a = kernel[i * n + i] + kernel[t * n + t] - 2.0 * kernel[i * n + t];
                if a <= 0.0 {
                    a = TAU;
                }
                let obj = -(b * b) / a;
                if obj <= best_obj {
                    best_obj = obj;
                    j_sel = Some(t);
                }
            }
        }
        if g_max - g_min < params.tol {
            break;
        }
        let Some(j) = j_sel else { break };
        iterations += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        let mut quad = kernel[i * n + i] + kernel[j * n + j] - 2.0 * kernel[i * n + j];
        if quad <= 0.0 {
            quad = TAU;
        }
        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += q(t, i) * di + q(t, j) * dj;
        }
        if let Some(tr) = trace.as_deref_mut() {
            // f(a) = 1/2 a'Qa - e'a = 1/2 sum a_t (G_t - 1); dual value is -f.
            let f: f64 = alpha
                .iter()
                .zip(&grad)
                .map(|(a, g)| a * (g - 1.0))
                .sum::<f64>()
                * 0.5;
            tr.push(-f);
        }
    }

    Solution {
        rho: compute_rho(&alpha, &grad, y, c),
        alpha,
        iterations,
    }
}

fn compute_rho(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut free_sum = 0.0;
    let mut free = 0usize;
    for t in 0..alpha.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            free_sum += yg;
        }
    }
    if free > 0 {
        free_sum / free as f64
    } else {
        (ub + lb) / 2.0
    }
}

impl SvmModel {
    pub fn predict_one(&self, x: &[f64]) -> Result<Label> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        let mut votes = vec![0usize; self.n_classes];
        for m in &self.pairwise {
            if m.decision(x, self.params.gamma) > 0.0 {
                votes[m.positive] += 1;
            } else {
                votes[m.negative] += 1;
            }
        }
        Ok(argmax_smallest(&votes))
    }

    pub fn predict(&self, xs: &[Vec<f64>]) -> Result<Vec<Label>> {
        xs.iter().map(|x| self.predict_one(x)).collect()
    }

    /// Training rows (by index into `train`) that violate the KKT condition of
    /// their alpha bucket by more than `tol`, as `(pair index, row, y*f(x))`.
    pub fn kkt_violations(&self, train: &Dataset, tol: f64) -> Vec<(usize, usize, f64)> {
        let c = self.params.c;
        let mut out = Vec::new();
        for (p, m) in self.pairwise.iter().enumerate() {
            for row in 0..train.len() {
                let label = train.labels[row];
                if label != m.positive && label != m.negative {
                    continue;
                }
                let y = if label == m.positive { 1.0 } else { -1.0 };
                let margin = y * m.decision(&train.features[row], self.params.gamma);
                let alpha = m.alpha_of(row);
                let ok = if alpha <= 0.0 {
                    margin >= 1.0 - tol
                } else if alpha >= c {
                    margin <= 1.0 + tol
                } else {
                    (margin - 1.0).abs() <= tol
                };
                if !ok {
                    out.push((p, row, margin));
                }
            }
        }
        out
    }
}

fn argmax_smallest(votes: &[usize]) -> Label {
    let mut best = 0;
    for (label, &v) in votes.iter().enumerate() {
        if v > votes[best] {
            best = label;
        }
    }
    best
}
