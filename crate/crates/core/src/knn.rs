//! Classic k-NN and the hull-gated variant.
//!
//! In hull mode each test instance gets its own hyperstructure. Training
//! points inside its convex hull keep their Euclidean distance; the rest get
//! [`NeighborDistance::Unreachable`]. The first `k` entries of the sorted list
//! vote, so unreachable entries take part in the vote whenever fewer than `k`
//! training points fall inside (unless [`VotePolicy::HullOnly`] is chosen).

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::geometry::{self, BoxMode, HullShape, Hyperstructure};
use crate::lp::EPS_GEO;
use crate::rng::Mt19937;
use crate::Label;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum NeighborDistance {
    Finite(f64),
    /// Sorts after every finite distance.
    Unreachable,
}

impl NeighborDistance {
    pub fn is_finite(self) -> bool {
        matches!(self, NeighborDistance::Finite(_))
    }

    pub fn value(self) -> Option<f64> {
        match self {
            NeighborDistance::Finite(d) => Some(d),
            NeighborDistance::Unreachable => None,
        }
    }
}

impl Eq for NeighborDistance {}

impl PartialOrd for NeighborDistance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for NeighborDistance {
    fn cmp(&self, other: &Self) -> Ordering {
        use NeighborDistance::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.total_cmp(b),
            (Finite(_), Unreachable) => Ordering::Less,
            (Unreachable, Finite(_)) => Ordering::Greater,
            (Unreachable, Unreachable) => Ordering::Equal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Neighbor {
    pub train_index: usize,
    pub distance: NeighborDistance,
}

/// The `k` nearest entries, ascending by distance then training index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborList {
    pub entries: Vec<Neighbor>,
    pub k: usize,
}

impl NeighborList {
    fn from_distances(distances: Vec<NeighborDistance>, k: usize) -> Self {
        let mut entries: Vec<Neighbor> = distances
            .into_iter()
            .enumerate()
            .map(|(train_index, distance)| Neighbor {
                train_index,
                distance,
            })
            .collect();
        let by_rank = |a: &Neighbor, b: &Neighbor| {
            a.distance
                .cmp(&b.distance)
                .then(a.train_index.cmp(&b.train_index))
        };
        if k < entries.len() {
            entries.select_nth_unstable_by(k, by_rank);
            entries.truncate(k);
        }
        entries.sort_unstable_by(by_rank);
        Self { entries, k }
    }

    pub fn reachable(&self) -> usize {
        self.entries
            .iter()
            .filter(|n| n.distance.is_finite())
            .count()
    }
}

/// How votes are collected when fewer than `k` training points are in the hull.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VotePolicy {
    /// All `k` entries vote, unreachable ones included.
    #[default]
    Literal,
    /// Only in-hull entries vote; with none in the hull, fall back to classic k-NN.
    HullOnly,
}

/// Where the gating hull comes from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateSource {
    /// Random hyperstructure around each test instance.
    #[default]
    Random,
    /// Corners of a box enclosing the training set and the test instance.
    /// Every training point is then in the hull; used for equivalence checks.
    Enclosing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HullParams {
    pub threshold: f64,
    pub point_count: Option<usize>,
    pub box_mode: BoxMode,
    pub ensure_enclosure: bool,
    pub vote: VotePolicy,
    pub gate: GateSource,
}

impl HullParams {
    pub fn new(threshold: f64) -> Self {
        Self {
            threshold,
            point_count: None,
            box_mode: BoxMode::Shared,
            ensure_enclosure: false,
            vote: VotePolicy::Literal,
            gate: GateSource::Random,
        }
    }

    fn shape(&self) -> HullShape {
        HullShape {
            point_count: self.point_count,
            box_mode: self.box_mode,
            ensure_enclosure: self.ensure_enclosure,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KnnMode {
    Classic,
    Hull(HullParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnnConfig {
    pub k: usize,
    pub mode: KnnMode,
    /// Test instance `i` draws its hyperstructure from substream `i` of this seed.
    pub base_seed: u32,
}

impl KnnConfig {
    pub fn classic(k: usize) -> Self {
        Self {
            k,
            mode: KnnMode::Classic,
            base_seed: 0,
        }
    }

    pub fn hull(k: usize, params: HullParams, base_seed: u32) -> Self {
        Self {
            k,
            mode: KnnMode::Hull(params),
            base_seed,
        }
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(sq_dist(a, b).sqrt())
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Most frequent label among the entries; ties go to the smallest label.
pub fn majority_vote(neighbors: &[Neighbor], labels: &[Label]) -> Result<Label> {
    if neighbors.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot vote over zero neighbors".into(),
        ));
    }
    let n_labels = labels.iter().max().map_or(0, |&m| m + 1);
    let mut counts = vec![0usize; n_labels];
    for n in neighbors {
        counts[labels[n.train_index]] += 1;
    }
    // max_by_key keeps the last maximum; scan in reverse to keep the smallest label.
    let (label, _) = counts
        .iter()
        .enumerate()
        .rev()
        .max_by_key(|&(_, &c)| c)
        .expect("non-empty");
    Ok(label)
}

/// Per-instance outcome of a hull-mode prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub labels: Vec<Label>,
    /// Training points inside each instance's hull (hull mode only).
    pub in_hull: Option<Vec<usize>>,
}

#[derive(Debug, Clone)]
pub struct KnnModel {
    train: Dataset,
    config: KnnConfig,
}

impl KnnModel {
    pub fn fit(train: Dataset, config: KnnConfig) -> Result<Self> {
        if config.k == 0 || config.k > train.len() {
            return Err(Error::InvalidArgument(format!(
                "k = {} outside 1..={}",
                config.k,
                train.len()
            )));
        }
        if let KnnMode::Hull(p) = &config.mode {
            if !(p.threshold >= 0.0) || !p.threshold.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "threshold {} must be finite and non-negative",
                    p.threshold
                )));
            }
        }
        Ok(Self { train, config })
    }

    pub fn config(&self) -> &KnnConfig {
        &self.config
    }

    pub fn train(&self) -> &Dataset {
        &self.train
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.train.len() {
            return Err(Error::InvalidArgument(format!(
                "k = {k} outside 1..={}",
                self.train.len()
            )));
        }
        Ok(())
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.train.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.train.dim(),
                found: x.len(),
            });
        }
        Ok(())
    }

    pub fn neighbors_classic(&self, x: &[f64], k: usize) -> Result<NeighborList> {
        self.check_k(k)?;
        self.check_dim(x)?;
        let distances = self
            .train
            .features
            .iter()
            .map(|p| NeighborDistance::Finite(sq_dist(p, x).sqrt()))
            .collect();
        Ok(NeighborList::from_distances(distances, k))
    }

    /// Gates the training set with `hull` and returns the first `k` entries.
    pub fn neighbors_gated(
        &self,
        x: &[f64],
        k: usize,
        hull: &Hyperstructure,
    ) -> Result<(NeighborList, usize)> {
        self.check_k(k)?;
        self.check_dim(x)?;
        let mut inside = 0;
        let distances = self
            .train
            .features
            .iter()
            .map(|p| {
                Ok(if hull.contains(p, EPS_GEO)? {
                    inside += 1;
                    NeighborDistance::Finite(sq_dist(p, x).sqrt())
                } else {
                    NeighborDistance::Unreachable
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((NeighborList::from_distances(distances, k), inside))
    }

    /// Builds the hyperstructure for `x` from `rng` and gates with it.
    /// Returns the list and the number of training points in the hull.
    pub fn neighbors_hull(
        &self,
        x: &[f64],
        k: usize,
        params: &HullParams,
        rng: &mut Mt19937,
    ) -> Result<(NeighborList, usize)> {
        self.check_dim(x)?;
        let hull = match params.gate {
            GateSource::Random => {
                geometry::build_hyperstructure(x, params.threshold, &params.shape(), rng)?
            }
            GateSource::Enclosing => {
                geometry::enclosing_hyperstructure(&self.train.features, x, 1.0)?
            }
        };
        self.neighbors_gated(x, k, &hull)
    }

    /// Label for the test instance with stable identity `instance`.
    pub fn predict_one(&self, x: &[f64], instance: u64) -> Result<(Label, Option<usize>)> {
        let k = self.config.k;
        match &self.config.mode {
            KnnMode::Classic => {
                let list = self.neighbors_classic(x, k)?;
                Ok((majority_vote(&list.entries, &self.train.labels)?, None))
            }
            KnnMode::Hull(params) => {
                let mut rng = Mt19937::child(self.config.base_seed, instance);
                let (list, inside) = self.neighbors_hull(x, k, params, &mut rng)?;
                let label = match params.vote {
                    VotePolicy::Literal => majority_vote(&list.entries, &self.train.labels)?,
                    VotePolicy::HullOnly => {
                        let reachable: Vec<Neighbor> = list
                            .entries
                            .iter()
                            .copied()
                            .filter(|n| n.distance.is_finite())
                            .collect();
                        if reachable.is_empty() {
                            let classic = self.neighbors_classic(x, k)?;
                            majority_vote(&classic.entries, &self.train.labels)?
                        } else {
                            majority_vote(&reachable, &self.train.labels)?
                        }
                    }
                };
                Ok((label, Some(inside)))
            }
        }
    }

    pub fn predict(&self, xs: &[Vec<f64>]) -> Result<Vec<Label>> {
        Ok(self.predict_detailed(xs)?.labels)
    }

    /// Predicts every row; row `i` uses substream `i`. Rows are evaluated in
    /// parallel with results identical to a sequential pass.
    pub fn predict_detailed(&self, xs: &[Vec<f64>]) -> Result<Prediction> {
        let ids: Vec<u64> = (0..xs.len() as u64).collect();
        self.predict_with_ids(xs, &ids)
    }

    /// As [`predict_detailed`](Self::predict_detailed) with explicit instance identities.
    pub fn predict_with_ids(&self, xs: &[Vec<f64>], ids: &[u64]) -> Result<Prediction> {
        if xs.len() != ids.len() {
            return Err(Error::InvalidArgument(format!(
                "{} instances but {} identities",
                xs.len(),
                ids.len()
            )));
        }
        let results = xs
            .par_iter()
            .zip(ids.par_iter())
            .map(|(x, &id)| self.predict_one(x, id))
            .collect::<Result<Vec<_>>>()?;
        let labels = results.iter().map(|r| r.0).collect();
        let in_hull = match self.config.mode {
            KnnMode::Classic => None,
            KnnMode::Hull(_) => Some(results.iter().map(|r| r.1.unwrap_or(0)).collect()),
        };
        Ok(Prediction { labels, in_hull })
    }
}
