//! Randomized hyperstructure convex hull k-NN.
//!
//! For every test instance a cloud of `4n - 1` uniform random points is drawn
//! from a box that extends the instance's coordinate range by a `threshold`.
//! Only training points inside the convex hull of that cloud compete as
//! neighbors; everything outside is pushed to an unreachable distance before
//! the usual majority vote. Hull membership is decided as a linear
//! feasibility problem solved with a phase-1 simplex.
//!
//! The crate also carries the baselines the method is compared against
//! (plain k-NN and an SMO-trained RBF SVM) and the evaluation harness used to
//! tune `k`/`threshold` and aggregate seeded benchmark trials.

pub mod dataset;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod knn;
pub mod lp;
pub mod rng;
pub mod svm;

pub use dataset::{DataFormat, Dataset, MinMaxScaler, Split};
pub use error::{Error, Result};
pub use eval::{
    BenchmarkPlan, ClassifierSpec, EvalReport, GridCell, GridResult, Params, TrialStats,
};
pub use geometry::{BoxMode, HullShape, Hyperstructure};
pub use knn::{
    GateSource, HullParams, KnnConfig, KnnMode, KnnModel, Neighbor, NeighborDistance, NeighborList,
    VotePolicy,
};
pub use lp::MembershipResult;
pub use rng::Mt19937;
pub use svm::{SvmModel, SvmParams};

/// Class identifier: a small 0-based integer.
pub type Label = usize;
