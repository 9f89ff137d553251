// SPDX-License-Identifier: MIT OR Apache-2.0

//! Graph-based change-point detection on distance matrices.
//!
//! Observations (vectors, graphs or sampled functions) are reduced to a
//! pairwise distance matrix; scan statistics compare within-phase and
//! between-phase distance averages at every candidate split, with p-values
//! from a Gaussian-bridge null, an Edgeworth-corrected tail, or permutation.

pub mod cli;
pub mod data;
pub mod detect;
pub mod distance;
pub mod error;
pub mod io;
pub mod kernel;
pub mod null;
pub mod rng;
pub mod scan;
pub mod segment;
pub mod sim;

pub use data::{DistanceMatrix, Graph, Observation, ScanWindow, Sequence, WindowBounds};
pub use detect::{detect, Detection, Diagnostics, EngineConfig};
pub use distance::{build_distance_matrix, Metric};
pub use error::{CpdError, Result};
pub use scan::{moments, scan_subinterval, scan_sums, Moments, ScanProfile, StatValue, Statistic};
pub use null::{CorrectionVariant, NullModel, PValue, PValueMethod};
pub use segment::{binary_segment, changepoints_to_partition, rand_index, SegmentationConfig, SegmentationTree};
pub use sim::{run_experiment, ExperimentReport, Generator, ScenarioSpec};
