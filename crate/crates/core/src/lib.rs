//! Fiber-component histograms for time-varying multifield volume data.
//!
//! A frame holds `r` scalar fields sampled on a regular 3-D grid. The grid is
//! split into tetrahedra, the range space into axis-aligned bins, and each
//! bin reports how many connected pieces of the domain map into it
//! ([`extract::extract_fiber_components`]). Histograms of consecutive frames
//! are compared with a family of distances ([`metrics`]) including one that
//! restricts attention to bins touched by singular mesh elements
//! ([`jacobi`]).

pub mod cli;
pub mod clip;
pub mod datagen;
pub mod distribution;
pub mod error;
pub mod extract;
pub mod io;
pub mod jacobi;
pub mod mesh;
pub mod metrics;
pub mod model;
pub mod pipeline;
pub mod quantize;
pub mod report;
pub mod svg;

pub use error::{Error, Result};
pub use extract::{extract_fiber_components, BinStats, FiberComponentHistogram};
pub use metrics::DistanceConfig;
pub use model::{FrameSeries, GridDomain, MultifieldFrame, ScalarField};
pub use pipeline::{compute_distance_series, DistanceSeries, Metric, PipelineConfig};
pub use quantize::{BinIndex, Binning, RangeQuantization};
