//! shaperet-core — silhouette shape description and cosine-ranked retrieval.
//!
//! The pipeline stages, in order:
//!
//! 1. **netpbm** – P2/P3/P5/P6 decoding to grayscale, mask encoding.
//! 2. **threshold / segmentation** – silhouette extraction, either by
//!    histogram thresholding or by a two-phase active-contour evolution,
//!    with largest-component cleanup.
//! 3. **grid** – translation/scale normalization onto a fixed square grid.
//! 4. **descriptor** – centroid from silhouette moments, foreground counts
//!    on square rings around it, then the matchable vector: the raw
//!    normalized histogram or a Gaussian transform with a plug-in bandwidth.
//! 5. **retrieval** – cosine scoring and ranking over a persisted database.
//! 6. **evaluation / dataset** – recall/precision/effectiveness, bull's eye
//!    score, recall-precision curves, and a synthetic labeled corpus
//!    generator for benchmarks.

pub mod dataset;
pub mod descriptor;
pub mod error;
pub mod evaluation;
pub mod grid;
pub mod image;
pub mod netpbm;
pub mod retrieval;
pub mod rng;
pub mod segmentation;
pub mod threshold;

pub use dataset::{generate_dataset, DatasetConfig, DatasetItem};
pub use descriptor::{
    describe, Bandwidth, Centroid, Descriptor, DescriptorConfig, DescriptorMode, RingCounts,
    DEFAULT_BANDWIDTH_CONSTANT, DEFAULT_GRID,
};
pub use error::{Error, Result};
pub use evaluation::{EvalCounts, EvalReport, LabeledQuery};
pub use grid::normalize_to_grid;
pub use image::{BinaryMask, GrayImage};
pub use retrieval::{
    cosine_similarity, load_db, rank, save_db, DescriptorDatabase, DescriptorRecord, RankedResult,
};
pub use segmentation::{chan_vese, largest_component, ChanVeseParams, InitStyle, Segmentation};
pub use threshold::{binarize, ThresholdMethod};
