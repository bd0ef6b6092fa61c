//! Train tree-based classifiers on tabular data, extract per-feature
//! importance through four explainability methods (MDI, permutation
//! importance, tree SHAP, LIME), discretize the scores into ordinal
//! relevance bands, and quantify agreement between methods and human
//! reference rankings with the Weighted Jaccard similarity coefficient.
//!
//! See the `examples/` directory for runnable walkthroughs of each
//! capability and the `treexplain` binary for the file-based pipeline.

pub mod concordance;
pub mod data;
pub mod error;
pub mod explain;
pub mod metrics;
pub mod model;
pub mod pipeline;

pub use error::{Error, Result};
