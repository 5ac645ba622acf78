//! Latent physiological state discovery from multivariate biomarker panels.
//!
//! The crate is organised along the stages of the analysis:
//!
//! - [`dataset`]: CSV ingestion and per-column z-score normalization
//! - [`screening`]: Euclidean outlier screening against the global centroid
//! - [`clustering`]: Ward agglomerative clustering, K-Means baseline,
//!   silhouette model selection and multi-seed stability
//! - [`gmm`]: diagonal-covariance Gaussian mixtures fitted by EM, used to
//!   sample synthetic cohorts
//! - [`projection`]: PCA for 2-D structural inspection
//! - [`profiling`]: centroid signatures, rule-based state labelling and
//!   heatmaps
//! - [`seedgen`]: deterministic generator for planted-profile seed panels

pub mod clustering;
pub mod dataset;
pub mod error;
pub mod gmm;
pub mod profiling;
pub mod projection;
pub mod screening;
pub mod seedgen;
mod serde_matrix;
mod svg;

pub use clustering::{
    adjusted_rand_index, cut_tree, kmeans, select_k, silhouette_score, stability, ward_linkage,
    ClusterModel, KMeansOptions, LinkageTree, Merge, Method, StabilityReport,
};
pub use dataset::{
    apply_normalization, fit_normalization, load_panel, BiomarkerDescriptor, BiomarkerPanel,
    NormalizationParams, NormalizedPanel, SchemaMode, Window,
};
pub use error::{Error, Result};
pub use gmm::{check_ratio, GmmConfig, GmmModel, RatioStatus};
pub use profiling::{PhysiologicalState, ProfileReport, SignatureRule};
pub use projection::{fit_pca, PcaModel};
pub use screening::{euclidean_distance, exclude, screen, ScreeningReport};
pub use seedgen::{generate_seed, SeedSpec};
