//! Flat and hierarchical clustering in z-space.
//!
//! Ward agglomerative clustering is the primary method; Lloyd's K-Means with
//! k-means++ seeding is kept as a baseline. Model choice is driven by
//! silhouette ranking and multi-seed agreement (Adjusted Rand Index).

mod dendrogram;
mod kmeans;
mod metrics;
mod selection;
mod ward;

use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::dataset::NormalizedPanel;
use crate::error::{Error, Result};
use crate::serde_matrix;

pub use dendrogram::render_dendrogram;
pub use kmeans::{kmeans, kmeans_with, KMeansOptions, KMeansRun};
pub use metrics::{adjusted_rand_index, silhouette, silhouette_score, wcss};
pub use selection::{select_k, stability, StabilityReport};
pub use ward::{cut_tree, ward_linkage, LinkageTree, Merge};

pub(crate) use kmeans::lloyd;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ward,
    KMeans,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Ward => "ward",
            Method::KMeans => "kmeans",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ward" => Ok(Method::Ward),
            "kmeans" | "k-means" => Ok(Method::KMeans),
            other => Err(Error::InvalidConfig(format!("unknown clustering method `{other}`"))),
        }
    }
}

/// A flat clustering at resolution `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    pub k: usize,
    pub assignments: Vec<usize>,
    #[serde(with = "serde_matrix::rows")]
    pub centroids: Array2<f64>,
    pub silhouette: f64,
    pub method: Method,
    pub seed: Option<u64>,
}

impl ClusterModel {
    /// Builds a model from raw labels: labels are renumbered by first
    /// appearance, centroids are recomputed and silhouette scored.
    pub(crate) fn from_labels(
        data: ArrayView2<'_, f64>,
        labels: &[usize],
        method: Method,
        seed: Option<u64>,
    ) -> Result<Self> {
        let assignments = canonical_labels(labels);
        let k = assignments.iter().max().map_or(0, |m| m + 1);
        let centroids = centroids(data, &assignments, k);
        let silhouette = silhouette(data, &assignments)?;
        Ok(Self {
            k,
            assignments,
            centroids,
            silhouette,
            method,
            seed,
        })
    }

    /// The trivial k = 1 model. Silhouette is undefined for one cluster and
    /// is reported as 0.
    pub fn single_cluster(panel: &NormalizedPanel, method: Method) -> Self {
        let n = panel.n_subjects();
        let assignments = vec![0; n];
        Self {
            k: 1,
            centroids: centroids(panel.z().view(), &assignments, 1),
            assignments,
            silhouette: 0.0,
            method,
            seed: None,
        }
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.assignments {
            sizes[l] += 1;
        }
        sizes
    }
}

/// Renumbers labels 0.. in order of first appearance.
pub fn canonical_labels(labels: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect()
}

/// Per-cluster arithmetic means; `labels` must take values in `0..k`.
pub(crate) fn centroids(data: ArrayView2<'_, f64>, labels: &[usize], k: usize) -> Array2<f64> {
    let mut sums = Array2::<f64>::zeros((k, data.ncols()));
    let mut counts = vec![0usize; k];
    for (row, &l) in data.outer_iter().zip(labels) {
        let mut acc = sums.row_mut(l);
        acc += &row;
        counts[l] += 1;
    }
    for (mut row, &c) in sums.outer_iter_mut().zip(&counts) {
        if c > 0 {
            row /= c as f64;
        }
    }
    sums
}

pub(crate) fn check_k(k: usize, n: usize) -> Result<()> {
    if k < 2 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    Ok(())
}

#[inline]
pub(crate) fn squared_distance(a: ndarray::ArrayView1<'_, f64>, b: ndarray::ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}
