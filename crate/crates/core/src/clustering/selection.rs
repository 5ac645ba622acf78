use serde::{Deserialize, Serialize};

use super::{adjusted_rand_index, check_k, cut_tree, kmeans, ward_linkage, ClusterModel, Method};
use crate::dataset::NormalizedPanel;
use crate::error::{Error, Result};

fn fit_at(panel: &NormalizedPanel, k: usize, method: Method, seed: u64) -> Result<ClusterModel> {
    match method {
        Method::Ward => cut_tree(&ward_linkage(panel), k, panel),
        Method::KMeans => kmeans(panel, k, seed),
    }
}

/// Silhouette for every `k` in `k_min..=k_max`, best first; equal scores
/// keep the smaller `k` first. K-Means runs use `seed`.
pub fn select_k(
    panel: &NormalizedPanel,
    k_min: usize,
    k_max: usize,
    method: Method,
    seed: u64,
) -> Result<Vec<(usize, f64)>> {
    let n = panel.n_subjects();
    check_k(k_min, n)?;
    check_k(k_max, n)?;
    if k_min > k_max {
        return Err(Error::KOutOfRange { k: k_min, n: k_max });
    }
    let tree = (method == Method::Ward).then(|| ward_linkage(panel));
    let mut scores = Vec::with_capacity(k_max - k_min + 1);
    for k in k_min..=k_max {
        let model = match &tree {
            Some(tree) => cut_tree(tree, k, panel)?,
            None => kmeans(panel, k, seed)?,
        };
        scores.push((k, model.silhouette));
    }
    scores.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(scores)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub method: Method,
    pub k: usize,
    pub runs: usize,
    /// Mean Adjusted Rand Index over all pairs of runs.
    pub mean_ari: f64,
    pub per_run_silhouette: Vec<f64>,
}

/// Repeats the clustering with seeds `0..runs` and measures pairwise
/// agreement. Ward ignores the seed, so it must agree with itself exactly.
pub fn stability(panel: &NormalizedPanel, k: usize, method: Method, runs: usize) -> Result<StabilityReport> {
    if runs < 2 {
        return Err(Error::InvalidConfig(format!("stability needs at least 2 runs, got {runs}")));
    }
    let models = (0..runs as u64)
        .map(|seed| fit_at(panel, k, method, seed))
        .collect::<Result<Vec<_>>>()?;

    let mut total = 0.0;
    let mut count = 0usize;
    for i in 0..runs {
        for j in (i + 1)..runs {
            total += adjusted_rand_index(&models[i].assignments, &models[j].assignments)?;
            count += 1;
        }
    }
    Ok(StabilityReport {
        method,
        k,
        runs,
        mean_ari: total / count as f64,
        per_run_silhouette: models.iter().map(|m| m.silhouette).collect(),
    })
}
