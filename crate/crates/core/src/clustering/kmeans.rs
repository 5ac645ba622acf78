use ndarray::{Array2, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{centroids, check_k, squared_distance, wcss, ClusterModel, Method};
use crate::dataset::NormalizedPanel;
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KMeansOptions {
    pub max_iter: usize,
    /// Stop once no centroid moves farther than this.
    pub tol: f64,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        Self {
            max_iter: 300,
            tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug)]
pub struct KMeansRun {
    pub model: ClusterModel,
    /// Within-cluster sum of squares after each Lloyd iteration.
    pub wcss_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

pub(crate) struct LloydResult {
    pub labels: Vec<usize>,
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// k-means++ seeding: first centre uniform, then proportional to the squared
/// distance to the nearest chosen centre.
fn plus_plus(data: ArrayView2<'_, f64>, k: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let n = data.nrows();
    let mut chosen = vec![rng.random_range(0..n)];
    let mut nearest: Vec<f64> = (0..n)
        .map(|i| squared_distance(data.row(i), data.row(chosen[0])))
        .collect();
    while chosen.len() < k {
        let total: f64 = nearest.iter().sum();
        let next = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &w) in nearest.iter().enumerate() {
                if w <= 0.0 {
                    continue;
                }
                acc += w;
                pick = Some(i);
                if acc > target {
                    break;
                }
            }
            pick.expect("positive total weight")
        } else {
            rng.random_range(0..n)
        };
        chosen.push(next);
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(squared_distance(data.row(i), data.row(next)));
        }
    }
    data.select(ndarray::Axis(0), &chosen)
}

fn nearest_centroid(row: ndarray::ArrayView1<'_, f64>, centroids: &Array2<f64>) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centre) in centroids.outer_iter().enumerate() {
        let d = squared_distance(row, centre);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// Lloyd iterations from k-means++ seeding. The caller validates `k`.
pub(crate) fn lloyd(data: ArrayView2<'_, f64>, k: usize, seed: u64, opts: &KMeansOptions) -> LloydResult {
    let n = data.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centres = plus_plus(data, k, &mut rng);
    let mut labels = vec![0usize; n];
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        iterations += 1;
        let mut cost = vec![0.0; n];
        for i in 0..n {
            let (c, d) = nearest_centroid(data.row(i), &centres);
            labels[i] = c;
            cost[i] = d;
        }

        // Empty clusters take the point farthest from its centroid, drawn
        // from clusters that can spare one.
        let mut sizes = vec![0usize; k];
        for &l in &labels {
            sizes[l] += 1;
        }
        for empty in 0..k {
            if sizes[empty] > 0 {
                continue;
            }
            let donor = (0..n)
                .filter(|&i| sizes[labels[i]] > 1)
                .fold(None::<(usize, f64)>, |best, i| match best {
                    Some((_, d)) if d >= cost[i] => best,
                    _ => Some((i, cost[i])),
                })
                .map(|(i, _)| i)
                .expect("n >= k leaves a donor");
            sizes[labels[donor]] -= 1;
            labels[donor] = empty;
            sizes[empty] = 1;
            cost[donor] = 0.0;
            centres.row_mut(empty).assign(&data.row(donor));
        }

        let updated = centroids(data, &labels, k);
        let shift = updated
            .outer_iter()
            .zip(centres.outer_iter())
            .map(|(a, b)| squared_distance(a, b).sqrt())
            .fold(0.0, f64::max);
        centres = updated;
        trace.push(wcss(data, &labels, &centres));
        if shift < opts.tol {
            converged = true;
            break;
        }
    }
    LloydResult {
        labels,
        trace,
        iterations,
        converged,
    }
}

pub fn kmeans(panel: &NormalizedPanel, k: usize, seed: u64) -> Result<ClusterModel> {
    Ok(kmeans_with(panel, k, seed, &KMeansOptions::default())?.model)
}

pub fn kmeans_with(panel: &NormalizedPanel, k: usize, seed: u64, opts: &KMeansOptions) -> Result<KMeansRun> {
    check_k(k, panel.n_subjects())?;
    let run = lloyd(panel.z().view(), k, seed, opts);
    let model = ClusterModel::from_labels(panel.z().view(), &run.labels, Method::KMeans, Some(seed))?;
    Ok(KMeansRun {
        model,
        wcss_trace: run.trace,
        iterations: run.iterations,
        converged: run.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{BiomarkerDescriptor, Window};
    use crate::error::Error;

    fn line(points: &[f64]) -> NormalizedPanel {
        let subjects = (0..points.len()).map(|i| format!("p{i}")).collect();
        let schema = vec![BiomarkerDescriptor::new("x", "", Window::Pre)];
        let z = Array2::from_shape_vec((points.len(), 1), points.to_vec()).unwrap();
        NormalizedPanel::from_z_scores(subjects, schema, z).unwrap()
    }

    #[test]
    fn two_blobs_any_seed() {
        let panel = line(&[0.0, 1.0, 10.0, 11.0]);
        for seed in 0..20 {
            let model = kmeans(&panel, 2, seed).unwrap();
            let mut c = model.centroids.column(0).to_vec();
            c.sort_by(f64::total_cmp);
            assert_eq!(c, vec![0.5, 10.5], "seed {seed}");
            assert_eq!(model.seed, Some(seed));
        }
    }

    #[test]
    fn rejects_k_below_two() {
        assert!(matches!(kmeans(&line(&[0.0, 1.0]), 1, 0), Err(Error::KOutOfRange { .. })));
        assert!(matches!(kmeans(&line(&[0.0, 1.0]), 3, 0), Err(Error::KOutOfRange { .. })));
    }

    #[test]
    fn duplicate_points_terminate() {
        let panel = line(&[2.0; 6]);
        for k in 2..=6 {
            let run = kmeans_with(&panel, k, 7, &KMeansOptions::default()).unwrap();
            assert!(run.converged);
            assert_eq!(run.model.cluster_sizes().iter().filter(|&&s| s > 0).count(), k);
        }
    }

    #[test]
    fn same_seed_same_result() {
        let panel = line(&[0.0, 0.3, 4.0, 4.1, 9.0, 9.5, 2.0]);
        assert_eq!(kmeans(&panel, 3, 11).unwrap(), kmeans(&panel, 3, 11).unwrap());
    }
}
