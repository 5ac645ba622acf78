use std::collections::HashMap;

use ndarray::{Array2, ArrayView2};

use super::{canonical_labels, squared_distance};
use crate::dataset::NormalizedPanel;
use crate::error::{Error, Result};

/// Mean silhouette of a labelling over the panel's z-rows.
pub fn silhouette_score(panel: &NormalizedPanel, assignments: &[usize]) -> Result<f64> {
    silhouette(panel.z().view(), assignments)
}

/// Mean silhouette with Euclidean distances. Points in singleton clusters
/// score 0.
pub fn silhouette(data: ArrayView2<'_, f64>, assignments: &[usize]) -> Result<f64> {
    let n = data.nrows();
    if assignments.len() != n {
        return Err(Error::ShapeMismatch {
            expected: n,
            found: assignments.len(),
        });
    }
    let labels = canonical_labels(assignments);
    let k = labels.iter().max().map_or(0, |m| m + 1);
    if k < 2 {
        return Err(Error::SingleCluster);
    }
    let mut sizes = vec![0usize; k];
    for &l in &labels {
        sizes[l] += 1;
    }

    let mut total = 0.0;
    let mut sums = vec![0.0; k];
    for i in 0..n {
        sums.iter_mut().for_each(|s| *s = 0.0);
        for j in 0..n {
            if i != j {
                sums[labels[j]] += squared_distance(data.row(i), data.row(j)).sqrt();
            }
        }
        let own = labels[i];
        if sizes[own] == 1 {
            continue;
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != own)
            .map(|c| sums[c] / sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    Ok(total / n as f64)
}

/// Within-cluster sum of squared distances to the given centroids.
pub fn wcss(data: ArrayView2<'_, f64>, labels: &[usize], centroids: &Array2<f64>) -> f64 {
    data.outer_iter()
        .zip(labels)
        .map(|(row, &l)| squared_distance(row, centroids.row(l)))
        .sum()
}

fn pairs(x: u64) -> f64 {
    (x * x.saturating_sub(1)) as f64 / 2.0
}

/// Chance-corrected agreement between two labellings of the same items.
/// Two trivial but identical partitions (all-in-one or all-singletons) score 1.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let n = a.len() as u64;
    let mut table: HashMap<(usize, usize), u64> = HashMap::new();
    let mut rows: HashMap<usize, u64> = HashMap::new();
    let mut cols: HashMap<usize, u64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *table.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    // Integer counts make these sums exact regardless of map iteration order.
    let index: f64 = table.values().map(|&c| pairs(c)).sum();
    let sum_rows: f64 = rows.values().map(|&c| pairs(c)).sum();
    let sum_cols: f64 = cols.values().map(|&c| pairs(c)).sum();
    let total = pairs(n);
    if total == 0.0 {
        return Ok(1.0);
    }
    let expected = sum_rows * sum_cols / total;
    let max = 0.5 * (sum_rows + sum_cols);
    if max == expected {
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn two_blob_silhouette() {
        let data = array![[0.0], [1.0], [10.0], [11.0]];
        let s = silhouette(data.view(), &[0, 0, 1, 1]).unwrap();
        let expected = 0.5 * (9.5 / 10.5 + 8.5 / 9.5);
        assert!((s - expected).abs() < 1e-12);
    }

    #[test]
    fn no_separation_scores_nonpositive() {
        let data = array![[1.0], [1.0], [1.0], [1.0]];
        assert!(silhouette(data.view(), &[0, 1, 0, 1]).unwrap() <= 0.0);
        let interleaved = array![[0.0], [1.0], [2.0], [3.0], [4.0], [5.0]];
        assert!(silhouette(interleaved.view(), &[0, 1, 0, 1, 0, 1]).unwrap() <= 0.0);
    }

    #[test]
    fn single_cluster_rejected() {
        let data = array![[0.0], [1.0]];
        assert!(matches!(silhouette(data.view(), &[3, 3]), Err(Error::SingleCluster)));
    }

    #[test]
    fn silhouette_ignores_label_values() {
        let data = array![[0.0, 1.0], [0.2, 0.9], [5.0, 5.0], [5.5, 4.0], [9.0, 0.0]];
        let a = silhouette(data.view(), &[0, 0, 1, 1, 2]).unwrap();
        let b = silhouette(data.view(), &[7, 7, 2, 2, 0]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ari_examples() {
        assert_eq!(adjusted_rand_index(&[0, 0, 1, 1], &[1, 1, 0, 0]).unwrap(), 1.0);
        assert_eq!(adjusted_rand_index(&[0, 0, 0], &[5, 5, 5]).unwrap(), 1.0);
        assert_eq!(adjusted_rand_index(&[0, 1, 2], &[0, 1, 2]).unwrap(), 1.0);
        // sklearn reference value for this pair
        let v = adjusted_rand_index(&[0, 0, 1, 1], &[0, 0, 1, 2]).unwrap();
        assert!((v - 0.5714285714285714).abs() < 1e-12);
        let v = adjusted_rand_index(&[0, 0, 0, 0], &[0, 1, 2, 3]).unwrap();
        assert_eq!(v, 0.0);
        let v = adjusted_rand_index(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap();
        assert!((v - (-0.5)).abs() < 1e-12);
    }
}
