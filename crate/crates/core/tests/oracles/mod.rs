//! Slow reference implementations and fixtures shared by integration and
//! acceptance tests. Nothing here calls into the code under test except to
//! build panels.
#![allow(dead_code)]

use ndarray::Array2;
use physio_core::{BiomarkerDescriptor, NormalizedPanel, Window};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleMerge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

fn centroid(data: &Array2<f64>, members: &[usize]) -> Vec<f64> {
    let mut c = vec![0.0; data.ncols()];
    for &i in members {
        for (acc, v) in c.iter_mut().zip(data.row(i)) {
            *acc += v;
        }
    }
    for v in &mut c {
        *v /= members.len() as f64;
    }
    c
}

/// Ward agglomeration by brute force: every step recomputes the merge cost
/// `na*nb/(na+nb) * |ca - cb|^2` from the current cluster centroids.
pub fn naive_ward(data: &Array2<f64>) -> Vec<OracleMerge> {
    let n = data.nrows();
    let mut clusters: Vec<(usize, Vec<usize>)> = (0..n).map(|i| (i, vec![i])).collect();
    let mut merges = Vec::new();
    for step in 0..n.saturating_sub(1) {
        let mut best: Option<(f64, (usize, usize), usize, usize)> = None;
        for a in 0..clusters.len() {
            for b in (a + 1)..clusters.len() {
                let (ida, ma) = &clusters[a];
                let (idb, mb) = &clusters[b];
                let ca = centroid(data, ma);
                let cb = centroid(data, mb);
                let sq: f64 = ca.iter().zip(&cb).map(|(x, y)| (x - y) * (x - y)).sum();
                let (na, nb) = (ma.len() as f64, mb.len() as f64);
                let delta = na * nb / (na + nb) * sq;
                let key = ((*ida).min(*idb), (*ida).max(*idb));
                let better = match best {
                    None => true,
                    Some((d, k, _, _)) => delta < d || (delta == d && key < k),
                };
                if better {
                    best = Some((delta, key, a, b));
                }
            }
        }
        let (delta, key, a, b) = best.unwrap();
        let (_, mb) = clusters.remove(b);
        let (_, ma) = &mut clusters[a];
        ma.extend(mb);
        let size = ma.len();
        clusters[a].0 = n + step;
        merges.push(OracleMerge {
            left: key.0,
            right: key.1,
            height: (2.0 * delta).sqrt(),
            size,
        });
    }
    merges
}

fn euclid(data: &Array2<f64>, i: usize, j: usize) -> f64 {
    data.row(i)
        .iter()
        .zip(data.row(j))
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Mean silhouette straight from the definition. Points alone in their
/// cluster score 0.
pub fn brute_silhouette(data: &Array2<f64>, labels: &[usize]) -> f64 {
    let n = data.nrows();
    let k = labels.iter().max().unwrap() + 1;
    let mut total = 0.0;
    for i in 0..n {
        let mut sums = vec![0.0; k];
        let mut counts = vec![0usize; k];
        for j in 0..n {
            if j != i {
                sums[labels[j]] += euclid(data, i, j);
                counts[labels[j]] += 1;
            }
        }
        let own = labels[i];
        if counts[own] == 0 {
            continue;
        }
        let a = sums[own] / counts[own] as f64;
        let b = (0..k)
            .filter(|&c| c != own && counts[c] > 0)
            .map(|c| sums[c] / counts[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let m = a.max(b);
        if m > 0.0 {
            total += (b - a) / m;
        }
    }
    total / n as f64
}

/// Composite Simpson rule with `intervals` (rounded up to even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let m = intervals + intervals % 2;
    let h = (b - a) / m as f64;
    let mut acc = f(a) + f(b);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_matrix(rng: &mut impl Rng, n: usize, b: usize, spread: f64) -> Array2<f64> {
    Array2::from_shape_fn((n, b), |_| rng.random_range(-spread..spread))
}

pub fn schema(b: usize) -> Vec<BiomarkerDescriptor> {
    (0..b)
        .map(|j| BiomarkerDescriptor::new(format!("m{j}"), "", Window::Pre))
        .collect()
}

pub fn z_panel(z: Array2<f64>) -> NormalizedPanel {
    let subjects = (0..z.nrows()).map(|i| format!("s{i:03}")).collect();
    let schema = schema(z.ncols());
    NormalizedPanel::from_z_scores(subjects, schema, z).unwrap()
}
