use std::fmt::Write as _;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{check_k, squared_distance, ClusterModel, Method};
use crate::dataset::NormalizedPanel;
use crate::error::{Error, Result};

/// One agglomeration step. Leaves are `0..n`; the node created by merge `i`
/// gets id `n + i`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkageTree {
    pub merges: Vec<Merge>,
    pub leaf_count: usize,
}

impl LinkageTree {
    /// `left right height size`, one merge per line.
    pub fn to_merge_list(&self) -> String {
        let mut out = String::new();
        for m in &self.merges {
            writeln!(out, "{} {} {} {}", m.left, m.right, m.height, m.size).unwrap();
        }
        out
    }

    pub fn from_merge_list(text: &str) -> Result<Self> {
        let mut merges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || Error::MalformedCsv {
                line: lineno as u64 + 1,
                message: format!("expected `left right height size`, got `{line}`"),
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(bad());
            }
            merges.push(Merge {
                left: fields[0].parse().map_err(|_| bad())?,
                right: fields[1].parse().map_err(|_| bad())?,
                height: fields[2].parse().map_err(|_| bad())?,
                size: fields[3].parse().map_err(|_| bad())?,
            });
        }
        let leaf_count = merges.len() + 1;
        Ok(Self { merges, leaf_count })
    }

    pub fn heights(&self) -> impl Iterator<Item = f64> + '_ {
        self.merges.iter().map(|m| m.height)
    }

    /// Leaves in left-to-right dendrogram order.
    pub fn leaf_order(&self) -> Vec<usize> {
        let n = self.leaf_count;
        if self.merges.is_empty() {
            return (0..n).collect();
        }
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![n + self.merges.len() - 1];
        while let Some(node) = stack.pop() {
            if node < n {
                order.push(node);
            } else {
                let m = &self.merges[node - n];
                stack.push(m.right);
                stack.push(m.left);
            }
        }
        order
    }
}

/// Ward agglomeration via the Lance-Williams recurrence on squared Euclidean
/// distances. Merge heights are `sqrt(2 * delta)` where `delta` is the
/// increase in within-cluster sum of squares; for two singletons this is
/// their Euclidean distance. Equal costs are resolved by the smallest
/// `(min id, max id)` pair.
pub fn ward_linkage(panel: &NormalizedPanel) -> LinkageTree {
    let z = panel.z();
    let n = z.nrows();

    // dist[i][j] over slots; slot i holds node ids[i] while active.
    let mut dist = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let d = squared_distance(z.row(i), z.row(j));
            dist[[i, j]] = d;
            dist[[j, i]] = d;
        }
    }
    let mut ids: Vec<usize> = (0..n).collect();
    let mut sizes = vec![1usize; n];
    let mut active = vec![true; n];
    let mut merges = Vec::with_capacity(n.saturating_sub(1));

    for step in 0..n.saturating_sub(1) {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for i in (0..n).filter(|&i| active[i]) {
            for j in ((i + 1)..n).filter(|&j| active[j]) {
                let d = dist[[i, j]];
                let key = (ids[i].min(ids[j]), ids[i].max(ids[j]));
                let better = match best {
                    None => true,
                    Some((bd, _, _, lo, hi)) => d < bd || (d == bd && key < (lo, hi)),
                };
                if better {
                    best = Some((d, i, j, key.0, key.1));
                }
            }
        }
        let (d_ij, a, b, left, right) = best.expect("at least two active clusters");
        let (na, nb) = (sizes[a] as f64, sizes[b] as f64);
        for k in (0..n).filter(|&k| active[k] && k != a && k != b) {
            let nk = sizes[k] as f64;
            let updated = ((na + nk) * dist[[a, k]] + (nb + nk) * dist[[b, k]] - nk * d_ij) / (na + nb + nk);
            dist[[a, k]] = updated;
            dist[[k, a]] = updated;
        }
        active[b] = false;
        sizes[a] += sizes[b];
        ids[a] = n + step;
        merges.push(Merge {
            left,
            right,
            height: d_ij.max(0.0).sqrt(),
            size: sizes[a],
        });
    }
    LinkageTree { merges, leaf_count: n }
}

/// Undoes the last `k - 1` merges and returns the resulting flat clustering.
pub fn cut_tree(tree: &LinkageTree, k: usize, panel: &NormalizedPanel) -> Result<ClusterModel> {
    let n = tree.leaf_count;
    if n != panel.n_subjects() || tree.merges.len() + 1 != n {
        return Err(Error::StaleModel);
    }
    check_k(k, n)?;

    // Union-find over node ids; each internal node points at its root.
    let mut parent: Vec<usize> = (0..(2 * n - 1)).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (step, m) in tree.merges.iter().take(n - k).enumerate() {
        let node = n + step;
        let l = find(&mut parent, m.left);
        let r = find(&mut parent, m.right);
        parent[l] = node;
        parent[r] = node;
    }
    let labels: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    ClusterModel::from_labels(panel.z().view(), &labels, Method::Ward, None)
}
