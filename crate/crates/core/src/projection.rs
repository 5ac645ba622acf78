//! Principal component analysis via eigendecomposition of the sample
//! covariance (divisor n - 1).

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::serde_matrix;
use crate::svg::{Svg, PALETTE};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    #[serde(with = "serde_matrix::vector")]
    pub mean: Array1<f64>,
    /// Principal axes as rows, by descending eigenvalue.
    #[serde(with = "serde_matrix::rows")]
    pub components: Array2<f64>,
    #[serde(with = "serde_matrix::vector")]
    pub explained_variance: Array1<f64>,
    #[serde(with = "serde_matrix::vector")]
    pub explained_ratio: Array1<f64>,
}

pub(crate) fn covariance(centered: ArrayView2<'_, f64>) -> Array2<f64> {
    let n = centered.nrows();
    centered.t().dot(&centered) / (n as f64 - 1.0)
}

/// Fits `r` principal axes. Each axis is oriented so that its
/// largest-magnitude entry is positive.
pub fn fit_pca(rows: ArrayView2<'_, f64>, r: usize) -> Result<PcaModel> {
    let (n, b) = rows.dim();
    let max = n.saturating_sub(1).min(b);
    if r == 0 || r > max {
        return Err(Error::ROutOfRange { r, max });
    }
    let mean = rows.mean_axis(Axis(0)).expect("n >= 2");
    let centered = &rows - &mean;
    let cov = covariance(centered.view());
    let total: f64 = cov.diag().sum();

    let eig = SymmetricEigen::new(DMatrix::from_fn(b, b, |i, j| 0.5 * (cov[[i, j]] + cov[[j, i]])));
    let mut order: Vec<usize> = (0..b).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]).then(i.cmp(&j)));

    let mut components = Array2::zeros((r, b));
    let mut explained_variance = Array1::zeros(r);
    for (row, &idx) in order.iter().take(r).enumerate() {
        let v = eig.eigenvectors.column(idx);
        let pivot = (0..b).fold(0, |best, j| if v[j].abs() > v[best].abs() { j } else { best });
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..b {
            components[[row, j]] = sign * v[j];
        }
        explained_variance[row] = eig.eigenvalues[idx].max(0.0);
    }
    let explained_ratio = if total > 0.0 {
        &explained_variance / total
    } else {
        Array1::zeros(r)
    };
    Ok(PcaModel {
        mean,
        components,
        explained_variance,
        explained_ratio,
    })
}

impl PcaModel {
    pub fn n_components(&self) -> usize {
        self.components.nrows()
    }

    /// Scores: `(rows - mean) * components^T`.
    pub fn project(&self, rows: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if rows.ncols() != self.mean.len() {
            return Err(Error::ShapeMismatch {
                expected: self.mean.len(),
                found: rows.ncols(),
            });
        }
        Ok((&rows - &self.mean).dot(&self.components.t()))
    }

    /// Maps scores back to the original space.
    pub fn reconstruct(&self, scores: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if scores.ncols() != self.n_components() {
            return Err(Error::ShapeMismatch {
                expected: self.n_components(),
                found: scores.ncols(),
            });
        }
        Ok(scores.dot(&self.components) + &self.mean)
    }
}

/// 2-D scatter of the first two score columns, one colour per cluster.
/// `legend[c]` names cluster `c`.
pub fn render_scatter(scores: ArrayView2<'_, f64>, clusters: &[usize], legend: &[String]) -> String {
    let (plot, margin, legend_w) = (460.0, 50.0, 190.0);
    let width = plot + 2.0 * margin + legend_w;
    let height = plot + 2.0 * margin;
    let xs = scores.column(0);
    let ys = if scores.ncols() > 1 { scores.column(1).to_owned() } else { Array1::zeros(scores.nrows()) };
    let range = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi > lo { (lo, hi) } else { (lo - 1.0, lo + 1.0) }
    };
    let (x0, x1) = range(&xs.to_vec());
    let (y0, y1) = range(&ys.to_vec());

    let mut svg = Svg::new(width, height);
    svg.text(margin + plot / 2.0, 24.0, 12.0, "middle", "PCA projection");
    svg.polyline(
        &[(margin, margin), (margin, margin + plot), (margin + plot, margin + plot)],
        "#555555",
    );
    svg.text(margin + plot / 2.0, height - 12.0, 10.0, "middle", "PC1");
    svg.rotated_text(16.0, margin + plot / 2.0, 10.0, -90.0, "PC2");
    for (i, &c) in clusters.iter().enumerate().take(scores.nrows()) {
        let x = margin + plot * (xs[i] - x0) / (x1 - x0);
        let y = margin + plot * (1.0 - (ys[i] - y0) / (y1 - y0));
        svg.circle(x, y, 3.0, PALETTE[c % PALETTE.len()]);
    }
    for (c, name) in legend.iter().enumerate() {
        let y = margin + 18.0 * c as f64;
        svg.circle(margin + plot + 24.0, y, 5.0, PALETTE[c % PALETTE.len()]);
        svg.text(margin + plot + 34.0, y + 4.0, 10.0, "start", name);
    }
    svg.finish()
}
