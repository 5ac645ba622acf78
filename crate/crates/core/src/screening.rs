//! Multivariate safety screening in z-space.
//!
//! Subjects farther than `threshold` (Euclidean) from the global centroid are
//! flagged and removed before clustering. The centroid is taken over all
//! subjects, outliers included.

use std::collections::{BTreeMap, HashSet};

use ndarray::{ArrayView1, Axis};
use serde::{Deserialize, Serialize};

use crate::dataset::NormalizedPanel;
use crate::error::{Error, Result};

pub const DEFAULT_THRESHOLD: f64 = 25.0;

pub fn euclidean_distance(x: ArrayView1<'_, f64>, y: ArrayView1<'_, f64>) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::ShapeMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    Ok(x.iter().zip(y.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScreeningReport {
    pub threshold: f64,
    pub distances: BTreeMap<String, f64>,
    pub flagged: Vec<String>,
    pub retained: Vec<String>,
}

impl ScreeningReport {
    pub fn is_flagged(&self, subject: &str) -> bool {
        self.flagged.iter().any(|s| s == subject)
    }
}

pub fn screen(panel: &NormalizedPanel, threshold: f64) -> Result<ScreeningReport> {
    if !(threshold > 0.0 && threshold.is_finite()) {
        return Err(Error::InvalidConfig(format!("screening threshold must be positive, got {threshold}")));
    }
    let centroid = panel
        .z()
        .mean_axis(Axis(0))
        .expect("validated panels have at least two rows");

    let mut distances = BTreeMap::new();
    let mut flagged = Vec::new();
    let mut retained = Vec::new();
    for (subject, row) in panel.subjects().iter().zip(panel.z().outer_iter()) {
        let d = euclidean_distance(row, centroid.view())?;
        distances.insert(subject.clone(), d);
        if d > threshold {
            flagged.push(subject.clone());
        } else {
            retained.push(subject.clone());
        }
    }
    Ok(ScreeningReport {
        threshold,
        distances,
        flagged,
        retained,
    })
}

/// Drops flagged subjects, keeping row order and the original normalization.
pub fn exclude(panel: &NormalizedPanel, report: &ScreeningReport) -> Result<NormalizedPanel> {
    let subjects: HashSet<&str> = panel.subjects().iter().map(String::as_str).collect();
    let reported: HashSet<&str> = report
        .flagged
        .iter()
        .chain(&report.retained)
        .map(String::as_str)
        .collect();
    if subjects != reported || report.flagged.len() + report.retained.len() != panel.n_subjects() {
        return Err(Error::StaleReport);
    }
    let keep: Vec<usize> = panel
        .subjects()
        .iter()
        .enumerate()
        .filter(|(_, s)| !report.is_flagged(s))
        .map(|(i, _)| i)
        .collect();
    panel.select_rows(&keep)
}
