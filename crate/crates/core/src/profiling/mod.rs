//! Centroid-based interpretation of clusters.
//!
//! Each cluster's mean z-vector is matched against signature rules to name a
//! physiological state. Several clusters may share a state; a centroid that
//! matches no rule stays [`PhysiologicalState::Unclassified`].

mod heatmap;
mod rules;

use std::fmt::Write as _;

use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::clustering::ClusterModel;
use crate::dataset::{column_index, BiomarkerDescriptor, NormalizedPanel};
use crate::error::{Error, Result};

pub use heatmap::{heat_color, render_heatmap, HEAT_CLIP};
pub use rules::{
    default_rules, format_rules, parse_rules, Comparator, Condition, PhysiologicalState, Scope, SignatureRule,
    DEFAULT_RULES,
};

/// Row `r` is the mean z-vector of the subjects labelled `r`.
pub fn centroid_signatures(panel: &NormalizedPanel, model: &ClusterModel) -> Result<Array2<f64>> {
    let n = panel.n_subjects();
    if model.assignments.len() != n
        || model.k == 0
        || model.centroids.ncols() != panel.n_biomarkers()
        || model.assignments.iter().any(|&l| l >= model.k)
    {
        return Err(Error::StaleModel);
    }
    let mut sums = Array2::<f64>::zeros((model.k, panel.n_biomarkers()));
    let mut counts = vec![0usize; model.k];
    for (row, &l) in panel.z().outer_iter().zip(&model.assignments) {
        let mut acc = sums.row_mut(l);
        acc += &row;
        counts[l] += 1;
    }
    if counts.contains(&0) {
        return Err(Error::StaleModel);
    }
    for (mut row, &c) in sums.outer_iter_mut().zip(&counts) {
        row /= c as f64;
    }
    Ok(sums)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Classification {
    pub states: Vec<PhysiologicalState>,
    /// Rules skipped because they name biomarkers absent from the schema.
    pub warnings: Vec<String>,
}

enum Resolved {
    All(Comparator, f64),
    Listed(Vec<(usize, Comparator, f64)>),
}

fn matches(signature: ArrayView1<'_, f64>, rule: &Resolved) -> bool {
    match rule {
        Resolved::All(cmp, t) => signature.iter().all(|&z| cmp.holds(z, *t)),
        Resolved::Listed(conds) => conds.iter().all(|&(j, cmp, t)| cmp.holds(signature[j], t)),
    }
}

/// Labels each signature row with the first matching rule in priority order.
pub fn classify(signatures: &Array2<f64>, schema: &[BiomarkerDescriptor], rules: &[SignatureRule]) -> Classification {
    let mut warnings = Vec::new();
    let mut ordered: Vec<&SignatureRule> = rules.iter().collect();
    ordered.sort_by_key(|r| r.state.priority());

    let mut resolved = Vec::new();
    for rule in ordered {
        let compiled = match rule.scope {
            Scope::AllMarkers => rule.conditions.first().map(|c| Resolved::All(c.comparator, c.threshold)),
            Scope::ListedMarkers => {
                let mut conds = Vec::with_capacity(rule.conditions.len());
                let mut missing = Vec::new();
                for c in &rule.conditions {
                    match column_index(schema, &c.marker) {
                        Some(j) => conds.push((j, c.comparator, c.threshold)),
                        None => missing.push(c.marker.clone()),
                    }
                }
                if missing.is_empty() && !conds.is_empty() {
                    Some(Resolved::Listed(conds))
                } else {
                    if !missing.is_empty() {
                        let msg = format!(
                            "rule for {} skipped: unknown biomarker(s) {}",
                            rule.state.token(),
                            missing.join(", ")
                        );
                        log::warn!("{msg}");
                        warnings.push(msg);
                    }
                    None
                }
            }
        };
        if let Some(c) = compiled {
            resolved.push((rule.state, c));
        }
    }

    let states = signatures
        .outer_iter()
        .map(|sig| {
            resolved
                .iter()
                .find(|(_, r)| matches(sig, r))
                .map_or(PhysiologicalState::Unclassified, |(s, _)| *s)
        })
        .collect();
    Classification { states, warnings }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterProfile {
    pub cluster: usize,
    pub state: PhysiologicalState,
    pub count: usize,
    pub share: f64,
    pub centroid: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileReport {
    pub markers: Vec<String>,
    /// Largest cluster first; equal sizes keep cluster-id order.
    pub clusters: Vec<ClusterProfile>,
    pub warnings: Vec<String>,
}

pub fn profile_report(panel: &NormalizedPanel, model: &ClusterModel, rules: &[SignatureRule]) -> Result<ProfileReport> {
    let signatures = centroid_signatures(panel, model)?;
    let classification = classify(&signatures, panel.schema(), rules);
    let mut counts = vec![0usize; model.k];
    for &l in &model.assignments {
        counts[l] += 1;
    }
    let n = panel.n_subjects() as f64;
    let mut clusters: Vec<ClusterProfile> = (0..model.k)
        .map(|c| ClusterProfile {
            cluster: c,
            state: classification.states[c],
            count: counts[c],
            share: counts[c] as f64 / n,
            centroid: signatures.row(c).to_vec(),
        })
        .collect();
    clusters.sort_by(|a, b| b.count.cmp(&a.count).then(a.cluster.cmp(&b.cluster)));
    Ok(ProfileReport {
        markers: panel.schema().iter().map(BiomarkerDescriptor::label).collect(),
        clusters,
        warnings: classification.warnings,
    })
}

impl ProfileReport {
    pub fn clusters_in_state(&self, state: PhysiologicalState) -> impl Iterator<Item = &ClusterProfile> {
        self.clusters.iter().filter(move |c| c.state == state)
    }

    /// Signature matrix in cluster-id order.
    pub fn signatures(&self) -> Array2<f64> {
        let k = self.clusters.len();
        let b = self.markers.len();
        let mut m = Array2::zeros((k, b));
        for c in &self.clusters {
            for (j, v) in c.centroid.iter().enumerate() {
                m[[c.cluster, j]] = *v;
            }
        }
        m
    }

    fn signature_text(&self, profile: &ClusterProfile) -> String {
        if profile.state == PhysiologicalState::Homeostasis {
            let max = profile.centroid.iter().fold(0.0f64, |m, z| m.max(z.abs()));
            return format!("all |z| <= {max:.1}");
        }
        let mut idx: Vec<usize> = (0..profile.centroid.len()).collect();
        idx.sort_by(|&a, &b| profile.centroid[b].abs().total_cmp(&profile.centroid[a].abs()).then(a.cmp(&b)));
        idx.iter()
            .take(3)
            .map(|&j| {
                let name = self.markers[j].strip_suffix("@Pre").unwrap_or(&self.markers[j]);
                format!("{name}: {:+.1}", profile.centroid[j])
            })
            .collect::<Vec<_>>()
            .join(", ")
    }

    /// Plain-text table: cluster, classification, count, share, signature.
    pub fn to_table(&self) -> String {
        let rows: Vec<[String; 5]> = self
            .clusters
            .iter()
            .map(|c| {
                [
                    c.cluster.to_string(),
                    c.state.display_name().to_string(),
                    c.count.to_string(),
                    format!("{:.1}%", 100.0 * c.share),
                    self.signature_text(c),
                ]
            })
            .collect();
        let header = [
            "Cluster",
            "Physiological Classification",
            "Athletes",
            "Population",
            "Signature (mean z)",
        ];
        let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
        for row in &rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        let line = |out: &mut String, cells: &[&str]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}", w = *w))
                .collect();
            writeln!(out, "{}", padded.join("  ").trim_end()).unwrap();
        };
        line(&mut out, &header);
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        line(&mut out, &rule.iter().map(String::as_str).collect::<Vec<_>>());
        for row in &rows {
            line(&mut out, &row.iter().map(String::as_str).collect::<Vec<_>>());
        }
        for w in &self.warnings {
            writeln!(out, "warning: {w}").unwrap();
        }
        out
    }
}
