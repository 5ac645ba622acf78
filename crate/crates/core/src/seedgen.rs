//! Planted-profile seed panels in z-space.
//!
//! Each profile draws its subjects from independent normals: signature
//! markers at the profile's mean z with a tight spread, every other marker
//! centred at 0 with the background spread. The default spec plants five
//! profiles of three subjects over 32 biomarkers.

use std::collections::HashSet;
use std::fmt::Write as _;

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dataset::{BiomarkerDescriptor, BiomarkerPanel, Window};
use crate::error::{Error, Result};
use crate::profiling::{classify, default_rules, PhysiologicalState};

/// Puts the homeostatic band |z| <= 0.5 at three standard deviations, so
/// background markers practically never leave it.
pub const DEFAULT_BACKGROUND_STD: f64 = 0.5 / 3.0;
pub const DEFAULT_SIGNATURE_STD: f64 = 0.3;

/// Reference cohort shares (Homeostasis, Anabolic Power, Metabolic Stress,
/// Mechanical Damage, Silent Risk) for weighting profile sizes.
pub const REFERENCE_SHARES: [(PhysiologicalState, f64); 5] = [
    (PhysiologicalState::Homeostasis, 0.393),
    (PhysiologicalState::AnabolicPower, 0.231),
    (PhysiologicalState::MetabolicStress, 0.203),
    (PhysiologicalState::MechanicalDamage, 0.127),
    (PhysiologicalState::SilentRisk, 0.045),
];

#[derive(Clone, Debug, PartialEq)]
pub struct MarkerSpec {
    pub name: String,
    pub mean: f64,
    pub std: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProfileSpec {
    pub state: PhysiologicalState,
    pub count: usize,
    /// Markers that deviate from the background distribution.
    pub signature: Vec<MarkerSpec>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeedSpec {
    pub profiles: Vec<ProfileSpec>,
    pub biomarker_names: Vec<String>,
    pub background_std: f64,
    pub seed: u64,
}

pub fn default_biomarker_names() -> Vec<String> {
    let named = [
        "CK",
        "LDH",
        "CRP",
        "Cortisol",
        "Testosterone",
        "SpO2",
        "HeartRate",
        "BloodPressure",
        "Insulin",
        "Homocysteine",
    ];
    named
        .iter()
        .map(|s| s.to_string())
        .chain((11..=32).map(|i| format!("marker_{i}")))
        .collect()
}

fn marker(name: &str, mean: f64) -> MarkerSpec {
    MarkerSpec {
        name: name.into(),
        mean,
        std: DEFAULT_SIGNATURE_STD,
    }
}

impl Default for SeedSpec {
    fn default() -> Self {
        use PhysiologicalState::*;
        let profile = |state, signature| ProfileSpec {
            state,
            count: 3,
            signature,
        };
        Self {
            profiles: vec![
                profile(Homeostasis, vec![]),
                profile(AnabolicPower, vec![marker("Testosterone", 1.2), marker("Cortisol", -0.8)]),
                profile(MetabolicStress, vec![marker("Cortisol", 1.8)]),
                profile(MechanicalDamage, vec![marker("CK", 2.4), marker("LDH", 2.1)]),
                profile(SilentRisk, vec![marker("Homocysteine", 2.0), marker("Insulin", 1.5)]),
            ],
            biomarker_names: default_biomarker_names(),
            background_std: DEFAULT_BACKGROUND_STD,
            seed: 0,
        }
    }
}

impl SeedSpec {
    pub fn total_subjects(&self) -> usize {
        self.profiles.iter().map(|p| p.count).sum()
    }

    /// Replaces profile sizes with a largest-remainder apportionment of
    /// `total` according to `shares` (matched by state).
    pub fn with_weighted_counts(mut self, total: usize, shares: &[(PhysiologicalState, f64)]) -> Result<Self> {
        let weights: Vec<f64> = self
            .profiles
            .iter()
            .map(|p| shares.iter().find(|(s, _)| *s == p.state).map_or(0.0, |(_, w)| *w))
            .collect();
        let sum: f64 = weights.iter().sum();
        if sum.is_nan() || sum <= 0.0 {
            return Err(Error::SpecInvalid("shares do not cover any profile".into()));
        }
        let quotas: Vec<f64> = weights.iter().map(|w| total as f64 * w / sum).collect();
        let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
        let mut order: Vec<usize> = (0..quotas.len()).collect();
        order.sort_by(|&a, &b| {
            let ra = quotas[a] - quotas[a].floor();
            let rb = quotas[b] - quotas[b].floor();
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        let missing = total - counts.iter().sum::<usize>();
        for &i in order.iter().take(missing) {
            counts[i] += 1;
        }
        for (p, c) in self.profiles.iter_mut().zip(counts) {
            p.count = c;
        }
        self.validate()?;
        Ok(self)
    }

    /// Per-marker mean and std of one profile over the full marker list.
    pub fn profile_distribution(&self, profile: &ProfileSpec) -> (Array1<f64>, Array1<f64>) {
        let b = self.biomarker_names.len();
        let mut mean = Array1::zeros(b);
        let mut std = Array1::from_elem(b, self.background_std);
        for m in &profile.signature {
            if let Some(j) = self.biomarker_names.iter().position(|n| *n == m.name) {
                mean[j] = m.mean;
                std[j] = m.std;
            }
        }
        (mean, std)
    }

    pub fn schema(&self) -> Vec<BiomarkerDescriptor> {
        self.biomarker_names
            .iter()
            .map(|n| BiomarkerDescriptor::new(n.as_str(), "z", Window::Pre))
            .collect()
    }

    /// Structural checks plus a self-check that every profile's mean vector
    /// is labelled with its own state by the default rules.
    pub fn validate(&self) -> Result<()> {
        let invalid = |m: String| Err(Error::SpecInvalid(m));
        if self.profiles.is_empty() {
            return invalid("no profiles".into());
        }
        if self.biomarker_names.is_empty() {
            return invalid("no biomarkers".into());
        }
        let mut seen = HashSet::new();
        for name in &self.biomarker_names {
            if !seen.insert(name.as_str()) {
                return invalid(format!("duplicate biomarker `{name}`"));
            }
        }
        if self.total_subjects() < 2 {
            return invalid("at least two subjects are required".into());
        }
        if !(self.background_std >= 0.0 && self.background_std.is_finite()) {
            return invalid("background std must be finite and >= 0".into());
        }
        let rules = default_rules();
        let schema = self.schema();
        for p in &self.profiles {
            if p.count == 0 {
                return invalid(format!("profile {} has no subjects", p.state.token()));
            }
            let mut names = HashSet::new();
            for m in &p.signature {
                if !self.biomarker_names.contains(&m.name) {
                    return invalid(format!("profile {} names unknown biomarker `{}`", p.state.token(), m.name));
                }
                if !names.insert(m.name.as_str()) {
                    return invalid(format!("profile {} repeats biomarker `{}`", p.state.token(), m.name));
                }
                if !(m.mean.is_finite() && m.std.is_finite() && m.std >= 0.0) {
                    return invalid(format!("profile {} has an invalid entry for `{}`", p.state.token(), m.name));
                }
            }
            if p.state != PhysiologicalState::Unclassified {
                let (mean, _) = self.profile_distribution(p);
                let got = classify(&mean.insert_axis(ndarray::Axis(0)), &schema, &rules).states[0];
                if got != p.state {
                    return invalid(format!(
                        "profile {} mean vector classifies as {}",
                        p.state.token(),
                        got.token()
                    ));
                }
            }
        }
        Ok(())
    }

    /// Parses the line-oriented spec format written by [`SeedSpec::to_config`].
    pub fn from_config(text: &str) -> Result<Self> {
        let mut spec = SeedSpec {
            profiles: Vec::new(),
            ..SeedSpec::default()
        };
        let mut signature_std = DEFAULT_SIGNATURE_STD;
        let bad = |line: usize, msg: &str| Error::SpecInvalid(format!("line {line}: {msg}"));
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix("profile ") {
                let mut parts = rest.split_whitespace();
                let state: PhysiologicalState = parts
                    .next()
                    .ok_or_else(|| bad(line, "missing state"))?
                    .parse()
                    .map_err(|_| bad(line, "unknown state"))?;
                let count: usize = parts
                    .next()
                    .ok_or_else(|| bad(line, "missing count"))?
                    .parse()
                    .map_err(|_| bad(line, "count must be a non-negative integer"))?;
                let mut signature = Vec::new();
                for item in parts {
                    let (name, value) = item.split_once('=').ok_or_else(|| bad(line, "expected NAME=mean[~std]"))?;
                    let (mean, std) = match value.split_once('~') {
                        Some((m, s)) => (m, Some(s)),
                        None => (value, None),
                    };
                    let mean: f64 = mean.parse().map_err(|_| bad(line, "mean is not a number"))?;
                    let std = match std {
                        Some(s) => s.parse().map_err(|_| bad(line, "std is not a number"))?,
                        None => signature_std,
                    };
                    signature.push(MarkerSpec {
                        name: name.to_string(),
                        mean,
                        std,
                    });
                }
                spec.profiles.push(ProfileSpec { state, count, signature });
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| bad(line, "expected `key = value`"))?;
            let value = value.trim();
            match key.trim() {
                "seed" => spec.seed = value.parse().map_err(|_| bad(line, "seed must be an integer"))?,
                "background_std" => {
                    spec.background_std = value.parse().map_err(|_| bad(line, "background_std is not a number"))?
                }
                "signature_std" => signature_std = value.parse().map_err(|_| bad(line, "signature_std is not a number"))?,
                "markers" => spec.biomarker_names = value.split(',').map(|s| s.trim().to_string()).collect(),
                other => return Err(bad(line, &format!("unknown key `{other}`"))),
            }
        }
        if spec.profiles.is_empty() {
            spec.profiles = SeedSpec::default().profiles;
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_config(&self) -> String {
        let mut out = String::new();
        writeln!(out, "seed = {}", self.seed).unwrap();
        writeln!(out, "background_std = {}", self.background_std).unwrap();
        writeln!(out, "markers = {}", self.biomarker_names.join(",")).unwrap();
        for p in &self.profiles {
            write!(out, "profile {} {}", p.state.token(), p.count).unwrap();
            for m in &p.signature {
                write!(out, " {}={}~{}", m.name, m.mean, m.std).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedSeed {
    /// Values are z-scores.
    pub panel: BiomarkerPanel,
    /// Planted state of each row.
    pub labels: Vec<PhysiologicalState>,
    /// Index of the planted profile of each row.
    pub profile_index: Vec<usize>,
}

impl GeneratedSeed {
    /// `id,true_state` sidecar.
    pub fn labels_csv(&self) -> String {
        let mut out = String::from("id,true_state\n");
        for (id, state) in self.panel.subjects().iter().zip(&self.labels) {
            writeln!(out, "{id},{}", state.token()).unwrap();
        }
        out
    }
}

pub fn generate_seed(spec: &SeedSpec) -> Result<GeneratedSeed> {
    spec.validate()?;
    let total = spec.total_subjects();
    let b = spec.biomarker_names.len();
    let width = total.to_string().len().max(2);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut values = Array2::zeros((total, b));
    let mut subjects = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(total);
    let mut profile_index = Vec::with_capacity(total);
    let mut row = 0;
    for (pi, profile) in spec.profiles.iter().enumerate() {
        let (mean, std) = spec.profile_distribution(profile);
        for _ in 0..profile.count {
            for j in 0..b {
                let e: f64 = rng.sample(StandardNormal);
                values[[row, j]] = mean[j] + std[j] * e;
            }
            subjects.push(format!("S{:0width$}", row + 1));
            labels.push(profile.state);
            profile_index.push(pi);
            row += 1;
        }
    }
    let panel = BiomarkerPanel::new(subjects, spec.schema(), values)?;
    Ok(GeneratedSeed {
        panel,
        labels,
        profile_index,
    })
}
