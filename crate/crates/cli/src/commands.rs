use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};

use log::warn;
use ndarray::Array2;
use physio_core::clustering::{kmeans, render_dendrogram, select_k, stability};
use physio_core::gmm::{self, check_ratio, RatioStatus};
use physio_core::profiling::{default_rules, parse_rules, profile_report, render_heatmap};
use physio_core::projection::{fit_pca, render_scatter};
use physio_core::seedgen::{generate_seed, SeedSpec, REFERENCE_SHARES};
use physio_core::{
    apply_normalization, cut_tree, exclude, fit_normalization, screen, ward_linkage, ClusterModel, GmmConfig,
    LinkageTree, Method, NormalizedPanel, PcaModel, PhysiologicalState, ScreeningReport, StabilityReport,
};
use serde::Serialize;

use crate::config::{Normalize, RunConfig};
use crate::error::{CliError, CliResult};
use crate::input::{self, LoadedInput};
use crate::output::{z_csv, Artifacts, Meta};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Screen,
    Cluster,
    Augment,
    Project,
    Report,
    Seedgen,
    Pipeline,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Screen => "screen",
            Command::Cluster => "cluster",
            Command::Augment => "augment",
            Command::Project => "project",
            Command::Report => "report",
            Command::Seedgen => "seedgen",
            Command::Pipeline => "pipeline",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Runs one command and returns the paths it wrote.
pub fn run(command: Command, cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    cfg.validate()?;
    let meta = Meta::new(command.name(), cfg.hash(command.name())?);
    let mut written = Vec::new();
    let out = cfg.out.as_path();
    match command {
        Command::Seedgen => {
            seedgen_step(cfg, out, &meta, &mut written)?;
        }
        Command::Pipeline => pipeline(cfg, &meta, &mut written)?,
        _ => {
            let input = required_input(cfg)?;
            match command {
                Command::Screen => {
                    screen_step(cfg, input, out, &meta, &mut written)?;
                }
                Command::Cluster => cluster_step(cfg, input, out, &meta, &mut written)?,
                Command::Augment => {
                    augment_step(cfg, input, out, &meta, &mut written)?;
                }
                Command::Project => project_step(cfg, input, out, &meta, &mut written)?,
                Command::Report => report_step(cfg, input, out, &meta, &mut written)?,
                Command::Seedgen | Command::Pipeline => unreachable!(),
            }
        }
    }
    Ok(written)
}

fn required_input(cfg: &RunConfig) -> CliResult<&Path> {
    cfg.input
        .as_deref()
        .ok_or_else(|| CliError::Usage("--input is required for this command".into()))
}

fn finish(art: Artifacts, written: &mut Vec<PathBuf>) {
    written.extend_from_slice(art.written());
}

/// Seed, screen, augment, then cluster, project and profile the cohort.
/// Every stage reads the previous stage's files from disk.
fn pipeline(cfg: &RunConfig, meta: &Meta, written: &mut Vec<PathBuf>) -> CliResult<()> {
    let root = cfg.out.as_path();
    let input = match &cfg.input {
        Some(p) => p.clone(),
        None => seedgen_step(cfg, &root.join("seed"), meta, written)?,
    };
    let retained = screen_step(cfg, &input, &root.join("screen"), meta, written)?;

    // Intermediate files announce their own space.
    let downstream = RunConfig {
        normalize: Normalize::Auto,
        ..cfg.clone()
    };
    let cohort = augment_step(&downstream, &retained, &root.join("augment"), meta, written)?;
    cluster_step(&downstream, &cohort, &root.join("cluster"), meta, written)?;
    project_step(&downstream, &cohort, &root.join("project"), meta, written)?;
    report_step(&downstream, &cohort, &root.join("report"), meta, written)
}

#[derive(Serialize)]
struct ScreeningOut<'a> {
    normalization: &'static str,
    refit_after_screen: bool,
    #[serde(flatten)]
    report: &'a ScreeningReport,
}

fn screen_step(cfg: &RunConfig, input: &Path, out: &Path, meta: &Meta, written: &mut Vec<PathBuf>) -> CliResult<PathBuf> {
    let loaded = input::load(input, cfg.normalize)?;
    let report = screen(&loaded.normalized, cfg.threshold)?;
    for id in &report.flagged {
        warn!("{id} flagged: distance {:.2} > {}", report.distances[id], cfg.threshold);
    }

    let mut art = Artifacts::create(out, meta.clone())?;
    art.json(
        "screening.json",
        &ScreeningOut {
            normalization: if loaded.fitted { "fit" } else { "identity" },
            refit_after_screen: cfg.refit_after_screen,
            report: &report,
        },
    )?;
    let keep: HashSet<&str> = report.retained.iter().map(String::as_str).collect();
    art.text("retained.csv", &input::body_lines_for(&loaded.text, |id| keep.contains(id))?)?;

    let retained = retained_panel(cfg, &loaded, &report)?;
    let path = art.text(
        "retained_z.csv",
        &z_csv(retained.subjects(), retained.schema(), retained.z(), &[]),
    )?;
    finish(art, written);
    Ok(path)
}

fn retained_panel(cfg: &RunConfig, loaded: &LoadedInput, report: &ScreeningReport) -> CliResult<NormalizedPanel> {
    if report.flagged.is_empty() {
        return Ok(loaded.normalized.clone());
    }
    if !cfg.refit_after_screen {
        return Ok(exclude(&loaded.normalized, report)?);
    }
    let keep: HashSet<&str> = report.retained.iter().map(String::as_str).collect();
    let rows: Vec<usize> = (0..loaded.panel.n_subjects())
        .filter(|&i| keep.contains(loaded.panel.subjects()[i].as_str()))
        .collect();
    let raw = loaded.panel.select_rows(&rows)?;
    Ok(apply_normalization(&raw, &fit_normalization(&raw)?)?)
}

fn fit_model(panel: &NormalizedPanel, tree: Option<&LinkageTree>, k: usize, cfg: &RunConfig) -> CliResult<ClusterModel> {
    if k == 1 {
        return Ok(ClusterModel::single_cluster(panel, cfg.method));
    }
    Ok(match (cfg.method, tree) {
        (Method::Ward, Some(tree)) => cut_tree(tree, k, panel)?,
        (Method::Ward, None) => cut_tree(&ward_linkage(panel), k, panel)?,
        (Method::KMeans, _) => kmeans(panel, k, cfg.seed())?,
    })
}

#[derive(Serialize)]
struct ClusterOut<'a> {
    subjects: &'a [String],
    #[serde(flatten)]
    model: &'a ClusterModel,
}

#[derive(Serialize)]
struct StabilityOut {
    reports: Vec<StabilityReport>,
}

#[derive(Serialize)]
struct SelectionOut {
    method: Method,
    /// `(k, silhouette)`, best first.
    ranking: Vec<(usize, f64)>,
}

fn cluster_step(cfg: &RunConfig, input: &Path, out: &Path, meta: &Meta, written: &mut Vec<PathBuf>) -> CliResult<()> {
    let loaded = input::load(input, cfg.normalize)?;
    let panel = &loaded.normalized;
    let n = panel.n_subjects();
    let mut art = Artifacts::create(out, meta.clone())?;

    let tree = (cfg.method == Method::Ward).then(|| ward_linkage(panel));
    if let Some(tree) = &tree {
        art.text("linkage.txt", &tree.to_merge_list())?;
        art.svg("dendrogram.svg", &render_dendrogram(tree, panel.subjects()))?;
    }
    for &k in &cfg.k {
        if k < 2 {
            return Err(CliError::Usage(format!("cluster needs k >= 2, got {k}")));
        }
        let model = fit_model(panel, tree.as_ref(), k, cfg)?;
        art.json(
            &format!("cluster_k{k}.json"),
            &ClusterOut {
                subjects: panel.subjects(),
                model: &model,
            },
        )?;
    }
    if cfg.stability_runs >= 2 {
        let reports = cfg
            .k
            .iter()
            .map(|&k| stability(panel, k, cfg.method, cfg.stability_runs))
            .collect::<Result<Vec<_>, _>>()?;
        art.json("stability.json", &StabilityOut { reports })?;
    }
    if n >= 3 {
        let ranking = select_k(panel, 2, 8.min(n - 1), cfg.method, cfg.seed())?;
        art.json(
            "selection.json",
            &SelectionOut {
                method: cfg.method,
                ranking,
            },
        )?;
    }
    finish(art, written);
    Ok(())
}

#[derive(Serialize)]
struct GmmOut<'a> {
    training_subjects: usize,
    biomarkers: usize,
    training_ratio: RatioStatus,
    cohort_size: usize,
    cohort_ratio: RatioStatus,
    model: &'a physio_core::GmmModel,
}

fn augment_step(cfg: &RunConfig, input: &Path, out: &Path, meta: &Meta, written: &mut Vec<PathBuf>) -> CliResult<PathBuf> {
    if cfg.count == 0 {
        return Err(CliError::Usage("augmentation count must be at least 1".into()));
    }
    let loaded = input::load(input, cfg.normalize)?;
    let panel = &loaded.normalized;
    let (n, b) = (panel.n_subjects(), panel.n_biomarkers());
    let training_ratio = check_ratio(n, b);
    if training_ratio == RatioStatus::Insufficient && !cfg.force {
        warn!(
            "ratio guard: {n} observations for {b} variables is below 5:1; \
             the mixture is fitted anyway for structural validation (--force silences this)"
        );
    }

    let gcfg = GmmConfig {
        components: cfg.components,
        reg_covar: cfg.reg_covar,
        seed: cfg.seed(),
        n_init: cfg.n_init,
        ..GmmConfig::default()
    };
    let model = gmm::fit(panel, &gcfg)?;
    let (rows, sampled) = model.sample(cfg.count, cfg.seed());
    let own = model.predict(panel.z().view())?;

    let width = cfg.count.to_string().len().max(3);
    let ids: Vec<String> = (1..=cfg.count).map(|i| format!("G{i:0width$}")).collect();
    let cohort = panel.append_rows(ids, &rows)?;
    let provenance: Vec<String> = (0..cohort.n_subjects())
        .map(|i| if i < n { "seed" } else { "synthetic" }.to_string())
        .collect();
    let component: Vec<String> = own.iter().chain(&sampled).map(usize::to_string).collect();

    let mut art = Artifacts::create(out, meta.clone())?;
    let path = art.text(
        "cohort.csv",
        &z_csv(
            cohort.subjects(),
            cohort.schema(),
            cohort.z(),
            &[("provenance", provenance), ("component", component)],
        ),
    )?;
    art.json(
        "gmm.json",
        &GmmOut {
            training_subjects: n,
            biomarkers: b,
            training_ratio,
            cohort_size: cohort.n_subjects(),
            cohort_ratio: check_ratio(cohort.n_subjects(), b),
            model: &model,
        },
    )?;
    finish(art, written);

    if !model.converged {
        let msg = format!("EM did not converge within {} iterations", model.iterations);
        if cfg.strict {
            return Err(CliError::Numerical(msg));
        }
        warn!("{msg}");
    }
    Ok(path)
}

/// Cluster labels for plotting: a `cluster` column if present, otherwise a
/// fresh clustering at the largest configured k.
fn plot_labels(cfg: &RunConfig, loaded: &LoadedInput) -> CliResult<Vec<usize>> {
    let cols = input::metadata_columns(&loaded.text, &["cluster"])?;
    if let Some(col) = cols.get("cluster") {
        return col
            .iter()
            .map(|v| {
                v.parse()
                    .map_err(|_| CliError::Usage(format!("cluster column holds `{v}`, expected an integer")))
            })
            .collect();
    }
    let k = cfg.k.iter().copied().max().unwrap_or(1);
    Ok(fit_model(&loaded.normalized, None, k, cfg)?.assignments)
}

#[derive(Serialize)]
struct PcaOut<'a> {
    #[serde(flatten)]
    model: &'a PcaModel,
}

fn project_step(cfg: &RunConfig, input: &Path, out: &Path, meta: &Meta, written: &mut Vec<PathBuf>) -> CliResult<()> {
    let loaded = input::load(input, cfg.normalize)?;
    let panel = &loaded.normalized;
    let labels = plot_labels(cfg, &loaded)?;
    let provenance = input::metadata_columns(&loaded.text, &["provenance"])?
        .remove("provenance")
        .unwrap_or_else(|| vec!["observed".into(); panel.n_subjects()]);

    let pca = fit_pca(panel.z().view(), cfg.pca_components)?;
    let scores = pca.project(panel.z().view())?;

    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["id".to_string()];
    header.extend((1..=pca.n_components()).map(|c| format!("pc{c}")));
    header.extend(["cluster".to_string(), "provenance".to_string()]);
    w.write_record(&header).map_err(physio_core::Error::from)?;
    for (i, id) in panel.subjects().iter().enumerate() {
        let mut rec = vec![id.clone()];
        rec.extend(scores.row(i).iter().map(f64::to_string));
        rec.push(labels[i].to_string());
        rec.push(provenance[i].clone());
        w.write_record(&rec).map_err(physio_core::Error::from)?;
    }
    let csv_text = String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8 fields");

    let mut art = Artifacts::create(out, meta.clone())?;
    art.json("pca.json", &PcaOut { model: &pca })?;
    art.text("scores.csv", &csv_text)?;
    if pca.n_components() >= 2 {
        let k = labels.iter().max().map_or(0, |m| m + 1);
        let legend: Vec<String> = (0..k).map(|c| format!("cluster {c}")).collect();
        art.svg("pca.svg", &render_scatter(scores.view(), &labels, &legend))?;
    }
    finish(art, written);
    Ok(())
}

fn report_step(cfg: &RunConfig, input: &Path, out: &Path, meta: &Meta, written: &mut Vec<PathBuf>) -> CliResult<()> {
    let loaded = input::load(input, cfg.normalize)?;
    let panel = &loaded.normalized;
    let rules = match &cfg.rules {
        Some(path) => parse_rules(&input::read_text(path)?)?,
        None => default_rules(),
    };
    let tree = (cfg.method == Method::Ward && cfg.k.iter().any(|&k| k >= 2)).then(|| ward_linkage(panel));
    let scores: Option<Array2<f64>> = if panel.n_subjects() > 2 && panel.n_biomarkers() >= 2 {
        let pca = fit_pca(panel.z().view(), 2)?;
        Some(pca.project(panel.z().view())?)
    } else {
        None
    };

    let mut art = Artifacts::create(out, meta.clone())?;
    for &k in &cfg.k {
        let model = fit_model(panel, tree.as_ref(), k, cfg)?;
        let report = profile_report(panel, &model, &rules)?;
        for w in &report.warnings {
            warn!("{w}");
        }
        let mut states = vec![PhysiologicalState::Unclassified; model.k];
        for c in &report.clusters {
            states[c.cluster] = c.state;
        }
        let labels: Vec<String> = states
            .iter()
            .enumerate()
            .map(|(c, s)| format!("C{c} {}", s.display_name()))
            .collect();

        let mut table = report.to_table();
        for w in &report.warnings {
            table.push_str(&format!("warning: {w}\n"));
        }
        art.json(&format!("profile_k{k}.json"), &report)?;
        art.text(&format!("profile_k{k}.txt"), &table)?;
        art.svg(
            &format!("heatmap_k{k}.svg"),
            &render_heatmap(&report.signatures(), panel.schema(), &labels),
        )?;
        if let Some(scores) = &scores {
            art.svg(
                &format!("pca_k{k}.svg"),
                &render_scatter(scores.view(), &model.assignments, &labels),
            )?;
        }
    }
    finish(art, written);
    Ok(())
}

fn seedgen_step(cfg: &RunConfig, out: &Path, meta: &Meta, written: &mut Vec<PathBuf>) -> CliResult<PathBuf> {
    let mut spec = match &cfg.seed_spec {
        Some(path) => SeedSpec::from_config(&input::read_text(path)?)?,
        None => SeedSpec::default(),
    };
    if let Some(seed) = cfg.seed {
        spec.seed = seed;
    }
    if cfg.weighted {
        let total = spec.total_subjects();
        spec = spec.with_weighted_counts(total, &REFERENCE_SHARES)?;
    }
    let generated = generate_seed(&spec)?;
    let p = &generated.panel;

    let mut art = Artifacts::create(out, meta.clone())?;
    let path = art.text("seed.csv", &z_csv(p.subjects(), p.schema(), p.values(), &[]))?;
    art.text("labels.csv", &generated.labels_csv())?;
    art.text("seed_spec.txt", &spec.to_config())?;
    finish(art, written);
    Ok(path)
}
