//! Run configuration: built-in defaults, then an optional `key = value`
//! file, then command-line flags.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use physio_core::Method;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const TOOL: &str = "physio";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// How input values become z-scores.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalize {
    /// `identity` for files marked `# space: z`, `fit` otherwise.
    Auto,
    Fit,
    Identity,
}

impl FromStr for Normalize {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "auto" => Ok(Normalize::Auto),
            "fit" => Ok(Normalize::Fit),
            "identity" => Ok(Normalize::Identity),
            other => Err(CliError::Usage(format!("unknown normalize mode `{other}` (auto, fit, identity)"))),
        }
    }
}

impl Normalize {
    fn as_str(self) -> &'static str {
        match self {
            Normalize::Auto => "auto",
            Normalize::Fit => "fit",
            Normalize::Identity => "identity",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub out: PathBuf,
    pub threshold: f64,
    pub k: Vec<usize>,
    pub method: Method,
    pub stability_runs: usize,
    pub components: usize,
    pub reg_covar: f64,
    pub n_init: usize,
    pub count: usize,
    pub seed: Option<u64>,
    pub normalize: Normalize,
    pub refit_after_screen: bool,
    pub force: bool,
    pub strict: bool,
    pub rules: Option<PathBuf>,
    pub seed_spec: Option<PathBuf>,
    pub weighted: bool,
    pub pca_components: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: None,
            out: PathBuf::from("out"),
            threshold: physio_core::screening::DEFAULT_THRESHOLD,
            k: vec![3, 5],
            method: Method::Ward,
            stability_runs: 10,
            components: 5,
            reg_covar: 0.1,
            n_init: 10,
            count: 275,
            seed: None,
            normalize: Normalize::Auto,
            refit_after_screen: false,
            force: false,
            strict: false,
            rules: None,
            seed_spec: None,
            weighted: false,
            pca_components: 2,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> CliResult<T> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("invalid value `{value}` for `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> CliResult<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(CliError::Usage(format!("invalid boolean `{value}` for `{key}`"))),
    }
}

pub fn parse_k_list(value: &str) -> CliResult<Vec<usize>> {
    value
        .split(',')
        .map(|v| parse("k", v.trim()))
        .collect()
}

impl RunConfig {
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        let value = value.trim();
        match key.trim().replace('-', "_").as_str() {
            "input" => self.input = Some(PathBuf::from(value)),
            "out" => self.out = PathBuf::from(value),
            "threshold" => self.threshold = parse(key, value)?,
            "k" => self.k = parse_k_list(value)?,
            "method" => self.method = value.parse().map_err(CliError::Core)?,
            "stability_runs" => self.stability_runs = parse(key, value)?,
            "components" => self.components = parse(key, value)?,
            "reg_covar" => self.reg_covar = parse(key, value)?,
            "n_init" => self.n_init = parse(key, value)?,
            "count" => self.count = parse(key, value)?,
            "seed" => self.seed = Some(parse(key, value)?),
            "normalize" => self.normalize = value.parse()?,
            "refit_after_screen" => self.refit_after_screen = parse_bool(key, value)?,
            "force" => self.force = parse_bool(key, value)?,
            "strict" => self.strict = parse_bool(key, value)?,
            "rules" => self.rules = Some(PathBuf::from(value)),
            "seed_spec" => self.seed_spec = Some(PathBuf::from(value)),
            "weighted" => self.weighted = parse_bool(key, value)?,
            "pca_components" => self.pca_components = parse(key, value)?,
            other => return Err(CliError::Usage(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    /// Applies a `key = value` file. `#` starts a comment line.
    pub fn apply_file_text(&mut self, text: &str) -> CliResult<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected `key = value`", lineno + 1)))?;
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> CliResult<()> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        self.apply_file_text(&text)
    }

    pub fn validate(&self) -> CliResult<()> {
        if !(self.threshold > 0.0 && self.threshold.is_finite()) {
            return Err(CliError::Usage(format!("threshold must be > 0, got {}", self.threshold)));
        }
        if self.k.is_empty() {
            return Err(CliError::Usage("at least one k is required".into()));
        }
        if self.stability_runs == 1 {
            return Err(CliError::Usage("stability runs must be 0 (off) or at least 2".into()));
        }
        if self.pca_components == 0 {
            return Err(CliError::Usage("pca components must be at least 1".into()));
        }
        Ok(())
    }

    /// Everything that influences artifacts, in a fixed order. Paths are
    /// replaced by digests of the files they point at so that moving the
    /// output directory leaves artifacts unchanged.
    pub fn canonical(&self) -> CliResult<String> {
        let mut out = String::new();
        let digest = |p: &Option<PathBuf>| -> CliResult<String> {
            match p {
                None => Ok("-".into()),
                Some(p) => {
                    let bytes = fs::read(p).map_err(|e| CliError::io(p, e))?;
                    Ok(hex::encode(Sha256::digest(&bytes)))
                }
            }
        };
        let ks: Vec<String> = self.k.iter().map(usize::to_string).collect();
        writeln!(out, "input_sha256 = {}", digest(&self.input)?).unwrap();
        writeln!(out, "threshold = {}", self.threshold).unwrap();
        writeln!(out, "k = {}", ks.join(",")).unwrap();
        writeln!(out, "method = {}", self.method).unwrap();
        writeln!(out, "stability_runs = {}", self.stability_runs).unwrap();
        writeln!(out, "components = {}", self.components).unwrap();
        writeln!(out, "reg_covar = {}", self.reg_covar).unwrap();
        writeln!(out, "n_init = {}", self.n_init).unwrap();
        writeln!(out, "count = {}", self.count).unwrap();
        writeln!(out, "seed = {}", self.seed.map_or("-".into(), |s| s.to_string())).unwrap();
        writeln!(out, "normalize = {}", self.normalize.as_str()).unwrap();
        writeln!(out, "refit_after_screen = {}", self.refit_after_screen).unwrap();
        writeln!(out, "force = {}", self.force).unwrap();
        writeln!(out, "strict = {}", self.strict).unwrap();
        writeln!(out, "rules_sha256 = {}", digest(&self.rules)?).unwrap();
        writeln!(out, "seed_spec_sha256 = {}", digest(&self.seed_spec)?).unwrap();
        writeln!(out, "weighted = {}", self.weighted).unwrap();
        writeln!(out, "pca_components = {}", self.pca_components).unwrap();
        Ok(out)
    }

    pub fn hash(&self, command: &str) -> CliResult<String> {
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        h.update(b"\n");
        h.update(self.canonical()?.as_bytes());
        Ok(hex::encode(h.finalize()))
    }
}
