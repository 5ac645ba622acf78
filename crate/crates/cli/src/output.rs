//! Artifact writers. Every file carries the tool version and config hash:
//! a `#` line for CSV and text, a `meta` object for JSON, an XML comment
//! for SVG.

use std::fs;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use physio_core::BiomarkerDescriptor;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{TOOL, VERSION};
use crate::error::{CliError, CliResult};

/// Marks CSV files whose values are already z-scores.
pub const Z_SPACE_MARKER: &str = "# space: z";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_hash: String,
    pub command: String,
}

impl Meta {
    pub fn new(command: &str, config_hash: String) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            config_hash,
            command: command.to_string(),
        }
    }

    fn stamp(&self) -> String {
        format!("{} {} config={} command={}", self.tool, self.version, self.config_hash, self.command)
    }
}

pub struct Artifacts {
    dir: PathBuf,
    meta: Meta,
    written: Vec<PathBuf>,
}

impl Artifacts {
    pub fn create(dir: &Path, meta: Meta) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            meta,
            written: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn meta(&self) -> &Meta {
        &self.meta
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn raw(&mut self, name: &str, contents: &str) -> CliResult<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.written.push(path.clone());
        Ok(path)
    }

    /// CSV or plain text; a `#` stamp line goes first.
    pub fn text(&mut self, name: &str, body: &str) -> CliResult<PathBuf> {
        let contents = format!("# {}\n{body}", self.meta.stamp());
        self.raw(name, &contents)
    }

    /// JSON object with a `meta` member added next to `body`'s members.
    pub fn json<T: Serialize>(&mut self, name: &str, body: &T) -> CliResult<PathBuf> {
        let mut value = serde_json::to_value(body).map_err(physio_core::Error::from)?;
        let meta = serde_json::to_value(&self.meta).map_err(physio_core::Error::from)?;
        match &mut value {
            Value::Object(map) => {
                map.insert("meta".into(), meta);
            }
            other => value = json!({ "meta": meta, "data": other.take() }),
        }
        let mut text = serde_json::to_string_pretty(&value).map_err(physio_core::Error::from)?;
        text.push('\n');
        self.raw(name, &text)
    }

    pub fn svg(&mut self, name: &str, svg: &str) -> CliResult<PathBuf> {
        let contents = format!("<!-- {} -->\n{svg}", self.meta.stamp());
        self.raw(name, &contents)
    }
}

/// Extra string columns appended after the biomarkers.
pub type ExtraColumns<'a> = [(&'a str, Vec<String>)];

/// z-space panel CSV with the marker line, ready for [`Artifacts::text`].
pub fn z_csv(subjects: &[String], schema: &[BiomarkerDescriptor], z: &Array2<f64>, extra: &ExtraColumns) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["id".to_string()];
    header.extend(schema.iter().map(BiomarkerDescriptor::label));
    header.extend(extra.iter().map(|(name, _)| name.to_string()));
    w.write_record(&header).expect("in-memory write");
    for (i, (id, row)) in subjects.iter().zip(z.outer_iter()).enumerate() {
        let mut record = vec![id.clone()];
        record.extend(row.iter().map(f64::to_string));
        record.extend(extra.iter().map(|(_, col)| col[i].clone()));
        w.write_record(&record).expect("in-memory write");
    }
    let bytes = w.into_inner().expect("in-memory write");
    format!("{Z_SPACE_MARKER}\n{}", String::from_utf8(bytes).expect("utf-8 fields"))
}
