//! Reading panels and the metadata columns that travel with them.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use physio_core::{apply_normalization, fit_normalization, load_panel, BiomarkerPanel, NormalizedPanel, SchemaMode};

use crate::config::Normalize;
use crate::error::{CliError, CliResult};
use crate::output::Z_SPACE_MARKER;

pub struct LoadedInput {
    pub text: String,
    pub panel: BiomarkerPanel,
    pub normalized: NormalizedPanel,
    /// Whether z-scores were fitted to this file (as opposed to read as-is).
    pub fitted: bool,
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn is_z_space(text: &str) -> bool {
    text.lines()
        .take_while(|l| l.trim_start().starts_with('#'))
        .any(|l| l.trim() == Z_SPACE_MARKER)
}

pub fn load(path: &Path, mode: Normalize) -> CliResult<LoadedInput> {
    let text = read_text(path)?;
    let panel = load_panel(text.as_bytes(), &SchemaMode::HeaderDerived)?;
    let fit = match mode {
        Normalize::Fit => true,
        Normalize::Identity => false,
        Normalize::Auto => !is_z_space(&text),
    };
    let normalized = if fit {
        apply_normalization(&panel, &fit_normalization(&panel)?)?
    } else {
        NormalizedPanel::from_z_scores(panel.subjects().to_vec(), panel.schema().to_vec(), panel.values().clone())?
    };
    Ok(LoadedInput {
        text,
        panel,
        normalized,
        fitted: fit,
    })
}

/// String columns by header name, for the names present in the file.
pub fn metadata_columns(text: &str, names: &[&str]) -> CliResult<HashMap<String, Vec<String>>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(physio_core::Error::from)?.clone();
    let wanted: Vec<(usize, &str)> = header
        .iter()
        .enumerate()
        .filter_map(|(i, h)| names.iter().find(|n| **n == h).map(|n| (i, *n)))
        .collect();
    let mut out: HashMap<String, Vec<String>> = wanted.iter().map(|(_, n)| (n.to_string(), Vec::new())).collect();
    for record in reader.records() {
        let record = record.map_err(physio_core::Error::from)?;
        for (i, n) in &wanted {
            out.get_mut(*n).unwrap().push(record[*i].to_string());
        }
    }
    Ok(out)
}

/// Header plus the data lines whose id is kept, byte for byte. Comment
/// lines are dropped.
pub fn body_lines_for(text: &str, keep: impl Fn(&str) -> bool) -> CliResult<String> {
    let mut out = String::new();
    let mut header_seen = false;
    for line in text.split_inclusive('\n') {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if !header_seen {
            header_seen = true;
            out.push_str(line);
            continue;
        }
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(trimmed.as_bytes());
        let id = match reader.records().next() {
            Some(Ok(rec)) => rec.get(0).unwrap_or("").to_string(),
            _ => continue,
        };
        if keep(&id) {
            out.push_str(line);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_selected_lines_verbatim() {
        let text = "# note\nid,CK\na, 1.0\r\n\"b\",2\nc,3";
        let kept = body_lines_for(text, |id| id != "b").unwrap();
        assert_eq!(kept, "id,CK\na, 1.0\r\nc,3");
    }

    #[test]
    fn detects_marker_in_leading_comments() {
        assert!(is_z_space("# physio\n# space: z\nid,x\n"));
        assert!(!is_z_space("id,x\n# space: z\n"));
    }

    #[test]
    fn reads_metadata_columns() {
        let cols = metadata_columns("id,x,provenance\na,1,seed\nb,2,synthetic\n", &["provenance", "cluster"]).unwrap();
        assert_eq!(cols["provenance"], ["seed", "synthetic"]);
        assert!(!cols.contains_key("cluster"));
    }
}
