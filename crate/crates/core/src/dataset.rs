//! Panel ingestion and per-column z-score normalization.
//!
//! Panels are read from CSV with a header `id,NAME@WINDOW,...`; a header
//! without `@WINDOW` denotes the pre-exercise window. Every column is
//! standardized independently with its arithmetic mean and population
//! standard deviation.

use std::collections::HashSet;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use ndarray::{Array1, Array2, ArrayView1, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::serde_matrix;

/// Header names that carry row metadata rather than measurements. The loader
/// skips them.
pub const RESERVED_COLUMNS: [&str; 3] = ["provenance", "component", "cluster"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Window {
    Pre,
    Post,
    Rec24h,
}

impl Window {
    pub fn as_str(self) -> &'static str {
        match self {
            Window::Pre => "Pre",
            Window::Post => "Post",
            Window::Rec24h => "Rec24h",
        }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pre" => Ok(Window::Pre),
            "post" => Ok(Window::Post),
            "rec24h" | "24h" => Ok(Window::Rec24h),
            _ => Err(Error::MalformedCsv {
                line: 1,
                message: format!("unknown acquisition window `{s}`"),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BiomarkerDescriptor {
    pub name: String,
    #[serde(default)]
    pub unit: String,
    pub window: Window,
}

impl BiomarkerDescriptor {
    pub fn new(name: impl Into<String>, unit: impl Into<String>, window: Window) -> Self {
        Self {
            name: name.into(),
            unit: unit.into(),
            window,
        }
    }

    /// Column header in `NAME@WINDOW` form.
    pub fn label(&self) -> String {
        format!("{}@{}", self.name, self.window)
    }

    /// Parses a `NAME` or `NAME@WINDOW` header cell.
    pub fn parse_label(label: &str) -> Result<Self> {
        let (name, window) = match label.split_once('@') {
            Some((name, window)) => (name, window.parse()?),
            None => (label, Window::Pre),
        };
        if name.is_empty() || name.contains('@') {
            return Err(Error::MalformedCsv {
                line: 1,
                message: format!("invalid column header `{label}`"),
            });
        }
        Ok(Self::new(name, "", window))
    }

    pub fn matches(&self, reference: &str) -> bool {
        match Self::parse_label(reference) {
            Ok(other) => other.name == self.name && other.window == self.window,
            Err(_) => false,
        }
    }
}

/// Finds the column addressed by a `NAME` or `NAME@WINDOW` reference.
pub fn column_index(schema: &[BiomarkerDescriptor], reference: &str) -> Option<usize> {
    schema.iter().position(|d| d.matches(reference))
}

fn validate_shape(subjects: &[String], schema: &[BiomarkerDescriptor], values: &Array2<f64>) -> Result<()> {
    if subjects.len() < 2 || schema.is_empty() {
        return Err(Error::EmptyPanel {
            subjects: subjects.len(),
            columns: schema.len(),
        });
    }
    if values.nrows() != subjects.len() {
        return Err(Error::ShapeMismatch {
            expected: subjects.len(),
            found: values.nrows(),
        });
    }
    if values.ncols() != schema.len() {
        return Err(Error::ShapeMismatch {
            expected: schema.len(),
            found: values.ncols(),
        });
    }
    let mut seen = HashSet::new();
    for s in subjects {
        if !seen.insert(s.as_str()) {
            return Err(Error::DuplicateSubject(s.clone()));
        }
    }
    let mut seen = HashSet::new();
    for d in schema {
        if !seen.insert((d.name.as_str(), d.window)) {
            return Err(Error::DuplicateColumn(d.label()));
        }
    }
    for ((row, col), v) in values.indexed_iter() {
        if !v.is_finite() {
            return Err(Error::NonFiniteValue {
                row,
                subject: subjects[row].clone(),
                column: schema[col].label(),
            });
        }
    }
    Ok(())
}

/// Subjects × biomarkers in native units.
#[derive(Clone, Debug, PartialEq)]
pub struct BiomarkerPanel {
    subjects: Vec<String>,
    schema: Vec<BiomarkerDescriptor>,
    values: Array2<f64>,
}

impl BiomarkerPanel {
    pub fn new(subjects: Vec<String>, schema: Vec<BiomarkerDescriptor>, values: Array2<f64>) -> Result<Self> {
        validate_shape(&subjects, &schema, &values)?;
        Ok(Self {
            subjects,
            schema,
            values,
        })
    }

    pub fn subjects(&self) -> &[String] {
        &self.subjects
    }

    pub fn schema(&self) -> &[BiomarkerDescriptor] {
        &self.schema
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn n_subjects(&self) -> usize {
        self.subjects.len()
    }

    pub fn n_biomarkers(&self) -> usize {
        self.schema.len()
    }

    /// Restricts the panel to the given row indices, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        let subjects = rows.iter().map(|&i| self.subjects[i].clone()).collect();
        Self::new(subjects, self.schema.clone(), self.values.select(Axis(0), rows))
    }

    /// Canonical CSV: `id,NAME@WINDOW,...` with shortest round-trip floats.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        write_matrix_csv(writer, &self.subjects, &self.schema, &self.values)
    }
}

pub(crate) fn write_matrix_csv<W: Write>(
    writer: W,
    subjects: &[String],
    schema: &[BiomarkerDescriptor],
    values: &Array2<f64>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["id".to_string()];
    header.extend(schema.iter().map(BiomarkerDescriptor::label));
    w.write_record(&header)?;
    for (id, row) in subjects.iter().zip(values.outer_iter()) {
        let mut record = vec![id.clone()];
        record.extend(row.iter().map(|v| v.to_string()));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub enum SchemaMode {
    /// Names and windows come from the header; units are left empty.
    HeaderDerived,
    /// The header must list exactly these columns, in order.
    Explicit(Vec<BiomarkerDescriptor>),
}

/// Reads a panel from CSV. Lines starting with `#` are comments.
pub fn load_panel<R: Read>(source: R, mode: &SchemaMode) -> Result<BiomarkerPanel> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(source);

    let header = reader.headers()?.clone();
    if header.is_empty() {
        return Err(Error::MalformedCsv {
            line: 1,
            message: "missing header row".into(),
        });
    }
    let mut measured = Vec::new();
    let mut schema = Vec::new();
    for (idx, cell) in header.iter().enumerate().skip(1) {
        if RESERVED_COLUMNS.contains(&cell) {
            continue;
        }
        measured.push(idx);
        schema.push(BiomarkerDescriptor::parse_label(cell)?);
    }

    if let SchemaMode::Explicit(expected) = mode {
        if expected.len() != schema.len() {
            return Err(Error::ShapeMismatch {
                expected: expected.len(),
                found: schema.len(),
            });
        }
        for (got, want) in schema.iter().zip(expected) {
            if got.name != want.name || got.window != want.window {
                return Err(Error::MalformedCsv {
                    line: 1,
                    message: format!("column `{}` does not match schema column `{}`", got.label(), want.label()),
                });
            }
        }
        schema = expected.clone();
    }

    let mut subjects = Vec::new();
    let mut flat = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        subjects.push(record[0].to_string());
        for &idx in &measured {
            let cell = &record[idx];
            let value: f64 = cell.parse().map_err(|_| Error::MalformedCsv {
                line,
                message: format!("cannot parse `{cell}` as a number"),
            })?;
            flat.push(value);
        }
    }
    let values = Array2::from_shape_vec((subjects.len(), schema.len()), flat).map_err(|e| Error::MalformedCsv {
        line: 0,
        message: e.to_string(),
    })?;
    BiomarkerPanel::new(subjects, schema, values)
}

/// Per-column centering and scaling, persisted alongside fitted models.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizationParams {
    #[serde(with = "serde_matrix::vector")]
    pub means: Array1<f64>,
    #[serde(with = "serde_matrix::vector")]
    pub stds: Array1<f64>,
    pub schema: Vec<BiomarkerDescriptor>,
}

impl NormalizationParams {
    /// Zero means and unit deviations: values are taken as z-scores already.
    pub fn identity(schema: Vec<BiomarkerDescriptor>) -> Self {
        let b = schema.len();
        Self {
            means: Array1::zeros(b),
            stds: Array1::ones(b),
            schema,
        }
    }

    pub fn len(&self) -> usize {
        self.means.len()
    }

    pub fn is_empty(&self) -> bool {
        self.means.is_empty()
    }

    /// Maps z-scores back to native units.
    pub fn denormalize(&self, z: &Array2<f64>) -> Result<Array2<f64>> {
        if z.ncols() != self.len() {
            return Err(Error::ShapeMismatch {
                expected: self.len(),
                found: z.ncols(),
            });
        }
        Ok(z * &self.stds + &self.means)
    }
}

pub fn fit_normalization(panel: &BiomarkerPanel) -> Result<NormalizationParams> {
    let n = panel.n_subjects() as f64;
    let mut means = Array1::zeros(panel.n_biomarkers());
    let mut stds = Array1::zeros(panel.n_biomarkers());
    for (j, column) in panel.values().axis_iter(Axis(1)).enumerate() {
        let first = column[0];
        if column.iter().all(|&v| v == first) {
            return Err(Error::ZeroVariance(panel.schema()[j].label()));
        }
        let mean = column.sum() / n;
        let var = column.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let std = var.sqrt();
        if std == 0.0 {
            return Err(Error::ZeroVariance(panel.schema()[j].label()));
        }
        means[j] = mean;
        stds[j] = std;
    }
    Ok(NormalizationParams {
        means,
        stds,
        schema: panel.schema().to_vec(),
    })
}

pub fn apply_normalization(panel: &BiomarkerPanel, params: &NormalizationParams) -> Result<NormalizedPanel> {
    if params.len() != panel.n_biomarkers() || params.stds.len() != params.len() {
        return Err(Error::ShapeMismatch {
            expected: params.len(),
            found: panel.n_biomarkers(),
        });
    }
    let z = (panel.values() - &params.means) / &params.stds;
    Ok(NormalizedPanel {
        subjects: panel.subjects().to_vec(),
        schema: panel.schema().to_vec(),
        z,
        params: params.clone(),
    })
}

/// A panel in z-space together with the parameters that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedPanel {
    subjects: Vec<String>,
    schema: Vec<BiomarkerDescriptor>,
    z: Array2<f64>,
    params: NormalizationParams,
}

impl NormalizedPanel {
    /// Wraps values that are already z-scores, with identity parameters.
    pub fn from_z_scores(subjects: Vec<String>, schema: Vec<BiomarkerDescriptor>, z: Array2<f64>) -> Result<Self> {
        validate_shape(&subjects, &schema, &z)?;
        let params = NormalizationParams::identity(schema.clone());
        Ok(Self {
            subjects,
            schema,
            z,
            params,
        })
    }

    pub fn subjects(&self) -> &[String] {
        &self.subjects
    }

    pub fn schema(&self) -> &[BiomarkerDescriptor] {
        &self.schema
    }

    pub fn z(&self) -> &Array2<f64> {
        &self.z
    }

    pub fn params(&self) -> &NormalizationParams {
        &self.params
    }

    pub fn n_subjects(&self) -> usize {
        self.subjects.len()
    }

    pub fn n_biomarkers(&self) -> usize {
        self.schema.len()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.z.row(i)
    }

    /// Keeps the listed rows; normalization parameters are carried unchanged.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        let subjects: Vec<String> = rows.iter().map(|&i| self.subjects[i].clone()).collect();
        let z = self.z.select(Axis(0), rows);
        validate_shape(&subjects, &self.schema, &z)?;
        Ok(Self {
            subjects,
            schema: self.schema.clone(),
            z,
            params: self.params.clone(),
        })
    }

    /// Appends z-space rows (e.g. synthetic samples) under the same parameters.
    pub fn append_rows(&self, subjects: Vec<String>, rows: &Array2<f64>) -> Result<Self> {
        if rows.ncols() != self.n_biomarkers() {
            return Err(Error::ShapeMismatch {
                expected: self.n_biomarkers(),
                found: rows.ncols(),
            });
        }
        let mut all_subjects = self.subjects.clone();
        all_subjects.extend(subjects);
        let z = ndarray::concatenate(Axis(0), &[self.z.view(), rows.view()]).map_err(|_| Error::ShapeMismatch {
            expected: self.n_biomarkers(),
            found: rows.ncols(),
        })?;
        validate_shape(&all_subjects, &self.schema, &z)?;
        Ok(Self {
            subjects: all_subjects,
            schema: self.schema.clone(),
            z,
            params: self.params.clone(),
        })
    }

    /// Back-transforms to native units.
    pub fn to_panel(&self) -> Result<BiomarkerPanel> {
        let values = self.params.denormalize(&self.z)?;
        BiomarkerPanel::new(self.subjects.clone(), self.schema.clone(), values)
    }

    /// Writes the z-scores in the panel CSV layout.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        write_matrix_csv(writer, &self.subjects, &self.schema, &self.z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use proptest::prelude::*;

    fn panel_1d(values: &[f64]) -> BiomarkerPanel {
        let subjects = (0..values.len()).map(|i| format!("s{i}")).collect();
        let schema = vec![BiomarkerDescriptor::new("X", "", Window::Pre)];
        BiomarkerPanel::new(subjects, schema, Array2::from_shape_vec((values.len(), 1), values.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn loads_header_derived_schema() {
        let csv = "id,CK@Post,CRP@Pre\na,1,2\nb,3,4\nc,5,6.5\n";
        let panel = load_panel(csv.as_bytes(), &SchemaMode::HeaderDerived).unwrap();
        assert_eq!(panel.n_subjects(), 3);
        assert_eq!(panel.n_biomarkers(), 2);
        assert_eq!(panel.schema()[0], BiomarkerDescriptor::new("CK", "", Window::Post));
        assert_eq!(panel.values()[[2, 1]], 6.5);
    }

    #[test]
    fn missing_window_defaults_to_pre() {
        let csv = "id,CK,LDH@Rec24h\na,1,2\nb,3,4\n";
        let panel = load_panel(csv.as_bytes(), &SchemaMode::HeaderDerived).unwrap();
        assert_eq!(panel.schema()[0].window, Window::Pre);
        assert_eq!(panel.schema()[1].window, Window::Rec24h);
    }

    #[test]
    fn explicit_schema_supplies_units() {
        let schema = vec![
            BiomarkerDescriptor::new("CK", "U/L", Window::Post),
            BiomarkerDescriptor::new("CRP", "mg/L", Window::Pre),
        ];
        let csv = "id,CK@Post,CRP\na,1,2\nb,3,4\n";
        let panel = load_panel(csv.as_bytes(), &SchemaMode::Explicit(schema.clone())).unwrap();
        assert_eq!(panel.schema(), &schema[..]);

        let bad = "id,CK@Pre,CRP\na,1,2\nb,3,4\n";
        assert!(matches!(
            load_panel(bad.as_bytes(), &SchemaMode::Explicit(schema)),
            Err(Error::MalformedCsv { .. })
        ));
    }

    #[test]
    fn nan_cell_is_reported_with_location() {
        let csv = "id,CK@Post,CRP@Pre\na,1,2\nb,NaN,4\n";
        match load_panel(csv.as_bytes(), &SchemaMode::HeaderDerived) {
            Err(Error::NonFiniteValue { row, subject, column }) => {
                assert_eq!(row, 1);
                assert_eq!(subject, "b");
                assert_eq!(column, "CK@Post");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ingestion_errors() {
        let ragged = "id,A,B\na,1,2\nb,3\n";
        assert!(matches!(load_panel(ragged.as_bytes(), &SchemaMode::HeaderDerived), Err(Error::MalformedCsv { .. })));
        let text = "id,A\na,1\nb,x\n";
        assert!(matches!(load_panel(text.as_bytes(), &SchemaMode::HeaderDerived), Err(Error::MalformedCsv { .. })));
        let dup = "id,A\na,1\na,2\n";
        assert!(matches!(load_panel(dup.as_bytes(), &SchemaMode::HeaderDerived), Err(Error::DuplicateSubject(_))));
        let dupcol = "id,A,A@Pre\na,1,2\nb,2,3\n";
        assert!(matches!(load_panel(dupcol.as_bytes(), &SchemaMode::HeaderDerived), Err(Error::DuplicateColumn(_))));
        let single = "id,A\na,1\n";
        assert!(matches!(load_panel(single.as_bytes(), &SchemaMode::HeaderDerived), Err(Error::EmptyPanel { .. })));
        let nocols = "id\na\nb\n";
        assert!(matches!(load_panel(nocols.as_bytes(), &SchemaMode::HeaderDerived), Err(Error::EmptyPanel { .. })));
        let window = "id,A@Later\na,1\nb,2\n";
        assert!(matches!(load_panel(window.as_bytes(), &SchemaMode::HeaderDerived), Err(Error::MalformedCsv { .. })));
    }

    #[test]
    fn reserved_columns_are_skipped() {
        let csv = "id,A,B,provenance,component\na,1,2,seed,0\nb,3,4,synthetic,1\n";
        let panel = load_panel(csv.as_bytes(), &SchemaMode::HeaderDerived).unwrap();
        assert_eq!(panel.n_biomarkers(), 2);
        assert_eq!(panel.values()[[1, 1]], 4.0);
    }

    #[test]
    fn eighteen_column_marker_grid() {
        let mut header = vec!["id".to_string()];
        for marker in ["CK", "LDH", "CRP", "Cortisol", "Testosterone"] {
            for w in ["Pre", "Post", "Rec24h"] {
                header.push(format!("{marker}@{w}"));
            }
        }
        header.extend(["SpO2@Pre".into(), "HeartRate@Pre".into(), "BloodPressure@Pre".into()]);
        let mut csv = header.join(",") + "\n";
        for i in 0..22 {
            let row: Vec<String> = (0..18).map(|j| (i * 18 + j).to_string()).collect();
            csv += &format!("p{i},{}\n", row.join(","));
        }
        let panel = load_panel(csv.as_bytes(), &SchemaMode::HeaderDerived).unwrap();
        assert_eq!(panel.n_subjects(), 22);
        assert_eq!(panel.n_biomarkers(), 18);
    }

    #[test]
    fn population_std() {
        let params = fit_normalization(&panel_1d(&[1.0, 2.0, 3.0])).unwrap();
        assert_abs_diff_eq!(params.means[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(params.stds[0], (2.0f64 / 3.0).sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(params.stds[0], 0.81650, epsilon = 1e-5);
    }

    #[test]
    fn zero_variance_names_column() {
        match fit_normalization(&panel_1d(&[5.0, 5.0, 5.0])) {
            Err(Error::ZeroVariance(col)) => assert_eq!(col, "X@Pre"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(fit_normalization(&panel_1d(&[0.1, 0.1, 0.1])), Err(Error::ZeroVariance(_))));
    }

    #[test]
    fn symmetric_pairs() {
        let schema = vec![
            BiomarkerDescriptor::new("A", "", Window::Pre),
            BiomarkerDescriptor::new("B", "", Window::Pre),
        ];
        let panel = BiomarkerPanel::new(vec!["a".into(), "b".into()], schema, array![[0.0, 10.0], [2.0, 30.0]]).unwrap();
        let params = fit_normalization(&panel).unwrap();
        assert_eq!(params.means.to_vec(), vec![1.0, 20.0]);
        assert_eq!(params.stds.to_vec(), vec![1.0, 10.0]);
    }

    #[test]
    fn z_scores_and_inverse() {
        let panel = panel_1d(&[1.0, 2.0, 3.0]);
        let params = fit_normalization(&panel).unwrap();
        let z = apply_normalization(&panel, &params).unwrap();
        let expected = [-1.224744871391589, 0.0, 1.224744871391589];
        for (got, want) in z.z().column(0).iter().zip(expected) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        let back = z.to_panel().unwrap();
        for (a, b) in back.values().iter().zip(panel.values().iter()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-9);
        }
    }

    #[test]
    fn values_at_mean_map_to_zero() {
        let panel = panel_1d(&[2.0, 2.0, 2.0]);
        let mut params = NormalizationParams::identity(panel.schema().to_vec());
        params.means[0] = 2.0;
        params.stds[0] = 0.5;
        let z = apply_normalization(&panel, &params).unwrap();
        assert!(z.z().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn shape_mismatch_on_apply() {
        let panel = panel_1d(&[1.0, 2.0]);
        let params = NormalizationParams::identity(vec![
            BiomarkerDescriptor::new("A", "", Window::Pre),
            BiomarkerDescriptor::new("B", "", Window::Pre),
        ]);
        assert!(matches!(apply_normalization(&panel, &params), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn params_json_field_names() {
        let params = fit_normalization(&panel_1d(&[1.0, 3.0])).unwrap();
        let json = serde_json::to_value(&params).unwrap();
        assert_eq!(json["means"], serde_json::json!([2.0]));
        assert_eq!(json["stds"], serde_json::json!([1.0]));
        assert_eq!(json["schema"][0]["name"], "X");
        let back: NormalizationParams = serde_json::from_value(json).unwrap();
        assert_eq!(back, params);
    }

    fn arb_panel() -> impl Strategy<Value = BiomarkerPanel> {
        (2usize..12, 1usize..6).prop_flat_map(|(n, b)| {
            proptest::collection::vec(-1e6f64..1e6, n * b).prop_map(move |flat| {
                let subjects = (0..n).map(|i| format!("id{i}")).collect();
                let schema = (0..b).map(|j| BiomarkerDescriptor::new(format!("M{j}"), "", Window::Post)).collect();
                BiomarkerPanel::new(subjects, schema, Array2::from_shape_vec((n, b), flat).unwrap()).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_bitwise(panel in arb_panel()) {
            let mut buf = Vec::new();
            panel.write_csv(&mut buf).unwrap();
            let back = load_panel(buf.as_slice(), &SchemaMode::HeaderDerived).unwrap();
            prop_assert_eq!(back.subjects(), panel.subjects());
            prop_assert_eq!(back.schema(), panel.schema());
            for (a, b) in back.values().iter().zip(panel.values().iter()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }

        #[test]
        fn normalized_columns_are_standard(panel in arb_panel()) {
            prop_assume!(fit_normalization(&panel).is_ok());
            let params = fit_normalization(&panel).unwrap();
            let z = apply_normalization(&panel, &params).unwrap();
            let n = z.n_subjects() as f64;
            for col in z.z().axis_iter(Axis(1)) {
                let mean = col.sum() / n;
                let std = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
                prop_assert!(mean.abs() < 1e-9);
                prop_assert!((std - 1.0).abs() < 1e-9);
            }
        }
    }
}
