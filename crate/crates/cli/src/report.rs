//! Run reports, CSV sections and atomic artifact writes.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use ultrawave_core::GridField;

use crate::field_io::{encode, FieldData};

/// A named scientific check: `passed` iff `lower ≤ value ≤ upper` for the
/// bounds present (NaN never passes).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    pub passed: bool,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, lower: Option<f64>, upper: Option<f64>) -> Self {
        let passed = !value.is_nan()
            && lower.is_none_or(|l| value >= l)
            && upper.is_none_or(|u| value <= u);
        Self {
            name: name.into(),
            value,
            lower,
            upper,
            passed,
        }
    }

    pub fn at_most(name: impl Into<String>, value: f64, upper: f64) -> Self {
        Self::new(name, value, None, Some(upper))
    }

    pub fn at_least(name: impl Into<String>, value: f64, lower: f64) -> Self {
        Self::new(name, value, Some(lower), None)
    }

    pub fn within(name: impl Into<String>, value: f64, lower: f64, upper: f64) -> Self {
        Self::new(name, value, Some(lower), Some(upper))
    }

    /// Boolean property, recorded as 1 or 0.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, if ok { 1.0 } else { 0.0 }, Some(1.0), None)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// One self-describing document per run, serialized as TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(default)]
    pub diagnostics: Vec<Diagnostic>,
    #[serde(default)]
    pub tables: Vec<Table>,
}

impl Report {
    pub fn new(experiment: &str, seed: u64) -> Self {
        Self {
            experiment: experiment.into(),
            seed,
            passed: true,
            checks: Vec::new(),
            diagnostics: Vec::new(),
            tables: Vec::new(),
        }
    }

    pub fn check(&mut self, c: Check) {
        self.passed &= c.passed;
        self.checks.push(c);
    }

    pub fn note(&mut self, name: impl Into<String>, value: f64) {
        self.diagnostics.push(Diagnostic {
            name: name.into(),
            value,
        });
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn diagnostic(&self, name: &str) -> Option<f64> {
        self.diagnostics.iter().find(|d| d.name == name).map(|d| d.value)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("report serializes")
    }
}

/// A file produced by a run, named relative to the output directory.
#[derive(Debug, Clone, PartialEq)]
pub enum Artifact {
    Field { name: String, field: FieldData },
    Csv { name: String, content: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Report,
    pub artifacts: Vec<Artifact>,
}

impl Outcome {
    pub fn new(report: Report) -> Self {
        Self {
            report,
            artifacts: Vec::new(),
        }
    }

    pub fn field(&mut self, name: impl Into<String>, field: FieldData) {
        self.artifacts.push(Artifact::Field {
            name: name.into(),
            field,
        });
    }

    /// Stores a section as `slice_<name>.csv`.
    pub fn slice(&mut self, name: &str, content: String) {
        self.artifacts.push(Artifact::Csv {
            name: format!("slice_{name}.csv"),
            content,
        });
    }
}

/// Writes to a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Writes `report.txt` and all artifacts under `dir`; returns the paths.
pub fn write_outcome(dir: &Path, outcome: &Outcome) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::with_capacity(outcome.artifacts.len() + 1);
    let path = dir.join("report.txt");
    write_atomic(&path, outcome.report.to_toml().as_bytes())?;
    written.push(path);
    for a in &outcome.artifacts {
        let (name, bytes) = match a {
            Artifact::Field { name, field } => (name, encode(field)),
            Artifact::Csv { name, content } => (name, content.clone().into_bytes()),
        };
        let path = dir.join(name);
        write_atomic(&path, &bytes)?;
        written.push(path);
    }
    Ok(written)
}

/// Coordinate names of a lattice's axes: `x1…` then `y…` in `N` or `M`
/// order.
pub fn axis_names(grid: &GridField) -> Vec<String> {
    let lat = grid.lattice();
    let sig = lat.signature();
    match lat.surface() {
        ultrawave_core::Surface::N => (0..lat.dim())
            .map(|a| if a < sig.d1 { format!("x{}", a + 1) } else { format!("y{}", a - sig.d1 + 2) })
            .collect(),
        ultrawave_core::Surface::M => (0..lat.dim())
            .map(|a| if a < sig.p1 { format!("x{}", a + 1) } else { format!("y{}", a - sig.p1 + 2) })
            .collect(),
    }
}

/// Section of `grid` along `axes` (one or two), the other axes fixed at the
/// grid indices in `at`.
pub fn section_csv(grid: &GridField, axes: &[usize], at: &[usize]) -> String {
    let lat = grid.lattice();
    assert!(matches!(axes.len(), 1 | 2) && axes.iter().all(|&a| a < lat.dim()));
    assert_eq!(at.len(), lat.dim());
    let names = axis_names(grid);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut head: Vec<String> = axes.iter().map(|&a| names[a].clone()).collect();
    head.extend(["re".to_string(), "im".to_string()]);
    w.write_record(&head).expect("in-memory write");
    let mut idx = at.to_vec();
    let n0 = lat.sizes()[axes[0]];
    let n1 = axes.get(1).map_or(1, |&a| lat.sizes()[a]);
    for i in 0..n0 {
        idx[axes[0]] = i;
        for j in 0..n1 {
            if let Some(&a) = axes.get(1) {
                idx[a] = j;
            }
            let flat: usize = idx.iter().zip(lat.strides()).map(|(i, s)| i * s).sum();
            let v = grid.values()[flat];
            let mut rec: Vec<String> = axes
                .iter()
                .map(|&a| lat.grid_coordinate(a, idx[a]).to_string())
                .collect();
            rec.push(v.re.to_string());
            rec.push(v.im.to_string());
            w.write_record(&rec).expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

/// Section through the origin along the first one or two axes.
pub fn default_section(grid: &GridField) -> String {
    let dim = grid.lattice().dim();
    let axes: Vec<usize> = (0..dim.min(2)).collect();
    section_csv(grid, &axes, &vec![0; dim])
}

pub fn table_csv(t: &Table) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&t.columns).expect("in-memory write");
    for r in &t.rows {
        w.write_record(r.iter().map(|v| v.to_string())).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;
    use ultrawave_core::{FreqLattice, SignatureSpec};

    #[test]
    fn check_bounds() {
        assert!(Check::at_most("a", 1e-11, 1e-10).passed);
        assert!(!Check::at_most("a", f64::NAN, 1e-10).passed);
        assert!(Check::within("r", 4.0, 3.5, 4.5).passed);
        assert!(!Check::within("r", 3.0, 3.5, 4.5).passed);
        assert!(!Check::holds("b", false).passed);
        let mut r = Report::new("x", 1);
        r.check(Check::holds("ok", true));
        r.check(Check::at_least("big", 0.5, 1.0));
        assert!(!r.passed);
        assert_eq!(r.failures().map(|c| c.name.as_str()).collect::<Vec<_>>(), ["big"]);
    }

    #[test]
    fn report_toml_round_trip() {
        let mut r = Report::new("conserve", 42);
        r.check(Check::at_most("drift", 3.5e-14, 1e-10));
        r.note("energy", -1.25);
        r.tables.push(Table {
            name: "t".into(),
            columns: vec!["a".into(), "b".into()],
            rows: vec![vec![1.0, 2.0]],
        });
        let text = r.to_toml();
        assert!(text.contains("name = \"drift\""), "{text}");
        let back: Report = toml::from_str(&text).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn sections_have_expected_shape() {
        let sig = SignatureSpec::new(1, 2, 1, 0).unwrap();
        let lat = Arc::new(FreqLattice::new(sig, &[5, 3]).unwrap());
        let g = GridField::from_real_fn(lat, |x| x[0] + 10.0 * x[1]);
        let one = section_csv(&g, &[1], &[0, 0]);
        let lines: Vec<&str> = one.lines().collect();
        assert_eq!(lines[0], "y2,re,im");
        assert_eq!(lines.len(), 4);
        let two = default_section(&g);
        assert_eq!(two.lines().next(), Some("x1,y2,re,im"));
        assert_eq!(two.lines().count(), 16);
    }
}
