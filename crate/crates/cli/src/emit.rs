//! Report serialization: one JSON document, or a CSV bundle for plotting.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::report::Report;

#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("cannot write {path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

/// Floats in scientific notation with 17 significant digits, enough to
/// round-trip every `f64` and identical on every platform.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Pretty printing with [`format_float`] for numbers.
struct FixedFloats<'a>(PrettyFormatter<'a>);

impl Formatter for FixedFloats<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(format_float(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json(report: &Report) -> Result<String, EmitError> {
    let mut out = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut out, FixedFloats(PrettyFormatter::new()));
    report.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

pub fn write_json(report: &Report, dir: &Path) -> Result<PathBuf, EmitError> {
    let path = dir.join("report.json");
    create_dir(dir)?;
    fs::write(&path, to_json(report)?).map_err(|source| EmitError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(path)
}

fn create_dir(dir: &Path) -> Result<(), EmitError> {
    fs::create_dir_all(dir).map_err(|source| EmitError::Io {
        path: dir.display().to_string(),
        source,
    })
}

fn opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

/// Names `stem.csv` for the first series of a kind, then `stem_2.csv`, ...
fn numbered(dir: &Path, stem: &str, k: usize) -> PathBuf {
    if k == 1 {
        dir.join(format!("{stem}.csv"))
    } else {
        dir.join(format!("{stem}_{k}.csv"))
    }
}

fn write_rows(path: &Path, header: &[&str], rows: Vec<Vec<String>>) -> Result<(), EmitError> {
    let csv_err = |source| EmitError::Csv {
        path: path.display().to_string(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|source| EmitError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// `verdicts.csv` plus one file per array-valued series: `spectra.csv`
/// (index, re, im), `scaling.csv` (epsilon, residual) and
/// `kernel_slice.csv` (x, re, im).
pub fn write_csv_bundle(report: &Report, dir: &Path) -> Result<Vec<PathBuf>, EmitError> {
    create_dir(dir)?;
    let mut written = Vec::new();

    let verdicts = dir.join("verdicts.csv");
    let rows = report
        .tasks
        .iter()
        .flat_map(|t| {
            let failure = (!t.ok).then(|| {
                vec![
                    t.task.clone(),
                    "task_error".into(),
                    String::new(),
                    String::new(),
                    String::new(),
                    "false".into(),
                ]
            });
            failure.into_iter().chain(t.verdicts.iter().map(|v| {
                vec![
                    t.task.clone(),
                    v.name.clone(),
                    opt(v.value),
                    v.relation.clone(),
                    opt(v.threshold),
                    v.pass.to_string(),
                ]
            }))
        })
        .collect();
    write_rows(
        &verdicts,
        &["task", "verdict", "value", "relation", "threshold", "pass"],
        rows,
    )?;
    written.push(verdicts);

    let (mut spectra, mut scaling, mut slices) = (0, 0, 0);
    for t in &report.tasks {
        if let Some(spectrum) = &t.spectrum {
            spectra += 1;
            let path = numbered(dir, "spectra", spectra);
            let rows = spectrum
                .iter()
                .enumerate()
                .map(|(i, [re, im])| vec![i.to_string(), format_float(*re), format_float(*im)])
                .collect();
            write_rows(&path, &["index", "re", "im"], rows)?;
            written.push(path);
        }
        if let Some(points) = &t.scaling {
            scaling += 1;
            let path = numbered(dir, "scaling", scaling);
            let rows = points
                .iter()
                .map(|p| vec![format_float(p.epsilon), opt(p.residual)])
                .collect();
            write_rows(&path, &["epsilon", "residual"], rows)?;
            written.push(path);
        }
        if let Some(slice) = &t.kernel_slice {
            slices += 1;
            let path = numbered(dir, "kernel_slice", slices);
            let rows = slice
                .points
                .iter()
                .map(|p| p.iter().map(|&x| format_float(x)).collect())
                .collect();
            write_rows(&path, &["x", "re", "im"], rows)?;
            written.push(path);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::{Provenance, TaskRecord, Verdict};

    fn sample() -> Report {
        let mut rec = TaskRecord::new("spectral");
        rec.verdicts.push(Verdict::at_most("r", 0.1 + 0.2, 1e-8));
        rec.value("nan", f64::NAN);
        rec.value("tiny", 5e-324);
        rec.spectrum = Some(vec![[1.0 / 3.0, -0.0], [2.0, 1e300]]);
        Report {
            name: "t".into(),
            provenance: Provenance {
                spec_sha256: "00".into(),
                seed: 3,
                version: "0".into(),
            },
            model: None,
            model_error: None,
            tasks: vec![rec],
            pass: false,
        }
    }

    #[test]
    fn float_format() {
        assert_eq!(format_float(0.5), "5.0000000000000000e-1");
        assert_eq!(format_float(0.0), "0.0000000000000000e0");
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let report = sample();
        let text = to_json(&report).unwrap();
        let back: Report = serde_json::from_str(&text).unwrap();
        let spectrum = back.tasks[0].spectrum.as_ref().unwrap();
        assert_eq!(spectrum[0][0].to_bits(), (1.0f64 / 3.0).to_bits());
        assert_eq!(
            back.tasks[0].verdicts[0].value.unwrap().to_bits(),
            (0.1f64 + 0.2).to_bits()
        );
        assert_eq!(
            back.tasks[0].values["tiny"].unwrap().to_bits(),
            5e-324f64.to_bits()
        );
        assert_eq!(back.tasks[0].values["nan"], None);
        assert_eq!(back, report);
        assert_eq!(to_json(&back).unwrap(), text);
    }

    #[test]
    fn csv_bundle_shapes() {
        let dir = tempfile::tempdir().unwrap();
        let files = write_csv_bundle(&sample(), dir.path()).unwrap();
        assert_eq!(files.len(), 2);
        let spectra = fs::read_to_string(dir.path().join("spectra.csv")).unwrap();
        assert_eq!(spectra.lines().count(), 3);
        assert!(spectra.starts_with("index,re,im\n"));
    }
}
