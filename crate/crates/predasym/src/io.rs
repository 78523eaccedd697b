//! File formats: series CSV/JSON, uncertain-record CSV and result tables.
//!
//! Series CSV has one header row of labels and one row per sample. Lines
//! starting with `#` are ignored. Floats are written in shortest
//! round-trip form, so output is byte-stable for identical input.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use predasym_core::asymmetry::AsymmetryCurve;
use predasym_core::data::{MultiSeries, TimeSeries, UncertainSeries};
use predasym_core::estimators::TESpectrum;
use predasym_core::resampling::EnsembleResult;
use predasym_core::robustness::SweepResult;

use crate::error::{Error, Result};

/// Reads a multi-column series from `.csv` or `.json` (by extension).
pub fn read_series(path: &Path) -> Result<MultiSeries> {
    let file = File::open(path).map_err(|e| Error::input(path, e))?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => read_series_json(BufReader::new(file)),
        _ => read_series_csv(BufReader::new(file)),
    }
}

pub fn read_series_csv<R: Read>(reader: R) -> Result<MultiSeries> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
    let labels: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if labels.is_empty() {
        return Err(Error::Invalid("CSV has no header".into()));
    }
    let mut cols = vec![Vec::new(); labels.len()];
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        for (c, field) in rec.iter().enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::Invalid(format!("row {}, column '{}': '{field}' is not a number", row + 1, labels[c])))?;
            cols[c].push(v);
        }
    }
    let labels: Vec<&str> = labels.iter().map(String::as_str).collect();
    Ok(MultiSeries::from_columns(&labels, cols)?)
}

pub fn write_series_csv<W: Write>(writer: W, ms: &MultiSeries) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(ms.labels())?;
    for i in 0..ms.len() {
        w.write_record(ms.columns().iter().map(|c| c.values()[i].to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// JSON layout for series files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesFile {
    #[serde(default = "unit")]
    pub dt: f64,
    pub labels: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

fn unit() -> f64 {
    1.0
}

pub fn read_series_json<R: Read>(reader: R) -> Result<MultiSeries> {
    let f: SeriesFile = serde_json::from_reader(reader)?;
    if f.labels.len() != f.columns.len() {
        return Err(Error::Invalid(format!("{} labels for {} columns", f.labels.len(), f.columns.len())));
    }
    let cols = f
        .labels
        .into_iter()
        .zip(f.columns)
        .map(|(l, v)| TimeSeries::with_dt(l, v, f.dt))
        .collect::<predasym_core::Result<Vec<_>>>()?;
    Ok(MultiSeries::new(cols)?)
}

pub fn write_series_json<W: Write>(writer: W, ms: &MultiSeries) -> Result<()> {
    let f = SeriesFile {
        dt: ms.columns()[0].dt(),
        labels: ms.labels(),
        columns: ms.columns().iter().map(|c| c.values().to_vec()).collect(),
    };
    serde_json::to_writer_pretty(writer, &f)?;
    Ok(())
}

/// Reads an uncertain record with columns `age_mean`, `age_sd`,
/// `value_mean`, `value_sd` in any order.
pub fn read_uncertain(path: &Path) -> Result<UncertainSeries> {
    let file = File::open(path).map_err(|e| Error::input(path, e))?;
    read_uncertain_csv(BufReader::new(file))
}

pub fn read_uncertain_csv<R: Read>(reader: R) -> Result<UncertainSeries> {
    let ms = read_series_csv(reader)?;
    let col = |name: &str| {
        ms.by_label(name)
            .map(|c| c.values().to_vec())
            .ok_or_else(|| Error::Invalid(format!("uncertain record is missing column '{name}'")))
    };
    Ok(UncertainSeries::new(col("value_mean")?, col("value_sd")?, col("age_mean")?, col("age_sd")?)?)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `direction,lag,te` rows for each labelled spectrum.
pub fn write_spectra_csv<W: Write>(writer: W, spectra: &[(&str, &TESpectrum)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["direction", "lag", "te"])?;
    for (dir, s) in spectra {
        for (lag, te) in s.lags.iter().zip(&s.values) {
            w.write_record([dir.to_string(), lag.to_string(), te.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `direction,eta,A,A_norm` rows; undefined `A_norm` is left empty.
pub fn write_curves_csv<W: Write>(writer: W, curves: &[(&str, &AsymmetryCurve)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["direction", "eta", "A", "A_norm"])?;
    for (dir, c) in curves {
        for i in 0..c.eta_max() {
            w.write_record([dir.to_string(), c.etas[i].to_string(), c.a[i].to_string(), opt(c.a_norm[i])])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Long format, one row per grid cell.
pub fn write_sweep_csv<W: Write>(writer: W, result: &SweepResult) -> Result<()> {
    use predasym_core::systems::Coupling;
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "family", "coupling_lo", "coupling_hi", "length", "tp", "tn", "fp", "fn", "mcc", "accuracy", "tpr", "tnr",
        "fpr", "fnr", "ppv", "npv", "f1", "median_A", "median_A_noncausal", "failures",
    ])?;
    let family = result.config.family.name();
    for c in &result.cells {
        let (lo, hi) = match c.coupling {
            Coupling::Fixed(v) => (v, v),
            Coupling::Range(a, b) => (a, b),
        };
        let r = &c.rates;
        let cm = &c.confusion;
        w.write_record([
            family.to_string(),
            lo.to_string(),
            hi.to_string(),
            c.length.to_string(),
            cm.tp.to_string(),
            cm.tn.to_string(),
            cm.fp.to_string(),
            cm.fn_.to_string(),
            opt(c.mcc),
            opt(r.accuracy),
            opt(r.tpr),
            opt(r.tnr),
            opt(r.fpr),
            opt(r.fnr),
            opt(r.ppv),
            opt(r.npv),
            opt(r.f1),
            opt(c.median_a_causal),
            opt(c.median_a_noncausal),
            c.failures.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `eta,direction,median,lo,hi`, one row per `(η, direction)`.
pub fn write_ensemble_csv<W: Write>(writer: W, result: &EnsembleResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["eta", "direction", "median", "lo", "hi"])?;
    for (i, &eta) in result.x_to_y.etas.iter().enumerate() {
        for c in [&result.x_to_y, &result.y_to_x] {
            w.write_record([eta.to_string(), c.direction.clone(), opt(c.median[i]), opt(c.lower[i]), opt(c.upper[i])])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).map_err(|e| Error::output(path, e))?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n").map_err(|e| Error::output(path, e))?;
    w.flush().map_err(|e| Error::output(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let file = File::open(path).map_err(|e| Error::input(path, e))?;
    Ok(serde_json::from_reader(BufReader::new(file))?)
}

/// Creates `path` and hands a buffered writer to `f`.
pub fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).map_err(|e| Error::output(path, e))?);
    f(&mut w)?;
    w.flush().map_err(|e| Error::output(path, e))
}

/// `<path>.<suffix>`, e.g. `run.csv` → `run.csv.config.json`.
pub fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}
