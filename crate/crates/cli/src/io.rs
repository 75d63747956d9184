//! File formats.
//!
//! Labeled sets are JSON:
//!
//! ```text
//! {"n_bins": N, "one_sided": false, "labels": [...], "psds": [[...], ...]}
//! ```
//!
//! With `"one_sided": true` each spectrum holds `M = N/2 + 1` values on
//! `[0, pi]` (`w_m = pi m / (M - 1)`). They are mirrored onto the full
//! circle: the end points `0` and `pi` keep their mass, every interior value
//! is split in half between `+w_m` and `-w_m`.
//!
//! Plot data is CSV with a header row. Floats are written in the shortest
//! form that parses back to the same value.

use std::fs;
use std::path::Path;

use arbary::classify::LabeledPsdSet;
use arbary::spectral::{make_grid, Psd};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetFile {
    pub n_bins: usize,
    #[serde(default)]
    pub one_sided: bool,
    pub labels: Vec<String>,
    pub psds: Vec<Vec<f64>>,
}

/// Mirrors a one-sided spectrum on `[0, pi]` onto the full grid.
pub fn mirror_one_sided(half: &[f64]) -> Result<Vec<f64>, CliError> {
    let m = half.len();
    if m < 2 {
        return Err(CliError::Data("one-sided spectra need at least 2 values".into()));
    }
    let n = 2 * (m - 1);
    let mut full = vec![0.0; n];
    // full bin n/2 is w = 0 and bin 0 is w = -pi (the same point as +pi)
    full[n / 2] = half[0];
    full[0] = half[m - 1];
    for (k, v) in half.iter().enumerate().take(m - 1).skip(1) {
        full[n / 2 + k] = v / 2.0;
        full[n / 2 - k] = v / 2.0;
    }
    Ok(full)
}

pub fn set_from_file(file: &SetFile) -> Result<LabeledPsdSet, CliError> {
    if file.labels.len() != file.psds.len() {
        return Err(CliError::Data(format!(
            "{} labels for {} spectra",
            file.labels.len(),
            file.psds.len()
        )));
    }
    let grid = make_grid(file.n_bins)?;
    let mut psds = Vec::with_capacity(file.psds.len());
    for (i, raw) in file.psds.iter().enumerate() {
        let mass = if file.one_sided {
            mirror_one_sided(raw)?
        } else {
            raw.clone()
        };
        if mass.len() != file.n_bins {
            return Err(CliError::Data(format!(
                "spectrum {i} has {} bins, expected {}",
                mass.len(),
                file.n_bins
            )));
        }
        psds.push(Psd::new(grid, mass).map_err(|e| CliError::Data(format!("spectrum {i}: {e}")))?);
    }
    Ok(LabeledPsdSet::new(psds, file.labels.clone())?)
}

pub fn set_to_file(set: &LabeledPsdSet) -> SetFile {
    SetFile {
        n_bins: set.psds().first().map_or(0, Psd::n_bins),
        one_sided: false,
        labels: set.labels().to_vec(),
        psds: set.psds().iter().map(|p| p.mass().to_vec()).collect(),
    }
}

pub fn parse_set(text: &str) -> Result<LabeledPsdSet, CliError> {
    let file: SetFile =
        serde_json::from_str(text).map_err(|e| CliError::Data(format!("bad set file: {e}")))?;
    set_from_file(&file)
}

pub fn render_set(set: &LabeledPsdSet) -> String {
    let mut s = serde_json::to_string_pretty(&set_to_file(set)).expect("sets serialize");
    s.push('\n');
    s
}

pub fn read_set(path: &Path) -> Result<LabeledPsdSet, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    parse_set(&text)
}

/// CSV with one header row and one column per entry of `columns`.
pub fn render_columns(header: &[&str], columns: &[Vec<f64>]) -> String {
    assert_eq!(header.len(), columns.len(), "one header per column");
    let rows = columns.first().map_or(0, Vec::len);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in 0..rows {
        w.write_record(columns.iter().map(|c| format_float(c[r])))
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

/// Parses CSV written by [`render_columns`].
pub fn parse_columns(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), CliError> {
    let bad = |e: csv::Error| CliError::Data(format!("bad CSV: {e}"));
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header: Vec<String> = r.headers().map_err(bad)?.iter().map(str::to_string).collect();
    let mut columns = vec![Vec::new(); header.len()];
    for (i, record) in r.records().enumerate() {
        let record = record.map_err(bad)?;
        for (col, f) in columns.iter_mut().zip(record.iter()) {
            col.push(
                f.parse()
                    .map_err(|_| CliError::Data(format!("CSV row {}: bad number '{f}'", i + 1)))?,
            );
        }
    }
    Ok((header, columns))
}

/// A single spectrum as `omega,mass` CSV.
pub fn render_psd(psd: &Psd) -> String {
    render_columns(&["omega", "mass"], &[psd.grid().points(), psd.mass().to_vec()])
}

pub fn parse_psd(text: &str) -> Result<Psd, CliError> {
    let (header, cols) = parse_columns(text)?;
    if header != ["omega", "mass"] {
        return Err(CliError::Data("expected an omega,mass header".into()));
    }
    let grid = make_grid(cols[1].len())?;
    Ok(Psd::new(grid, cols[1].clone())?)
}

/// Shortest representation that parses back to `v`.
pub fn format_float(v: f64) -> String {
    format!("{v:?}")
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)
                .map_err(|e| CliError::Data(format!("cannot create {}: {e}", dir.display())))?;
        }
    }
    fs::write(path, contents).map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}
