//! Corpus manifests (CSV) and the CSV reports written by the tool.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use autodecompose_core::dsp::MelChunk;
use autodecompose_core::model::EpochLog;
use autodecompose_core::probe::{LabeledCorpus, ReportRow};

use crate::error::{CliError, CliResult};
use crate::formats;

/// One manifest: its header and rows, with chunk paths resolved against the
/// manifest's directory.
#[derive(Clone, Debug)]
pub struct Manifest {
    pub path: PathBuf,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Manifest {
    pub fn read(path: &Path) -> CliResult<Self> {
        let mut r = csv::Reader::from_path(path).map_err(|e| CliError::format(path, e.to_string()))?;
        let headers = r
            .headers()
            .map_err(|e| CliError::format(path, e.to_string()))?
            .iter()
            .map(str::to_owned)
            .collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|r| r.iter().map(str::to_owned).collect()))
            .collect::<Result<Vec<Vec<String>>, _>>()
            .map_err(|e| CliError::format(path, e.to_string()))?;
        Ok(Self {
            path: path.to_owned(),
            headers,
            rows,
        })
    }

    /// Index of a column; a missing column is a configuration error naming it.
    pub fn column(&self, name: &str) -> CliResult<usize> {
        self.headers.iter().position(|h| h == name).ok_or_else(|| {
            CliError::Config(format!(
                "{} has no `{name}` column (columns: {})",
                self.path.display(),
                self.headers.join(", ")
            ))
        })
    }

    fn base(&self) -> PathBuf {
        self.path.parent().map(Path::to_owned).unwrap_or_default()
    }

    /// Values of a path column, resolved relative to the manifest.
    pub fn paths(&self, column: &str) -> CliResult<Vec<PathBuf>> {
        let c = self.column(column)?;
        let base = self.base();
        Ok(self.rows.iter().map(|r| base.join(&r[c])).collect())
    }

    pub fn chunks(&self, floor: f32) -> CliResult<Vec<MelChunk>> {
        self.paths("chunk_path")?
            .iter()
            .map(|p| formats::read_chunk(p, floor))
            .collect()
    }

    /// Dense labels of a column: distinct values in order of first numeric
    /// (or, failing that, lexical) value.
    pub fn labels(&self, column: &str) -> CliResult<(Vec<usize>, usize)> {
        let c = self.column(column)?;
        let raw: Vec<&str> = self.rows.iter().map(|r| r[c].as_str()).collect();
        let mut distinct: Vec<&str> = raw.clone();
        distinct.sort_by(|a, b| match (a.parse::<i64>(), b.parse::<i64>()) {
            (Ok(x), Ok(y)) => x.cmp(&y),
            _ => a.cmp(b),
        });
        distinct.dedup();
        let ids: HashMap<&str, usize> = distinct.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        Ok((raw.iter().map(|s| ids[s]).collect(), distinct.len()))
    }

    pub fn labeled_corpus(&self, floor: f32) -> CliResult<LabeledCorpus> {
        let (source_labels, n_sources) = self.labels("source_id")?;
        let (content_labels, n_contents) = self.labels("content_id")?;
        Ok(LabeledCorpus {
            chunks: self.chunks(floor)?,
            source_labels,
            content_labels,
            n_sources,
            n_contents,
        })
    }
}

pub fn write_csv<I, R>(path: &Path, headers: &[&str], rows: I) -> CliResult<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::format(path, e.to_string()))?;
    w.write_record(headers)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_loss_csv(path: &Path, log: &[EpochLog]) -> CliResult<()> {
    write_csv(
        path,
        &["epoch", "mean_loss"],
        log.iter().map(|e| [e.epoch.to_string(), format!("{:.9e}", e.mean_loss)]),
    )
}

pub fn write_timing_csv(path: &Path, log: &[(u64, f64)]) -> CliResult<()> {
    write_csv(
        path,
        &["epoch", "wall_seconds"],
        log.iter().map(|(e, s)| [e.to_string(), format!("{s:.3}")]),
    )
}

pub const REPORT_COLUMNS: [&str; 7] = [
    "encoder",
    "label_kind",
    "budget_seconds",
    "macro_f1",
    "n_train",
    "n_test",
    "seed",
];

pub fn write_report_csv(path: &Path, rows: &[ReportRow]) -> CliResult<()> {
    write_csv(
        path,
        &REPORT_COLUMNS,
        rows.iter().map(|r| {
            [
                r.encoder.clone(),
                r.label_kind.clone(),
                format!("{}", r.budget_seconds),
                format!("{:.6}", r.macro_f1),
                r.n_train.to_string(),
                r.n_test.to_string(),
                r.seed.to_string(),
            ]
        }),
    )
}

pub fn write_pca_csv(path: &Path, coords: &[[f64; 2]], labels: &[usize]) -> CliResult<()> {
    write_csv(
        path,
        &["row_id", "label", "x", "y"],
        coords.iter().zip(labels).enumerate().map(|(i, (c, l))| {
            [i.to_string(), l.to_string(), format!("{:.6}", c[0]), format!("{:.6}", c[1])]
        }),
    )
}
