use crate::config::SweepConfig;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub const MANIFEST: &str = "manifest.json";
pub const SCHEMA_VERSION: u32 = 1;
pub const CONVENTIONS: &str = "frequencies and rates in units of omega; alpha = x + i y is the rescaled cavity field; \
complex values split into re_/im_ columns; empty field means not applicable";

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{path}: {reason}")]
    Format { path: PathBuf, reason: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> OutputError + '_ {
    move |source| OutputError::Io { path: path.into(), source }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Keeps every record on one line.
pub fn fmt_text(s: &str) -> String {
    s.replace(['\n', '\r'], " ")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableSpec {
    pub file: String,
    pub columns: Vec<String>,
}

impl TableSpec {
    pub fn new(file: &str, columns: &[&str]) -> Self {
        Self { file: file.into(), columns: columns.iter().map(|c| c.to_string()).collect() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Partial,
    Complete,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub schema: Vec<String>,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub tool: String,
    pub core: String,
    pub mode: String,
    pub config_sha256: String,
    pub status: Status,
    pub completed_cells: usize,
    pub total_cells: usize,
    pub failed_cells: usize,
    pub files: Vec<FileEntry>,
    /// Seconds since the Unix epoch; kept out of the data files.
    pub written_at: u64,
}

impl Manifest {
    pub fn read(dir: &Path) -> Result<Self, OutputError> {
        let path = dir.join(MANIFEST);
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        serde_json::from_str(&text).map_err(|source| OutputError::Json { path, source })
    }

    fn write_atomic(&self, dir: &Path) -> Result<(), OutputError> {
        let path = dir.join(MANIFEST);
        let tmp = dir.join(format!("{MANIFEST}.tmp"));
        let text =
            serde_json::to_string_pretty(self).map_err(|source| OutputError::Json { path: path.clone(), source })?;
        fs::write(&tmp, text + "\n").map_err(io_err(&tmp))?;
        fs::rename(&tmp, &path).map_err(io_err(&path))
    }
}

/// Rows produced by one cell, grouped by output file.
#[derive(Debug, Clone, Default)]
pub struct CellOut {
    pub rows: Vec<Vec<Vec<String>>>,
    pub failed: bool,
}

impl CellOut {
    pub fn new(files: usize) -> Self {
        Self { rows: vec![Vec::new(); files], failed: false }
    }

    pub fn push(&mut self, file: usize, row: Vec<String>) {
        self.rows[file].push(row);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub total_cells: usize,
    pub failed_cells: usize,
    /// Cells taken over from an earlier partial run.
    pub resumed_cells: usize,
}

fn metadata(cfg: &SweepConfig) -> Vec<String> {
    vec![
        format!("tool: aqrm-cli {}", env!("CARGO_PKG_VERSION")),
        format!("core: aqrm {}", aqrm::VERSION),
        format!("mode: {}", cfg.mode.as_str()),
        format!("config: {}", cfg.data_json()),
        format!("config_sha256: {}", cfg.hash()),
        format!("conventions: {CONVENTIONS}"),
    ]
}

/// An output directory being filled cell by cell.
pub struct Run {
    dir: PathBuf,
    manifest: Manifest,
    tables: Vec<TableSpec>,
    writers: Vec<csv::Writer<BufWriter<File>>>,
    pool: rayon::ThreadPool,
    chunk: usize,
    resumed: usize,
}

impl Run {
    /// Opens `cfg.output`, resuming when it holds a partial run of the same
    /// configuration and otherwise starting afresh.
    pub fn open(
        cfg: &SweepConfig,
        tables: Vec<TableSpec>,
        total_cells: usize,
        workers: usize,
    ) -> Result<Self, OutputError> {
        let dir = cfg.output.clone();
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        let hash = cfg.hash();
        let files: Vec<FileEntry> =
            tables.iter().map(|t| FileEntry { name: t.file.clone(), schema: t.columns.clone(), rows: 0 }).collect();

        let previous = Manifest::read(&dir).ok().filter(|m| {
            m.status == Status::Partial
                && m.config_sha256 == hash
                && m.mode == cfg.mode.as_str()
                && m.total_cells == total_cells
                && m.completed_cells <= total_cells
                && m.files.len() == files.len()
                && m.files.iter().zip(&files).all(|(a, b)| a.name == b.name && a.schema == b.schema)
        });
        let previous = match previous {
            Some(m) if m.files.iter().all(|f| truncate_rows(&dir.join(&f.name), f.rows).is_ok()) => Some(m),
            _ => None,
        };

        let meta = metadata(cfg);
        let mut writers = Vec::with_capacity(tables.len());
        for t in &tables {
            let path = dir.join(&t.file);
            let file = if previous.is_some() {
                OpenOptions::new().append(true).open(&path).map_err(io_err(&path))?
            } else {
                let mut f = BufWriter::new(File::create(&path).map_err(io_err(&path))?);
                for line in &meta {
                    writeln!(f, "# {line}").map_err(io_err(&path))?;
                }
                let mut w = csv::Writer::from_writer(f);
                w.write_record(&t.columns).map_err(|source| OutputError::Csv { path: path.clone(), source })?;
                w.flush().map_err(io_err(&path))?;
                OpenOptions::new().append(true).open(&path).map_err(io_err(&path))?
            };
            writers.push(csv::WriterBuilder::new().has_headers(false).from_writer(BufWriter::new(file)));
        }

        let resumed = previous.as_ref().map_or(0, |m| m.completed_cells);
        let manifest = previous.unwrap_or(Manifest {
            schema_version: SCHEMA_VERSION,
            tool: env!("CARGO_PKG_VERSION").into(),
            core: aqrm::VERSION.into(),
            mode: cfg.mode.as_str().into(),
            config_sha256: hash,
            status: Status::Partial,
            completed_cells: 0,
            total_cells,
            failed_cells: 0,
            files,
            written_at: 0,
        });
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| OutputError::Format { path: dir.clone(), reason: e.to_string() })?;
        let mut run = Self { dir, manifest, tables, writers, pool, chunk: (workers * 4).max(1), resumed };
        run.checkpoint(Status::Partial)?;
        Ok(run)
    }

    pub fn resumed_cells(&self) -> usize {
        self.resumed
    }

    /// Evaluates the remaining cells in parallel and writes them in order.
    pub fn cells<F>(&mut self, f: F) -> Result<(), OutputError>
    where
        F: Fn(usize) -> CellOut + Sync,
    {
        let total = self.manifest.total_cells;
        while self.manifest.completed_cells < total {
            let lo = self.manifest.completed_cells;
            let hi = (lo + self.chunk).min(total);
            let outs: Vec<CellOut> = self.pool.install(|| (lo..hi).into_par_iter().map(&f).collect());
            for out in outs {
                for (file, rows) in out.rows.into_iter().enumerate() {
                    self.write_rows(file, rows)?;
                }
                self.manifest.failed_cells += out.failed as usize;
            }
            self.manifest.completed_cells = hi;
            self.checkpoint(Status::Partial)?;
        }
        Ok(())
    }

    /// Rows computed once after all cells.
    pub fn append(&mut self, file: usize, rows: Vec<Vec<String>>) -> Result<(), OutputError> {
        self.write_rows(file, rows)?;
        self.checkpoint(Status::Partial)
    }

    pub fn finish(mut self) -> Result<RunSummary, OutputError> {
        self.checkpoint(Status::Complete)?;
        Ok(RunSummary {
            files: self.tables.iter().map(|t| self.dir.join(&t.file)).collect(),
            dir: self.dir,
            total_cells: self.manifest.total_cells,
            failed_cells: self.manifest.failed_cells,
            resumed_cells: self.resumed,
        })
    }

    fn write_rows(&mut self, file: usize, rows: Vec<Vec<String>>) -> Result<(), OutputError> {
        let path = self.dir.join(&self.tables[file].file);
        let width = self.tables[file].columns.len();
        for row in rows {
            if row.len() != width {
                return Err(OutputError::Format {
                    path,
                    reason: format!("row has {} fields, schema has {width}", row.len()),
                });
            }
            self.writers[file].write_record(&row).map_err(|source| OutputError::Csv { path: path.clone(), source })?;
            self.manifest.files[file].rows += 1;
        }
        Ok(())
    }

    fn checkpoint(&mut self, status: Status) -> Result<(), OutputError> {
        for (w, t) in self.writers.iter_mut().zip(&self.tables) {
            w.flush().map_err(io_err(&self.dir.join(&t.file)))?;
        }
        self.manifest.status = status;
        self.manifest.written_at =
            std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs());
        self.manifest.write_atomic(&self.dir)
    }
}

/// Drops data rows beyond the first `keep`.
fn truncate_rows(path: &Path, keep: usize) -> Result<(), OutputError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut out = String::with_capacity(text.len());
    let mut data = 0;
    let mut header = false;
    for line in text.lines() {
        if !header {
            header = !line.starts_with('#');
        } else {
            if data == keep {
                break;
            }
            data += 1;
        }
        out.push_str(line);
        out.push('\n');
    }
    if !header || data < keep {
        return Err(OutputError::Format {
            path: path.into(),
            reason: format!("fewer than {keep} rows to resume from"),
        });
    }
    fs::write(path, out).map_err(io_err(path))
}
