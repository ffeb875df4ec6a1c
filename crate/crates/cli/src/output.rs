//! CSV and JSON emitters.

use std::fs::{self, File};
use std::path::{Path, PathBuf};

use aoi_core::AgePath;
use serde::Serialize;

use crate::args::{FileConfig, Resolved};
use crate::CliError;

/// Shortest decimal that round-trips, always with a decimal point and
/// never in exponent form.
pub fn fmt_f64(x: f64) -> String {
    let s = format!("{x}");
    if x.is_finite() && !s.contains('.') {
        s + ".0"
    } else {
        s
    }
}

/// Collects written paths for the manifest.
#[derive(Debug)]
pub struct OutDir {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl OutDir {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn csv<F>(&mut self, name: &str, header: &[&str], fill: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut csv::Writer<File>) -> csv::Result<()>,
    {
        let path = self.dir.join(name);
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(file);
        w.write_record(header)
            .and_then(|()| fill(&mut w))
            .and_then(|()| w.flush().map_err(csv::Error::from))
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.written.push(path);
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let path = self.dir.join(name);
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    /// `time,node,age_before_jump,age_after_jump`, one row per jump.
    pub fn age_paths(&mut self, name: &str, paths: &[AgePath]) -> Result<(), CliError> {
        self.csv(
            name,
            &["time", "node", "age_before_jump", "age_after_jump"],
            |w| {
                for p in paths {
                    for b in &p.breakpoints {
                        w.write_record([
                            fmt_f64(b.time),
                            p.node.to_string(),
                            fmt_f64(b.age_before),
                            fmt_f64(b.age_after),
                        ])?;
                    }
                }
                Ok(())
            },
        )
    }

    /// `time,node,running_avg`.
    pub fn running_averages(&mut self, name: &str, paths: &[AgePath]) -> Result<(), CliError> {
        self.csv(name, &["time", "node", "running_avg"], |w| {
            for p in paths {
                for &(t, r) in &p.running_average {
                    w.write_record([fmt_f64(t), p.node.to_string(), fmt_f64(r)])?;
                }
            }
            Ok(())
        })
    }

    /// `replication,time,node,running_avg`.
    pub fn running_average_bundles(
        &mut self,
        name: &str,
        runs: &[Vec<AgePath>],
    ) -> Result<(), CliError> {
        self.csv(name, &["replication", "time", "node", "running_avg"], |w| {
            for (rep, paths) in runs.iter().enumerate() {
                for p in paths {
                    for &(t, r) in &p.running_average {
                        w.write_record([
                            rep.to_string(),
                            fmt_f64(t),
                            p.node.to_string(),
                            fmt_f64(r),
                        ])?;
                    }
                }
            }
            Ok(())
        })
    }

    /// `time,node,age` on the fixed sampling grid.
    pub fn samples(&mut self, name: &str, paths: &[AgePath]) -> Result<(), CliError> {
        self.csv(name, &["time", "node", "age"], |w| {
            for p in paths {
                for &(t, a) in &p.samples {
                    w.write_record([fmt_f64(t), p.node.to_string(), fmt_f64(a)])?;
                }
            }
            Ok(())
        })
    }

    /// Writes `manifest.json` listing everything written so far, itself
    /// included.
    pub fn finish(mut self, mode: &str, run: &Resolved) -> Result<Vec<PathBuf>, CliError> {
        let path = self.dir.join("manifest.json");
        self.written.push(path.clone());
        let manifest = Manifest {
            tool_version: env!("CARGO_PKG_VERSION"),
            timestamp: chrono::Utc::now().to_rfc3339(),
            mode,
            seed: run.seed.to_string(),
            config: run.file_config(),
            outputs: self
                .written
                .iter()
                .map(|p| p.display().to_string())
                .collect(),
        };
        let mut text = serde_json::to_string_pretty(&manifest)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(self.written)
    }
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool_version: &'a str,
    timestamp: String,
    mode: &'a str,
    seed: String,
    config: FileConfig,
    outputs: Vec<String>,
}
