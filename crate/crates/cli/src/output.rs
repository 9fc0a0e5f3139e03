use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::config::ExperimentConfig;
use crate::CliError;

/// Destination of one CSV table: a file, or stdout when no path is given.
pub struct Sink {
    out: Box<dyn Write>,
    path: Option<PathBuf>,
}

impl Sink {
    pub fn open(path: Option<&Path>) -> Result<Self, CliError> {
        let out: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).map_err(|e| CliError::Io(format!("cannot create {}: {e}", p.display())))?,
            )),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(Self {
            out,
            path: path.map(Path::to_path_buf),
        })
    }

    /// Comment lines with the library version, seed and resolved config.
    pub fn header(&mut self, cfg: &ExperimentConfig, extra: &[(&str, String)]) -> Result<(), CliError> {
        let json = serde_json::to_string(cfg).map_err(|e| CliError::Io(e.to_string()))?;
        let mut text = format!(
            "# grkhs {}\n# command: {}\n# seed: {}\n# config: {json}\n",
            grkhs::VERSION,
            cfg.command,
            cfg.seed
        );
        for (k, v) in extra {
            text.push_str(&format!("# {k}: {v}\n"));
        }
        self.write_raw(&text)
    }

    pub fn write_raw(&mut self, text: &str) -> Result<(), CliError> {
        self.out.write_all(text.as_bytes()).map_err(|e| self.io_error(e))
    }

    /// Writes `rows` under the column names `columns`.
    pub fn table(&mut self, columns: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let err = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(columns).map_err(err)?;
        for r in rows {
            w.write_record(r).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        self.out.write_all(&bytes).map_err(|e| self.io_error(e))
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.out.flush().map_err(|e| self.io_error(e))
    }

    fn io_error(&self, e: io::Error) -> CliError {
        match &self.path {
            Some(p) => CliError::Io(format!("cannot write {}: {e}", p.display())),
            None => CliError::Io(format!("cannot write to stdout: {e}")),
        }
    }
}

/// `out.csv` → `out_d4.csv` for per-dimension files.
pub fn per_dimension_path(base: &Path, d: usize) -> PathBuf {
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let name = match base.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}_d{d}.{ext}"),
        None => format!("{stem}_d{d}"),
    };
    base.with_file_name(name)
}

/// Shortest round-trip form; exponent notation for very small or large values.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-5..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn per_dimension_names() {
        assert_eq!(per_dimension_path(Path::new("a/out.csv"), 4), PathBuf::from("a/out_d4.csv"));
        assert_eq!(per_dimension_path(Path::new("table"), 2), PathBuf::from("table_d2"));
    }

    #[test]
    fn number_format_round_trips() {
        for x in [0.0, 1.0, 0.5, 1.7963785889362148e-16, 3e20, -2.5e-300, 12345.678] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(1e-16), "1e-16");
    }
}
