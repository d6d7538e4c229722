//! Output plumbing: CSV or JSON-lines with a config header, written to
//! stdout or a file. Floats carry 17 significant digits so files
//! round-trip bit-exactly.

use anyhow::Result;
use serde::Serialize;
use std::fs::File;
use std::io::{BufWriter, Stdout, Write};
use std::path::Path;

pub fn fmt17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

enum Target {
    Stdout(Stdout),
    File(BufWriter<File>),
}

impl Write for Target {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        match self {
            Target::Stdout(s) => s.write(buf),
            Target::File(f) => f.write(buf),
        }
    }
    fn flush(&mut self) -> std::io::Result<()> {
        match self {
            Target::Stdout(s) => s.flush(),
            Target::File(f) => f.flush(),
        }
    }
}

pub struct OutputSink {
    target: Target,
    jsonl: bool,
}

impl OutputSink {
    pub fn open(path: Option<&Path>, jsonl: bool) -> Result<Self> {
        let target = match path {
            Some(p) => Target::File(BufWriter::new(File::create(p)?)),
            None => Target::Stdout(std::io::stdout()),
        };
        Ok(OutputSink { target, jsonl })
    }

    /// Config echo: a `#` comment line in CSV, a config object in JSONL.
    pub fn header(&mut self, config_json: &str) -> Result<()> {
        if self.jsonl {
            writeln!(self.target, "{{\"config\":{config_json}}}")?;
        } else {
            writeln!(self.target, "# config {config_json}")?;
        }
        Ok(())
    }

    pub fn comment(&mut self, text: &str) -> Result<()> {
        if self.jsonl {
            writeln!(self.target, "{{\"comment\":{}}}", serde_json::to_string(text)?)?;
        } else {
            writeln!(self.target, "# {text}")?;
        }
        Ok(())
    }

    /// CSV header row (no-op in JSONL mode).
    pub fn columns(&mut self, cols: &[&str]) -> Result<()> {
        if !self.jsonl {
            writeln!(self.target, "{}", cols.join(","))?;
        }
        Ok(())
    }

    /// One record: the preformatted cells in CSV mode, the serializable
    /// value in JSONL mode.
    pub fn row<T: Serialize>(&mut self, cells: &[String], value: &T) -> Result<()> {
        if self.jsonl {
            serde_json::to_writer(&mut self.target, value)?;
            writeln!(self.target)?;
        } else {
            writeln!(self.target, "{}", cells.join(","))?;
        }
        Ok(())
    }

    /// Raw writer for line-oriented payloads (tree export).
    pub fn raw(&mut self) -> &mut dyn Write {
        &mut self.target
    }

    pub fn finish(&mut self) -> Result<()> {
        self.target.flush()?;
        Ok(())
    }
}
