//! Artifact emission: UTF-8 CSV with `\n` line endings and `.` decimals,
//! JSON with stable key order, and cleanup of partial outputs on error.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

/// Tracks the files a command writes so a failing run can remove its own
/// partial outputs. Call [`Artifacts::commit`] once everything succeeded;
/// dropping an uncommitted set deletes the tracked files.
#[derive(Debug)]
pub struct Artifacts {
    created: Vec<PathBuf>,
    committed: bool,
}

impl Artifacts {
    pub fn new() -> Self {
        Artifacts { created: Vec::new(), committed: false }
    }

    /// Writes `text` to `path` and tracks the file.
    pub fn write_text(&mut self, path: &Path, text: &str) -> Result<()> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)
                .with_context(|| format!("creating {}", dir.display()))?;
        }
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
        self.created.push(path.to_path_buf());
        Ok(())
    }

    /// Serializes `value` as pretty JSON (stable key order) plus a trailing
    /// newline, and tracks the file.
    pub fn write_json<T: Serialize>(&mut self, path: &Path, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)
            .with_context(|| format!("serializing {}", path.display()))?;
        text.push('\n');
        self.write_text(path, &text)
    }

    /// Writes a CSV file: one header line, then one line per row.
    pub fn write_csv<I>(&mut self, path: &Path, header: &str, rows: I) -> Result<()>
    where
        I: IntoIterator<Item = String>,
    {
        let mut text = String::from(header);
        text.push('\n');
        for row in rows {
            text.push_str(&row);
            text.push('\n');
        }
        self.write_text(path, &text)
    }

    /// Marks the run as successful; tracked files are kept.
    pub fn commit(mut self) {
        self.committed = true;
    }
}

impl Default for Artifacts {
    fn default() -> Self {
        Self::new()
    }
}

impl Drop for Artifacts {
    fn drop(&mut self) {
        if self.committed {
            return;
        }
        for path in &self.created {
            let _ = fs::remove_file(path);
        }
    }
}

/// Renders an `f64` for CSV output: shortest form that parses back exactly.
pub fn csv_float(x: f64) -> String {
    format!("{x}")
}
