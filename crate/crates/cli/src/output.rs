//! Fixed-format CSV text and atomic file output.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use ctoa_core::config::SystemConfig;

/// Twelve significant digits in scientific notation.
pub fn num(x: f64) -> String {
    format!("{x:.11e}")
}

pub struct Csv {
    text: String,
}

impl Csv {
    /// Starts with the `#` metadata line and the column row.
    pub fn new(
        command: &str,
        config: &SystemConfig,
        extra: &[(&str, String)],
        columns: &[&str],
    ) -> Self {
        let mut text = format!(
            "# ctoa {command} gamma={} length_l={} mass_mu={} hbar={} basis_cutoff={} grid_points={}",
            num(config.gamma),
            num(config.length_l),
            num(config.mass_mu),
            num(config.hbar),
            config.basis_cutoff,
            config.grid_points,
        );
        for (k, v) in extra {
            write!(text, " {k}={v}").expect("string write");
        }
        text.push('\n');
        text.push_str(&columns.join(","));
        text.push('\n');
        Csv { text }
    }

    pub fn row<I: IntoIterator<Item = String>>(&mut self, cells: I) {
        let cells: Vec<String> = cells.into_iter().collect();
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// Writes to `path` through a sibling temporary file, or to standard output.
pub fn emit(text: &str, path: Option<&Path>) -> std::io::Result<()> {
    match path {
        Some(p) => write_atomic(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                // a closed reader (`| head`) is not an error
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                r => r,
            }
        }
    }
}

pub fn write_atomic(path: &Path, text: &str) -> std::io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)
}
