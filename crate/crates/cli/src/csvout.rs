//! CSV output: comma separated, `.` decimal, 17 significant digits,
//! `#`-prefixed metadata lines, then one header row. Identical inputs
//! produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use diskgap_core::bipolar::BipolarFrame;

pub struct CsvWriter {
    buf: String,
}

/// 17 significant digits round-trip any f64.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.16e}")
    }
}

impl CsvWriter {
    pub fn new(tool_line: &str) -> Self {
        let mut buf = String::new();
        let _ = writeln!(buf, "# {tool_line}");
        CsvWriter { buf }
    }

    pub fn comment(&mut self, line: &str) {
        let _ = writeln!(self.buf, "# {line}");
    }

    /// Embeds a multi-line block (e.g. the resolved config) as comments.
    pub fn comment_block(&mut self, label: &str, block: &str) {
        let _ = writeln!(self.buf, "# {label}:");
        for line in block.lines() {
            let _ = writeln!(self.buf, "#   {line}");
        }
    }

    pub fn frame_comment(&mut self, frame: &BipolarFrame, k: Option<f64>) {
        let g = frame.geometry();
        let mut line = format!(
            "frame: r_i={} r_e={} eps={} alpha={} c_i={} c_e={} x_0={} xi_i={} xi_e={} r_star={}",
            fmt_f64(g.r_i()),
            fmt_f64(g.r_e()),
            fmt_f64(g.eps()),
            fmt_f64(frame.alpha()),
            fmt_f64(frame.c_i()),
            fmt_f64(frame.c_e()),
            fmt_f64(frame.x_0()),
            fmt_f64(frame.xi_i()),
            fmt_f64(frame.xi_e()),
            fmt_f64(frame.r_star()),
        );
        if let Some(k) = k {
            let _ = write!(line, " k={}", fmt_f64(k));
        }
        self.comment(&line);
    }

    pub fn header(&mut self, columns: &[&str]) {
        let _ = writeln!(self.buf, "{}", columns.join(","));
    }

    pub fn row(&mut self, values: &[f64]) {
        let mut first = true;
        for v in values {
            if !first {
                self.buf.push(',');
            }
            self.buf.push_str(&fmt_f64(*v));
            first = false;
        }
        self.buf.push('\n');
    }

    pub fn raw_line(&mut self, line: &str) {
        let _ = writeln!(self.buf, "{line}");
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                fs::create_dir_all(dir)
                    .with_context(|| format!("cannot create directory {}", dir.display()))?;
            }
        }
        fs::write(path, &self.buf).with_context(|| format!("cannot write {}", path.display()))
    }

    pub fn contents(&self) -> &str {
        &self.buf
    }
}
