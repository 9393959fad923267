//! Report emission: JSON with every float in shortest round-trip scientific
//! notation, a fixed-width text table rounded to 6 significant digits, and
//! per-outcome CSV.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use weakval_core::metrology::MetrologyReport;

/// Pretty JSON formatter that writes finite floats as `{:e}`.
///
/// Rust's `{:e}` prints the shortest digits that parse back to the same
/// value, so the document round-trips at full double precision.
pub struct ScientificFormatter<'a>(PrettyFormatter<'a>);

impl Default for ScientificFormatter<'_> {
    fn default() -> Self {
        ScientificFormatter(PrettyFormatter::new())
    }
}

impl Formatter for ScientificFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:e}")
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ScientificFormatter::default());
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json(value)?).with_context(|| format!("writing {}", path.display()))
}

/// Display rounding: 6 significant digits, fixed point for moderate
/// magnitudes and scientific otherwise.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "-".into() } else { format!("{x}") };
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
        if s == "-0" { "0".into() } else { s }
    } else {
        let s = format!("{x:.5e}");
        let (mantissa, exponent) = s.split_once('e').unwrap();
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{exponent}")
    }
}

/// One identity or invariant evaluated on a concrete input.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub identity: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckRecord {
    pub fn upper(identity: &str, residual: f64, tolerance: f64) -> Self {
        CheckRecord {
            identity: identity.into(),
            residual,
            tolerance,
            passed: residual <= tolerance,
        }
    }
}

pub fn render_checks(checks: &[CheckRecord]) -> String {
    let width = checks.iter().map(|c| c.identity.len()).max().unwrap_or(8).max(8);
    let mut out = format!("{:<width$}  {:>12}  {:>12}  result\n", "check", "residual", "tolerance");
    for c in checks {
        out += &format!(
            "{:<width$}  {:>12}  {:>12}  {}\n",
            c.identity,
            sig6(c.residual),
            sig6(c.tolerance),
            if c.passed { "pass" } else { "FAIL" }
        );
    }
    out
}

/// Renders rows of already-formatted cells with right-aligned columns.
pub fn render_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            + "\n"
    };
    let mut out = line(header.to_vec());
    for row in rows {
        out += &line(row.iter().map(String::as_str).collect());
    }
    out
}

pub fn outcome_rows(report: &MetrologyReport) -> Vec<Vec<String>> {
    report
        .per_outcome
        .iter()
        .enumerate()
        .map(|(m, o)| {
            vec![
                m.to_string(),
                sig6(o.probability),
                o.weak_value.map_or("-".into(), |w| sig6(w.re)),
                o.weak_value.map_or("-".into(), |w| sig6(w.im)),
                o.log_derivative.map_or("-".into(), sig6),
            ]
        })
        .collect()
}

pub const OUTCOME_HEADER: [&str; 5] = ["outcome", "probability", "re_weak", "im_weak", "log_derivative"];

/// Per-outcome CSV; undefined weak values are left empty.
pub fn write_outcome_csv(path: &Path, report: &MetrologyReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    w.write_record(OUTCOME_HEADER)?;
    let full = |x: f64| format!("{x:e}");
    for (m, o) in report.per_outcome.iter().enumerate() {
        w.write_record([
            m.to_string(),
            full(o.probability),
            o.weak_value.map_or(String::new(), |z| full(z.re)),
            o.weak_value.map_or(String::new(), |z| full(z.im)),
            o.log_derivative.map_or(String::new(), full),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `report.json` → `report.outcomes.csv` in the same directory.
pub fn sibling_csv(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "report".into());
    out.with_file_name(format!("{stem}.outcomes.csv"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig6_rounding() {
        assert_eq!(sig6(0.25), "0.25");
        assert_eq!(sig6(1.0), "1");
        assert_eq!(sig6(1.0 / 3.0), "0.333333");
        assert_eq!(sig6(-123456.7), "-123457");
        assert_eq!(sig6(1234567.0), "1.23457e6");
        assert_eq!(sig6(2.5e-7), "2.5e-7");
        assert_eq!(sig6(1e-10), "1e-10");
        assert_eq!(sig6(-1e-17 * 0.0), "0");
        assert_eq!(sig6(f64::NAN), "-");
    }

    #[test]
    fn json_floats_round_trip() {
        let values = vec![0.1, 1.0 / 3.0, -2.5e-300, 1e300, 0.0, 6.02214076e23, f64::MIN_POSITIVE];
        let text = to_json(&values).unwrap();
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(values, back);
        assert!(text.contains("1e0") || text.contains("3.333333333333333e-1"));
        assert_eq!(to_json(&f64::NAN).unwrap().trim(), "null");
    }

    #[test]
    fn csv_path_sits_next_to_report() {
        assert_eq!(sibling_csv(Path::new("/tmp/x/report.json")), Path::new("/tmp/x/report.outcomes.csv"));
    }
}
