//! Deterministic text output.
//!
//! Every file is UTF-8 with LF line endings, floats printed with 17
//! significant digits, and a comment header that embeds the fully
//! resolved configuration; running the same configuration twice produces
//! byte-identical files, and the header alone suffices to reproduce a
//! file.

use crate::spectrum::SpectralLine;
use crate::Result;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const CONFIG_BEGIN: &str = "# --- config ---";
pub const CONFIG_END: &str = "# --- end config ---";

/// 17-significant-digit float formatting (stable across runs).
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// Build the standard header: tool version, command, resolved config.
pub fn header(command: &str, config_toml: &str, extra: &[(&str, String)]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# flospec {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "# command: {command}");
    for (k, v) in extra {
        let _ = writeln!(out, "# {k}: {v}");
    }
    let _ = writeln!(out, "{CONFIG_BEGIN}");
    for line in config_toml.lines() {
        let _ = writeln!(out, "# {line}");
    }
    let _ = writeln!(out, "{CONFIG_END}");
    out
}

/// Extract the embedded configuration TOML from a written file.
pub fn extract_config(file_text: &str) -> Option<String> {
    let mut lines = file_text.lines();
    lines.find(|l| *l == CONFIG_BEGIN)?;
    let mut cfg = String::new();
    for line in lines {
        if line == CONFIG_END {
            return Some(cfg);
        }
        cfg.push_str(line.strip_prefix("# ").unwrap_or(line.strip_prefix('#')?));
        cfg.push('\n');
    }
    None
}

/// Write a numeric table with named columns.
pub fn write_table(
    path: &Path,
    header_text: &str,
    columns: &[&str],
    rows: &[Vec<f64>],
) -> Result<()> {
    let mut out = String::from(header_text);
    let _ = writeln!(out, "# columns: {}", columns.join("\t"));
    for row in rows {
        let mut first = true;
        for v in row {
            if !first {
                out.push('\t');
            }
            out.push_str(&fmt_float(*v));
            first = false;
        }
        out.push('\n');
    }
    write_atomic(path, &out)
}

/// Write a line catalog: one record per emission line.
pub fn write_line_catalog(path: &Path, header_text: &str, lines: &[SpectralLine]) -> Result<()> {
    let mut out = String::from(header_text);
    let _ = writeln!(
        out,
        "# columns: kind\tcenter\tweight\thwhm\talpha\tbeta\tn\tnonpositive_center"
    );
    for l in lines {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            l.kind.tag(),
            fmt_float(l.center),
            fmt_float(l.weight),
            fmt_float(l.hwhm),
            l.alpha.tag(),
            l.beta.tag(),
            l.n,
            u8::from(l.nonpositive_center),
        );
    }
    write_atomic(path, &out)
}

fn write_atomic(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, content.as_bytes())?;
    Ok(())
}

/// Resolve the output directory (CLI flag beats config, default `out`).
pub fn resolve_outdir(flag: Option<&str>, config_dir: Option<&str>) -> PathBuf {
    PathBuf::from(flag.or(config_dir).unwrap_or("out"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_has_17_digits() {
        assert_eq!(fmt_float(0.25), "2.5000000000000000e-1");
        assert_eq!(fmt_float(f64::NAN), "nan");
        let s = fmt_float(std::f64::consts::PI);
        assert!(s.starts_with("3.1415926535897931e0"));
    }

    #[test]
    fn header_roundtrip() {
        let cfg = "a = 1\n[t]\nb = \"x\"\n";
        let h = header("spectrum", cfg, &[("note", "demo".into())]);
        let text = format!("{h}# columns: x\n1.0\n");
        assert_eq!(extract_config(&text).as_deref(), Some(cfg));
    }

    #[test]
    fn table_is_deterministic() {
        let dir = std::env::temp_dir().join("flospec_test_out");
        let path = dir.join("t.tsv");
        let rows = vec![vec![1.0, 2.0], vec![3.0, f64::NAN]];
        write_table(&path, "# h\n", &["a", "b"], &rows).unwrap();
        let first = std::fs::read(&path).unwrap();
        write_table(&path, "# h\n", &["a", "b"], &rows).unwrap();
        let second = std::fs::read(&path).unwrap();
        assert_eq!(first, second);
        let text = String::from_utf8(first).unwrap();
        assert!(!text.contains('\r'));
        assert!(text.ends_with('\n'));
    }
}
