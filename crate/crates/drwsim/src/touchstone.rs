//! Touchstone v1.1 two-port export/import.
//!
//! Layout: `!` comment lines first (carrying the run-manifest hash), then
//! the option line `# GHz S RI R 50`, then one line per frequency in
//! ascending order with real/imaginary pairs in S11 S21 S12 S22 column
//! order. The 50 Ω reference is nominal bookkeeping: the guided-wave
//! transfer matrices are already normalized to unit modal power, so the
//! resistance tag only labels the port convention for downstream tools.

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use drw_core::sparams::SParameterSet;

use crate::error::CliError;

/// Format one number the way the files want it: shortest representation
/// that round-trips, but always with a decimal point so whole numbers read
/// as floats (`100.0`, not `100`).
fn fmt_value(v: f64) -> String {
    if v.is_finite() && v == v.trunc() && v.abs() < 1e16 {
        format!("{v:.1}")
    } else {
        format!("{v}")
    }
}

/// Render a two-port set as a Touchstone document.
pub fn format_two_port(sp: &SParameterSet, comments: &[String]) -> Result<String, CliError> {
    if sp.is_empty() {
        return Err(CliError::Runtime(
            "cannot export an empty S-parameter set".into(),
        ));
    }
    let mut out = String::new();
    for c in comments {
        out.push_str("! ");
        out.push_str(c);
        out.push('\n');
    }
    out.push_str(&format!("# GHz S RI R {}\n", sp.z_ref));
    for (fi, &f) in sp.frequencies.iter().enumerate() {
        let m = &sp.matrices[fi];
        // column order S11 S21 S12 S22
        let cells = [
            f / 1e9,
            m[0][0].re,
            m[0][0].im,
            m[1][0].re,
            m[1][0].im,
            m[0][1].re,
            m[0][1].im,
            m[1][1].re,
            m[1][1].im,
        ];
        let line: Vec<String> = cells.iter().map(|&v| fmt_value(v)).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    Ok(out)
}

/// Write a two-port set to `path` as Touchstone.
pub fn write_two_port(
    sp: &SParameterSet,
    comments: &[String],
    path: &Path,
) -> Result<(), CliError> {
    let text = format_two_port(sp, comments)?;
    fs::write(path, text)
        .map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display())))?;
    Ok(())
}

/// Parse a Touchstone two-port document produced by [`format_two_port`].
pub fn parse_two_port(text: &str) -> Result<SParameterSet, CliError> {
    let mut z_ref = None;
    let mut frequencies = Vec::new();
    let mut matrices = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('!') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if z_ref.is_some() {
                return Err(CliError::Runtime(format!(
                    "line {}: duplicate option line",
                    ln + 1
                )));
            }
            let tokens: Vec<&str> = rest.split_whitespace().collect();
            match tokens.as_slice() {
                ["GHz", "S", "RI", "R", r] => {
                    let r: f64 = r.parse().map_err(|_| {
                        CliError::Runtime(format!(
                            "line {}: bad reference resistance {r:?}",
                            ln + 1
                        ))
                    })?;
                    z_ref = Some(r);
                }
                _ => {
                    return Err(CliError::Runtime(format!(
                        "line {}: unsupported option line {line:?} \
                         (expected \"# GHz S RI R <ohms>\")",
                        ln + 1
                    )))
                }
            }
            continue;
        }
        if z_ref.is_none() {
            return Err(CliError::Runtime(format!(
                "line {}: data before the option line",
                ln + 1
            )));
        }
        let values: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Runtime(format!("line {}: {e}", ln + 1)))?;
        if values.len() != 9 {
            return Err(CliError::Runtime(format!(
                "line {}: expected 9 columns for a two-port record, got {}",
                ln + 1,
                values.len()
            )));
        }
        frequencies.push(values[0] * 1e9);
        // columns are S11 S21 S12 S22
        matrices.push([
            [
                Complex64::new(values[1], values[2]),
                Complex64::new(values[5], values[6]),
            ],
            [
                Complex64::new(values[3], values[4]),
                Complex64::new(values[7], values[8]),
            ],
        ]);
    }
    let z_ref = z_ref
        .ok_or_else(|| CliError::Runtime("no option line in Touchstone document".into()))?;
    SParameterSet::new(frequencies, matrices, z_ref)
        .map_err(|e| CliError::Runtime(e.to_string()))
}

/// Read a Touchstone two-port file.
pub fn read_two_port(path: &Path) -> Result<SParameterSet, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(format!("reading {}: {e}", path.display())))?;
    parse_two_port(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_at(f_hz: f64) -> SParameterSet {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        SParameterSet::new(vec![f_hz], vec![[[one, zero], [zero, one]]], 50.0).unwrap()
    }

    #[test]
    fn identity_two_port_formats_to_the_canonical_line() {
        let text = format_two_port(&identity_at(100e9), &[]).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# GHz S RI R 50"));
        assert_eq!(
            lines.next(),
            Some("100.0 1.0 0.0 0.0 0.0 0.0 0.0 1.0 0.0")
        );
        assert_eq!(lines.next(), None);
    }

    #[test]
    fn round_trip_preserves_every_value_to_1e_minus_9() {
        let frequencies: Vec<f64> = (0..7).map(|i| 80e9 + 13.37e9 * i as f64).collect();
        let matrices: Vec<[[Complex64; 2]; 2]> = frequencies
            .iter()
            .enumerate()
            .map(|(i, _)| {
                let t = i as f64 * 0.7 + 0.1;
                [
                    [
                        Complex64::new(0.01 * t.sin(), -0.002 * t),
                        Complex64::new(0.93 * t.cos(), 0.31 * (2.0 * t).sin()),
                    ],
                    [
                        Complex64::new(0.93 * t.cos(), 0.31 * (2.0 * t).sin()),
                        Complex64::new(-0.015 * t, 1e-14 * t),
                    ],
                ]
            })
            .collect();
        let sp = SParameterSet::new(frequencies, matrices, 50.0).unwrap();

        let text = format_two_port(&sp, &["config sha256: abc123".into()]).unwrap();
        let back = parse_two_port(&text).unwrap();

        assert_eq!(back.len(), sp.len());
        assert_eq!(back.z_ref, sp.z_ref);
        for fi in 0..sp.len() {
            assert!((back.frequencies[fi] - sp.frequencies[fi]).abs() <= 1e-9 * sp.frequencies[fi]);
            for i in 0..2 {
                for j in 0..2 {
                    let d = (back.matrices[fi][i][j] - sp.matrices[fi][i][j]).norm();
                    assert!(d <= 1e-9, "S{}{} at #{fi} differs by {d}", i + 1, j + 1);
                }
            }
        }
    }

    #[test]
    fn comments_are_written_first_and_ignored_on_read() {
        let text =
            format_two_port(&identity_at(100e9), &["alpha".into(), "beta".into()]).unwrap();
        assert!(text.starts_with("! alpha\n! beta\n# GHz"));
        parse_two_port(&text).unwrap();
    }

    #[test]
    fn malformed_documents_are_rejected() {
        assert!(parse_two_port("").is_err());
        assert!(parse_two_port("# MHz S RI R 50\n").is_err());
        assert!(parse_two_port("# GHz S MA R 50\n100.0 1 0 0 0 0 0 1 0\n").is_err());
        assert!(parse_two_port("100.0 1 0 0 0 0 0 1 0\n").is_err());
        assert!(parse_two_port("# GHz S RI R 50\n100.0 1.0 0.0\n").is_err());
        assert!(parse_two_port("# GHz S RI R 50\n100.0 1 0 0 0 0 0 1 x\n").is_err());
    }

    #[test]
    fn column_order_is_s11_s21_s12_s22() {
        let m = [
            [Complex64::new(0.1, 0.2), Complex64::new(0.5, 0.6)],
            [Complex64::new(0.3, 0.4), Complex64::new(0.7, 0.8)],
        ];
        let sp = SParameterSet::new(vec![100e9], vec![m], 50.0).unwrap();
        let text = format_two_port(&sp, &[]).unwrap();
        let data = text.lines().nth(1).unwrap();
        assert_eq!(data, "100.0 0.1 0.2 0.3 0.4 0.5 0.6 0.7 0.8");
        let back = parse_two_port(&text).unwrap();
        assert_eq!(back.matrices[0], m);
    }
}
