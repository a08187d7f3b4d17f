//! Number formatting, complex-number parsing and atomic file writes.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{CliError, CliResult};

/// `x` with 12 significant digits; scientific notation outside `[1e-4, 1e12)`.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return format!("{:.11}", 0.0);
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs();
    if !(1e-4..1e12).contains(&mag) {
        return format!("{x:.11e}");
    }
    let before = mag.log10().floor() as i32 + 1;
    let decimals = (12 - before).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn complex12(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", sig12(z.re), sign, sig12(z.im.abs()))
}

/// Short scientific form for tables.
pub fn sci(x: Option<f64>) -> String {
    match x {
        Some(v) => format!("{v:.3e}"),
        None => "-".into(),
    }
}

/// Parses `a+bi`, `a-bi`, `bi`, `i`, `-i` or a plain real.
pub fn parse_complex(text: &str) -> CliResult<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || CliError::Input(format!("cannot parse complex number `{text}`"));
    let num = |t: &str| -> CliResult<f64> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => t.parse::<f64>().map_err(|_| bad()),
        }
    };
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        let re = s.parse::<f64>().map_err(|_| bad())?;
        return finite(Complex64::new(re, 0.0), text);
    };
    // The split is the last sign that neither leads nor follows an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let z = match split {
        Some(k) => Complex64::new(
            body[..k].parse::<f64>().map_err(|_| bad())?,
            num(&body[k..])?,
        ),
        None => Complex64::new(0.0, num(body)?),
    };
    finite(z, text)
}

fn finite(z: Complex64, text: &str) -> CliResult<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(CliError::Input(format!(
            "complex number `{text}` is not finite"
        )))
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    let io = |e: std::io::Error| CliError::Input(format!("cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => Path::new(".").to_path_buf(),
    };
    fs::create_dir_all(&dir).map_err(io)?;
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Input(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    {
        let mut f = fs::File::create(&tmp).map_err(io)?;
        f.write_all(contents).map_err(io)?;
        f.sync_all().map_err(io)?;
    }
    fs::rename(&tmp, path).map_err(io)
}
