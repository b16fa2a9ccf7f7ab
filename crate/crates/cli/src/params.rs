//! Parsing of parameter lists, complex numbers, points and config files.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::CliError;

/// `v`, `a,b,c` or `start:stop:count` (inclusive, evenly spaced).
pub fn parse_list(key: &str, text: &str) -> Result<Vec<f64>, CliError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(CliError::Usage(format!("--{key}: empty value")));
    }
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::Usage(format!(
                "--{key}: range must look like start:stop:count, got '{text}'"
            )));
        }
        let start = parse_f64(key, parts[0])?;
        let stop = parse_f64(key, parts[1])?;
        let count: usize = parts[2].trim().parse().map_err(|_| {
            CliError::Usage(format!("--{key}: range count '{}' is not a positive integer", parts[2]))
        })?;
        return match count {
            0 => Err(CliError::Usage(format!("--{key}: range count must be positive"))),
            1 => Ok(vec![start]),
            _ => Ok((0..count)
                .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
                .collect()),
        };
    }
    text.split(',').map(|v| parse_f64(key, v)).collect()
}

pub fn parse_f64(key: &str, text: &str) -> Result<f64, CliError> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("--{key}: '{}' is not a number", text.trim())))?;
    if !v.is_finite() {
        return Err(CliError::Usage(format!("--{key}: value must be finite")));
    }
    Ok(v)
}

/// Integer list with the same syntax as [`parse_list`].
pub fn parse_int_list(key: &str, text: &str) -> Result<Vec<i64>, CliError> {
    parse_list(key, text)?
        .into_iter()
        .map(|v| {
            if (v - v.round()).abs() > 1e-9 {
                Err(CliError::Usage(format!("--{key}: {v} is not an integer")))
            } else {
                Ok(v.round() as i64)
            }
        })
        .collect()
}

/// `a`, `bi`, `a+bi`, `a-bi` (also `i`, `-i`, `a+i`).
pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty complex number".into());
    }
    let real = |v: &str| v.parse::<f64>().map_err(|_| format!("bad complex number '{text}'"));
    let imag = |v: &str| -> Result<f64, String> {
        match v {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => real(v),
        }
    };
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(real(&s)?, 0.0));
    };
    // split at the last sign that is not the leading one or an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&j| (bytes[j] == b'+' || bytes[j] == b'-') && !matches!(bytes[j - 1], b'e' | b'E'));
    let z = match split {
        Some(j) => Complex64::new(real(&body[..j])?, imag(&body[j..])?),
        None => Complex64::new(0.0, imag(body)?),
    };
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(format!("complex number '{text}' is not finite"))
    }
}

/// Point coordinates, comma separated, each in the `a+bi` syntax.
pub fn parse_point(key: &str, text: &str) -> Result<Vec<Complex64>, CliError> {
    text.split(',')
        .map(|c| parse_complex(c).map_err(|e| CliError::Usage(format!("--{key}: {e}"))))
        .collect()
}

/// `key = value` lines; blank lines and `#` comments are ignored. Keys are
/// flag names without the leading dashes.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "config line {}: expected key = value",
                lineno + 1
            )));
        };
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}
