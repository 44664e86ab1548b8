//! `CMAT v1` text format for complex matrices.
//!
//! ```text
//! n p
//! # meta: family=kerdock m=3 ...
//! re±imj re±imj ...      (n lines of p entries)
//! ```
//!
//! Entries are written with 17 significant digits in `%.17g` style. Lines
//! starting with `#` are comments; a `# meta:` comment carries whitespace
//! separated `key=value` pairs. Readers accept `j` or `i` as imaginary suffix.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::scalar::Real;

/// Formats a float like C's `%.17g`.
pub fn format_g17(v: f64) -> String {
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        strip_zeros(format!("{v:.decimals$}"))
    } else {
        let mantissa = strip_zeros(mantissa.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    }
}

fn strip_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn format_complex(z: Complex<f64>) -> String {
    let im = format_g17(z.im);
    let im = if im.starts_with('-') { im } else { format!("+{im}") };
    format!("{}{}j", format_g17(z.re), im)
}

/// Parses `re±imj`, `re`, or `imj` (suffix `j` or `i`).
pub fn parse_complex(token: &str) -> Result<Complex<f64>> {
    let bad = || Error::Parse(format!("bad complex entry `{token}`"));
    let t = token.trim();
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix(['j', 'i', 'J', 'I']) else {
        return Ok(Complex::new(t.parse().map_err(|_| bad())?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let parse_im = |s: &str| -> Result<f64> {
        match s {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => s.parse().map_err(|_| bad()),
        }
    };
    match split {
        Some(i) => Ok(Complex::new(body[..i].parse().map_err(|_| bad())?, parse_im(&body[i..])?)),
        None => Ok(Complex::new(0.0, parse_im(body)?)),
    }
}

/// Matrix plus the `key=value` pairs of its `# meta:` line.
#[derive(Debug, Clone, PartialEq)]
pub struct CmatFile<T: Real> {
    pub matrix: ComplexMatrix<T>,
    pub meta: Vec<(String, String)>,
}

impl<T: Real> CmatFile<T> {
    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

pub fn write_cmat<T: Real, W: Write>(out: &mut W, m: &ComplexMatrix<T>, meta: &[(String, String)]) -> Result<()> {
    let mut buf = String::new();
    writeln!(buf, "{} {}", m.rows(), m.cols()).expect("string write");
    if !meta.is_empty() {
        let pairs: Vec<String> = meta.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(buf, "# meta: {}", pairs.join(" ")).expect("string write");
    }
    for i in 0..m.rows() {
        let line: Vec<String> = m
            .row(i)
            .iter()
            .map(|z| format_complex(Complex::new(z.re.as_f64(), z.im.as_f64())))
            .collect();
        buf.push_str(&line.join(" "));
        buf.push('\n');
    }
    out.write_all(buf.as_bytes())?;
    Ok(())
}

pub fn read_cmat<T: Real, R: BufRead>(input: R) -> Result<CmatFile<T>> {
    let mut meta = Vec::new();
    let mut shape: Option<(usize, usize)> = None;
    let mut data = Vec::new();
    for line in input.lines() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if let Some(pairs) = comment.trim().strip_prefix("meta:") {
                for pair in pairs.split_whitespace() {
                    let (k, v) = pair
                        .split_once('=')
                        .ok_or_else(|| Error::Parse(format!("bad meta pair `{pair}`")))?;
                    meta.push((k.to_string(), v.to_string()));
                }
            }
            continue;
        }
        match shape {
            None => {
                let dims: Vec<&str> = trimmed.split_whitespace().collect();
                let parse = |s: &str| s.parse::<usize>().map_err(|_| Error::Parse(format!("bad header `{trimmed}`")));
                if dims.len() != 2 {
                    return Err(Error::Parse(format!("bad header `{trimmed}`")));
                }
                shape = Some((parse(dims[0])?, parse(dims[1])?));
            }
            Some((_, p)) => {
                let row: Vec<Complex<T>> = trimmed
                    .split_whitespace()
                    .map(|tok| parse_complex(tok).map(|z| Complex::new(T::of(z.re), T::of(z.im))))
                    .collect::<Result<_>>()?;
                if row.len() != p {
                    return Err(Error::Parse(format!("row has {} entries, expected {p}", row.len())));
                }
                data.extend(row);
            }
        }
    }
    let (n, p) = shape.ok_or_else(|| Error::Parse("missing `n p` header".into()))?;
    if data.len() != n * p {
        return Err(Error::Parse(format!("expected {n} rows, found {}", data.len() / p.max(1))));
    }
    Ok(CmatFile {
        matrix: ComplexMatrix::from_row_major(n, p, data)?,
        meta,
    })
}

/// Parses a whitespace- or comma-separated list of complex entries.
pub fn parse_complex_list(text: &str) -> Result<Vec<Complex<f64>>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(parse_complex)
        .collect()
}
