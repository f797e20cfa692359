use anyhow::{anyhow, bail, Result};
use num_complex::Complex64;
use num_rational::Rational64;

/// "x+yi", "x-yi", "x", "yi".
pub fn complex(text: &str) -> Result<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        bail!("empty complex number");
    }
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(real(&s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&j| (bytes[j] == b'+' || bytes[j] == b'-') && !matches!(bytes[j - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(j) => (real(&body[..j])?, imag(&body[j..])?),
        None => (0.0, imag(body)?),
    };
    Ok(Complex64::new(re, im))
}

fn real(s: &str) -> Result<f64> {
    s.parse::<f64>().map_err(|_| anyhow!("cannot parse '{s}' as a real number"))
}

fn imag(s: &str) -> Result<f64> {
    match s {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => real(s),
    }
}

/// "num/den" or an integer.
pub fn rational(text: &str) -> Result<Rational64> {
    let t = text.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: i64 = n.parse().map_err(|_| anyhow!("bad numerator in '{text}'"))?;
    let d: i64 = d.parse().map_err(|_| anyhow!("bad denominator in '{text}'"))?;
    if d == 0 {
        bail!("zero denominator in '{text}'");
    }
    Ok(Rational64::new(n, d))
}

/// NAME=VAL with VAL in [1e−14, 1e−3].
pub fn tolerance(text: &str) -> Result<(String, f64)> {
    let (k, v) = text.split_once('=').ok_or_else(|| anyhow!("tolerance must look like NAME=VAL, got '{text}'"))?;
    let v: f64 = v.parse().map_err(|_| anyhow!("bad tolerance value in '{text}'"))?;
    if !(1e-14..=1e-3).contains(&v) {
        bail!("tolerance {v} outside [1e-14, 1e-3]");
    }
    Ok((k.to_string(), v))
}
