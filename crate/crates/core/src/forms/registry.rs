//! Registry file and on-disk coefficient cache.

use super::curve::Weierstrass;
use crate::{Error, Result};
use serde::Deserialize;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::RwLock;

pub const BUILTIN_REGISTRY: &str = include_str!("../../registry.toml");
pub const CACHE_FORMAT: u32 = 1;
pub const CACHE_ENV: &str = "L2LAB_CACHE";

#[derive(Debug, Clone, Deserialize, PartialEq)]
pub struct RegistryEntry {
    pub name: String,
    pub weight: u32,
    pub level: u64,
    pub source: String,
    #[serde(default)]
    pub curve: Option<Weierstrass>,
}

#[derive(Debug, Deserialize)]
struct RegistryFile {
    form: Vec<RegistryEntry>,
}

pub fn parse_registry(text: &str) -> Result<Vec<RegistryEntry>> {
    let f: RegistryFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    for e in &f.form {
        match (e.source.as_str(), &e.curve) {
            ("eta24", None) if e.weight == 12 && e.level == 1 => {}
            ("curve", Some(_)) if e.weight == 2 => {}
            _ => return Err(Error::Parse(format!("inconsistent registry entry '{}'", e.name))),
        }
    }
    Ok(f.form)
}

pub fn load_registry(path: &Path) -> Result<Vec<RegistryEntry>> {
    parse_registry(&std::fs::read_to_string(path)?)
}

static CACHE_DIR: RwLock<Option<PathBuf>> = RwLock::new(None);

/// Directory for coefficient cache files. Defaults to $L2LAB_CACHE when set;
/// otherwise tables live in memory only.
pub fn set_cache_dir(dir: Option<PathBuf>) {
    *CACHE_DIR.write().unwrap() = dir;
}

pub fn cache_dir() -> Option<PathBuf> {
    if let Some(d) = CACHE_DIR.read().unwrap().clone() {
        return Some(d);
    }
    std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

pub fn write_coefficient_cache(path: &Path, form: &str, coeffs: &[i128]) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("tmp");
    let mut w = std::io::BufWriter::new(std::fs::File::create(&tmp)?);
    writeln!(w, "l2lab-coefficients {CACHE_FORMAT}")?;
    writeln!(w, "form {form}")?;
    writeln!(w, "limit {}", coeffs.len().saturating_sub(1))?;
    for c in &coeffs[1..] {
        writeln!(w, "{c}")?;
    }
    w.flush()?;
    drop(w);
    std::fs::rename(tmp, path)?;
    Ok(())
}

/// Returns the stored integers (index 0 unused) if the header matches and the
/// stored limit is at least `min_limit`.
pub fn read_coefficient_cache(path: &Path, form: &str, min_limit: usize) -> Result<Option<Vec<i128>>> {
    let Ok(file) = std::fs::File::open(path) else { return Ok(None) };
    let mut lines = BufReader::new(file).lines();
    let mut header = |key: &str| -> Result<String> {
        let l = lines.next().ok_or_else(|| Error::Parse("truncated cache header".into()))??;
        l.strip_prefix(key)
            .map(|s| s.trim().to_string())
            .ok_or_else(|| Error::Parse(format!("expected '{key}' in cache header")))
    };
    if header("l2lab-coefficients")? != CACHE_FORMAT.to_string() || header("form")? != form {
        return Ok(None);
    }
    let limit: usize = header("limit")?.parse().map_err(|_| Error::Parse("bad limit".into()))?;
    if limit < min_limit {
        return Ok(None);
    }
    let mut out = Vec::with_capacity(limit + 1);
    out.push(0);
    for l in lines {
        out.push(l?.trim().parse::<i128>().map_err(|e| Error::Parse(e.to_string()))?);
    }
    if out.len() != limit + 1 {
        return Err(Error::Parse("cache length disagrees with header".into()));
    }
    Ok(Some(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_parses() {
        let r = parse_registry(BUILTIN_REGISTRY).unwrap();
        let names: Vec<_> = r.iter().map(|e| e.name.as_str()).collect();
        assert_eq!(names, ["delta", "ec11", "ec32"]);
        assert_eq!(r[1].curve, Some([0, -1, 1, -10, -20]));
    }

    #[test]
    fn rejects_inconsistent_entries() {
        let bad = "[[form]]\nname='x'\nweight=2\nlevel=11\nsource='eta24'\n";
        assert!(parse_registry(bad).is_err());
    }

    #[test]
    fn cache_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("delta.coef");
        let data = vec![0i128, 1, -24, 252, -1472];
        write_coefficient_cache(&p, "delta", &data).unwrap();
        assert_eq!(read_coefficient_cache(&p, "delta", 3).unwrap(), Some(data));
        assert_eq!(read_coefficient_cache(&p, "delta", 10).unwrap(), None);
        assert_eq!(read_coefficient_cache(&p, "ec11", 1).unwrap(), None);
    }
}
