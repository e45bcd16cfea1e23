//! Persistent coefficient cache: versioned text format.
//!
//! Header line `CNVC 1 n=<n> M=<M>`, then one line `<m> <a_m>` per nonzero
//! coefficient, ascending in `m`. Round-trips bit-exactly.

use super::CoefficientTable;
use std::io::Write;
use std::path::Path;
use thiserror::Error;

pub const MAGIC: &str = "CNVC";
pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache header is missing or malformed")]
    BadHeader,
    #[error("unsupported cache version {0}")]
    BadVersion(String),
    #[error("cache line {0} is malformed")]
    BadLine(usize),
    #[error("coefficient index {0} out of range")]
    IndexOutOfRange(u64),
    #[error("cache entries out of order at line {0}")]
    OutOfOrder(usize),
    #[error("duplicate coefficient index at line {0}")]
    Duplicate(usize),
    #[error("cache is for n={found}, expected n={expected}")]
    WrongCurve { expected: u64, found: u64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Render a table in the cache format.
pub fn render(table: &CoefficientTable) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{} {} n={} M={}\n",
        MAGIC,
        VERSION,
        table.n(),
        table.limit()
    ));
    for (m, a) in table.nonzero() {
        out.push_str(&format!("{} {}\n", m, a));
    }
    out
}

/// Parse the cache format. Refuses silently wrong files: bad magic, bad
/// version, malformed lines, out-of-range, duplicate or descending indices.
pub fn parse(text: &str) -> Result<CoefficientTable, CacheError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(CacheError::BadHeader)?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some(MAGIC) {
        return Err(CacheError::BadHeader);
    }
    let version = parts.next().ok_or(CacheError::BadHeader)?;
    if version != VERSION.to_string() {
        return Err(CacheError::BadVersion(version.to_string()));
    }
    let n = parts
        .next()
        .and_then(|s| s.strip_prefix("n="))
        .and_then(|s| s.parse::<u64>().ok())
        .ok_or(CacheError::BadHeader)?;
    let limit = parts
        .next()
        .and_then(|s| s.strip_prefix("M="))
        .and_then(|s| s.parse::<u32>().ok())
        .ok_or(CacheError::BadHeader)?;
    if parts.next().is_some() || limit < 1 {
        return Err(CacheError::BadHeader);
    }
    let mut entries = vec![0i64; limit as usize + 1];
    let mut last_m = 0u64;
    for (idx, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let m: u64 = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or(CacheError::BadLine(idx + 1))?;
        let a: i64 = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or(CacheError::BadLine(idx + 1))?;
        if it.next().is_some() {
            return Err(CacheError::BadLine(idx + 1));
        }
        if m < 1 || m > limit as u64 {
            return Err(CacheError::IndexOutOfRange(m));
        }
        if m < last_m {
            return Err(CacheError::OutOfOrder(idx + 1));
        }
        if m == last_m {
            return Err(CacheError::Duplicate(idx + 1));
        }
        last_m = m;
        entries[m as usize] = a;
    }
    Ok(CoefficientTable::from_parts(n, limit, entries))
}

pub fn write_file(path: &Path, table: &CoefficientTable) -> Result<(), CacheError> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(render(table).as_bytes())?;
    Ok(())
}

pub fn read_file(path: &Path) -> Result<CoefficientTable, CacheError> {
    let text = std::fs::read_to_string(path)?;
    parse(&text)
}

/// Load a table of at least `limit` coefficients for curve `n`, reusing the
/// cache file when it already covers the range and extending (recomputing
/// deterministically and rewriting) when it does not. Missing files are
/// created; a cache for a different `n` is an error.
pub fn load_or_extend(
    path: &Path,
    n: u64,
    limit: u32,
) -> Result<CoefficientTable, CacheError> {
    match std::fs::read_to_string(path) {
        Ok(text) => {
            let existing = parse(&text)?;
            if existing.n() != n {
                return Err(CacheError::WrongCurve {
                    expected: n,
                    found: existing.n(),
                });
            }
            if existing.limit() >= limit {
                return Ok(existing);
            }
            let table = super::coefficients(n, limit);
            write_file(path, &table)?;
            Ok(table)
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            let table = super::coefficients(n, limit);
            write_file(path, &table)?;
            Ok(table)
        }
        Err(e) => Err(e.into()),
    }
}
