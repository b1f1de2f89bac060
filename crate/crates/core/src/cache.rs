//! Memo table of computed class numbers, optionally persisted to disk.
//!
//! Keys are discriminants. A negative key holds the number of classes of
//! primitive positive-definite forms; a positive key holds the (wide) class
//! number of the real quadratic field. The on-disk format is one `D<TAB>h`
//! line per entry.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{OnceLock, RwLock};

use crate::error::{Error, Result};

/// Environment variable naming the cache file.
pub const CACHE_ENV: &str = "ABVAR_CACHE";

/// Many readers, one writer at a time.
#[derive(Debug, Default)]
pub struct ClassNumberCache {
    entries: RwLock<HashMap<i64, u64>>,
}

impl ClassNumberCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, disc: i64) -> Option<u64> {
        self.entries
            .read()
            .expect("cache lock poisoned")
            .get(&disc)
            .copied()
    }

    pub fn insert(&self, disc: i64, h: u64) {
        self.entries
            .write()
            .expect("cache lock poisoned")
            .insert(disc, h);
    }

    pub fn get_or_compute(&self, disc: i64, compute: impl FnOnce() -> Result<u64>) -> Result<u64> {
        if let Some(h) = self.get(disc) {
            return Ok(h);
        }
        let h = compute()?;
        self.insert(disc, h);
        Ok(h)
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn clear(&self) {
        self.entries.write().expect("cache lock poisoned").clear();
    }

    /// Merges entries from `path`. A missing file loads nothing.
    pub fn load(&self, path: &Path) -> Result<usize> {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(0),
            Err(e) => return Err(e.into()),
        };
        let mut parsed = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let bad = || {
                Error::Cache(format!(
                    "{}:{}: expected `D<TAB>h`",
                    path.display(),
                    lineno + 1
                ))
            };
            let (d, h) = line.split_once('\t').ok_or_else(bad)?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            let h: u64 = h.trim().parse().map_err(|_| bad())?;
            if d == 0 || h == 0 {
                return Err(bad());
            }
            parsed.push((d, h));
        }
        let n = parsed.len();
        let mut map = self.entries.write().expect("cache lock poisoned");
        map.extend(parsed);
        Ok(n)
    }

    /// Writes every entry, sorted by discriminant, replacing the file.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut rows: Vec<(i64, u64)> = {
            let map = self.entries.read().expect("cache lock poisoned");
            map.iter().map(|(&d, &h)| (d, h)).collect()
        };
        rows.sort_unstable();
        let mut buf = Vec::with_capacity(rows.len() * 12);
        for (d, h) in rows {
            writeln!(buf, "{d}\t{h}")?;
        }
        fs::write(path, buf)?;
        Ok(())
    }
}

/// Process-wide cache used by the class number functions.
pub fn global() -> &'static ClassNumberCache {
    static CACHE: OnceLock<ClassNumberCache> = OnceLock::new();
    CACHE.get_or_init(ClassNumberCache::new)
}

/// Cache path: explicit flag first, then `ABVAR_CACHE`, else none.
pub fn resolve_path(flag: Option<&Path>) -> Option<PathBuf> {
    flag.map(Path::to_path_buf).or_else(|| {
        std::env::var_os(CACHE_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
    })
}
