//! Plain-text cache of computed moments.
//!
//! ```text
//! # method=quadrature tol=1e-10
//! n e_min e_q1 var_range var_iqr cov_range_iqr
//! 5 -1.162964... -0.495014... 0.747... 0.350... 0.224...
//! ```
//!
//! A `# method=...` line applies to the rows that follow it. Values are
//! written with Rust's shortest round-trip decimal form, so a value read back
//! is bit-identical to the one computed; `e_max` and `e_q3` are restored as
//! `-e_min` and `-e_q1`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::ErrorKind;
use std::path::{Path, PathBuf};

use super::{order_stat_moments, MomentMethod, OrderStatMoments, SampleSizeQ};
use crate::error::{Error, Result};

const COLUMNS: &str = "n e_min e_q1 var_range var_iqr cov_range_iqr";

#[derive(Debug, Default, Clone)]
pub struct MomentCache {
    path: Option<PathBuf>,
    entries: BTreeMap<(String, u64), OrderStatMoments>,
    dirty: bool,
}

impl MomentCache {
    /// An in-memory cache that is never written to disk.
    pub fn in_memory() -> Self {
        MomentCache::default()
    }

    /// Loads `path` if it exists; a missing file gives an empty cache that
    /// [`MomentCache::save`] will create.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut cache = MomentCache {
            path: Some(path.clone()),
            ..Default::default()
        };
        match fs::read_to_string(&path) {
            Ok(text) => cache.entries = parse(&text)?,
            Err(e) if e.kind() == ErrorKind::NotFound => {}
            Err(e) => return Err(e.into()),
        }
        Ok(cache)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, size: SampleSizeQ, method: &MomentMethod) -> Option<OrderStatMoments> {
        self.entries.get(&(method.cache_key(), size.n())).copied()
    }

    pub fn insert(&mut self, method: &MomentMethod, moments: OrderStatMoments) {
        self.entries
            .insert((method.cache_key(), moments.n), moments);
        self.dirty = true;
    }

    pub fn get_or_compute(
        &mut self,
        size: SampleSizeQ,
        method: &MomentMethod,
    ) -> Result<OrderStatMoments> {
        if let Some(m) = self.get(size, method) {
            return Ok(m);
        }
        let m = order_stat_moments(size, method)?;
        self.insert(method, m);
        Ok(m)
    }

    /// Writes the cache back to its file when it has new entries.
    pub fn save(&mut self) -> Result<()> {
        if let (Some(path), true) = (&self.path, self.dirty) {
            fs::write(path, self.render())?;
            self.dirty = false;
        }
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut current: Option<&str> = None;
        for ((key, _), m) in &self.entries {
            if current != Some(key.as_str()) {
                let _ = writeln!(out, "# {key}");
                let _ = writeln!(out, "{COLUMNS}");
                current = Some(key);
            }
            let _ = writeln!(
                out,
                "{} {} {} {} {} {}",
                m.n, m.e_min, m.e_q1, m.var_range, m.var_iqr, m.cov_range_iqr
            );
        }
        out
    }
}

fn parse(text: &str) -> Result<BTreeMap<(String, u64), OrderStatMoments>> {
    let mut entries = BTreeMap::new();
    let mut key: Option<String> = None;
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        let bad = |why: &str| Error::InvalidInput(format!("moment cache line {}: {why}", idx + 1));
        if line.is_empty() || line == COLUMNS {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            key = Some(rest.trim().to_string());
            continue;
        }
        let key = key
            .clone()
            .ok_or_else(|| bad("row before any method header"))?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(bad("expected 6 fields"));
        }
        let n: u64 = fields[0].parse().map_err(|_| bad("bad sample size"))?;
        let mut v = [0.0; 5];
        for (slot, field) in v.iter_mut().zip(&fields[1..]) {
            *slot = field.parse().map_err(|_| bad("bad number"))?;
        }
        let [e_min, e_q1, var_range, var_iqr, cov] = v;
        let m = OrderStatMoments::symmetric(n, -e_min, -e_q1, var_range, var_iqr, cov)?;
        entries.insert((key, n), m);
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_identical() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("moments.txt");
        let method = MomentMethod::Quadrature { abs_tol: 1e-9 };
        let sizes: Vec<SampleSizeQ> = [1, 2, 7]
            .iter()
            .map(|&q| SampleSizeQ::from_q(q).unwrap())
            .collect();

        let mut cache = MomentCache::open(&path).unwrap();
        assert!(cache.is_empty());
        let fresh: Vec<_> = sizes
            .iter()
            .map(|&s| cache.get_or_compute(s, &method).unwrap())
            .collect();
        cache.save().unwrap();

        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# method=quadrature tol=1e-9\nn e_min e_q1"));
        assert!(
            text.lines().skip(2).all(|l| !l.contains('e')),
            "fixed notation expected"
        );

        let reloaded = MomentCache::open(&path).unwrap();
        assert_eq!(reloaded.len(), 3);
        for (s, m) in sizes.iter().zip(&fresh) {
            let r = reloaded.get(*s, &method).unwrap();
            for (x, y) in [
                (r.e_min, m.e_min),
                (r.e_q1, m.e_q1),
                (r.e_q3, m.e_q3),
                (r.e_max, m.e_max),
                (r.var_range, m.var_range),
                (r.var_iqr, m.var_iqr),
                (r.cov_range_iqr, m.cov_range_iqr),
            ] {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
        let other = MomentMethod::Quadrature { abs_tol: 1e-8 };
        assert!(reloaded.get(sizes[0], &other).is_none());
    }

    #[test]
    fn rejects_malformed_rows() {
        assert!(parse("5 1 2 3 4 5\n").is_err());
        assert!(parse("# method=x\n5 1 2 3\n").is_err());
        assert!(parse("# method=x\n5 -1 -0.5 0.7 0.3 zz\n").is_err());
        assert!(parse("# method=x\n5 -1 -0.5 0.7 0.3 0.1\n").is_ok());
    }
}
