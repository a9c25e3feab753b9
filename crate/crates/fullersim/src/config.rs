//! Run settings: a key-value file overlaid by command-line flags.
//!
//! File grammar: one `key = value` per line, `#` starts a comment, blank
//! lines are ignored. Keys are the long flag names with `-` written as `_`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{AppError, Result};

/// Keys accepted in config files, with a one-line description each.
pub const KEYS: &[(&str, &str)] = &[
    ("graph", "built-in graph name or edge-list path"),
    ("name", "built-in graph name (graph subcommand)"),
    ("schedule", "`default` or a schedule CSV path"),
    ("gamma0", "driver scale at s = 0 of the default ramp, GHz"),
    ("j0", "coupling scale at s = 1 of the default ramp, GHz"),
    ("coupling_scale", "multiply J(s) by this factor in (0, 1]"),
    ("ta", "anneal time(s), ns: `5ns` or `0.1,1,10`"),
    ("ta_log", "log-spaced sweep `min,max,count` in ns"),
    ("ds", "normalised step"),
    ("max_dt", "cap on the physical step in ns, or `off`"),
    ("samples", "sample count for sampled estimates and floors"),
    ("repetitions", "repetitions of the fidelity floor"),
    ("seed", "random seed"),
    ("flip", "include global spin inversion in orbit binning"),
    ("orbit_table", "emit per-orbit masses"),
    ("cache", "ground-state manifold cache path"),
    ("out", "output path"),
    ("out_dir", "pipeline output directory"),
    ("curve_a", "reference fidelity curve CSV"),
    ("curve_b", "fidelity curve CSV to map into"),
    ("curve_out", "also write a `ta_ns,f_binned` curve here"),
    ("threads", "worker threads"),
];

/// Keys that never change results and stay out of the config digest.
const UNDIGESTED: &[&str] = &["threads"];

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Settings {
    values: BTreeMap<String, String>,
    base: Option<PathBuf>,
    /// Keys set by flags; their paths are relative to the working directory.
    from_flags: BTreeSet<String>,
}

fn known(key: &str) -> bool {
    KEYS.iter().any(|(k, _)| *k == key)
}

impl Settings {
    /// Parses config-file text; relative paths in it resolve against `base`.
    pub fn parse(text: &str, base: Option<&Path>, path: &Path) -> Result<Self> {
        let err = |line: usize, message: String| AppError::Parse { path: path.to_owned(), line, message };
        let mut values = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(err(line, "expected `key = value`".into()));
            };
            let (key, value) = (key.trim().replace('-', "_"), value.trim());
            if !known(&key) {
                return Err(err(line, format!("unknown key `{key}`")));
            }
            if value.is_empty() {
                return Err(err(line, format!("`{key}` has no value")));
            }
            if values.insert(key.clone(), value.to_owned()).is_some() {
                return Err(err(line, format!("`{key}` given twice")));
            }
        }
        Ok(Settings { values, base: base.map(Path::to_owned), from_flags: BTreeSet::new() })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
        Settings::parse(&text, path.parent(), path)
    }

    /// Flag values win over file values.
    pub fn overlay(mut self, flags: impl IntoIterator<Item = (&'static str, String)>) -> Self {
        for (key, value) in flags {
            debug_assert!(known(key), "{key}");
            self.values.insert(key.to_owned(), value);
            self.from_flags.insert(key.to_owned());
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| AppError::Config(format!("missing `{}`", key.replace('_', "-"))))
    }

    pub fn set_default(&mut self, key: &'static str, value: &str) {
        self.values.entry(key.to_owned()).or_insert_with(|| value.to_owned());
    }

    fn bad(key: &str, value: &str, what: &str) -> AppError {
        AppError::Config(format!("`{}` = `{value}`: expected {what}", key.replace('_', "-")))
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|v| parse_f64(v).ok_or_else(|| Self::bad(key, v, "a finite number")))
            .transpose()
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>> {
        self.get(key)
            .map(|v| parse_count(v).ok_or_else(|| Self::bad(key, v, "a non-negative integer")))
            .transpose()
    }

    pub fn u64(&self, key: &str) -> Result<Option<u64>> {
        self.get(key).map(|v| v.parse().map_err(|_| Self::bad(key, v, "an unsigned integer"))).transpose()
    }

    pub fn bool(&self, key: &str) -> Result<Option<bool>> {
        self.get(key)
            .map(|v| match v {
                "true" | "yes" | "on" | "1" => Ok(true),
                "false" | "no" | "off" | "0" => Ok(false),
                _ => Err(Self::bad(key, v, "true or false")),
            })
            .transpose()
    }

    /// Path value; file-relative entries resolve against the file's folder.
    pub fn path(&self, key: &str) -> Option<PathBuf> {
        let v = self.get(key)?;
        let p = PathBuf::from(v);
        match &self.base {
            Some(base) if p.is_relative() && !self.from_flags.contains(key) => Some(base.join(p)),
            _ => Some(p),
        }
    }

    /// Anneal times in ns from `ta` or `ta_log`, in sweep order.
    pub fn sweep(&self) -> Result<Vec<f64>> {
        let list = match (self.get("ta"), self.get("ta_log")) {
            (Some(_), Some(_)) => return Err(AppError::Config("give either `ta` or `ta-log`, not both".into())),
            (Some(v), None) => v
                .split(',')
                .map(|t| parse_ns(t).ok_or_else(|| Self::bad("ta", v, "times in ns")))
                .collect::<Result<Vec<_>>>()?,
            (None, Some(v)) => {
                let parts: Vec<&str> = v.split(',').map(str::trim).collect();
                let [lo, hi, n] = parts.as_slice() else {
                    return Err(Self::bad("ta_log", v, "`min,max,count`"));
                };
                let (lo, hi) = (parse_ns(lo), parse_ns(hi));
                match (lo, hi, parse_count(n)) {
                    (Some(lo), Some(hi), Some(n)) if n >= 1 && hi >= lo => log_spaced(lo, hi, n),
                    _ => return Err(Self::bad("ta_log", v, "`min,max,count` with 0 < min <= max, count >= 1")),
                }
            }
            (None, None) => return Err(AppError::Config("missing `ta` or `ta-log`".into())),
        };
        if list.iter().any(|&t| t <= 0.0) {
            return Err(AppError::Config("anneal times must be positive".into()));
        }
        Ok(list)
    }

    /// Canonical `key=value` lines for everything that affects results.
    pub fn canonical(&self, command: &str) -> String {
        let mut out = format!("command={command}\n");
        for (k, v) in &self.values {
            if !UNDIGESTED.contains(&k.as_str()) {
                out.push_str(&format!("{k}={v}\n"));
            }
        }
        out
    }

    pub fn digest(&self, command: &str) -> String {
        hex::encode(Sha256::digest(self.canonical(command).as_bytes()))
    }

    /// Resolved settings for manifests.
    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.values
    }
}

fn parse_f64(v: &str) -> Option<f64> {
    v.trim().parse::<f64>().ok().filter(|x| x.is_finite())
}

/// Integers, also in `1e5` form.
fn parse_count(v: &str) -> Option<usize> {
    let v = v.trim();
    v.parse().ok().or_else(|| {
        let x = parse_f64(v)?;
        (x >= 0.0 && x.fract() == 0.0 && x < 1e18).then_some(x as usize)
    })
}

/// A time in ns, with an optional `ns` suffix.
pub fn parse_ns(v: &str) -> Option<f64> {
    let v = v.trim();
    parse_f64(v.strip_suffix("ns").unwrap_or(v))
}

/// `count` points from `lo` to `hi` inclusive, evenly spaced in log time.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let ratio = (hi / lo).ln();
    (0..count)
        .map(|k| match k {
            0 => lo,
            k if k + 1 == count => hi,
            k => lo * (ratio * k as f64 / (count - 1) as f64).exp(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Settings> {
        Settings::parse(text, Some(Path::new("/cfg")), Path::new("run.conf"))
    }

    #[test]
    fn file_grammar_and_overrides() {
        let s = parse("# sweep\ngraph = g.edges\nds=0.01 # coarse\n\nta-log = 0.1, 30, 8\n").unwrap();
        assert_eq!(s.f64("ds").unwrap(), Some(0.01));
        assert_eq!(s.path("graph").unwrap(), PathBuf::from("/cfg/g.edges"));
        let sweep = s.sweep().unwrap();
        assert_eq!(sweep.len(), 8);
        assert_eq!((sweep[0], sweep[7]), (0.1, 30.0));
        assert!(sweep.windows(2).all(|w| w[1] > w[0]));

        let s = s.overlay([("ds", "0.001".to_owned()), ("graph", "h.edges".to_owned())]);
        assert_eq!(s.f64("ds").unwrap(), Some(0.001));
        assert_eq!(s.path("graph").unwrap(), PathBuf::from("h.edges"));
    }

    #[test]
    fn file_errors_name_lines() {
        let e = parse("ds = 0.1\nspeed = 3\n").unwrap_err();
        assert!(matches!(e, AppError::Parse { line: 2, .. }), "{e}");
        let e = parse("ds = 0.1\nds = 0.2\n").unwrap_err();
        assert!(matches!(e, AppError::Parse { line: 2, .. }));
        assert!(matches!(parse("ds\n").unwrap_err(), AppError::Parse { line: 1, .. }));
    }

    #[test]
    fn values_and_digest() {
        let s = parse("ta = 5ns\nsamples = 1e5\nthreads = 4\n").unwrap();
        assert_eq!(s.sweep().unwrap(), vec![5.0]);
        assert_eq!(s.usize("samples").unwrap(), Some(100_000));
        let t = parse("ta = 5ns\nsamples = 1e5\nthreads = 1\n").unwrap();
        assert_eq!(s.digest("evolve"), t.digest("evolve"));
        assert_ne!(s.digest("evolve"), s.digest("measure"));
        assert!(parse("ta = 1,x").unwrap().sweep().is_err());
        assert!(parse("ta_log = 1,0.5,3").unwrap().sweep().is_err());
    }
}
