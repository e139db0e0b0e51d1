//! Run configuration: `key=value` lines (or a flat JSON object), validated
//! in full before any computation.

use std::f64::consts::PI;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lab::critical_index;
use crate::littlewood_paley::BlockRange;
use crate::spectral::SpectralGrid;

/// Regularity index: a number, or `auto` for the critical index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SobolevIndex {
    Auto(AutoTag),
    Value(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoTag {
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub k: u32,
    pub s: SobolevIndex,
    pub n: usize,
    pub period: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub dt: f64,
    pub stride: usize,
    pub eps: f64,
    #[serde(rename = "J")]
    pub gap: i32,
    #[serde(rename = "Jsim")]
    pub sim: i32,
    pub seed: u64,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            k: 4,
            s: SobolevIndex::Auto(AutoTag::Auto),
            n: 1024,
            period: 64.0 * 2.0 * PI,
            horizon: 1.0,
            dt: 1e-3,
            stride: 1,
            eps: 0.125,
            gap: BlockRange::DEFAULT_GAP,
            sim: BlockRange::DEFAULT_SIM,
            seed: 7,
            input: None,
            output: None,
        }
    }
}

pub const KEYS: &[&str] = &["k", "s", "n", "period", "T", "dt", "stride", "eps", "J", "Jsim", "seed", "input", "output"];

fn bad(key: &str, constraint: impl Into<String>) -> Error {
    Error::Config { key: key.to_string(), constraint: constraint.into() }
}

fn num<T: std::str::FromStr>(key: &str, v: &str, what: &str) -> Result<T> {
    v.trim().parse().map_err(|_| bad(key, format!("expected {what}, got `{v}`")))
}

impl RunConfig {
    /// Set one key from its textual value. Range checks happen in
    /// [`RunConfig::validate`].
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "k" => self.k = num(key, v, "a positive integer")?,
            "s" => {
                self.s = if v == "auto" { SobolevIndex::Auto(AutoTag::Auto) } else { SobolevIndex::Value(num(key, v, "a number or `auto`")?) }
            }
            "n" => self.n = num(key, v, "a power of two")?,
            "period" => self.period = num(key, v, "a positive number")?,
            "T" => self.horizon = num(key, v, "a positive number")?,
            "dt" => self.dt = num(key, v, "a positive number")?,
            "stride" => self.stride = num(key, v, "a positive integer")?,
            "eps" => self.eps = num(key, v, "a number in (0, 1)")?,
            "J" => self.gap = num(key, v, "a positive integer")?,
            "Jsim" => self.sim = num(key, v, "a positive integer")?,
            "seed" => self.seed = num(key, v, "an unsigned integer")?,
            "input" => self.input = Some(PathBuf::from(v)),
            "output" => self.output = Some(PathBuf::from(v)),
            other => return Err(bad(other, format!("unknown key; allowed keys are {}", KEYS.join(", ")))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 3 {
            return Err(bad("k", "k >= 3 required (the laboratory covers k >= 3 only)"));
        }
        if self.n < SpectralGrid::MIN_POINTS || !self.n.is_power_of_two() {
            return Err(bad("n", "power of two >= 16"));
        }
        let positive = |key: &str, v: f64| if v.is_finite() && v > 0.0 { Ok(()) } else { Err(bad(key, "finite and > 0")) };
        positive("period", self.period)?;
        positive("T", self.horizon)?;
        positive("dt", self.dt)?;
        if self.stride == 0 {
            return Err(bad("stride", ">= 1"));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(bad("eps", "0 < eps < 1"));
        }
        if self.gap < 1 {
            return Err(bad("J", ">= 1"));
        }
        if self.sim < 1 {
            return Err(bad("Jsim", ">= 1"));
        }
        if let SobolevIndex::Value(s) = self.s {
            if !s.is_finite() {
                return Err(bad("s", "finite number or `auto`"));
            }
        }
        Ok(())
    }

    /// `s`, with `auto` resolved to `1/2 - 1/k`.
    pub fn resolved_s(&self) -> f64 {
        match self.s {
            SobolevIndex::Auto(_) => critical_index(self.k),
            SobolevIndex::Value(s) => s,
        }
    }

    pub fn grid(&self) -> Result<SpectralGrid> {
        SpectralGrid::new(self.n, self.period)
    }

    pub fn block_range(&self) -> Result<BlockRange> {
        Ok(BlockRange::with_params(&self.grid()?, self.gap, self.sim))
    }

    /// Number of steps of size at most `dt` covering `T`.
    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round().max(1.0) as usize
    }
}

fn json_scalar(key: &str, v: &serde_json::Value) -> Result<String> {
    match v {
        serde_json::Value::String(s) => Ok(s.clone()),
        serde_json::Value::Number(n) => Ok(n.to_string()),
        _ => Err(bad(key, "expected a scalar value")),
    }
}

/// Parse and validate. Blank lines and `#` comments are ignored; an input
/// starting with `{` is read as a flat JSON object.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        let map: serde_json::Map<String, serde_json::Value> =
            serde_json::from_str(trimmed).map_err(|e| bad("<document>", format!("invalid JSON object: {e}")))?;
        for (key, v) in &map {
            cfg.set(key, &json_scalar(key, v)?)?;
        }
    } else {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(&format!("line {}", lineno + 1), "expected `key=value`"))?;
            cfg.set(key.trim(), value)?;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auto_resolves_to_critical_index() {
        let c = parse_config("k=4\ns=auto").unwrap();
        assert_eq!(c.resolved_s(), 0.25);
    }

    #[test]
    fn empty_input_gives_defaults() {
        let c = parse_config("").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.n, 1024);
        assert_eq!(c.eps, 0.125);
        assert_eq!((c.gap, c.sim), (3, 2));
        assert!((c.period - 64.0 * 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn rejects_small_k_and_unknown_keys() {
        match parse_config("k=2") {
            Err(Error::Config { key, .. }) => assert_eq!(key, "k"),
            other => panic!("{other:?}"),
        }
        match parse_config("colour=blue") {
            Err(Error::Config { key, .. }) => assert_eq!(key, "colour"),
            other => panic!("{other:?}"),
        }
        assert!(parse_config("n=1000").is_err());
        assert!(parse_config("eps=1.5").is_err());
    }

    #[test]
    fn json_document() {
        let c = parse_config(r#"{"k": 5, "s": "auto", "T": 0.5}"#).unwrap();
        assert_eq!(c.k, 5);
        assert_eq!(c.horizon, 0.5);
        assert!(parse_config(r#"{"k": [1]}"#).is_err());
    }
}
