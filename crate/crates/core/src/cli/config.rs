//! Flat `key = value` run configuration.
//!
//! ```text
//! # comment
//! model.K = 2
//! model.J = 0.5
//! model.Omega = 1.0, 1.0     # one value per site, or one for all
//! model.Delta = 0
//! state.theta = 1.5707963267948966, 1.5707963267948966
//! run.dt = 1e-3
//! sweep.axis1.name = model.J
//! sweep.axis1.values = 0.5, 1, 1.5
//! ```
//!
//! Keys are case-sensitive. Unknown keys are rejected so typos surface.

use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::integrator::Rhs;
use crate::model::{ModelParams, VariationalState};
use crate::validation::DEFAULT_SEED;

#[derive(Debug, Clone, PartialEq, Error)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub msg: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.line, &self.key) {
            (Some(l), Some(k)) => write!(f, "line {l}, `{k}`: {}", self.msg),
            (Some(l), None) => write!(f, "line {l}: {}", self.msg),
            (None, Some(k)) => write!(f, "`{k}`: {}", self.msg),
            (None, None) => write!(f, "{}", self.msg),
        }
    }
}

impl ConfigError {
    fn new(msg: impl Into<String>) -> Self {
        ConfigError { line: None, key: None, msg: msg.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

/// Parsed but unresolved key-value pairs, in file order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawConfig {
    pub entries: Vec<Entry>,
}

const SCALAR_KEYS: &[&str] = &[
    "model.K",
    "model.J",
    "model.retain_beta",
    "run.t_end",
    "run.dt",
    "run.record_every",
    "run.rhs",
    "run.trunc_eps",
    "run.seed",
    "run.drift_bound",
    "output.path",
    "output.format",
];
const LIST_KEYS: &[&str] = &["model.Omega", "model.Delta", "state.theta", "state.phi"];
const AXIS_FIELDS: &[&str] = &["name", "values", "start", "stop", "count"];

fn known_key(key: &str) -> bool {
    if SCALAR_KEYS.contains(&key) || LIST_KEYS.contains(&key) {
        return true;
    }
    let parts: Vec<&str> = key.split('.').collect();
    parts.len() == 3
        && parts[0] == "sweep"
        && parts[1].strip_prefix("axis").is_some_and(|n| n.parse::<usize>().is_ok_and(|n| n >= 1))
        && AXIS_FIELDS.contains(&parts[2])
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries: Vec<Entry> = vec![];
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let Some((k, v)) = body.split_once('=') else {
                return Err(ConfigError { line: Some(line), key: None, msg: format!("expected `key = value`, got `{body}`") });
            };
            let (k, v) = (k.trim(), v.trim());
            if !known_key(k) {
                return Err(ConfigError { line: Some(line), key: Some(k.into()), msg: "unknown key".into() });
            }
            if v.is_empty() {
                return Err(ConfigError { line: Some(line), key: Some(k.into()), msg: "empty value".into() });
            }
            if let Some(prev) = entries.iter().find(|e| e.key == k) {
                return Err(ConfigError {
                    line: Some(line),
                    key: Some(k.into()),
                    msg: format!("duplicate key (first set on line {})", prev.line),
                });
            }
            entries.push(Entry { key: k.into(), value: v.into(), line });
        }
        Ok(RawConfig { entries })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    /// Replace or append a value (used by sweeps).
    pub fn set(&mut self, key: &str, value: String) {
        match self.entries.iter_mut().find(|e| e.key == key) {
            Some(e) => e.value = value,
            None => self.entries.push(Entry { key: key.into(), value, line: 0 }),
        }
    }

    pub(crate) fn err(&self, key: &str, msg: impl Into<String>) -> ConfigError {
        ConfigError { line: self.get(key).map(|e| e.line).filter(|&l| l > 0), key: Some(key.into()), msg: msg.into() }
    }

    pub(crate) fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: fmt::Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some(e) => e.value.parse::<T>().map(Some).map_err(|err| self.err(key, format!("`{}`: {err}", e.value))),
        }
    }

    fn required<T: std::str::FromStr>(&self, key: &str) -> Result<T, ConfigError>
    where
        T::Err: fmt::Display,
    {
        self.parsed(key)?.ok_or_else(|| ConfigError { line: None, key: Some(key.into()), msg: "required".into() })
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        let Some(e) = self.get(key) else { return Ok(None) };
        e.value
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|err| self.err(key, format!("`{}`: {err}", s.trim()))))
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    /// A per-site list: `K` values, or one value broadcast to all sites.
    fn site_list(&self, key: &str, k: usize, default: Option<f64>) -> Result<Vec<f64>, ConfigError> {
        match self.list(key)? {
            None => match default {
                Some(d) => Ok(vec![d; k]),
                None => Err(ConfigError { line: None, key: Some(key.into()), msg: "required".into() }),
            },
            Some(v) if v.len() == 1 => Ok(vec![v[0]; k]),
            Some(v) if v.len() == k => Ok(v),
            Some(v) => Err(self.err(key, format!("{} values given, expected 1 or K = {k}", v.len()))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn as_str(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AxisValues {
    List(Vec<f64>),
    Linspace { start: f64, stop: f64, count: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub name: String,
    pub values: Vec<f64>,
}

/// Everything a run needs, with defaults filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    pub state: VariationalState,
    pub t_end: f64,
    pub dt: f64,
    pub record_every: usize,
    pub rhs: Rhs,
    pub trunc_eps: f64,
    pub seed: u64,
    pub drift_bound: f64,
    pub output: Option<String>,
    pub format: Format,
    pub axes: Vec<SweepAxis>,
}

/// Keys a sweep axis may name, besides per-site `model.Omega.<i>` style
/// entries.
const SWEEPABLE: &[&str] = &[
    "model.J",
    "model.Omega",
    "model.Delta",
    "state.theta",
    "state.phi",
    "run.t_end",
    "run.dt",
    "run.trunc_eps",
];

fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![start],
        n => (0..n).map(|i| start + (stop - start) * i as f64 / (n - 1) as f64).collect(),
    }
}

impl RunConfig {
    /// Resolve a raw config. Model and state keys are required unless the
    /// caller only needs the sweep axes and run settings (`validate`).
    pub fn resolve(raw: &RawConfig) -> Result<Self, ConfigError> {
        let k: usize = raw.required("model.K")?;
        if k == 0 {
            return Err(raw.err("model.K", "must be at least 1"));
        }
        let spin: f64 = raw.required("model.J")?;
        let omega = raw.site_list("model.Omega", k, None)?;
        let delta = raw.site_list("model.Delta", k, Some(0.0))?;
        let retain: bool = raw.parsed("model.retain_beta")?.unwrap_or(true);
        let params = ModelParams::new(spin, omega, delta)
            .map_err(|e| ConfigError { line: raw.get("model.J").map(|e| e.line), key: None, msg: e.to_string() })?
            .with_retain_beta(retain);
        let theta = raw.site_list("state.theta", k, None)?;
        let phi = raw.site_list("state.phi", k, Some(0.0))?;
        let state = VariationalState::new(theta, phi);
        if let Some(i) = state.theta.iter().chain(&state.phi).position(|v| !v.is_finite()) {
            let key = if i < k { "state.theta" } else { "state.phi" };
            return Err(raw.err(key, "angles must be finite"));
        }

        let t_end: f64 = raw.parsed("run.t_end")?.unwrap_or(0.0);
        if !(t_end >= 0.0) || !t_end.is_finite() {
            return Err(raw.err("run.t_end", "must be a finite non-negative number"));
        }
        let dt: f64 = raw.parsed("run.dt")?.unwrap_or(1e-3);
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(raw.err("run.dt", "must be positive"));
        }
        let record_every: usize = raw.parsed("run.record_every")?.unwrap_or(1);
        if record_every == 0 {
            return Err(raw.err("run.record_every", "must be at least 1"));
        }
        let trunc_eps: f64 = raw.parsed("run.trunc_eps")?.unwrap_or(1e-14);
        if !(trunc_eps > 0.0) {
            return Err(raw.err("run.trunc_eps", "must be positive"));
        }
        let rhs = match raw.get("run.rhs").map(|e| e.value.as_str()).unwrap_or("exact") {
            "exact" => Rhs::Exact,
            "series" => Rhs::Series(trunc_eps),
            "spin_half" => Rhs::SpinHalf,
            "large_j" => Rhs::LargeJ,
            other => {
                return Err(raw.err("run.rhs", format!("`{other}` is not one of exact, series, spin_half, large_j")))
            }
        };
        let seed: u64 = raw.parsed("run.seed")?.unwrap_or(DEFAULT_SEED);
        let drift_bound: f64 = raw.parsed("run.drift_bound")?.unwrap_or(1e-6);
        let output = raw.get("output.path").map(|e| e.value.clone());
        let format = match raw.get("output.format").map(|e| e.value.as_str()) {
            Some("csv") => Format::Csv,
            Some("json") => Format::Json,
            Some(other) => return Err(raw.err("output.format", format!("`{other}` is not csv or json"))),
            None => match &output {
                Some(p) if p.ends_with(".json") => Format::Json,
                _ => Format::Csv,
            },
        };
        let axes = Self::axes(raw, k)?;
        Ok(RunConfig {
            params,
            state,
            t_end,
            dt,
            record_every,
            rhs,
            trunc_eps,
            seed,
            drift_bound,
            output,
            format,
            axes,
        })
    }

    /// The fully resolved settings as `key = value` pairs, in a fixed order.
    /// Feeding them back through [`RawConfig::parse`] gives the same run.
    pub fn resolved(&self) -> Vec<(String, String)> {
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
        let mut out = vec![
            ("model.K".to_string(), self.params.k.to_string()),
            ("model.J".into(), format!("{:?}", self.params.spin)),
            ("model.Omega".into(), list(&self.params.omega)),
            ("model.Delta".into(), list(&self.params.delta)),
            ("model.retain_beta".into(), self.params.retain_beta.to_string()),
            ("state.theta".into(), list(&self.state.theta)),
            ("state.phi".into(), list(&self.state.phi)),
            ("run.t_end".into(), format!("{:?}", self.t_end)),
            ("run.dt".into(), format!("{:?}", self.dt)),
            ("run.record_every".into(), self.record_every.to_string()),
            ("run.rhs".into(), self.rhs.name().to_string()),
            ("run.trunc_eps".into(), format!("{:?}", self.trunc_eps)),
            ("run.seed".into(), self.seed.to_string()),
            ("run.drift_bound".into(), format!("{:?}", self.drift_bound)),
        ];
        if let Some(p) = &self.output {
            out.push(("output.path".into(), p.clone()));
        }
        out.push(("output.format".into(), self.format.as_str().into()));
        for (i, a) in self.axes.iter().enumerate() {
            out.push((format!("sweep.axis{}.name", i + 1), a.name.clone()));
            out.push((format!("sweep.axis{}.values", i + 1), list(&a.values)));
        }
        out
    }

    fn axes(raw: &RawConfig, k: usize) -> Result<Vec<SweepAxis>, ConfigError> {
        let mut ids: Vec<usize> = raw
            .entries
            .iter()
            .filter_map(|e| e.key.strip_prefix("sweep.axis"))
            .filter_map(|r| r.split('.').next()?.parse().ok())
            .collect();
        ids.sort_unstable();
        ids.dedup();
        let mut axes = vec![];
        for (pos, id) in ids.iter().enumerate() {
            let key = |f: &str| format!("sweep.axis{id}.{f}");
            if *id != pos + 1 {
                return Err(raw.err(&key("name"), format!("axes must be numbered 1, 2, ... without gaps (missing axis{})", pos + 1)));
            }
            let name: String = raw.required(&key("name"))?;
            check_axis_name(&name, k).map_err(|m| raw.err(&key("name"), m))?;
            let spec = match raw.list(&key("values"))? {
                Some(v) => AxisValues::List(v),
                None => AxisValues::Linspace {
                    start: raw.required(&key("start"))?,
                    stop: raw.required(&key("stop"))?,
                    count: raw.required(&key("count"))?,
                },
            };
            let values = match spec {
                AxisValues::List(v) => v,
                AxisValues::Linspace { start, stop, count } => linspace(start, stop, count),
            };
            if values.is_empty() {
                return Err(raw.err(&key("name"), "axis has no values"));
            }
            axes.push(SweepAxis { name, values });
        }
        Ok(axes)
    }
}

/// `model.J`, a whole list such as `state.theta`, or one site of a list
/// such as `state.theta.2` (sites are 1-based).
fn check_axis_name(name: &str, k: usize) -> Result<(), String> {
    if SWEEPABLE.contains(&name) {
        return Ok(());
    }
    if let Some((base, idx)) = name.rsplit_once('.') {
        if LIST_KEYS.contains(&base) {
            return match idx.parse::<usize>() {
                Ok(i) if (1..=k).contains(&i) => Ok(()),
                _ => Err(format!("site index `{idx}` must be in 1..={k}")),
            };
        }
    }
    Err(format!("`{name}` is not a sweepable parameter"))
}

/// Apply one axis value to a raw config.
pub fn apply_axis(raw: &mut RawConfig, name: &str, value: f64, k: usize) {
    let v = format!("{value:.17e}");
    if let Some((base, idx)) = name.rsplit_once('.') {
        if LIST_KEYS.contains(&base) {
            if let Ok(i) = idx.parse::<usize>() {
                let cur: Vec<String> = match raw.get(base) {
                    Some(e) => {
                        let parts: Vec<String> = e.value.split(',').map(|s| s.trim().to_string()).collect();
                        if parts.len() == 1 { vec![parts[0].clone(); k] } else { parts }
                    }
                    None => vec!["0".into(); k],
                };
                let mut cur = cur;
                cur[i - 1] = v;
                raw.set(base, cur.join(", "));
                return;
            }
        }
    }
    raw.set(name, v);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagnostics_carry_line_and_key() {
        let e = RawConfig::parse("model.K = 2\nmodel.J = 0.5\nmodel.Omgea = 1\n").unwrap_err();
        assert_eq!(e.line, Some(3));
        assert_eq!(e.key.as_deref(), Some("model.Omgea"));
        let raw = RawConfig::parse("model.K = 2\nmodel.J = 0.5\nmodel.Omega = 1, 2, 3\nstate.theta = 1\n").unwrap();
        let e = RunConfig::resolve(&raw).unwrap_err();
        assert_eq!(e.line, Some(3));
    }

    #[test]
    fn broadcast_and_defaults() {
        let raw = RawConfig::parse("model.K = 3\nmodel.J = 1\nmodel.Omega = 1\nstate.theta = 0.5, 1, 1.5\n").unwrap();
        let c = RunConfig::resolve(&raw).unwrap();
        assert_eq!(c.params.omega, vec![1.0; 3]);
        assert_eq!(c.params.delta, vec![0.0; 3]);
        assert_eq!(c.state.phi, vec![0.0; 3]);
        assert_eq!(c.rhs, Rhs::Exact);
    }

    #[test]
    fn per_site_axis() {
        let mut raw = RawConfig::parse("model.K = 2\nmodel.J = 1\nmodel.Omega = 1\nstate.theta = 0.5\n").unwrap();
        apply_axis(&mut raw, "state.theta.2", 1.25, 2);
        let c = RunConfig::resolve(&raw).unwrap();
        assert_eq!(c.state.theta, vec![0.5, 1.25]);
    }

    #[test]
    fn resolved_round_trips() {
        let raw = RawConfig::parse(
            "model.K = 2\nmodel.J = 1.5\nmodel.Omega = 1, 0.3\nstate.theta = 0.1, 2\nrun.rhs = series\n\
             sweep.axis1.name = model.J\nsweep.axis1.start = 0.5\nsweep.axis1.stop = 2\nsweep.axis1.count = 4\n",
        )
        .unwrap();
        let c = RunConfig::resolve(&raw).unwrap();
        let text: String = c.resolved().iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
        let again = RunConfig::resolve(&RawConfig::parse(&text).unwrap()).unwrap();
        assert_eq!(c, again);
    }
}
