use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::equivalence::{AlphaFamily, DiagonalOperatorA};
use crate::scalar::{format_rational, parse_rational, rational_abs, Rational};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("schema violation at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Algebra,
    Chaos,
    Gaussian,
    Poisson,
    Moyal,
    Equivalence,
}

impl Suite {
    pub const ALL: [Suite; 6] =
        [Suite::Algebra, Suite::Chaos, Suite::Gaussian, Suite::Poisson, Suite::Moyal, Suite::Equivalence];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Chaos => "chaos",
            Suite::Gaussian => "gaussian",
            Suite::Poisson => "poisson",
            Suite::Moyal => "moyal",
            Suite::Equivalence => "equivalence",
        }
    }

    pub fn parse(name: &str) -> Result<Self, ConfigError> {
        Suite::ALL
            .into_iter()
            .find(|s| s.name() == name)
            .ok_or_else(|| ConfigError::Invalid(format!("unknown suite {name:?}")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The `A` operator of the configuration.
#[derive(Clone, Debug, PartialEq)]
pub enum AlphaSpec {
    Family(AlphaFamily),
    Table(BTreeMap<i32, Rational>),
}

impl AlphaSpec {
    pub fn operator(&self, k_max: i32) -> DiagonalOperatorA {
        match self {
            AlphaSpec::Family(f) => DiagonalOperatorA::family(*f, k_max),
            AlphaSpec::Table(t) => {
                let bound = t.values().map(rational_abs).max().unwrap_or_default().max(Rational::from_integer(1.into()));
                DiagonalOperatorA::new(t.clone(), bound, 0).expect("bound is the max")
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            AlphaSpec::Family(f) => f.name().to_string(),
            AlphaSpec::Table(_) => "table".to_string(),
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            AlphaSpec::Family(f) => serde_json::Value::String(f.name().into()),
            AlphaSpec::Table(t) => serde_json::Value::Object(
                t.iter()
                    .map(|(k, v)| (k.to_string(), serde_json::Value::String(format_rational(v))))
                    .collect(),
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McConfig {
    pub n_samples: usize,
    pub seed: u64,
    #[serde(rename = "K_mc")]
    pub k_mc: i32,
    #[serde(rename = "M")]
    pub m: usize,
    pub n_grid: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig { n_samples: 20_000, seed: 42, k_mc: 64, m: 512, n_grid: 4096 }
    }
}

/// Validated run configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub d: u16,
    pub k: i32,
    pub n: u32,
    pub r: u32,
    pub weight_c: Rational,
    pub alpha: AlphaSpec,
    pub mc: McConfig,
    pub suites: Vec<Suite>,
    pub output_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            d: 2,
            k: 3,
            n: 6,
            r: 4,
            weight_c: Rational::from_integer(1.into()),
            alpha: AlphaSpec::Family(AlphaFamily::Ksq),
            mc: McConfig::default(),
            suites: DEFAULT_SUITES.to_vec(),
            output_path: None,
        }
    }
}

pub const DEFAULT_SUITES: [Suite; 5] = [Suite::Algebra, Suite::Chaos, Suite::Gaussian, Suite::Poisson, Suite::Moyal];

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.d < 1 {
            return bad(format!("d must be >= 1, got {}", self.d));
        }
        if self.k < 1 {
            return bad(format!("K must be >= 1, got {}", self.k));
        }
        if self.n < 2 {
            return bad(format!("N must be >= 2, got {}", self.n));
        }
        if self.r < 1 {
            return bad(format!("R must be >= 1, got {}", self.r));
        }
        if self.weight_c <= Rational::from_integer(0.into()) {
            return bad(format!("weight_c must be positive, got {}", format_rational(&self.weight_c)));
        }
        if self.mc.n_samples < 100 {
            return bad(format!("mc.n_samples must be >= 100, got {}", self.mc.n_samples));
        }
        if self.mc.k_mc < 1 {
            return bad(format!("mc.K_mc must be >= 1, got {}", self.mc.k_mc));
        }
        if self.mc.m < 8 {
            return bad(format!("mc.M must be >= 8, got {}", self.mc.m));
        }
        if self.mc.n_grid < 64 {
            return bad(format!("mc.n_grid must be >= 64, got {}", self.mc.n_grid));
        }
        if self.suites.contains(&Suite::Equivalence) && self.n < 2 * self.r {
            return bad(format!(
                "equivalence needs a nonnegative window N - 2R, got N={} R={}",
                self.n, self.r
            ));
        }
        Ok(())
    }

    /// `N − 2R`, the degree window of the equivalence checks.
    pub fn window(&self) -> Option<u32> {
        self.n.checked_sub(2 * self.r)
    }

    /// Canonical JSON echo, loadable again.
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::json!({
            "d": self.d,
            "K": self.k,
            "N": self.n,
            "R": self.r,
            "weight_c": format_rational(&self.weight_c),
            "alpha_spec": self.alpha.to_json(),
            "mc": serde_json::to_value(&self.mc).expect("plain struct"),
            "suites": self.suites.iter().map(|s| s.name()).collect::<Vec<_>>(),
        });
        if let Some(p) = &self.output_path {
            v["output_path"] = serde_json::Value::String(p.display().to_string());
        }
        v
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    d: Option<u16>,
    #[serde(rename = "K")]
    k: Option<i32>,
    #[serde(rename = "N")]
    n: Option<u32>,
    #[serde(rename = "R")]
    r: Option<u32>,
    weight_c: Option<String>,
    alpha_spec: Option<RawAlpha>,
    mc: Option<RawMc>,
    suites: Option<Vec<Suite>>,
    output_path: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawAlpha {
    Named(String),
    Table(BTreeMap<String, String>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMc {
    n_samples: Option<usize>,
    seed: Option<u64>,
    #[serde(rename = "K_mc")]
    k_mc: Option<i32>,
    #[serde(rename = "M")]
    m: Option<usize>,
    n_grid: Option<usize>,
}

/// Parse, fill defaults and validate a JSON configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    let defaults = RunConfig::default();
    let weight_c = match raw.weight_c {
        Some(s) => parse_rational(&s).map_err(|m| ConfigError::Schema { path: "weight_c".into(), message: m })?,
        None => defaults.weight_c,
    };
    let alpha = match raw.alpha_spec {
        None => defaults.alpha,
        Some(RawAlpha::Named(name)) => AlphaSpec::Family(
            AlphaFamily::parse(&name).map_err(|e| ConfigError::Schema { path: "alpha_spec".into(), message: e.to_string() })?,
        ),
        Some(RawAlpha::Table(t)) => {
            let mut table = BTreeMap::new();
            for (k, v) in t {
                let path = format!("alpha_spec.{k}");
                let freq: i32 = k
                    .trim()
                    .parse()
                    .map_err(|e| ConfigError::Schema { path: path.clone(), message: format!("bad frequency: {e}") })?;
                let value = parse_rational(&v).map_err(|m| ConfigError::Schema { path, message: m })?;
                table.insert(freq, value);
            }
            AlphaSpec::Table(table)
        }
    };
    let raw_mc = raw.mc.unwrap_or(RawMc { n_samples: None, seed: None, k_mc: None, m: None, n_grid: None });
    let dm = McConfig::default();
    let mut seen = std::collections::BTreeSet::new();
    let suites: Vec<Suite> = raw.suites.unwrap_or(defaults.suites).into_iter().filter(|s| seen.insert(*s)).collect();
    let cfg = RunConfig {
        d: raw.d.unwrap_or(defaults.d),
        k: raw.k.unwrap_or(defaults.k),
        n: raw.n.unwrap_or(defaults.n),
        r: raw.r.unwrap_or(defaults.r),
        weight_c,
        alpha,
        mc: McConfig {
            n_samples: raw_mc.n_samples.unwrap_or(dm.n_samples),
            seed: raw_mc.seed.unwrap_or(dm.seed),
            k_mc: raw_mc.k_mc.unwrap_or(dm.k_mc),
            m: raw_mc.m.unwrap_or(dm.m),
            n_grid: raw_mc.n_grid.unwrap_or(dm.n_grid),
        },
        suites,
        output_path: raw.output_path,
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    #[test]
    fn empty_object_is_default() {
        assert_eq!(parse_config("{}").unwrap(), RunConfig::default());
    }

    #[test]
    fn rational_weight() {
        assert_eq!(parse_config(r#"{"weight_c": "4/1"}"#).unwrap().weight_c, ratio(4, 1));
        assert_eq!(parse_config(r#"{"weight_c": "8/2"}"#).unwrap().weight_c, ratio(4, 1));
    }

    #[test]
    fn equivalence_window_is_enforced() {
        let err = parse_config(r#"{"N": 6, "R": 4, "suites": ["equivalence"]}"#).unwrap_err();
        assert!(matches!(err, ConfigError::Invalid(_)), "{err}");
        assert!(parse_config(r#"{"N": 6, "R": 3, "suites": ["equivalence"]}"#).is_ok());
    }

    #[test]
    fn schema_errors_carry_paths() {
        match parse_config(r#"{"mc": {"n_samples": "many"}}"#).unwrap_err() {
            ConfigError::Schema { path, .. } => assert_eq!(path, "mc.n_samples"),
            other => panic!("{other}"),
        }
        match parse_config(r#"{"suites": ["algebra", "nope"]}"#).unwrap_err() {
            ConfigError::Schema { path, .. } => assert_eq!(path, "suites[1]"),
            other => panic!("{other}"),
        }
        assert!(parse_config(r#"{"typo": 1}"#).is_err());
        assert!(parse_config(r#"{"alpha_spec": {"x": "1"}}"#).is_err());
        assert!(parse_config(r#"{"mc": {"n_samples": 10}}"#).is_err());
    }

    #[test]
    fn alpha_table() {
        let cfg = parse_config(r#"{"alpha_spec": {"1": "2/3", "-2": "5"}}"#).unwrap();
        let a = cfg.alpha.operator(cfg.k);
        assert_eq!(a.alpha(1), ratio(2, 3));
        assert_eq!(a.alpha(-2), ratio(5, 1));
        assert_eq!(a.alpha(0), ratio(0, 1));
    }

    #[test]
    fn echo_reloads() {
        let cfg = parse_config(r#"{"d": 1, "alpha_spec": {"1": "1/2"}, "suites": [], "output_path": "x.json"}"#).unwrap();
        assert_eq!(parse_config(&cfg.to_json().to_string()).unwrap(), cfg);
    }
}
