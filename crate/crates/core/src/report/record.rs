use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const REPORT_FORMAT: &str = "1";

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed report: {0}")]
    Parse(#[from] serde_json::Error),
}

/// How a residual is compared with its tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

impl Relation {
    pub fn holds(self, residual: f64, tolerance: f64) -> bool {
        match self {
            Relation::AtMost => residual <= tolerance,
            Relation::AtLeast => residual >= tolerance,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub suite: String,
    pub check_id: String,
    pub anchor: String,
    #[serde(serialize_with = "nan_as_null", deserialize_with = "null_as_nan")]
    pub residual: f64,
    #[serde(serialize_with = "nan_as_null", deserialize_with = "null_as_nan")]
    pub tolerance: f64,
    pub relation: Relation,
    pub pass: bool,
    pub n_instances: u64,
    pub seed: u64,
}

fn nan_as_null<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

fn null_as_nan<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

impl CheckRecord {
    /// A non-finite residual always fails.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        suite: &str,
        check_id: &str,
        anchor: &str,
        residual: f64,
        relation: Relation,
        tolerance: f64,
        n_instances: u64,
        seed: u64,
    ) -> Self {
        CheckRecord {
            suite: suite.into(),
            check_id: check_id.into(),
            anchor: anchor.into(),
            residual,
            tolerance,
            relation,
            pass: residual.is_finite() && relation.holds(residual, tolerance),
            n_instances,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub config: serde_json::Value,
    pub records: Vec<CheckRecord>,
    pub versions: BTreeMap<String, String>,
    /// Wall-clock seconds per suite; text summary only.
    #[serde(skip)]
    pub timings: Vec<(String, f64)>,
}

impl VerificationReport {
    pub fn new(config: serde_json::Value) -> Self {
        let versions = [
            ("strato-moyal".to_string(), env!("CARGO_PKG_VERSION").to_string()),
            ("report-format".to_string(), REPORT_FORMAT.to_string()),
        ]
        .into();
        VerificationReport { config, records: Vec::new(), versions, timings: Vec::new() }
    }

    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    /// Canonical JSON: sorted keys, two-space indent, floats as
    /// `{:.16e}`, non-finite floats as `null`.
    pub fn to_canonical_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report is plain data");
        let mut out = String::new();
        write_value(&mut out, &value, 0);
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn text_summary(&self) -> String {
        let mut out = String::new();
        let passed = self.records.iter().filter(|r| r.pass).count();
        let _ = writeln!(out, "{passed}/{} checks passed", self.records.len());
        for r in &self.records {
            let _ = writeln!(
                out,
                "{} {}/{} [{}] residual {:.3e} {} {:.3e} (n={}, seed={})",
                if r.pass { "PASS" } else { "FAIL" },
                r.suite,
                r.check_id,
                r.anchor,
                r.residual,
                r.relation.symbol(),
                r.tolerance,
                r.n_instances,
                r.seed
            );
        }
        for (suite, secs) in &self.timings {
            let _ = writeln!(out, "time {suite}: {secs:.2}s");
        }
        out
    }
}

/// Write the JSON report to `path` and its text summary next to it.
pub fn emit_report(report: &VerificationReport, path: &Path) -> Result<PathBuf, ReportError> {
    let io = |source| ReportError::Io { path: path.to_path_buf(), source };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(io)?;
    }
    std::fs::write(path, report.to_canonical_json()).map_err(io)?;
    let summary = path.with_extension("txt");
    std::fs::write(&summary, report.text_summary()).map_err(|source| ReportError::Io { path: summary.clone(), source })?;
    Ok(summary)
}

fn write_value(out: &mut String, v: &serde_json::Value, indent: usize) {
    use serde_json::Value;
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                let f = n.as_f64().expect("f64 number");
                let _ = write!(out, "{f:.16e}");
            } else {
                let _ = write!(out, "{n}");
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(out, item, indent + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&serde_json::to_string(k).expect("key"));
                out.push_str(": ");
                write_value(out, &map[*k], indent + 1);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}
