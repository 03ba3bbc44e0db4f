//! Suite orchestration: every check becomes a [`CheckRecord`], failures
//! included, and records appear in a fixed order.

mod algebra;
mod chaos;
mod equivalence;
mod gaussian;
mod poisson;

use std::time::Instant;

use rand_chacha::ChaCha8Rng;

use super::config::{RunConfig, Suite};
use super::record::{CheckRecord, Relation, VerificationReport};
use crate::exec::Exec;
use crate::fock::{FockVector, ModeMap, Truncation};
use crate::random::instance_rng;
use crate::scalar::Scalar;

/// Shared state of one suite run.
pub(crate) struct Ctx<'a> {
    pub cfg: &'a RunConfig,
    pub suite: Suite,
    pub exec: Exec,
    pub records: Vec<CheckRecord>,
}

impl<'a> Ctx<'a> {
    fn new(cfg: &'a RunConfig, suite: Suite, exec: Exec) -> Self {
        Ctx { cfg, suite, exec, records: Vec::new() }
    }

    pub fn seed(&self) -> u64 {
        self.cfg.mc.seed
    }

    pub fn trunc(&self) -> Truncation {
        Truncation::new(self.cfg.d, self.cfg.k)
    }

    /// Generator for instance `i` of check `check_id`.
    pub fn rng(&self, check_id: &str, i: usize) -> ChaCha8Rng {
        instance_rng(self.seed() ^ fnv1a(check_id), i as u64)
    }

    pub fn record(&mut self, check_id: &str, anchor: &str, residual: f64, relation: Relation, tolerance: f64, n: usize) {
        let rec = CheckRecord::new(self.suite.name(), check_id, anchor, residual, relation, tolerance, n as u64, self.seed());
        self.records.push(rec);
    }

    /// An exact identity: residual is the largest coefficient discrepancy.
    pub fn exact(&mut self, check_id: &str, anchor: &str, residual: f64, n: usize) {
        self.record(check_id, anchor, residual, Relation::AtMost, 0.0, n);
    }
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

/// Largest absolute coefficient of `a − b`.
pub(crate) fn discrepancy(a: &FockVector, b: &FockVector) -> f64 {
    (a - b).max_abs_coefficient()
}

/// `Σ |c_μ| Π |ξ|^μ`, the natural rounding scale of a spectral evaluation.
pub(crate) fn abs_scale<S: Scalar>(f: &FockVector<S>, xi: &ModeMap<f64>) -> f64 {
    f.iter()
        .map(|(mu, c)| c.to_f64().abs() * mu.eval_with(|m| xi.get(&m).copied().unwrap_or(0.0).abs()))
        .sum()
}

pub fn run_suite(cfg: &RunConfig, suite: Suite, exec: Exec) -> Vec<CheckRecord> {
    let mut ctx = Ctx::new(cfg, suite, exec);
    match suite {
        Suite::Algebra => algebra::run(&mut ctx),
        Suite::Chaos => chaos::run(&mut ctx),
        Suite::Gaussian => gaussian::run(&mut ctx),
        Suite::Poisson => poisson::run_poisson(&mut ctx),
        Suite::Moyal => poisson::run_moyal(&mut ctx),
        Suite::Equivalence => equivalence::run(&mut ctx),
    }
    ctx.records
}

/// Run the configured suites in order.
pub fn run_suites(cfg: &RunConfig) -> VerificationReport {
    run_suites_with(cfg, Exec::default())
}

pub fn run_suites_with(cfg: &RunConfig, exec: Exec) -> VerificationReport {
    let mut report = VerificationReport::new(cfg.to_json());
    for &suite in &cfg.suites {
        let start = Instant::now();
        report.records.extend(run_suite(cfg, suite, exec));
        report.timings.push((suite.name().to_string(), start.elapsed().as_secs_f64()));
    }
    report
}
