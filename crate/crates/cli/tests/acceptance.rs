//! Acceptance criteria, one PASS/FAIL line each. Runs as a plain binary so
//! the verdict lines always reach the test log.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use strato_moyal::fock::{deserialize_fock, serialize_fock, Truncation};
use strato_moyal::random::{instance_rng, random_fock, FockShape};
use strato_moyal::report::{parse_config, run_suite, run_suites, CheckRecord, Relation, RunConfig, Suite};
use strato_moyal::Exec;

struct Verdict {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Verdict {
    fn new() -> Self {
        Verdict { failures: Vec::new(), notes: Vec::new() }
    }

    fn fail(&mut self, msg: String) {
        self.failures.push(msg);
    }

    /// Checks a suite record against the criterion's own bound and instance count.
    fn record(&mut self, records: &[CheckRecord], id: &str, relation: Relation, bound: f64, min_instances: u64) {
        let Some(r) = records.iter().find(|r| r.check_id == id) else {
            self.fail(format!("{id}: missing"));
            return;
        };
        let ok = r.residual.is_finite() && relation.holds(r.residual, bound);
        let sym = if relation == Relation::AtMost { "<=" } else { ">=" };
        let note = format!("{id} {:.3e} {sym} {bound:.0e} (n={})", r.residual, r.n_instances);
        if !ok {
            self.fail(note);
        } else if r.n_instances < min_instances {
            self.fail(format!("{id}: only {} instances, need {min_instances}", r.n_instances));
        } else {
            self.notes.push(note);
        }
    }

    fn exact(&mut self, records: &[CheckRecord], id: &str, min_instances: u64) {
        self.record(records, id, Relation::AtMost, 0.0, min_instances);
    }
}

fn config(json: &str) -> RunConfig {
    parse_config(json).expect("acceptance configs are valid")
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

fn suite(cfg: &RunConfig, s: Suite) -> (Vec<CheckRecord>, f64) {
    timed(|| run_suite(cfg, s, Exec::default()))
}

fn wick_axioms() -> (Verdict, f64) {
    let (recs, t) = suite(&config(r#"{"d": 2, "K": 3}"#), Suite::Algebra);
    let mut v = Verdict::new();
    v.exact(&recs, "wick-commutativity", 200);
    v.exact(&recs, "wick-associativity", 200);
    (v, t)
}

fn derivation_law() -> (Verdict, f64) {
    let (recs, t) = suite(&config(r#"{"d": 2, "K": 3}"#), Suite::Algebra);
    let mut v = Verdict::new();
    v.exact(&recs, "derivation-law", 200);
    (v, t)
}

fn chaos_run() -> (Vec<CheckRecord>, f64) {
    suite(&config(r#"{"mc": {"n_grid": 4096}}"#), Suite::Chaos)
}

fn chaos_factorization(recs: &[CheckRecord]) -> Verdict {
    let mut v = Verdict::new();
    v.record(recs, "spectral-factorization", Relation::AtMost, 1e-12, 100);
    v.record(recs, "quadrature-agreement", Relation::AtMost, 1e-6, 1);
    v.record(recs, "quadrature-factorization", Relation::AtMost, 1e-6, 1);
    v.record(recs, "quadrature-order", Relation::AtLeast, 2.0, 1);
    v
}

fn gateaux(recs: &[CheckRecord]) -> Verdict {
    let mut v = Verdict::new();
    v.record(recs, "gateaux-slope", Relation::AtMost, 0.1, 50);
    v
}

fn poisson_axioms() -> (Verdict, f64) {
    let (recs, t) = suite(&config("{}"), Suite::Poisson);
    let mut v = Verdict::new();
    for id in ["bracket-antisymmetry", "bracket-leibniz", "bracket-jacobi"] {
        v.exact(&recs, id, 100);
    }
    (v, t)
}

fn star_axioms() -> (Verdict, f64) {
    let (recs, t) = suite(&config(r#"{"R": 4}"#), Suite::Moyal);
    let mut v = Verdict::new();
    for id in ["p0-wick", "p1-antisymmetrized", "star-associativity"] {
        v.exact(&recs, id, 50);
    }
    (v, t)
}

fn green_and_sampler() -> (Verdict, f64) {
    let (recs, t) = suite(&config(r#"{"mc": {"n_samples": 20000}}"#), Suite::Gaussian);
    let mut v = Verdict::new();
    v.record(&recs, "spectral-kernel", Relation::AtMost, 1e-4, 25);
    v.record(&recs, "green-coefficients", Relation::AtMost, 1e-15, 2);
    v.record(&recs, "covariance", Relation::AtMost, 3.0, 20000);
    v.record(&recs, "holder-p1", Relation::AtMost, 3.0, 20000);
    (v, t)
}

fn equivalence_transform() -> (Verdict, f64) {
    let cfg = config(r#"{"d": 2, "K": 3, "N": 12, "R": 3, "suites": ["equivalence"]}"#);
    let (recs, t) = suite(&cfg, Suite::Equivalence);
    let mut v = Verdict::new();
    v.record(&recs, "comparison-window", Relation::AtLeast, 6.0, 1);
    for fam in ["zero", "one", "ksq"] {
        v.exact(&recs, &format!("intertwining-exponentials-{fam}"), 30);
        v.exact(&recs, &format!("intertwining-polynomials-{fam}"), 30);
    }
    (v, t)
}

fn exponential_formula() -> (Verdict, f64) {
    let cfg = config(r#"{"d": 1, "K": 2, "N": 12, "R": 3, "suites": ["equivalence"]}"#);
    let (recs, t) = suite(&cfg, Suite::Equivalence);
    let mut v = Verdict::new();
    for fam in ["zero", "one", "ksq"] {
        v.exact(&recs, &format!("exp-formula-{fam}"), 20);
    }
    (v, t)
}

fn verify(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_verify")).args(args).output().expect("verify binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn interfaces(dir: &Path) -> Verdict {
    let mut v = Verdict::new();

    let cfg = config(r#"{"suites": ["algebra", "poisson"]}"#);
    let a = run_suites(&cfg).to_canonical_json();
    let b = run_suites(&cfg).to_canonical_json();
    if a == b {
        v.notes.push("library report bytes identical".into());
    } else {
        v.fail("library reports differ".into());
    }

    let shape = FockShape::new(Truncation::new(2, 3), 5, 6);
    let bad = (0..50)
        .filter(|&i| {
            let f = random_fock(&mut instance_rng(7, i), &shape);
            deserialize_fock(&serialize_fock(&f)).ok().as_ref() != Some(&f)
        })
        .count();
    if bad == 0 {
        v.notes.push("50 serialization round trips".into());
    } else {
        v.fail(format!("{bad} serialization round trips failed"));
    }

    let write = |name: &str, body: &str| {
        let p = dir.join(name);
        std::fs::write(&p, body).expect("temp dir is writable");
        p.display().to_string()
    };
    let good = write("good.json", r#"{"suites": ["algebra", "poisson"]}"#);
    let failing = write("failing.json", r#"{"suites": ["chaos"], "mc": {"n_grid": 64}}"#);
    let invalid = write("invalid.json", r#"{"N": 6, "R": 4, "suites": ["equivalence"]}"#);
    let out = |name: &str| dir.join(name).display().to_string();

    let (c1, _) = verify(&["--config", &good, "--out", &out("one.json")]);
    let (c2, _) = verify(&["--config", &good, "--out", &out("two.json")]);
    let same = std::fs::read(dir.join("one.json")).ok() == std::fs::read(dir.join("two.json")).ok();
    let (c_fail, _) = verify(&["--config", &failing, "--out", &out("fail.json")]);
    let (c_invalid, _) = verify(&["--config", &invalid, "--out", &out("invalid_out.json")]);
    let (c_missing, _) = verify(&["--config", &out("absent.json")]);
    let codes = [c1, c2, c_fail, c_invalid, c_missing];
    if codes == [0, 0, 1, 2, 2] && same {
        v.notes.push(format!("cli exit codes {codes:?}, report bytes identical"));
    } else {
        v.fail(format!("cli exit codes {codes:?} (want [0, 0, 1, 2, 2]), identical={same}"));
    }
    v
}

fn main() -> ExitCode {
    let mut all_pass = true;
    let mut report = |n: u32, name: &str, (v, secs): (Verdict, f64), budget: f64| {
        let in_time = secs <= budget;
        let pass = v.failures.is_empty() && in_time;
        all_pass &= pass;
        let detail = if pass { v.notes.join("; ") } else { v.failures.join("; ") };
        let timing = format!("{secs:.2}s / {budget:.0}s{}", if in_time { "" } else { " OVER BUDGET" });
        println!("{} [{n:2}] {name}: {detail} ({timing})", if pass { "PASS" } else { "FAIL" });
    };

    report(1, "wick algebra axioms", wick_axioms(), 10.0);
    report(2, "derivation law", derivation_law(), 5.0);
    let (chaos, chaos_secs) = chaos_run();
    report(3, "pathwise chaos factorization", (chaos_factorization(&chaos), chaos_secs), 60.0);
    report(4, "gateaux derivative and annihilation", (gateaux(&chaos), chaos_secs), 30.0);
    report(5, "poisson axioms", poisson_axioms(), 30.0);
    report(6, "star-product axioms", star_axioms(), 120.0);
    report(7, "green kernel and sampler", green_and_sampler(), 120.0);
    report(8, "equivalence transform", equivalence_transform(), 300.0);
    report(9, "exponential product formula", exponential_formula(), 60.0);
    let dir = tempfile::tempdir().expect("temp dir");
    report(10, "determinism and interfaces", timed(|| interfaces(dir.path())), 5.0);

    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
