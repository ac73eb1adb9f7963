//! The `sp2lab` command line driver.
//!
//! Exit codes: 0 when every check passes, 1 when a verification fails, 2 for
//! usage or configuration errors. Reports are JSON by default; everything
//! except the `timing` field is a deterministic function of the invocation.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::{bracket, SpElement};
use crate::cartan::{canonicalize, special_orbit_distance, Family, SUBSPACE_TOL};
use crate::curvature::{second_derivative_closed_form, TangentPlane};
use crate::error::{Error, Result};
use crate::experiments::{
    check_wilking_inequalities, lemma1_verdict, oracle_suite_with, verify_lemma1_with, verify_theorem1_at, wilking_pair,
    wilking_suite, working_sign, Lemma1Class, RowStatus, SamplingPlan, Summary, DEFAULT_TOL,
};
use crate::metric::{DeformedMetric, MetricDeformation};

pub const SCHEMA_VERSION: &str = "1.0";
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Failing samples listed in a report before truncation.
const MAX_WITNESSES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "sp2lab", version, about = "Curvature verification experiments on Sp(2)/U(1)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Number of sampled planes (metrics for `wilking`, pairs for `oracle`).
    #[arg(long, global = true)]
    pub samples: Option<usize>,

    /// Comma separated deformation parameters.
    #[arg(long = "t", global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub t_values: Option<Vec<f64>>,

    #[arg(long, global = true)]
    pub tol: Option<f64>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Restrict sampling to one orbit family (F1..F4).
    #[arg(long, global = true)]
    pub family: Option<Family>,

    /// Interleave samples concentrated near the degenerate orbit.
    #[arg(long, global = true)]
    pub adversarial: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bracket and inner product against the quaternionic matrix model.
    Oracle {
        /// Replace the bracket by one with the opposite `lambda` sign.
        #[arg(long, hide = true)]
        corrupt_bracket: bool,
    },
    /// Second and third derivative dichotomy on Cartan subalgebras.
    Lemma1,
    /// Positivity scan on commuting planes.
    Theorem1 {
        /// Use the `--t` values as given instead of `sigma |t|`.
        #[arg(long)]
        literal_t: bool,
    },
    /// Nonpositive planes for random invariant metrics.
    Wilking,
    /// Orbit family of the plane spanned by two elements of `m`.
    Classify {
        /// 9 reals `u,v,w` or 10 reals `lambda,u,v,w`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        y: Vec<f64>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Oracle { .. } => "oracle",
            Command::Lemma1 => "lemma1",
            Command::Theorem1 { .. } => "theorem1",
            Command::Wilking => "wilking",
            Command::Classify { .. } => "classify",
        }
    }
}

/// Validated settings of one invocation, echoed in the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub subcommand: String,
    pub seed: u64,
    pub samples: usize,
    pub t_values: Vec<f64>,
    pub tolerance: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub family: Option<Family>,
    pub adversarial: bool,
    pub literal_t: bool,
    pub corrupt_bracket: bool,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self> {
        let (samples, tol) = match cli.command {
            Command::Oracle { .. } => (10_000, 1e-12),
            Command::Wilking => (1_000, DEFAULT_TOL),
            Command::Classify { .. } => (1, DEFAULT_TOL),
            _ => (10_000, DEFAULT_TOL),
        };
        let samples = cli.samples.unwrap_or(samples);
        if samples == 0 {
            return Err(Error::Config("--samples must be at least 1".into()));
        }
        let tolerance = cli.tol.unwrap_or(tol);
        if !(tolerance.is_finite() && tolerance >= 0.0) {
            return Err(Error::Config(format!("--tol must be a finite nonnegative number, got {tolerance}")));
        }
        let (literal_t, corrupt_bracket) = match cli.command {
            Command::Theorem1 { literal_t } => (literal_t, false),
            Command::Oracle { corrupt_bracket } => (false, corrupt_bracket),
            _ => (false, false),
        };
        let t_values = cli.t_values.clone().unwrap_or_else(|| vec![1e-3, 1e-2, 1e-1]);
        if t_values.is_empty() || t_values.iter().any(|t| !t.is_finite()) {
            return Err(Error::Config("--t needs one or more finite values".into()));
        }
        let config = Self {
            subcommand: cli.command.name().to_string(),
            seed: cli.seed,
            samples,
            t_values,
            tolerance,
            format: cli.format,
            out: cli.out.clone(),
            family: cli.family,
            adversarial: cli.adversarial,
            literal_t,
            corrupt_bracket,
        };
        if matches!(cli.command, Command::Theorem1 { .. }) {
            for t in config.effective_t_values() {
                DeformedMetric::new(MetricDeformation::reference(), t)
                    .map_err(|e| Error::Config(format!("t = {t} does not give a metric: {e}")))?;
            }
        }
        Ok(config)
    }

    /// The deformation parameters actually evaluated by `theorem1`.
    pub fn effective_t_values(&self) -> Vec<f64> {
        if self.literal_t {
            self.t_values.clone()
        } else {
            let (sigma, _) = working_sign();
            self.t_values.iter().map(|t| sigma * t.abs() + 0.0).collect()
        }
    }

    /// Without `--family` or `--adversarial`, half the samples sit near the
    /// degenerate orbit, where the sign conditions are tight.
    fn plan(&self) -> SamplingPlan {
        if self.family.is_none() && !self.adversarial {
            SamplingPlan::mixed()
        } else {
            SamplingPlan {
                family: self.family,
                adversarial: self.adversarial,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, value: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            passed,
            value,
            threshold,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: String,
    pub artifact_version: String,
    pub command: String,
    pub config: RunConfig,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub statistics: BTreeMap<String, Summary>,
    pub counts: BTreeMap<String, usize>,
    pub values: BTreeMap<String, Value>,
    pub witnesses: Vec<Value>,
    /// Excluded from determinism comparisons.
    pub timing: Timing,
}

impl Report {
    fn new(config: &RunConfig) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            artifact_version: ARTIFACT_VERSION.to_string(),
            command: config.subcommand.clone(),
            config: config.clone(),
            passed: false,
            checks: Vec::new(),
            statistics: BTreeMap::new(),
            counts: BTreeMap::new(),
            values: BTreeMap::new(),
            witnesses: Vec::new(),
            timing: Timing { wall_seconds: 0.0 },
        }
    }

    fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    fn value(&mut self, key: &str, v: impl Serialize) {
        self.values.insert(key.to_string(), serde_json::to_value(v).expect("serializable"));
    }

    fn finish(&mut self) {
        self.passed = self.checks.iter().all(|c| c.passed);
    }

    /// The report as JSON without the timing field.
    pub fn payload(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("serializable");
        if let Value::Object(map) = &mut v {
            map.remove("timing");
        }
        v
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => serde_json::to_string_pretty(self).map_err(|e| Error::Config(e.to_string())),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["check", "passed", "value", "threshold", "detail"])
                    .map_err(|e| Error::Config(e.to_string()))?;
                for c in &self.checks {
                    w.write_record([
                        c.name.clone(),
                        c.passed.to_string(),
                        c.value.to_string(),
                        c.threshold.to_string(),
                        c.detail.clone(),
                    ])
                    .map_err(|e| Error::Config(e.to_string()))?;
                }
                let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
                String::from_utf8(bytes).map_err(|e| Error::Config(e.to_string()))
            }
            Format::Text => {
                let mut s = format!(
                    "sp2lab {} (seed {}, samples {}): {}\n",
                    self.command,
                    self.config.seed,
                    self.config.samples,
                    if self.passed { "PASS" } else { "FAIL" }
                );
                for c in &self.checks {
                    s += &format!(
                        "  [{}] {}: {:e} (threshold {:e}) {}\n",
                        if c.passed { "pass" } else { "FAIL" },
                        c.name,
                        c.value,
                        c.threshold,
                        c.detail
                    );
                }
                for (k, v) in &self.values {
                    s += &format!("  {k} = {v}\n");
                }
                for (k, n) in &self.counts {
                    s += &format!("  count {k} = {n}\n");
                }
                for w in &self.witnesses {
                    s += &format!("  witness {w}\n");
                }
                Ok(s)
            }
        }
    }
}

/// Arguments that reproduce a plane through `sp2lab classify`.
pub fn classify_args(p: &TangentPlane) -> String {
    let join = |x: &SpElement| x.m_coords().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
    format!("classify --x {} --y {}", join(&p.x), join(&p.y))
}

fn plane_witness(p: &TangentPlane, extra: Value) -> Value {
    let mut v = json!({
        "x": p.x.m_coords(),
        "y": p.y.m_coords(),
        "reproduce": classify_args(p),
    });
    if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
        m.extend(e);
    }
    v
}

fn corrupted_bracket(x: &SpElement, y: &SpElement) -> SpElement {
    let mut b = bracket(x, y);
    b.lambda = -b.lambda;
    b
}

pub fn cmd_oracle(config: &RunConfig) -> Result<Report> {
    let formula = if config.corrupt_bracket { corrupted_bracket } else { bracket };
    let r = oracle_suite_with(config.seed, config.samples, config.tolerance, formula);
    let mut report = Report::new(config);
    report.check(Check::new(
        "bracket_matches_matrix_commutator",
        r.max_bracket_error <= config.tolerance,
        r.max_bracket_error,
        config.tolerance,
        format!("{} random pairs, componentwise", r.pairs),
    ));
    report.check(Check::new(
        "inner_product_proportional_to_trace_form",
        r.ratio_spread < 1e-12 && r.pair_ratio_spread < 1e-9,
        r.ratio_spread,
        1e-12,
        format!("ratio {} on every factor", r.factor_ratios[0]),
    ));
    report.value("factor_ratios", r.factor_ratios);
    report.value("pair_ratio_spread", r.pair_ratio_spread);
    if let Some(w) = r.worst {
        report.witnesses.push(serde_json::to_value(w).expect("serializable"));
    }
    report.finish();
    Ok(report)
}

pub fn cmd_lemma1(config: &RunConfig) -> Result<Report> {
    let verdicts = verify_lemma1_with(config.seed, config.samples, &config.plan(), config.tolerance);
    let mut report = Report::new(config);
    for v in &verdicts {
        *report.counts.entry(v.classification.name().to_string()).or_insert(0) += 1;
        let fam = v.family.map_or("unclassified".to_string(), |f| f.to_string());
        *report.counts.entry(format!("family_{fam}")).or_insert(0) += 1;
    }
    let violations: Vec<_> = verdicts.iter().filter(|v| v.classification == Lemma1Class::Violation).collect();
    report.check(Check::new(
        "no_violations",
        violations.is_empty(),
        violations.len() as f64,
        0.0,
        format!("{} sampled Cartan subalgebras", verdicts.len()),
    ));
    let special: Vec<_> = verdicts.iter().filter(|v| v.special_orbit).collect();
    if let Some(s) = Summary::of(special.iter().map(|v| v.c3.abs())) {
        report.statistics.insert("special_abs_c3".into(), s);
    }
    if let Some(s) = Summary::of(special.iter().map(|v| v.c2.abs())) {
        report.statistics.insert("special_abs_c2".into(), s);
    }
    if let Some(s) = Summary::of(verdicts.iter().filter(|v| !v.special_orbit).map(|v| v.c2)) {
        report.statistics.insert("generic_c2".into(), s);
    }
    for v in violations.iter().take(MAX_WITNESSES) {
        report.witnesses.push(plane_witness(
            &v.plane,
            json!({"seed": config.seed, "sample": v.id, "c2": v.c2, "c3": v.c3, "special_orbit": v.special_orbit}),
        ));
    }

    // fixed checkpoints, independent of sampling
    let t0 = lemma1_verdict(0, &crate::cartan::reference_torus(), config.tolerance)?;
    report.value("reference_torus_c2", t0.c2);
    report.value("reference_torus_c3", t0.c3);
    report.check(Check::new(
        "reference_torus_cubic",
        t0.classification == Lemma1Class::DegenerateCubic && (t0.c3.abs() - 1.0).abs() <= 1e-8,
        t0.c3.abs(),
        1.0,
        "|c3| = 1 on the degenerate orbit",
    ));
    let z = crate::algebra::Vec3::zeros();
    let case_two = TangentPlane::new(
        SpElement::m(crate::algebra::Vec3::z(), z, crate::algebra::Vec3::x()),
        SpElement::m(z, crate::algebra::Vec3::z(), z),
    )?;
    let second = second_derivative_closed_form(&MetricDeformation::reference(), &case_two)?;
    report.value("case_two_second_derivative", second);
    report.check(Check::new(
        "case_two_checkpoint",
        (second - 3.5).abs() <= 1e-10,
        second,
        3.5,
        "C''(0) for X = (0,e3,0,e1), Y = (0,0,e3,0)",
    ));
    report.finish();
    Ok(report)
}

pub fn cmd_theorem1(config: &RunConfig) -> Result<Report> {
    let ts = config.effective_t_values();
    let r = verify_theorem1_at(config.seed, config.samples, &ts, &config.plan(), true)?;
    let mut report = Report::new(config);
    report.value("sigma", r.sigma);
    report.value("reference_c3", r.reference_c3);
    report.value("evaluated_t", &ts);
    for row in &r.rows {
        let m = &row.minimum;
        let (passed, detail) = match row.status {
            RowStatus::Positive => (true, "minimum curvature positive".to_string()),
            RowStatus::ZeroMinimum => (true, "normal metric, commuting planes are flat".to_string()),
            RowStatus::Failed => (false, format!("{} planes with k <= 0", m.negatives.max(1))),
        };
        report.check(Check::new(&format!("min_k_at_t={}", m.t), passed, m.min_k, 0.0, detail));
        if !passed {
            report.witnesses.push(plane_witness(
                &m.plane,
                json!({"seed": config.seed, "sample": m.argmin, "t": m.t, "k_value": m.min_k}),
            ));
        }
    }
    report.value("minima", &r.rows.iter().map(|r| &r.minimum).collect::<Vec<_>>());
    report.value("opposite_sign", &r.opposite);
    report.value("opposite_sign_negative", r.opposite_negative);
    report.finish();
    Ok(report)
}

pub fn cmd_wilking(config: &RunConfig) -> Result<Report> {
    let r = wilking_suite(config.seed, config.samples, config.tolerance)?;
    let mut report = Report::new(config);
    report.check(Check::new(
        "nonpositive_certificates",
        r.max_k <= config.tolerance,
        r.max_k,
        config.tolerance,
        format!("{} random admissible metrics", r.metrics),
    ));
    let checks_failed = r.rows.iter().filter(|x| !x.checks_passed).count();
    report.check(Check::new(
        "inequality_rechecks",
        checks_failed == 0,
        checks_failed as f64,
        0.0,
        "eigenvector, commuting partner, bounds, identity and three-term estimate",
    ));
    let identity = DeformedMetric::identity();
    let cert = wilking_pair(&identity)?;
    let id_checks = check_wilking_inequalities(&identity, &cert)?;
    report.check(Check::new(
        "identity_metric",
        cert.k_value.abs() <= config.tolerance && id_checks.passed(),
        cert.k_value,
        config.tolerance,
        "normal metric certificate is flat",
    ));
    for (name, n) in ["a_eigenvector", "block_dependent", "block_independent"].iter().zip(r.cases) {
        report.counts.insert((*name).to_string(), n);
    }
    let stat = |f: fn(&crate::experiments::WilkingSuiteRow) -> f64| Summary::of(r.rows.iter().map(f));
    for (k, s) in [
        ("k_value", stat(|x| x.k_value)),
        ("lambda", stat(|x| x.lambda)),
        ("b_over_c", stat(|x| x.b_over_c)),
    ] {
        if let Some(s) = s {
            report.statistics.insert(k.to_string(), s);
        }
    }
    if let Some((cert, checks)) = &r.first_failure {
        report.witnesses.push(json!({"seed": config.seed, "certificate": cert, "checks": checks}));
    }
    report.finish();
    Ok(report)
}

fn parse_element(name: &str, xs: &[f64]) -> Result<SpElement> {
    let x = match xs.len() {
        9 => SpElement::from_m_coords(xs.try_into().expect("length checked")),
        10 => SpElement::from_array(xs.try_into().expect("length checked")),
        n => return Err(Error::Config(format!("--{name} takes 9 or 10 reals, got {n}"))),
    };
    if !x.is_finite() {
        return Err(Error::Config(format!("--{name} has non-finite entries")));
    }
    x.check_in_m().map_err(|e| Error::Config(format!("--{name}: {e}")))?;
    Ok(x)
}

pub fn cmd_classify(config: &RunConfig, x: &[f64], y: &[f64]) -> Result<Report> {
    let plane = TangentPlane::new(parse_element("x", x)?, parse_element("y", y)?)
        .map_err(|e| Error::Config(format!("input vectors do not span a plane: {e}")))?;
    if !plane.is_commuting() {
        return Err(Error::Config(format!(
            "input pair does not commute (|[x, y]| = {:e}); only Cartan subalgebras can be classified",
            plane.commutator_norm()
        )));
    }
    let c = canonicalize(&plane)?;
    let (distance, angle) = special_orbit_distance(&plane)?;
    let verdict = lemma1_verdict(0, &plane, config.tolerance)?;
    let mut report = Report::new(config);
    report.value("family", c.family);
    report.value("parameters", c.parameters);
    report.value("witness", c.witness);
    report.value("special_orbit", distance < SUBSPACE_TOL);
    report.value("special_orbit_distance", distance);
    report.value("special_orbit_angle", angle);
    report.value("c2", verdict.c2);
    report.value("c3", verdict.c3);
    report.value("lemma1", verdict.classification);
    report.check(Check::new(
        "witness_reproduces_plane",
        c.residual < SUBSPACE_TOL,
        c.residual,
        SUBSPACE_TOL,
        format!("classified as {}", c.family),
    ));
    report.finish();
    Ok(report)
}

pub fn execute(cli: &Cli) -> Result<Report> {
    let config = RunConfig::from_cli(cli)?;
    let start = Instant::now();
    let mut report = match &cli.command {
        Command::Oracle { .. } => cmd_oracle(&config),
        Command::Lemma1 => cmd_lemma1(&config),
        Command::Theorem1 { .. } => cmd_theorem1(&config),
        Command::Wilking => cmd_wilking(&config),
        Command::Classify { x, y } => cmd_classify(&config, x, y),
    }?;
    report.timing.wall_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Parses arguments, runs, writes the report and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let report = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("sp2lab: {e}");
            return 2;
        }
    };
    let text = match report.render(cli.format) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("sp2lab: {e}");
            return 2;
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("sp2lab: cannot write report: {e}");
        return 2;
    }
    if report.passed {
        0
    } else {
        for c in report.checks.iter().filter(|c| !c.passed) {
            eprintln!("sp2lab: check {} failed: {:e} ({})", c.name, c.value, c.detail);
        }
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("sp2lab").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn defaults_per_command() {
        let c = RunConfig::from_cli(&cli(&["oracle"])).unwrap();
        assert_eq!((c.samples, c.tolerance), (10_000, 1e-12));
        let c = RunConfig::from_cli(&cli(&["wilking"])).unwrap();
        assert_eq!(c.samples, 1_000);
    }

    #[test]
    fn t_values_are_signed_by_sigma() {
        let c = RunConfig::from_cli(&cli(&["theorem1", "--t", "0.01,-0.001"])).unwrap();
        let (sigma, _) = working_sign();
        assert_eq!(c.effective_t_values(), vec![sigma * 0.01, sigma * 0.001]);
        let c = RunConfig::from_cli(&cli(&["theorem1", "--literal-t", "--t", "0.01"])).unwrap();
        assert_eq!(c.effective_t_values(), vec![0.01]);
    }

    #[test]
    fn invalid_configs() {
        assert!(RunConfig::from_cli(&cli(&["lemma1", "--samples", "0"])).is_err());
        // the reference deformation is not a metric at t = 1
        assert!(RunConfig::from_cli(&cli(&["theorem1", "--literal-t", "--t", "1"])).is_err());
        assert!(Cli::try_parse_from(["sp2lab", "lemma1", "--family", "F7"]).is_err());
    }

    #[test]
    fn classify_arguments_round_trip() {
        let p = crate::cartan::sample_cartan(4, Some(Family::F3)).plane;
        let args = classify_args(&p);
        let parts: Vec<&str> = args.split(' ').collect();
        let parsed = cli(&parts);
        match parsed.command {
            Command::Classify { x, y } => {
                assert_eq!(x, p.x.m_coords().to_vec());
                assert_eq!(y, p.y.m_coords().to_vec());
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn renders_all_formats() {
        let config = RunConfig::from_cli(&cli(&["oracle", "--samples", "10"])).unwrap();
        let r = cmd_oracle(&config).unwrap();
        assert!(r.passed);
        let json = r.render(Format::Json).unwrap();
        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        assert!(r.render(Format::Csv).unwrap().starts_with("check,passed"));
        assert!(r.render(Format::Text).unwrap().contains("PASS"));
    }
}
