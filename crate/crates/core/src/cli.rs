//! Command-line driver.
//!
//! Exit codes: 0 every check passed, 1 a check failed, 2 invalid input,
//! 3 numerical non-convergence.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadforms::QuadratureSpec;
use crate::specialfn::{alpha_const, b_const, hardy_const, li_const, ExponentTriple};
use crate::testfuncs::RadialProfile;
use crate::transforms::fourier_power_pairing;
use crate::verify::{
    check_a2_identity, check_fractional_consistency, check_hardy_gsr, check_li_identity, default_triples,
    kernel_positivity, log_grid, monotonicity_scan, positivity_scan, random_profiles, sharpness_probe,
    VerificationReport, DEFAULT_SEED,
};

/// Environment variable that fixes the number of worker threads.
pub const WORKERS_ENV: &str = "FRACJORDAN_WORKERS";

pub const CSV_COLUMNS: [&str; 15] = [
    "check_name",
    "a",
    "b",
    "n",
    "profile",
    "lhs",
    "lhs_error",
    "rhs",
    "rhs_error",
    "abs_discrepancy",
    "rel_discrepancy",
    "tolerance",
    "abs_tolerance",
    "passed",
    "runtime_ms",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckName {
    Fractional,
    HardyGsr,
    LiIdentity,
    A2Identity,
    KernelPositivity,
    PowerPairing,
}

#[derive(Debug, Parser)]
#[command(name = "fracjordan", version, about = "Two-route checks of Hardy-type inequalities for Jordan products")]
pub struct Cli {
    /// JSON file whose entries override the corresponding flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args, Default)]
pub struct Common {
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub n: Option<u32>,
    /// `gaussian`, `r2`, `cutoff`, a JSON profile, or `@file.json`.
    #[arg(long)]
    pub profile: Option<String>,
    /// Comma-separated cutoff scales.
    #[arg(long = "R", value_delimiter = ',')]
    pub r: Option<Vec<f64>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub ppu: Option<u32>,
    #[arg(long)]
    pub gl_order: Option<usize>,
    /// Replaces the relative tolerance of agreement checks and disables
    /// their absolute fallback.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Number of random profiles in a positivity scan.
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the constants for an exponent triple.
    Constants(Common),
    /// Run one named check.
    Check {
        #[arg(value_enum)]
        name: CheckName,
        #[command(flatten)]
        common: Common,
    },
    /// Positivity of the Jordan form over a random profile family.
    Scan(Common),
    /// Rayleigh quotients of ground-state cutoffs.
    Sharpness(Common),
    /// The full default suite.
    ReportAll(Common),
}

/// Settings read from `--config`; any field present replaces the flag.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub n: Option<u32>,
    pub profile: Option<serde_json::Value>,
    #[serde(rename = "R")]
    pub r: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub quadrature: Option<QuadratureSpec>,
    pub tolerance: Option<f64>,
    pub count: Option<usize>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone)]
struct Settings {
    a: Option<f64>,
    b: Option<f64>,
    n: Option<u32>,
    profile: Option<String>,
    r: Option<Vec<f64>>,
    out: Option<PathBuf>,
    format: Format,
    spec: QuadratureSpec,
    tolerance: Option<f64>,
    count: usize,
    seed: u64,
}

impl Settings {
    fn resolve(common: &Common, config: Option<RunConfig>) -> Result<Self> {
        let cfg = config.unwrap_or_default();
        let mut spec = cfg.quadrature.clone().unwrap_or_default();
        if cfg.quadrature.is_none() {
            if let Some(p) = common.ppu {
                spec.panels_per_unit = p;
            }
            if let Some(g) = common.gl_order {
                spec.gl_order = g;
            }
        }
        spec.validate()?;
        let profile = match cfg.profile {
            Some(serde_json::Value::String(s)) => Some(s),
            Some(v) => Some(v.to_string()),
            None => common.profile.clone(),
        };
        let tolerance = cfg.tolerance.or(common.tolerance);
        if let Some(t) = tolerance {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::Invalid(format!("tolerance must be non-negative, got {t}")));
            }
        }
        Ok(Self {
            a: cfg.a.or(common.a),
            b: cfg.b.or(common.b),
            n: cfg.n.or(common.n),
            profile,
            r: cfg.r.or_else(|| common.r.clone()),
            out: cfg.out.or_else(|| common.out.clone()),
            format: cfg.format.or(common.format).unwrap_or(Format::Json),
            spec,
            tolerance,
            count: cfg.count.or(common.count).unwrap_or(10),
            seed: cfg.seed.or(common.seed).unwrap_or(DEFAULT_SEED),
        })
    }

    fn need_a(&self) -> Result<f64> {
        self.a.ok_or_else(|| Error::Invalid("--a is required".into()))
    }

    fn need_b(&self) -> Result<f64> {
        self.b.ok_or_else(|| Error::Invalid("--b is required".into()))
    }

    fn need_n(&self) -> Result<u32> {
        match self.n {
            Some(n) if n >= 1 => Ok(n),
            Some(n) => Err(Error::Invalid(format!("--n must be at least 1, got {n}"))),
            None => Err(Error::Invalid("--n is required".into())),
        }
    }

    fn triple(&self) -> Result<ExponentTriple> {
        ExponentTriple::new(self.need_a()?, self.need_b()?, self.need_n()?)
    }

    fn profile_or(&self, default: RadialProfile, cutoff_gamma: Option<f64>) -> Result<RadialProfile> {
        let Some(desc) = &self.profile else { return Ok(default) };
        let p = parse_profile(desc, cutoff_gamma, self.r.as_ref().and_then(|r| r.first().copied()))?;
        p.validate()?;
        Ok(p)
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

/// Parses a profile descriptor.
pub fn parse_profile(desc: &str, cutoff_gamma: Option<f64>, cutoff_scale: Option<f64>) -> Result<RadialProfile> {
    match desc.trim() {
        "gaussian" => Ok(RadialProfile::gaussian()),
        "r2" => RadialProfile::gaussian_poly(vec![0.0, 0.0, 1.0]),
        "cutoff" => {
            let g = cutoff_gamma
                .ok_or_else(|| Error::Invalid("profile `cutoff` needs --a, --b and --n".into()))?;
            RadialProfile::power_cutoff(g, cutoff_scale.unwrap_or(100.0))
        }
        s if s.starts_with('@') => parse_profile(&read_file(Path::new(&s[1..]))?, cutoff_gamma, cutoff_scale),
        s => serde_json::from_str(s).map_err(|e| Error::Invalid(format!("profile `{s}`: {e}"))),
    }
}

fn apply_tolerance(report: &mut VerificationReport, tolerance: Option<f64>) {
    if let Some(t) = tolerance {
        if report.relation == crate::verify::Relation::Agree {
            report.tolerance = t;
            report.abs_tolerance = 0.0;
            report.passed = report.verdict();
        }
    }
}

fn write_output(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::Invalid(format!("{}: {e}", parent.display())))?;
        }
    }
    std::fs::write(path, text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialise") + "\n"
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v}")).unwrap_or_default()
}

/// One CSV row per report, columns [`CSV_COLUMNS`].
pub fn reports_csv(reports: &[VerificationReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS).expect("in-memory write");
    for r in reports {
        let profile = r.params.profile.as_ref().map(RadialProfile::describe).unwrap_or_default();
        w.write_record([
            r.check_name.clone(),
            opt(r.params.a),
            opt(r.params.b),
            r.params.n.to_string(),
            profile,
            format!("{:e}", r.lhs.value),
            format!("{:e}", r.lhs.error),
            format!("{:e}", r.rhs.value),
            format!("{:e}", r.rhs.error),
            format!("{:e}", r.abs_discrepancy),
            format!("{:e}", r.rel_discrepancy),
            format!("{:e}", r.tolerance),
            format!("{:e}", r.abs_tolerance),
            r.passed.to_string(),
            r.runtime_ms.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub schema: u32,
    pub command: String,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skipped_reasons: Vec<String>,
}

/// Result of a batch job: a report, or a reason it did not apply.
enum Outcome {
    Reports(Vec<VerificationReport>),
    Skipped(String),
}

fn job(name: &str, r: Result<VerificationReport>) -> Outcome {
    batch(name, r.map(|r| vec![r]))
}

fn batch(name: &str, r: Result<Vec<VerificationReport>>) -> Outcome {
    match r {
        Ok(v) => Outcome::Reports(v),
        Err(e @ (Error::Domain(_) | Error::UnsupportedFamily(_))) => Outcome::Skipped(format!("{name}: {e}")),
        Err(e) => {
            let params = crate::verify::ReportParams { a: None, b: None, n: 0, profile: None, spec: None };
            Outcome::Reports(vec![VerificationReport::errored(name, params, &e, Instant::now())])
        }
    }
}

fn emit_batch(command: &str, outcomes: Vec<Outcome>, settings: &Settings, out: &mut dyn Write) -> Result<i32> {
    let mut reports = Vec::new();
    let mut skipped = Vec::new();
    for o in outcomes {
        match o {
            Outcome::Reports(mut v) => {
                for r in &mut v {
                    apply_tolerance(r, settings.tolerance);
                }
                reports.extend(v);
            }
            Outcome::Skipped(s) => skipped.push(s),
        }
    }
    let passed = reports.iter().filter(|r| r.passed).count();
    let summary = Summary {
        schema: crate::verify::SCHEMA_VERSION,
        command: command.into(),
        passed,
        failed: reports.len() - passed,
        skipped: skipped.len(),
        skipped_reasons: skipped,
    };
    let csv = reports_csv(&reports);
    if let Some(dir) = &settings.out {
        std::fs::create_dir_all(dir).map_err(|e| Error::Invalid(format!("{}: {e}", dir.display())))?;
        write_output(&dir.join("reports.csv"), &csv)?;
        write_output(&dir.join("reports.json"), &to_json(&reports))?;
        write_output(&dir.join("summary.json"), &to_json(&summary))?;
    }
    let text = match settings.format {
        Format::Csv => csv,
        Format::Json => to_json(&serde_json::json!({ "summary": summary, "reports": reports })),
    };
    out.write_all(text.as_bytes()).map_err(|e| Error::Invalid(e.to_string()))?;
    if settings.format == Format::Csv {
        out.write_all(to_json(&summary).as_bytes()).map_err(|e| Error::Invalid(e.to_string()))?;
    }
    Ok(if summary.failed == 0 { 0 } else { 1 })
}

fn cmd_constants(s: &Settings, out: &mut dyn Write) -> Result<i32> {
    let a = s.need_a()?;
    let b = s.b.unwrap_or(0.0);
    let n = s.need_n()?;
    let triple = ExponentTriple::boundary(a, b, n)?;
    if !(a > 0.0) {
        return Err(Error::Domain(format!("constants need a > 0, got a = {a}")));
    }
    let nf = n as f64;
    let mut entries: Vec<(String, Option<f64>)> = Vec::new();
    for (label, alpha) in [("a", a), ("b", b), ("n-a", nf - a), ("n-b", nf - b)] {
        entries.push((format!("B[{label}={alpha}]"), b_const(alpha, n).ok()));
    }
    entries.push(("alpha_{a,n}".into(), alpha_const(a, n).ok()));
    entries.push(("C_{a,n}".into(), hardy_const(a, n).ok()));
    entries.push(("L_{a,b,n}".into(), li_const(a, b, n).ok()));
    let mut table = String::new();
    for (k, v) in &entries {
        let shown = v.map(|x| format!("{x:.17e}")).unwrap_or_else(|| "undefined".into());
        table.push_str(&format!("{k:<16} {shown}\n"));
    }
    table.push_str(&format!("{:<16} {}\n", "theorem1_ok", triple.theorem1_ok()));
    table.push_str(&format!("{:<16} {}\n", "theorem2_ok", triple.theorem2_ok()));
    let json = serde_json::json!({
        "schema": crate::verify::SCHEMA_VERSION,
        "a": a, "b": b, "n": n,
        "constants": entries.iter().map(|(k, v)| (k.clone(), serde_json::json!(v))).collect::<serde_json::Map<_, _>>(),
        "theorem1_ok": triple.theorem1_ok(),
        "theorem2_ok": triple.theorem2_ok(),
    });
    let json = to_json(&json);
    let write = |out: &mut dyn Write, t: &str| out.write_all(t.as_bytes()).map_err(|e| Error::Invalid(e.to_string()));
    match s.format {
        Format::Json => {
            write(out, &table)?;
            match &s.out {
                Some(p) => write_output(p, &json)?,
                None => write(out, &json)?,
            }
        }
        Format::Csv => {
            let mut csv = String::from("name,value\n");
            for (k, v) in &entries {
                csv.push_str(&format!("{k},{}\n", opt(*v)));
            }
            match &s.out {
                Some(p) => write_output(p, &csv)?,
                None => write(out, &csv)?,
            }
        }
    }
    Ok(0)
}

fn cmd_check(name: CheckName, s: &Settings, out: &mut dyn Write) -> Result<i32> {
    let gaussian = RadialProfile::gaussian();
    let mut report = match name {
        CheckName::Fractional => check_fractional_consistency(&s.profile_or(gaussian, None)?, s.need_a()?, s.need_n()?, &s.spec)?,
        CheckName::HardyGsr => {
            let (a, n) = (s.need_a()?, s.need_n()?);
            check_hardy_gsr(&s.profile_or(gaussian, Some(0.5 * (n as f64 - a)))?, a, n, &s.spec)?
        }
        CheckName::LiIdentity => {
            let t = s.triple()?;
            check_li_identity(&s.profile_or(gaussian, Some(t.ground_state_exponent()))?, &t, &s.spec)?
        }
        CheckName::A2Identity => {
            if let Some(a) = s.a {
                if a != 2.0 {
                    return Err(Error::Domain(format!("a2-identity has a = 2, got --a {a}")));
                }
            }
            check_a2_identity(&s.profile_or(gaussian, None)?, s.need_b()?, s.need_n()?, &s.spec)?
        }
        CheckName::KernelPositivity => {
            kernel_positivity(s.need_a()?, s.need_b()?, s.need_n()?, &log_grid(1e-3, 1e3, 1000))?
        }
        CheckName::PowerPairing => fourier_power_pairing(s.need_a()?, s.need_n()?)?,
    };
    apply_tolerance(&mut report, s.tolerance);
    let text = match s.format {
        Format::Json => to_json(&report),
        Format::Csv => reports_csv(std::slice::from_ref(&report)),
    };
    match &s.out {
        Some(p) => {
            write_output(p, &text)?;
            let line = format!("{} {}\n", report.check_name, if report.passed { "passed" } else { "FAILED" });
            out.write_all(line.as_bytes()).map_err(|e| Error::Invalid(e.to_string()))?;
        }
        None => out.write_all(text.as_bytes()).map_err(|e| Error::Invalid(e.to_string()))?,
    }
    Ok(if report.passed { 0 } else { 1 })
}

fn cmd_scan(s: &Settings, out: &mut dyn Write) -> Result<i32> {
    let t = s.triple()?;
    if !t.theorem1_ok() {
        return Err(Error::Domain(format!("scan needs n >= a + b and min(a, b) <= 2, got ({}, {}, {})", t.a, t.b, t.n)));
    }
    let family = match &s.profile {
        Some(_) => vec![s.profile_or(RadialProfile::gaussian(), Some(t.ground_state_exponent()))?],
        None => random_profiles(s.count, s.seed),
    };
    let reports = positivity_scan(&family, &t, &s.spec);
    emit_batch("scan", vec![Outcome::Reports(reports)], s, out)
}

fn cmd_sharpness(s: &Settings, out: &mut dyn Write) -> Result<i32> {
    let t = s.triple()?;
    let rs = s.r.clone().unwrap_or_else(|| vec![10.0, 100.0, 1000.0]);
    let reports = sharpness_probe(&t, &rs, &s.spec)?;
    emit_batch("sharpness", vec![Outcome::Reports(reports)], s, out)
}

/// Every check of the default suite, in a fixed order.
fn report_all_jobs(s: &Settings) -> Vec<Outcome> {
    let spec = &s.spec;
    let gaussian = RadialProfile::gaussian();
    let r2 = RadialProfile::gaussian_poly(vec![0.0, 0.0, 1.0]).expect("valid profile");
    let mut jobs = Vec::new();

    for n in 3..=5u32 {
        for a in [0.5, 1.0, 1.5, 2.0] {
            let top = n as f64 - a;
            let grid: Vec<f64> = (0..).map(|k| 0.5 * k as f64).take_while(|b| *b <= top + 1e-12).collect();
            jobs.push(job("monotonicity", monotonicity_scan(a, n, &grid)));
        }
    }
    for n in 2..=5u32 {
        for alpha in [0.5, 1.0, 1.5, 2.0, 2.5] {
            if alpha < n as f64 {
                jobs.push(job("power-pairing", fourier_power_pairing(alpha, n)));
            }
        }
    }
    for n in 1..=3u32 {
        for a in [0.5, 1.0, 1.5] {
            jobs.push(job("fractional", check_fractional_consistency(&gaussian, a, n, spec)));
        }
    }
    jobs.push(job("fractional", check_fractional_consistency(&r2, 1.5, 2, spec)));
    for n in 1..=3u32 {
        for a in [0.5, 1.0, 1.5] {
            if a < n as f64 {
                jobs.push(job("hardy-gsr", check_hardy_gsr(&gaussian, a, n, spec)));
            }
        }
    }
    if let Ok(p) = RadialProfile::power_cutoff(1.0, 100.0) {
        jobs.push(job("hardy-gsr", check_hardy_gsr(&p, 1.0, 3, spec)));
    }
    for (a, b, n) in [(1.0, 1.0, 3u32), (0.5, 1.5, 4), (1.0, 0.5, 2), (1.5, 1.0, 3), (1.0, 2.0, 3)] {
        for p in [&gaussian, &r2] {
            let r = ExponentTriple::new(a, b, n).and_then(|t| check_li_identity(p, &t, spec));
            jobs.push(job("li-identity", r));
        }
    }
    for (b, n) in [(1.0, 3u32), (1.0, 5), (2.0, 5), (3.0, 5)] {
        jobs.push(job("a2-identity", check_a2_identity(&gaussian, b, n, spec)));
    }
    let grid = log_grid(1e-3, 1e3, 1000);
    for t in default_triples() {
        jobs.push(job("kernel-positivity", kernel_positivity(t.a, t.b, t.n, &grid)));
    }
    let family = random_profiles(s.count, s.seed);
    for t in default_triples() {
        jobs.push(Outcome::Reports(positivity_scan(&family, &t, spec)));
    }
    let t = ExponentTriple { a: 1.0, b: 1.0, n: 3 };
    jobs.push(batch("sharpness", sharpness_probe(&t, &[10.0, 100.0, 1000.0], spec)));
    jobs
}

fn cmd_report_all(s: &Settings, out: &mut dyn Write) -> Result<i32> {
    emit_batch("report-all", report_all_jobs(s), s, out)
}

fn load_config(path: &Path) -> Result<RunConfig> {
    serde_json::from_str(&read_file(path)?).map_err(|e| Error::Invalid(format!("config {}: {e}", path.display())))
}

fn configure_workers(config: Option<&RunConfig>) -> Result<()> {
    let from_env = match std::env::var(WORKERS_ENV) {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|_| Error::Invalid(format!("{WORKERS_ENV} must be a positive integer, got `{v}`")))?,
        ),
        Err(_) => None,
    };
    if let Some(w) = config.and_then(|c| c.workers).or(from_env) {
        if w == 0 {
            return Err(Error::Invalid("worker count must be positive".into()));
        }
        // a second initialisation in the same process is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    Ok(())
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    let config = cli.config.as_deref().map(load_config).transpose()?;
    configure_workers(config.as_ref())?;
    match &cli.command {
        Command::Constants(c) => cmd_constants(&Settings::resolve(c, config)?, out),
        Command::Check { name, common } => cmd_check(*name, &Settings::resolve(common, config)?, out),
        Command::Scan(c) => cmd_scan(&Settings::resolve(c, config)?, out),
        Command::Sharpness(c) => cmd_sharpness(&Settings::resolve(c, config)?, out),
        Command::ReportAll(c) => cmd_report_all(&Settings::resolve(c, config)?, out),
    }
}

/// Runs the CLI on `args`, writing results to `out`; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
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
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
