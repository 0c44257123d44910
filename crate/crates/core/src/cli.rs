//! Batch experiment driver behind the `beurling` binary.
//!
//! Every command writes CSV tables plus a JSON sidecar carrying the full run
//! configuration and its SHA-256 digest. Outputs contain no timestamps, so
//! reruns with the same configuration and seed are byte-identical.
//!
//! Exit codes: 0 success, 1 check failure, 2 validation error, 3 resource error.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::analytic::{self, PrimePowers, ProbeParams, DEFAULT_X_CAP};
use crate::counting::{self, ClassCountQuery, Mode};
use crate::error::{BeurlingError, Result};
use crate::measures;
use crate::prime_systems::{classical_primes, PrimeSystem};
use crate::rational::{self, int, Rational};
use crate::semigroup::{self, EnumerateOptions, SemigroupTable, DEFAULT_MEM_CAP};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "beurling",
    version,
    about = "Beurling generalized number system experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Enumerate,
    Scan,
    Verify,
    Probe,
    Zeta,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate the generalized integers up to --x-max.
    Enumerate(RunArgs),
    /// Tabulate K*S_{K,c}(x)/(a*x) over --grid.
    Scan(RunArgs),
    /// Run the identity checks and inequality fuzzers.
    Verify(RunArgs),
    /// Halász-type probe over --sigmas x --t-grid.
    Probe(RunArgs),
    /// Truncated zeta values over --sigmas x --t-grid.
    Zeta(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Total,
    Distinct,
    Both,
}

impl ModeArg {
    fn modes(self) -> Vec<Mode> {
        match self {
            ModeArg::Total => vec![Mode::Total],
            ModeArg::Distinct => vec![Mode::Distinct],
            ModeArg::Both => vec![Mode::Total, Mode::Distinct],
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RunArgs {
    /// System spec JSON; defaults to the classical primes up to the largest cutoff used.
    #[arg(long)]
    pub system: Option<PathBuf>,
    #[arg(long = "x-max")]
    pub x_max: Option<String>,
    #[arg(long = "K")]
    pub k: Option<u32>,
    #[arg(long)]
    pub c: Option<u32>,
    #[arg(long)]
    pub q: Option<u32>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Comma-separated x values.
    #[arg(long)]
    pub grid: Option<String>,
    /// Comma-separated sigma values.
    #[arg(long)]
    pub sigmas: Option<String>,
    /// Comma-separated t values.
    #[arg(long = "t-grid")]
    pub t_grid: Option<String>,
    #[arg(long = "x-cap")]
    pub x_cap: Option<String>,
    /// Output directory; not part of the recorded configuration.
    #[arg(long, default_value = "out")]
    #[serde(skip)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "mem-cap")]
    pub mem_cap: Option<u64>,
}

/// The configuration a run was made with; its digest tags every output.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: CommandKind,
    #[serde(flatten)]
    pub args: RunArgs,
}

impl RunConfig {
    pub fn digest(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

/// Outcome of a command that completed without a hard error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    ChecksFailed,
}

pub fn exit_code(err: &BeurlingError) -> i32 {
    match err {
        BeurlingError::Resource { .. } | BeurlingError::Overflow(_) => EXIT_RESOURCE,
        _ => EXIT_VALIDATION,
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_VALIDATION
            } else {
                EXIT_OK
            };
        }
    };
    match run(cli.command) {
        Ok(Outcome::Ok) => EXIT_OK,
        Ok(Outcome::ChecksFailed) => {
            eprintln!("beurling: one or more checks failed");
            EXIT_CHECK_FAILED
        }
        Err(e) => {
            eprintln!("beurling: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(command: Command) -> Result<Outcome> {
    let (kind, args) = match command {
        Command::Enumerate(a) => (CommandKind::Enumerate, a),
        Command::Scan(a) => (CommandKind::Scan, a),
        Command::Verify(a) => (CommandKind::Verify, a),
        Command::Probe(a) => (CommandKind::Probe, a),
        Command::Zeta(a) => (CommandKind::Zeta, a),
    };
    let config = RunConfig {
        command: kind,
        args,
    };
    match kind {
        CommandKind::Enumerate => cmd_enumerate(&config),
        CommandKind::Scan => cmd_scan(&config),
        CommandKind::Verify => cmd_verify(&config),
        CommandKind::Probe => cmd_probe(&config),
        CommandKind::Zeta => cmd_zeta(&config),
    }
}

fn parse_list<T>(s: &str, what: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    let items: Vec<T> = s
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| parse(p.trim()))
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(BeurlingError::invalid(format!("--{what} is empty")));
    }
    Ok(items)
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| BeurlingError::invalid(format!("not a finite number: {s:?}")))
}

fn required<'a, T>(v: &'a Option<T>, flag: &str) -> Result<&'a T> {
    v.as_ref()
        .ok_or_else(|| BeurlingError::invalid(format!("--{flag} is required for this command")))
}

fn load_system(args: &RunArgs, default_limit: &Rational) -> Result<PrimeSystem> {
    match &args.system {
        Some(path) => PrimeSystem::load(path),
        None => classical_primes(default_limit),
    }
}

fn enumerate_table(
    args: &RunArgs,
    system: &PrimeSystem,
    x_max: &Rational,
) -> Result<SemigroupTable> {
    let opts = EnumerateOptions {
        mem_cap: args.mem_cap.unwrap_or(DEFAULT_MEM_CAP),
    };
    semigroup::enumerate_with(system, x_max, opts)
}

fn create(out: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(out)?;
    Ok(BufWriter::new(File::create(out.join(name))?))
}

fn write_json(out: &Path, name: &str, value: &serde_json::Value) -> Result<()> {
    let mut w = create(out, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn sidecar(config: &RunConfig, body: serde_json::Value) -> serde_json::Value {
    serde_json::json!({
        "config_digest": config.digest(),
        "config": config,
        "result": body,
    })
}

pub fn cmd_enumerate(config: &RunConfig) -> Result<Outcome> {
    let args = &config.args;
    let x_max = rational::parse(required(&args.x_max, "x-max")?)?;
    let system = load_system(args, &x_max)?;
    let table = enumerate_table(args, &system, &x_max)?;
    eprintln!("enumerate: {} elements up to {}", table.len(), x_max);

    let mut w = create(&args.out, "table.csv")?;
    table.write_csv(&mut w)?;
    w.flush()?;

    let samples: Vec<Rational> = counting::chebyshev_samples(&system)
        .into_iter()
        .filter(|x| *x <= x_max)
        .collect();
    let summary = serde_json::json!({
        "system": system.spec_json(),
        "x_max": rational::to_f64(&x_max),
        "N": table.len(),
        "density_estimate": counting::density_estimate(&table),
        "chebyshev_ratio": counting::chebyshev_ratio(&system, &samples)?,
        "log_density": counting::log_density(&table, &x_max)?,
    });
    write_json(&args.out, "summary.json", &sidecar(config, summary))?;
    Ok(Outcome::Ok)
}

pub fn cmd_scan(config: &RunConfig) -> Result<Outcome> {
    let args = &config.args;
    let k = *required(&args.k, "K")?;
    let modes = args.mode.unwrap_or(ModeArg::Total).modes();
    let residues: Vec<u32> = match args.c {
        Some(c) => vec![c],
        None => (0..k).collect(),
    };
    // validate every query before any work
    let queries: Vec<ClassCountQuery> = modes
        .iter()
        .flat_map(|&m| residues.iter().map(move |&c| (c, m)))
        .map(|(c, m)| ClassCountQuery::new(k, c, m))
        .collect::<Result<_>>()?;
    let mut grid = parse_list(required(&args.grid, "grid")?, "grid", rational::parse)?;
    grid.sort();
    grid.dedup();
    let x_max = match &args.x_max {
        Some(x) => rational::parse(x)?,
        None => *grid.last().expect("grid is nonempty"),
    };
    let system = load_system(args, &x_max)?;
    let table = enumerate_table(args, &system, &x_max)?;
    eprintln!("scan: {} elements, {} queries", table.len(), queries.len());

    for q in &queries {
        let scan = counting::convergence_scan(&table, q, &grid)?;
        let stem = format!("scan_{}_c{}", q.mode().as_str(), q.residue());
        let mut w = create(&args.out, &format!("{stem}.csv"))?;
        scan.write_csv(&mut w)?;
        w.flush()?;
        let body = serde_json::json!({
            "quantity": scan.quantity,
            "metadata": scan.metadata,
            "points": scan.grid.len(),
        });
        write_json(&args.out, &format!("{stem}.json"), &sidecar(config, body))?;
    }
    Ok(Outcome::Ok)
}

/// One verification check in the report.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    /// `max_discrepancy` (passes when `observed <= tolerance`) or
    /// `min_value` (passes when `observed >= -tolerance`).
    pub kind: &'static str,
    pub tolerance: f64,
    pub observed: f64,
    pub cases: usize,
    pub passed: bool,
}

impl CheckResult {
    fn max_discrepancy(
        name: impl Into<String>,
        tolerance: f64,
        observed: f64,
        cases: usize,
    ) -> Self {
        CheckResult {
            name: name.into(),
            kind: "max_discrepancy",
            tolerance,
            observed,
            cases,
            passed: observed <= tolerance,
        }
    }

    fn min_value(name: impl Into<String>, tolerance: f64, observed: f64, cases: usize) -> Self {
        CheckResult {
            name: name.into(),
            kind: "min_value",
            tolerance,
            observed,
            cases,
            passed: observed >= -tolerance,
        }
    }
}

pub const FUZZ_SAMPLES: usize = 100_000;

/// Runs every identity and fuzz check on `system` up to `x_max`.
pub fn verification_checks(
    system: &PrimeSystem,
    x_max: &Rational,
    moduli: &[u32],
    seed: u64,
    mem_cap: u64,
) -> Result<Vec<CheckResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table = semigroup::enumerate_with(system, x_max, EnumerateOptions { mem_cap })?;
    let mut checks = Vec::new();

    // sample points: random table values plus the cutoff itself
    let mut points: Vec<Rational> = (0..50)
        .map(|_| table.elements()[rng.gen_range(0..table.len())].value)
        .collect();
    points.push(*x_max);
    for mode in [Mode::Total, Mode::Distinct] {
        let mut partition_err = 0.0f64;
        let mut ortho_err = 0.0f64;
        let mut cases = 0;
        for k in 2..=12u32 {
            for x in &points {
                let n = table.n_count(x)?;
                let mut sum = 0u64;
                for c in 0..k {
                    let q = ClassCountQuery::new(k, c, mode)?;
                    let s = counting::s_count(&table, &q, x)?;
                    sum += s;
                    let r = counting::orthogonality_reconstruct(&table, &q, x)?;
                    ortho_err =
                        ortho_err.max((r - Complex64::new(s as f64, 0.0)).norm() / n as f64);
                }
                partition_err = partition_err.max((sum as f64 - n as f64).abs());
                cases += 1;
            }
        }
        checks.push(CheckResult::max_discrepancy(
            format!("partition_identity_{}", mode.as_str()),
            0.0,
            partition_err,
            cases,
        ));
        checks.push(CheckResult::max_discrepancy(
            format!("orthogonality_identity_{}", mode.as_str()),
            1e-9,
            ortho_err,
            cases,
        ));
    }

    for mode in [Mode::Total, Mode::Distinct] {
        let mut worst = 0.0f64;
        let mut cases = 0;
        for &k in moduli {
            for q in 0..k {
                let r = measures::verify_fq_reconstruction(system, q, k, mode, x_max)?;
                worst = worst.max(r.max_discrepancy);
                cases += 1;
            }
        }
        checks.push(CheckResult::max_discrepancy(
            format!("exp_star_reconstruction_{}", mode.as_str()),
            measures::RECONSTRUCTION_TOLERANCE,
            worst,
            cases,
        ));
    }
    let mut worst = 0.0f64;
    let mut cases = 0;
    for &k in moduli {
        for q in 0..k {
            worst = worst
                .max(measures::verify_split_reconstruction(system, q, k, x_max)?.max_discrepancy);
            cases += 1;
        }
    }
    checks.push(CheckResult::max_discrepancy(
        "split_reconstruction_distinct",
        measures::RECONSTRUCTION_TOLERANCE,
        worst,
        cases,
    ));

    let probe_primes = [rational::rat(3, 2), int(2), int(3), int(5), int(97)];
    let mut decomposition = 0.0f64;
    let mut envelope_excess = f64::NEG_INFINITY;
    let mut cases = 0;
    for k in 2..=12u32 {
        for q in 0..k {
            let (g1, g2, g3) = (
                measures::weight_g1(q, k)?,
                measures::weight_g2(q, k)?,
                measures::weight_g3(q, k)?,
            );
            let distinct = measures::weight_distinct(q, k)?;
            for p in &probe_primes {
                for power in 1..=40u32 {
                    let d = distinct.eval(p, power);
                    let sum = g1.eval(p, power) + g2.eval(p, power) + g3.eval(p, power);
                    decomposition = decomposition.max((sum - d).norm() / d.norm().max(1.0));
                    envelope_excess = envelope_excess
                        .max(g2.eval(p, power).norm() - g2.envelope(p, power) * (1.0 + 1e-12));
                    cases += 1;
                }
            }
        }
    }
    checks.push(CheckResult::max_discrepancy(
        "g_decomposition",
        1e-12,
        decomposition,
        cases,
    ));
    checks.push(CheckResult::max_discrepancy(
        "g2_envelope",
        0.0,
        envelope_excess.max(0.0),
        cases,
    ));

    let mut min_trig = f64::INFINITY;
    for _ in 0..FUZZ_SAMPLES {
        let x = rng.gen_range(-std::f64::consts::PI..=std::f64::consts::PI);
        let k = rng.gen_range(2..=10u32);
        min_trig = min_trig.min(analytic::trig_lhs(x, k, (k * k) as f64));
    }
    checks.push(CheckResult::min_value(
        "trig_inequality",
        1e-12,
        min_trig,
        FUZZ_SAMPLES,
    ));

    let pp = PrimePowers::new(system, x_max)?;
    let mut min_atom = f64::INFINITY;
    if !pp.atoms().is_empty() {
        for _ in 0..FUZZ_SAMPLES {
            let atom = &pp.atoms()[rng.gen_range(0..pp.atoms().len())];
            let k = rng.gen_range(2..=10u32);
            let q = rng.gen_range(0..k);
            let t = rng.gen_range(-50.0..50.0);
            let sigma = rng.gen_range(1.0001..3.0);
            let w = (-sigma * atom.ln_position).exp()
                * analytic::atom_trig_weight(atom.ln_position, t, q, k, (k * k) as f64)
                / atom.power as f64;
            min_atom = min_atom.min(w);
        }
    } else {
        min_atom = 0.0;
    }
    checks.push(CheckResult::min_value(
        "atom_inequality",
        1e-12,
        min_atom,
        FUZZ_SAMPLES,
    ));
    Ok(checks)
}

pub fn cmd_verify(config: &RunConfig) -> Result<Outcome> {
    let args = &config.args;
    let seed = *required(&args.seed, "seed")?;
    let x_max = match &args.x_max {
        Some(x) => rational::parse(x)?,
        None => int(1000),
    };
    let moduli: Vec<u32> = match args.k {
        Some(k) if k < 2 => return Err(BeurlingError::invalid(format!("K = {k} must be >= 2"))),
        Some(k) => vec![k],
        None => vec![2, 3, 4],
    };
    let system = load_system(args, &x_max)?;
    let checks = verification_checks(
        &system,
        &x_max,
        &moduli,
        seed,
        args.mem_cap.unwrap_or(DEFAULT_MEM_CAP),
    )?;
    let passed = checks.iter().all(|c| c.passed);
    for c in &checks {
        eprintln!(
            "verify: {:<36} {} (observed {:e}, tolerance {:e})",
            c.name,
            if c.passed { "pass" } else { "FAIL" },
            c.observed,
            c.tolerance
        );
    }
    let body = serde_json::json!({ "passed": passed, "checks": checks });
    write_json(&args.out, "verify_report.json", &sidecar(config, body))?;
    Ok(if passed {
        Outcome::Ok
    } else {
        Outcome::ChecksFailed
    })
}

fn probe_density(args: &RunArgs, system: &PrimeSystem, x_cap: &Rational) -> Result<f64> {
    match system.known_density() {
        Some(a) => Ok(a),
        None => Ok(counting::scan_density(&enumerate_table(args, system, x_cap)?)?.0),
    }
}

pub fn cmd_probe(config: &RunConfig) -> Result<Outcome> {
    let args = &config.args;
    let q = *required(&args.q, "q")?;
    let k = args.k.unwrap_or(2);
    if q == 0 {
        return Err(BeurlingError::invalid("--q must be nonzero for the probe"));
    }
    if k < 2 || q >= k {
        return Err(BeurlingError::invalid(format!(
            "need 0 < q < K, got q = {q}, K = {k}"
        )));
    }
    let sigmas = parse_list(
        args.sigmas.as_deref().unwrap_or("1.5,1.3,1.2,1.1,1.05"),
        "sigmas",
        parse_f64,
    )?;
    if let Some(bad) = sigmas.iter().find(|s| s.is_nan() || **s <= 1.0) {
        return Err(BeurlingError::invalid(format!(
            "sigma = {bad} must exceed 1"
        )));
    }
    let t_grid = parse_list(
        args.t_grid.as_deref().unwrap_or("0,0.5,1"),
        "t-grid",
        parse_f64,
    )?;
    let x_cap = match &args.x_cap {
        Some(x) => rational::parse(x)?,
        None => int(DEFAULT_X_CAP),
    };
    let system = load_system(args, &x_cap)?;
    let density = probe_density(args, &system, &x_cap)?;
    let pp = PrimePowers::new(&system, &x_cap)?;
    let rows = analytic::halasz_probe(
        &pp,
        &ProbeParams {
            q,
            k,
            t_grid,
            sigmas,
            x_cap,
            density,
        },
    )?;
    eprintln!("probe: {} rows", rows.len());

    let mut w = create(&args.out, "probe.csv")?;
    writeln!(w, "sigma,t,q,K,X,P_value,dini_I,tail_bound")?;
    for r in &rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.sigma, r.t, r.q, r.k, r.x, r.p_value, r.dini_i, r.tail_bound
        )?;
    }
    w.flush()?;
    let body = serde_json::json!({ "density": density, "rows": rows });
    write_json(&args.out, "probe.json", &sidecar(config, body))?;
    Ok(Outcome::Ok)
}

pub fn cmd_zeta(config: &RunConfig) -> Result<Outcome> {
    let args = &config.args;
    let x = rational::parse(required(&args.x_max, "x-max")?)?;
    let sigmas = parse_list(required(&args.sigmas, "sigmas")?, "sigmas", parse_f64)?;
    if let Some(bad) = sigmas.iter().find(|s| s.is_nan() || **s <= 1.0) {
        return Err(BeurlingError::invalid(format!(
            "sigma = {bad} must exceed 1"
        )));
    }
    let t_grid = parse_list(args.t_grid.as_deref().unwrap_or("0"), "t-grid", parse_f64)?;
    let system = load_system(args, &x)?;
    let table = enumerate_table(args, &system, &x)?;

    let mut values = Vec::new();
    let mut w = create(&args.out, "zeta.csv")?;
    writeln!(
        w,
        "sigma,t,X,value_re,value_im,tail_bound,corrected_re,corrected_im"
    )?;
    for &sigma in &sigmas {
        for &t in &t_grid {
            let v = analytic::zeta_truncated(&table, Complex64::new(sigma, t), &x)?;
            let corrected = v.tail_corrected.unwrap_or(v.value);
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                sigma,
                t,
                v.truncation_x,
                v.value.re,
                v.value.im,
                v.tail_bound.unwrap_or(f64::NAN),
                corrected.re,
                corrected.im
            )?;
            values.push(v);
        }
    }
    w.flush()?;
    write_json(
        &args.out,
        "zeta.json",
        &sidecar(config, serde_json::json!({ "values": values })),
    )?;
    Ok(Outcome::Ok)
}
