//! Command-line front end. Exit codes: 0 success, 2 validation, 3 numerical
//! failure, 4 I/O.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::diagnostics::{critical_cutoff, energy_audit, log_grid, RenormCurve, RenormScheme};
use crate::error::{Error, Result};
use crate::integrators::run_ensemble;
use crate::io::{self, RunManifest};
use crate::kernels::{gamma_freq, gamma_time, mu_time, s0_tilde, s1_tilde, symmetric_grid, KernelSpec, Regulator};
use crate::model::RunStatus;
use crate::noise::psd::estimate_psd;
use crate::noise::{fdr_spectrum, synthesize_samples, NoiseSpec};
use crate::scenario::Scenario;
use crate::units::{tau_m, ParticleSpec, UnitSystem};
use crate::Vec3;

#[derive(Debug, Parser)]
#[command(name = "emlangevin", version, about = "Stochastic dynamics of charged particles with radiation reaction")]
pub struct Cli {
    /// Noise seed, overriding the scenario value.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "emlangevin-out")]
    pub out: PathBuf,
    /// Scenario JSON file.
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,
    /// Reject unknown scenario keys.
    #[arg(long, global = true)]
    pub strict: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RegulatorArg {
    Hard,
    Exponential,
    Gaussian,
}

impl From<RegulatorArg> for Regulator {
    fn from(r: RegulatorArg) -> Self {
        match r {
            RegulatorArg::Hard => Regulator::Hard,
            RegulatorArg::Exponential => Regulator::Exponential,
            RegulatorArg::Gaussian => Regulator::Gaussian,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Standard,
    Consistent,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate the damping kernel in frequency and time.
    Kernels {
        #[arg(long, default_value_t = 1.0)]
        separation: f64,
        #[arg(long, default_value_t = 100.0)]
        cutoff: f64,
        #[arg(long, value_enum, default_value_t = RegulatorArg::Hard)]
        regulator: RegulatorArg,
        #[arg(long, default_value_t = 401)]
        points: usize,
    },
    /// Synthesize noise and compare its Welch PSD with the target spectrum.
    Noise {
        #[arg(long, default_value_t = 1.0)]
        temperature: f64,
        #[arg(long, default_value_t = 0.0)]
        hbar: f64,
        #[arg(long, default_value_t = 10.0)]
        cutoff: f64,
        /// Sample spacing; defaults to 0.5/cutoff.
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long, default_value_t = 1 << 20)]
        samples: usize,
        #[arg(long, default_value_t = 255)]
        segments: usize,
        /// Rows of the realization written to noise.csv.
        #[arg(long, default_value_t = 4096)]
        rows: usize,
    },
    /// Run a scenario and write the run directory.
    Simulate,
    /// Bare mass against cutoff for both renormalization schemes.
    Renorm {
        #[arg(long, value_enum, default_value_t = SchemeArg::Both)]
        scheme: SchemeArg,
        /// `lo:hi:n` log grid of cutoffs in units of 1/tau_m.
        #[arg(long, default_value = "0.01:10000:121")]
        grid: String,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long, default_value_t = 1.0)]
        charge: f64,
    },
    /// Verify a run directory: digest, regeneration and energy ledger.
    Audit {
        #[arg(long)]
        run: PathBuf,
    },
    /// Run the canned scenarios and report each check.
    Demo,
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn kernels(out: &Path, separation: f64, cutoff: f64, regulator: RegulatorArg, points: usize) -> Result<i32> {
    if !(separation >= 0.0 && separation.is_finite()) || points < 2 {
        return Err(Error::InvalidInput("separation must be >= 0 and points >= 2".into()));
    }
    let spec = KernelSpec::new(cutoff, regulator.into())?;
    let r = Vec3::new(separation, 0.0, 0.0);

    let w_max = 1.2 * spec.omega_max();
    let mut freq = String::from("omega,z,s1,s0,gamma_par,gamma_perp\n");
    for k in 0..points {
        let w = w_max * k as f64 / (points - 1) as f64;
        let z = separation * w;
        let g = gamma_freq(&r, w, &spec);
        freq.push_str(&[w, z, s1_tilde(z), s0_tilde(z), g[(0, 0)], g[(1, 1)]].map(num).join(","));
        freq.push('\n');
    }

    // resolve the cutoff: at least four samples per π/Λ
    let t_max = separation + 20.0 * std::f64::consts::PI / cutoff;
    let n = points.max((8.0 * t_max * cutoff / std::f64::consts::PI).ceil() as usize + 1) | 1;
    let ts = symmetric_grid(t_max, n);
    let g = gamma_time(&r, &ts, &spec)?;
    let mu = mu_time(&r, &ts, &spec)?;
    let mut time = String::from("t,gamma_par,gamma_perp,mu_par,mu_perp\n");
    for k in 0..ts.len() {
        time.push_str(&[ts[k], g[k][(0, 0)], g[k][(1, 1)], mu[k][(0, 0)], mu[k][(1, 1)]].map(num).join(","));
        time.push('\n');
    }
    let a = write(out, "kernel_freq.csv", &freq)?;
    let b = write(out, "kernel_time.csv", &time)?;
    println!("wrote {} and {}", a.display(), b.display());
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn noise(
    cli: &Cli,
    temperature: f64,
    hbar: f64,
    cutoff: f64,
    dt: Option<f64>,
    samples: usize,
    segments: usize,
    rows: usize,
) -> Result<i32> {
    let (spec, dt) = match &cli.scenario {
        Some(path) => {
            let s = io::parse_scenario(path, cli.strict)?;
            (s.noise_spec(), s.dt)
        }
        None => {
            let kernel = KernelSpec::hard(cutoff);
            (NoiseSpec::quantum(hbar, temperature, kernel), dt.unwrap_or(0.5 / cutoff))
        }
    };
    spec.validate()?;
    let seed = cli.seed.unwrap_or(0);
    let r = synthesize_samples(&spec, 1, samples, dt, seed)?;

    let mut text = String::from("t,xi_x,xi_y,xi_z,dxi_x,dxi_y,dxi_z\n");
    for k in 0..rows.min(r.len) {
        let (x, d) = (r.xi_at(0, k), r.dxi_at(0, k));
        text.push_str(&[k as f64 * dt, x.x, x.y, x.z, d.x, d.y, d.z].map(num).join(","));
        text.push('\n');
    }
    write(&cli.out, "noise.csv", &text)?;

    let est = estimate_psd(&r.xi[0][0], dt, segments)?;
    let lam = spec.kernel.cutoff_lambda;
    let mut check = String::from("omega,target,estimate,stderr\n");
    let (mut ratio, mut count) = (0.0, 0.0);
    for k in est.band(0.0, lam) {
        let target = fdr_spectrum(est.omega[k], &spec);
        check.push_str(&[est.omega[k], target, est.psd[k], est.stderr[k]].map(num).join(","));
        check.push('\n');
        if est.omega[k] >= lam / 100.0 && est.omega[k] <= lam / 2.0 && target > 0.0 {
            ratio += est.psd[k] / target;
            count += 1.0;
        }
    }
    write(&cli.out, "psd_check.csv", &check)?;
    if count > 0.0 {
        println!("mid-band estimate/target = {:.4} over {count} bins", ratio / count);
    }
    println!("wrote noise.csv and psd_check.csv to {}", cli.out.display());
    Ok(0)
}

fn load_scenario(cli: &Cli) -> Result<Scenario> {
    let path = cli.scenario.as_ref().ok_or_else(|| Error::InvalidInput("--scenario is required".into()))?;
    if !cli.strict {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        if let Ok(keys) = io::unknown_keys(&text) {
            for k in keys {
                eprintln!("warning: ignoring unknown key `{k}`");
            }
        }
    }
    let mut s = io::parse_scenario(path, cli.strict)?;
    if let Some(seed) = cli.seed {
        s.seed = seed;
    }
    Ok(s)
}

fn simulate(cli: &Cli) -> Result<i32> {
    let s = load_scenario(cli)?;
    let started = io::unix_now();
    let outputs = run_ensemble(&s)?;
    io::write_outputs(&outputs, &s, &cli.out, started)?;
    let status = outputs[0].trajectory.status;
    println!("{}: {} replica(s), wrote {}", status.label(), outputs.len(), cli.out.display());
    Ok(match status {
        RunStatus::NumericalFailure { .. } => 3,
        _ => 0,
    })
}

fn parse_grid(spec: &str) -> Result<(f64, f64, usize)> {
    let bad = || Error::InvalidInput(format!("grid must be lo:hi:n, got `{spec}`"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let n: usize = parts[2].parse().map_err(|_| bad())?;
    if !(lo > 0.0 && hi > lo && n >= 2) {
        return Err(bad());
    }
    Ok((lo, hi, n))
}

fn renorm(out: &Path, scheme: SchemeArg, grid: &str, mass: f64, charge: f64) -> Result<i32> {
    let p = ParticleSpec::new("p", mass, charge)?;
    let tau = tau_m(&p, &UnitSystem::default());
    if tau <= 0.0 {
        return Err(Error::InvalidInput("charge must be nonzero".into()));
    }
    let (lo, hi, n) = parse_grid(grid)?;
    let lambdas = log_grid(lo / tau, hi / tau, n);
    let schemes: Vec<RenormScheme> = match scheme {
        SchemeArg::Standard => vec![RenormScheme::StandardAl],
        SchemeArg::Consistent => vec![RenormScheme::ConsistentMagnetostatic],
        SchemeArg::Both => vec![RenormScheme::StandardAl, RenormScheme::ConsistentMagnetostatic],
    };
    let curves = schemes.iter().map(|&sc| RenormCurve::compute(sc, mass, charge, &lambdas)).collect::<Result<Vec<_>>>()?;
    let mut header = vec!["lambda".to_string()];
    header.extend(curves.iter().map(|c| format!("m_bare_{}", scheme_name(c.scheme))));
    let mut text = header.join(",") + "\n";
    for (k, l) in lambdas.iter().enumerate() {
        let mut row = vec![num(*l)];
        row.extend(curves.iter().map(|c| num(c.m_bare[k])));
        text.push_str(&row.join(","));
        text.push('\n');
    }
    write(out, "renorm.csv", &text)?;
    for c in &curves {
        match c.lambda_star {
            Some(l) => println!("{}: bare mass crosses zero at lambda* = {l:.12} (analytic {:.12})", scheme_name(c.scheme), critical_cutoff(mass, charge)),
            None => println!("{}: bare mass stays positive on the grid", scheme_name(c.scheme)),
        }
    }
    Ok(0)
}

fn scheme_name(s: RenormScheme) -> &'static str {
    match s {
        RenormScheme::StandardAl => "standard",
        RenormScheme::ConsistentMagnetostatic => "consistent",
    }
}

fn audit(run_dir: &Path) -> Result<i32> {
    let manifest = RunManifest::read(run_dir)?;
    if !manifest.verify(run_dir)? {
        eprintln!("scenario digest mismatch in {}", run_dir.display());
        return Ok(2);
    }
    let s = io::read_run_scenario(run_dir)?;
    let outputs = run_ensemble(&s)?;
    let tmp = run_dir.join(".audit");
    io::write_outputs(&outputs, &s, &tmp, io::unix_now())?;
    let mut identical = true;
    for f in manifest.files.iter() {
        let a = fs::read(run_dir.join(f)).map_err(|e| Error::io(run_dir.join(f), e))?;
        let b = fs::read(tmp.join(f)).map_err(|e| Error::io(tmp.join(f), e))?;
        if a != b {
            identical = false;
            println!("{f}: regenerated output differs");
        }
    }
    fs::remove_dir_all(&tmp).map_err(|e| Error::io(&tmp, e))?;
    println!("digest ok, regeneration {}", if identical { "byte-identical" } else { "DIFFERS" });
    let first = &outputs[0];
    if !first.ledger.is_empty() {
        let report = energy_audit(&first.trajectory, &first.ledger, &s)?;
        println!(
            "ledger: max |residual| {:.3e}, relative {:.3e}, H_gamma nonincreasing {}, H_xi zero {}",
            report.max_abs_residual, report.relative_residual, report.h_gamma_nonincreasing, report.h_xi_zero
        );
    }
    Ok(if identical { 0 } else { 3 })
}

fn demo(out: &Path) -> Result<i32> {
    let mut failed = 0;
    for r in crate::demo::run_all()? {
        io::write_outputs(&r.outputs, &r.scenario, &out.join(r.name), io::unix_now())?;
        println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
        failed += usize::from(!r.passed);
    }
    Ok(if failed == 0 { 0 } else { 3 })
}

pub fn execute(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Kernels { separation, cutoff, regulator, points } => kernels(&cli.out, *separation, *cutoff, *regulator, *points),
        Command::Noise { temperature, hbar, cutoff, dt, samples, segments, rows } => {
            noise(cli, *temperature, *hbar, *cutoff, *dt, *samples, *segments, *rows)
        }
        Command::Simulate => simulate(cli),
        Command::Renorm { scheme, grid, mass, charge } => renorm(&cli.out, *scheme, grid, *mass, *charge),
        Command::Audit { run } => audit(run),
        Command::Demo => demo(&cli.out),
    }
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
