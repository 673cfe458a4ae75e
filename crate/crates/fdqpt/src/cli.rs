//! Command-line frontend: JSON config plus flag overrides, CSV outputs with
//! versioned headers, and one JSON metadata sidecar per run.

use crate::criticality::{self, CriticalMode};
use crate::dynamics::{self, TimeGrid};
use crate::error::{Error, Result};
use crate::model::{ChainParams, MomentumGrid, Segment};
use crate::{bloch, topology, validate};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(
    name = "fdqpt",
    version,
    about = "Floquet dynamical quantum phase transitions in a flux-quenched XY chain"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Single-mode Loschmidt echo over the (k, t) lattice, with detected zeros.
    Echo(CommonArgs),
    /// Floquet quench fidelities, critical momenta and the window verdict.
    Critical(CommonArgs),
    /// Rate function g(t) and the dynamical topological order parameter.
    RateDtop(CommonArgs),
    /// Bloch-sphere micromotion trajectories at selected momenta.
    Bloch(CommonArgs),
    /// Count realized transitions over a (lambda, delta-phi) parameter plane.
    Sweep(CommonArgs),
    /// Cross-validate all closed forms against the brute-force oracle.
    Validate(CommonArgs),
}

/// Flags shared by every subcommand; flags win over the config file, and each
/// flag can also come from an FDQPT_* environment variable.
#[derive(Args, Debug)]
pub struct CommonArgs {
    /// JSON configuration file.
    #[arg(long, env = "FDQPT_CONFIG")]
    pub config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, env = "FDQPT_OUT", default_value = "out")]
    pub out: PathBuf,
    /// Dense momentum-grid size for integrals and root bracketing.
    #[arg(long, env = "FDQPT_NK")]
    pub nk: Option<usize>,
    /// Number of time samples per driving period.
    #[arg(long, env = "FDQPT_NT")]
    pub nt: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long, env = "FDQPT_THREADS")]
    pub threads: Option<usize>,
    /// Seed for the randomized validation suite.
    #[arg(long, env = "FDQPT_SEED")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_steps: usize,
    pub dphi_min: f64,
    pub dphi_max: f64,
    pub dphi_steps: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            lambda_min: 0.0,
            lambda_max: 3.0,
            lambda_steps: 13,
            dphi_min: 0.0,
            dphi_max: PI,
            dphi_steps: 13,
        }
    }
}

/// Full run configuration: physics parameters plus numerical controls.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub params: ChainParams,
    /// Dense momentum grid for rate/DTOP integrals and root bracketing.
    pub nk: usize,
    /// Time samples per period.
    pub nt: usize,
    /// Validation seed.
    pub seed: u64,
    /// Validation draw count.
    pub draws: usize,
    /// Momenta (in units of pi) for Bloch trajectories; empty means "use the
    /// fidelity roots found for these parameters".
    pub bloch_k_over_pi: Vec<f64>,
    pub sweep: SweepConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: ChainParams::baseline(0.6, 0.0, PI / 4.0, PI, PI),
            nk: 4001,
            nt: 2000,
            seed: 20260824,
            draws: 1000,
            bloch_k_over_pi: Vec::new(),
            sweep: SweepConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(args: &CommonArgs) -> Result<Self> {
        let mut cfg = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                    path: path.display().to_string(),
                    source,
                })?;
                serde_json::from_str(&text)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
            }
            None => Self::default(),
        };
        if let Some(nk) = args.nk {
            cfg.nk = nk;
        }
        if let Some(nt) = args.nt {
            cfg.nt = nt;
        }
        if let Some(seed) = args.seed {
            cfg.seed = seed;
        }
        cfg.params.validate()?;
        if cfg.nk < 16 || cfg.nt < 2 {
            return Err(Error::Config(format!(
                "grid sizes below documented minima (nk = {}, nt = {})",
                cfg.nk, cfg.nt
            )));
        }
        Ok(cfg)
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).map_err(io_err(path))
}

fn write_sidecar<T: Serialize>(path: &Path, sidecar: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(sidecar)
        .map_err(|e| Error::Config(format!("serialization: {e}")))?;
    write_file(path, &(text + "\n"))
}

fn fmt(x: f64) -> String {
    format!("{x:.12e}")
}

#[derive(Serialize)]
struct Meta<'a> {
    command: &'a str,
    tool_version: &'a str,
    params: ChainParams,
    nk: usize,
    nt: usize,
}

impl<'a> Meta<'a> {
    fn new(command: &'a str, cfg: &RunConfig) -> Self {
        Self {
            command,
            tool_version: TOOL_VERSION,
            params: cfg.params,
            nk: cfg.nk,
            nt: cfg.nt,
        }
    }
}

/// Parse and dispatch; returns the process exit code.
pub fn run(cli: Cli) -> Result<()> {
    let args = match &cli.command {
        Command::Echo(a)
        | Command::Critical(a)
        | Command::RateDtop(a)
        | Command::Bloch(a)
        | Command::Sweep(a)
        | Command::Validate(a) => a,
    };
    if let Some(threads) = args.threads {
        // ignore the error if a global pool already exists (tests, repeat calls)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let cfg = RunConfig::load(args)?;
    std::fs::create_dir_all(&args.out).map_err(io_err(&args.out))?;
    match &cli.command {
        Command::Echo(a) => cmd_echo(&cfg, &a.out),
        Command::Critical(a) => cmd_critical(&cfg, &a.out),
        Command::RateDtop(a) => cmd_rate_dtop(&cfg, &a.out),
        Command::Bloch(a) => cmd_bloch(&cfg, &a.out),
        Command::Sweep(a) => cmd_sweep(&cfg, &a.out),
        Command::Validate(a) => cmd_validate(&cfg, &a.out),
    }
}

#[derive(Serialize)]
struct EchoSidecar<'a> {
    #[serde(flatten)]
    meta: Meta<'a>,
    /// (k/pi, t) of every realized echo zero.
    zeros: Vec<ZeroEntry>,
}

#[derive(Serialize)]
struct ZeroEntry {
    k_over_pi: f64,
    segment: u8,
    t: f64,
}

pub fn cmd_echo(cfg: &RunConfig, out: &Path) -> Result<()> {
    let kgrid = crate::model::momentum_grid(&cfg.params)?;
    let tgrid = TimeGrid::uniform(&cfg.params, cfg.nt, &[])?;
    let map = dynamics::echo_map(&cfg.params, &kgrid, &tgrid)?;
    let mut csv = String::from("# fdqpt-echo-v1 columns=k,t,echo\nk,t,echo\n");
    for r in &map.records {
        csv.push_str(&format!("{},{},{}\n", fmt(r.k), fmt(r.t), fmt(r.echo)));
    }
    write_file(&out.join("echo.csv"), &csv)?;

    let modes = criticality::find_fdqpts(&cfg.params, cfg.nk)?;
    let mut zeros = Vec::new();
    for m in modes.iter().filter(|m| m.realized) {
        for &t in &m.critical_times {
            zeros.push(ZeroEntry {
                k_over_pi: m.k_c / PI,
                segment: m.segment.index(),
                t,
            });
        }
    }
    write_sidecar(
        &out.join("echo.json"),
        &EchoSidecar {
            meta: Meta::new("echo", cfg),
            zeros,
        },
    )
}

#[derive(Serialize)]
struct CriticalSidecar<'a> {
    #[serde(flatten)]
    meta: Meta<'a>,
    roots: Vec<RootEntry>,
}

#[derive(Serialize)]
struct RootEntry {
    k_over_pi: f64,
    segment: u8,
    realized: bool,
    tangent: bool,
    fidelity_residual: f64,
    echo_min: f64,
    critical_times: Vec<f64>,
}

impl From<&CriticalMode> for RootEntry {
    fn from(m: &CriticalMode) -> Self {
        Self {
            k_over_pi: m.k_c / PI,
            segment: m.segment.index(),
            realized: m.realized,
            tangent: m.tangent,
            fidelity_residual: m.fidelity_residual,
            echo_min: m.echo_min,
            critical_times: m.critical_times.clone(),
        }
    }
}

pub fn cmd_critical(cfg: &RunConfig, out: &Path) -> Result<()> {
    let grid = MomentumGrid::dense(cfg.nk)?;
    let profile = criticality::fidelity_profile(&cfg.params, &grid)?;
    let mut csv = String::from("# fdqpt-critical-v1 columns=k,f1,f2,lstar1,lstar2\nk,f1,f2,lstar1,lstar2\n");
    for i in 0..grid.len() {
        let l = |f: f64| (1.0 - 2.0 * f * f).powi(2);
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt(profile.ks[i]),
            fmt(profile.f1[i]),
            fmt(profile.f2[i]),
            fmt(l(profile.f1[i])),
            fmt(l(profile.f2[i]))
        ));
    }
    write_file(&out.join("critical.csv"), &csv)?;

    let modes = criticality::find_fdqpts(&cfg.params, cfg.nk)?;
    write_sidecar(
        &out.join("critical.json"),
        &CriticalSidecar {
            meta: Meta::new("critical", cfg),
            roots: modes.iter().map(RootEntry::from).collect(),
        },
    )
}

#[derive(Serialize)]
struct RateDtopSidecar<'a> {
    #[serde(flatten)]
    meta: Meta<'a>,
    /// Midpoints of time steps across which the rounded DTOP changes.
    jump_times: Vec<f64>,
    quantization_warnings: usize,
}

pub fn cmd_rate_dtop(cfg: &RunConfig, out: &Path) -> Result<()> {
    let tgrid = TimeGrid::uniform(&cfg.params, cfg.nt, &[])?;
    let rate = dynamics::rate_function(&cfg.params, &tgrid, cfg.nk)?;
    let series = topology::dtop(&cfg.params, &tgrid, cfg.nk.max(256))?;
    let mut csv = String::from(
        "# fdqpt-rate-dtop-v1 columns=t,rate,nu,nu_rounded,quantization_error\nt,rate,nu,nu_rounded,quantization_error\n",
    );
    for i in 0..rate.times.len() {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt(rate.times[i]),
            fmt(rate.values[i]),
            fmt(series.nu[i]),
            series.nu_rounded[i],
            fmt(series.quantization_error[i])
        ));
    }
    write_file(&out.join("rate_dtop.csv"), &csv)?;

    let mut jump_times = Vec::new();
    for i in 1..series.times.len() {
        if series.nu_rounded[i] != series.nu_rounded[i - 1]
            && series.quantization_error[i] < topology::QUANTIZATION_TOLERANCE
            && series.quantization_error[i - 1] < topology::QUANTIZATION_TOLERANCE
        {
            jump_times.push(0.5 * (series.times[i] + series.times[i - 1]));
        }
    }
    write_sidecar(
        &out.join("rate_dtop.json"),
        &RateDtopSidecar {
            meta: Meta::new("rate-dtop", cfg),
            jump_times,
            quantization_warnings: series.warnings.len(),
        },
    )
}

#[derive(Serialize)]
struct BlochSidecar<'a> {
    #[serde(flatten)]
    meta: Meta<'a>,
    trajectories: Vec<BlochEntry>,
}

#[derive(Serialize)]
struct BlochEntry {
    k_over_pi: f64,
    antiparallel_times: Vec<f64>,
}

pub fn cmd_bloch(cfg: &RunConfig, out: &Path) -> Result<()> {
    let ks: Vec<f64> = if cfg.bloch_k_over_pi.is_empty() {
        let modes = criticality::find_fdqpts(&cfg.params, cfg.nk)?;
        let mut ks: Vec<f64> = modes.iter().map(|m| m.k_c).collect();
        ks.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        if ks.is_empty() {
            ks.push(0.5 * PI);
        }
        ks
    } else {
        cfg.bloch_k_over_pi.iter().map(|k| k * PI).collect()
    };
    let tgrid = TimeGrid::uniform(&cfg.params, cfg.nt.max(1000), &[])?;
    let mut csv = String::from("# fdqpt-bloch-v1 columns=k,t,dx,dy,dz\nk,t,dx,dy,dz\n");
    let mut entries = Vec::new();
    for &k in &ks {
        let traj = bloch::trajectory(&cfg.params, k, &tgrid)?;
        for (t, v) in traj.times.iter().zip(&traj.vectors) {
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt(k),
                fmt(*t),
                fmt(v.x),
                fmt(v.y),
                fmt(v.z)
            ));
        }
        entries.push(BlochEntry {
            k_over_pi: k / PI,
            antiparallel_times: traj.events,
        });
    }
    write_file(&out.join("bloch.csv"), &csv)?;
    write_sidecar(
        &out.join("bloch.json"),
        &BlochSidecar {
            meta: Meta::new("bloch", cfg),
            trajectories: entries,
        },
    )
}

#[derive(Serialize)]
struct SweepSidecar<'a> {
    #[serde(flatten)]
    meta: Meta<'a>,
    sweep: SweepConfig,
}

pub fn cmd_sweep(cfg: &RunConfig, out: &Path) -> Result<()> {
    let s = &cfg.sweep;
    if s.lambda_steps < 2 || s.dphi_steps < 2 {
        return Err(Error::Config("sweep needs at least 2 steps per axis".into()));
    }
    let mut csv = String::from(
        "# fdqpt-sweep-v1 columns=lambda,dphi,realized_seg1,realized_seg2\nlambda,dphi,realized_seg1,realized_seg2\n",
    );
    let cells: Vec<(f64, f64)> = (0..s.lambda_steps)
        .flat_map(|i| {
            let lambda =
                s.lambda_min + (s.lambda_max - s.lambda_min) * i as f64 / (s.lambda_steps - 1) as f64;
            (0..s.dphi_steps).map(move |j| {
                let dphi =
                    s.dphi_min + (s.dphi_max - s.dphi_min) * j as f64 / (s.dphi_steps - 1) as f64;
                (lambda, dphi)
            })
        })
        .collect();
    use rayon::prelude::*;
    let counts: Vec<(usize, usize)> = cells
        .par_iter()
        .map(|&(lambda, dphi)| {
            let p = ChainParams {
                lambda,
                phi1: cfg.params.phi1,
                phi2: cfg.params.phi1 + dphi,
                ..cfg.params
            };
            let modes = criticality::find_fdqpts(&p, cfg.nk.min(2001))?;
            let c1 = modes
                .iter()
                .filter(|m| m.realized && m.segment == Segment::First)
                .count();
            let c2 = modes
                .iter()
                .filter(|m| m.realized && m.segment == Segment::Second)
                .count();
            Ok((c1, c2))
        })
        .collect::<Result<_>>()?;
    for ((lambda, dphi), (c1, c2)) in cells.iter().zip(&counts) {
        csv.push_str(&format!("{},{},{c1},{c2}\n", fmt(*lambda), fmt(*dphi)));
    }
    write_file(&out.join("sweep.csv"), &csv)?;
    write_sidecar(
        &out.join("sweep.json"),
        &SweepSidecar {
            meta: Meta::new("sweep", cfg),
            sweep: s.clone(),
        },
    )
}

pub fn cmd_validate(cfg: &RunConfig, out: &Path) -> Result<()> {
    let report = validate::run_validation(cfg.seed, cfg.draws)?;
    write_sidecar(&out.join("validate.json"), &report)?;
    let mut stdout = std::io::stdout().lock();
    let _ = writeln!(
        stdout,
        "validate: seed {} draws {} skipped {} failures {}",
        report.seed,
        report.draws,
        report.skipped_degenerate,
        report.failures.len()
    );
    for f in &report.failures {
        let _ = writeln!(
            stdout,
            "  FAIL module={} check={} draw={} seed={} error={:.3e}",
            f.module, f.check, f.draw, f.seed, f.observed_error
        );
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Error::ValidationFailed(report.failures.len()))
    }
}

/// Process exit code for a library error, per the documented contract:
/// 1 usage/config, 2 numerical-validation failure, 3 I/O.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::ValidationFailed(_) => 2,
        Error::Io { .. } => 3,
        _ => 1,
    }
}
