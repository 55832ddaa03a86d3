//! `qwalk` command line.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::config::parse_config;
use crate::error::{Error, Result};
use crate::fieldio::{read_field, write_field};
use crate::harness::{
    decay_run, homogeneous_ratio, inhomogeneous_ratio, random_forcing, uniformity_sweep_with_jobs,
    write_csv, write_jsonl, AdmissiblePair, DuhamelWeighting, RatioRecord, SweepConfig,
};
use crate::lattice::{make_state, Exponent, SpinorField, StateKind, WalkParams, DEFAULT_SITES};
use crate::manifest::RunManifest;
use crate::multiplier::{companion_projection, fractional_weight, littlewood_paley};
use crate::selftest::run_selftest;
use crate::spectral::{locate_degeneracies, spectral_decompose, spectral_evolve, FrequencyGrid};
use crate::walk::evolve;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "qwalk",
    version,
    about = "Quantum walks on δℤ: evolution, spectra and estimate ratios"
)]
struct Cli {
    /// Emit JSON lines instead of CSV.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every random input.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file (truncated at start); stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
struct WalkArgs {
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    /// Ring size N (power of two).
    #[arg(long, default_value_t = DEFAULT_SITES)]
    sites: usize,
}

impl WalkArgs {
    fn params(&self) -> Result<WalkParams> {
        WalkParams::new(self.delta, self.mass)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "lowercase")]
enum StateChoice {
    Impulse,
    Gaussian,
    Random,
}

#[derive(Args, Debug, Clone, Serialize)]
struct StateArgs {
    #[arg(long, value_enum, default_value_t = StateChoice::Impulse)]
    state: StateChoice,
    /// Lattice index of the impulse.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    site: i64,
    #[arg(long, default_value_t = 4.0)]
    width: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    carrier: f64,
    /// Support radius of random states, in sites.
    #[arg(long)]
    radius: Option<usize>,
    /// Read the initial field from a field file instead.
    #[arg(long)]
    input: Option<PathBuf>,
}

impl StateArgs {
    fn build(&self, walk: &WalkArgs, seed: u64) -> Result<SpinorField> {
        if let Some(path) = &self.input {
            let f = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            return read_field(BufReader::new(f));
        }
        let kind = match self.state {
            StateChoice::Impulse => StateKind::Impulse { site: self.site },
            StateChoice::Gaussian => StateKind::Gaussian {
                width: self.width,
                carrier: self.carrier,
            },
            StateChoice::Random => StateKind::Random {
                seed,
                radius: self.radius,
            },
        };
        make_state(kind, walk.params()?, walk.sites)
    }
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum Command {
    /// Evolve a state to time t and write the field.
    Evolve {
        #[command(flatten)]
        walk: WalkArgs,
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        /// Use the Fourier symbol instead of stepping.
        #[arg(long)]
        spectral: bool,
    },
    /// Export the symbol table and degeneracy points.
    Spectrum {
        #[command(flatten)]
        walk: WalkArgs,
    },
    /// Apply P_λ, its companion, or |D|^a⟨D⟩^b and write the field.
    Lp {
        #[command(flatten)]
        walk: WalkArgs,
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, conflicts_with_all = ["a", "b"])]
        lambda: Option<f64>,
        /// Apply the companion projection instead of P_λ.
        #[arg(long, requires = "lambda")]
        companion: bool,
        #[arg(long, requires = "b", allow_hyphen_values = true)]
        a: Option<f64>,
        #[arg(long, requires = "a", allow_hyphen_values = true)]
        b: Option<f64>,
    },
    /// Dispersive ratios along a log time ladder and the decay-slope fit.
    Decay {
        #[command(flatten)]
        walk: WalkArgs,
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        tmax: f64,
    },
    /// Homogeneous or (with --ptilde/--qtilde) inhomogeneous Strichartz ratio.
    Strichartz {
        #[command(flatten)]
        walk: WalkArgs,
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        p: Exponent,
        #[arg(long)]
        q: Exponent,
        #[arg(long, requires = "qtilde")]
        ptilde: Option<Exponent>,
        #[arg(long, requires = "ptilde")]
        qtilde: Option<Exponent>,
        /// Time horizon T.
        #[arg(long, alias = "T", default_value_t = 64.0)]
        horizon: f64,
        /// Multiply the Duhamel sum by δ.
        #[arg(long)]
        duhamel_weighted: bool,
    },
    /// δ-uniformity sweep from a config file (defaults when absent).
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run the oracle battery.
    Selftest,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Evolve { .. } => "evolve",
            Command::Spectrum { .. } => "spectrum",
            Command::Lp { .. } => "lp",
            Command::Decay { .. } => "decay",
            Command::Strichartz { .. } => "strichartz",
            Command::Sweep { .. } => "sweep",
            Command::Selftest => "selftest",
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::Parse { .. }
        | Error::InvalidParameter(_)
        | Error::NotAdmissible { .. }
        | Error::TimeGrid { .. } => EXIT_CONFIG,
        _ => EXIT_FAILURE,
    }
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("qwalk: {e}");
            exit_code(&e)
        }
    }
}

fn open_output(cli: &Cli) -> Result<Box<dyn Write>> {
    Ok(match &cli.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn echo<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

fn emit_records(w: &mut dyn Write, json: bool, records: &[RatioRecord]) -> Result<()> {
    if json {
        write_jsonl(w, records)
    } else {
        write_csv(w, records)
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    // Resolve everything that can fail on input before touching the output file.
    let sweep_config = match &cli.command {
        Command::Sweep { config: Some(path) } => Some(parse_config(path)?),
        Command::Sweep { config: None } => Some(SweepConfig::default()),
        _ => None,
    };
    let (config_echo, seeds) = match &sweep_config {
        Some(cfg) => (echo(cfg), cfg.seeds.clone()),
        None => (
            echo(&serde_json::json!({ "args": &cli.command, "seed": cli.seed })),
            vec![cli.seed],
        ),
    };
    let manifest = RunManifest::new(cli.command.name(), config_echo, seeds);

    // The body is buffered so a failing command leaves no partial file behind.
    let mut w: Vec<u8> = Vec::new();
    let code = match &cli.command {
        Command::Evolve {
            walk,
            state,
            t,
            spectral,
        } => {
            let u = state.build(walk, cli.seed)?;
            let (field, guard) = if *spectral {
                (spectral_evolve(&u, *t)?, None)
            } else {
                let ev = evolve(&u, *t)?;
                (ev.field, Some(ev.wrap_guard_ok))
            };
            if let Some(ok) = guard {
                writeln!(w, "# wrap_ok={ok}")?;
            }
            write_field(&mut w, &field)?;
            EXIT_OK
        }
        Command::Spectrum { walk } => {
            let params = walk.params()?;
            let dec = spectral_decompose(params, FrequencyGrid::new(params, walk.sites)?)?;
            match locate_degeneracies(params) {
                Ok(deg) => {
                    let fmt =
                        |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
                    writeln!(w, "# degenerate_pdprime={}", fmt(&deg.second))?;
                    writeln!(w, "# degenerate_ptprime={}", fmt(&deg.third))?;
                }
                Err(e) => writeln!(w, "# degeneracies unavailable: {e}")?,
            }
            if cli.json {
                let mut buf = Vec::new();
                dec.write_csv(&mut buf)?;
                let text = String::from_utf8(buf).expect("csv is utf-8");
                let mut lines = text.lines();
                let keys: Vec<&str> = lines.next().unwrap_or("").split(',').collect();
                for line in lines {
                    let obj: serde_json::Map<String, serde_json::Value> = keys
                        .iter()
                        .zip(line.split(','))
                        .map(|(k, v)| {
                            (
                                k.to_string(),
                                v.parse::<f64>()
                                    .map(serde_json::Value::from)
                                    .unwrap_or_default(),
                            )
                        })
                        .collect();
                    writeln!(w, "{}", serde_json::Value::Object(obj))?;
                }
            } else {
                dec.write_csv(&mut w)?;
            }
            EXIT_OK
        }
        Command::Lp {
            walk,
            state,
            lambda,
            companion,
            a,
            b,
        } => {
            let u = state.build(walk, cli.seed)?;
            let field = match (lambda, a, b) {
                (Some(l), _, _) if *companion => companion_projection(&u, *l)?,
                (Some(l), _, _) => {
                    let pr = littlewood_paley(&u, *l)?;
                    if pr.vanished {
                        writeln!(w, "# lambda >= 2*pi/delta: projection vanishes")?;
                    }
                    pr.field
                }
                (None, Some(a), Some(b)) => fractional_weight(&u, *a, *b)?,
                _ => {
                    return Err(Error::InvalidParameter(
                        "lp needs --lambda or --a/--b".into(),
                    ))
                }
            };
            write_field(&mut w, &field)?;
            EXIT_OK
        }
        Command::Decay {
            walk,
            state,
            lambda,
            tmax,
        } => {
            let u = state.build(walk, cli.seed)?;
            let mut run = decay_run(&u, *lambda, *tmax)?;
            for r in &mut run.records {
                r.seed = cli.seed;
            }
            emit_records(&mut w, cli.json, &run.records)?;
            writeln!(
                w,
                "# intercept={} residual={} points={}",
                run.fit.intercept, run.fit.residual, run.fit.points
            )?;
            writeln!(w, "# slope={}", run.fit.slope)?;
            EXIT_OK
        }
        Command::Strichartz {
            walk,
            state,
            p,
            q,
            ptilde,
            qtilde,
            horizon,
            duhamel_weighted,
        } => {
            let pair = AdmissiblePair::discrete(*p, *q)?;
            let mut rec = match (ptilde, qtilde) {
                (Some(pt), Some(qt)) => {
                    let tilde = AdmissiblePair::discrete(*pt, *qt)?;
                    let params = walk.params()?;
                    let steps = crate::walk::time_to_steps(*horizon, params.delta())?;
                    if steps < 0 {
                        return Err(Error::TimeGrid {
                            t: *horizon,
                            delta: params.delta(),
                        });
                    }
                    let f = random_forcing(
                        params,
                        walk.sites,
                        steps as u64,
                        cli.seed,
                        Some(state.radius.unwrap_or(16)),
                    )?;
                    let weighting = if *duhamel_weighted {
                        DuhamelWeighting::Weighted
                    } else {
                        DuhamelWeighting::Unweighted
                    };
                    inhomogeneous_ratio(&f, pair, tilde, *horizon, weighting)?
                }
                _ => homogeneous_ratio(&state.build(walk, cli.seed)?, pair, *horizon)?,
            };
            rec.seed = cli.seed;
            emit_records(&mut w, cli.json, &[rec])?;
            EXIT_OK
        }
        Command::Sweep { .. } => {
            let cfg = sweep_config.as_ref().expect("resolved above");
            let records = uniformity_sweep_with_jobs(cfg, cli.jobs)?;
            emit_records(&mut w, cli.json, &records)?;
            EXIT_OK
        }
        Command::Selftest => {
            let outcomes = run_selftest();
            let mut failed = 0;
            for c in &outcomes {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                failed += usize::from(!c.passed);
                writeln!(w, "{tag} {}: {}", c.name, c.detail)?;
            }
            writeln!(w, "# {} checks, {failed} failed", outcomes.len())?;
            if failed == 0 {
                EXIT_OK
            } else {
                EXIT_FAILURE
            }
        }
    };
    let mut out = open_output(cli)?;
    manifest.write(&mut out)?;
    out.write_all(&w)?;
    out.flush()?;
    Ok(code)
}
