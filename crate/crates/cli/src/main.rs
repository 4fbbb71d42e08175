//! `gbs`: command-line front end for exact Gaussian boson sampling.
//!
//! Numbers are printed with 15 significant digits in lowercase scientific
//! notation. Files are JSON envelopes `{"schema_version": 1, "payload": ...}`;
//! bare payloads are accepted on input.
//!
//! Exit codes: 0 success, 2 input or domain error, 3 resource cap.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gbs_core::gaussian::{output_state, InterferometerUnitary, SqueezeParams};
use gbs_core::hafnian::{hafnian_pmp_with, hafnian_recursive_with};
use gbs_core::probability::{
    generation_ratio, pfbs_probability, ppe_distribution, rank_deficiency_warning, sampling_space_sizes,
    GeneralEvaluator, PhotonPattern, PpeDistributionSpec, SqueezedEvaluator,
};
use gbs_core::random::{coe_matrix, haar_unitary};
use gbs_core::sampler::{build_distribution_with, draw, SamplingRun};
use gbs_core::{io, Complex64, ComplexMatrix, Config};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "gbs", version, about = "Exact desk-scale Gaussian boson sampling")]
struct Cli {
    /// Machine-readable output on stdout and error records on stderr.
    #[arg(long, global = true)]
    json: bool,

    /// Largest hafnian dimension to attempt (at most 20).
    #[arg(long, global = true, default_value_t = Config::DEFAULT.hafnian_cap)]
    hafnian_cap: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hafnian of a symmetric matrix read from a file.
    Haf {
        file: PathBuf,
        /// Also evaluate with the recursive algorithm and print the difference.
        #[arg(long)]
        recursive: bool,
    },
    /// Probability of one output pattern.
    Prob {
        #[command(flatten)]
        setup: Setup,
        /// Photons counted in each output mode, e.g. 1,0,1,0.
        #[arg(long, value_delimiter = ',', required = true)]
        pattern: Vec<usize>,
        /// Evaluate through the covariance matrix instead of the squeezed-input form.
        #[arg(long)]
        general: bool,
    },
    /// Tabulate all patterns below a cutoff and draw samples from the table.
    Sample {
        #[command(flatten)]
        setup: Setup,
        #[arg(long)]
        modes: usize,
        /// Largest total photon number tabulated.
        #[arg(long)]
        cutoff: usize,
        /// Largest photon number per mode (defaults to the cutoff).
        #[arg(long)]
        max_per_mode: Option<usize>,
        #[arg(long, default_value_t = 0)]
        draws: u64,
        #[arg(long)]
        sample_seed: Option<u64>,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Photon-number statistics of heralded versus Gaussian sampling.
    Compare {
        /// Number of photon pairs N.
        #[arg(long)]
        photons: usize,
        /// Number of squeezed sources K.
        #[arg(long)]
        squeezers: usize,
        #[arg(long)]
        squeeze: f64,
    },
    /// Emit a seeded Haar-random unitary (or the COE matrix T Tᵗ built from it).
    Haar {
        #[arg(long)]
        modes: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        coe: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Interferometer and squeezing shared by `prob` and `sample`.
#[derive(Args)]
struct Setup {
    /// Squeezing per input mode; missing trailing modes are vacuum.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    squeeze: Vec<f64>,
    /// Interferometer file (defaults to the identity).
    #[arg(long, conflicts_with = "haar_seed")]
    unitary: Option<PathBuf>,
    /// Use the Haar-random interferometer with this seed.
    #[arg(long)]
    haar_seed: Option<u64>,
}

#[derive(Serialize, Deserialize)]
struct SeededUnitary {
    seed: u64,
    unitary: InterferometerUnitary,
}

#[derive(Serialize)]
struct SeededCoe {
    seed: u64,
    modes: usize,
    coe: ComplexMatrix,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Display) -> Self {
        Self {
            code: 2,
            message: message.to_string(),
        }
    }
}

impl From<gbs_core::Error> for Failure {
    fn from(e: gbs_core::Error) -> Self {
        Self {
            code: if e.is_resource_cap() { 3 } else { 2 },
            message: e.to_string(),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn num(x: f64) -> String {
    format!("{x:.14e}")
}

fn complex(z: Complex64) -> String {
    if z.im == 0.0 {
        num(z.re)
    } else {
        let sign = if z.im.is_sign_negative() { '-' } else { '+' };
        format!("{}{sign}{}i", num(z.re), num(z.im.abs()))
    }
}

fn read_payload(path: &Path) -> CliResult<Value> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    match value {
        Value::Object(mut map) if map.contains_key("schema_version") => {
            let version = map.get("schema_version").and_then(Value::as_u64);
            if version != Some(io::SCHEMA_VERSION as u64) {
                return Err(Failure::input(format!(
                    "{}: unsupported schema_version (expected {})",
                    path.display(),
                    io::SCHEMA_VERSION
                )));
            }
            map.remove("payload")
                .ok_or_else(|| Failure::input(format!("{}: envelope without payload", path.display())))
        }
        other => Ok(other),
    }
}

fn parse<T: serde::de::DeserializeOwned>(value: Value, path: &Path) -> CliResult<T> {
    serde_json::from_value(value).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

/// Accepts the output of `gbs haar`, a serialized interferometer, or a bare matrix.
fn read_unitary(path: &Path) -> CliResult<InterferometerUnitary> {
    let value = read_payload(path)?;
    if let Some(inner) = value.get("unitary") {
        return parse(inner.clone(), path);
    }
    if value.get("t").is_some() {
        return parse(value, path);
    }
    Ok(InterferometerUnitary::new(parse(value, path)?)?)
}

fn build_setup(setup: &Setup, modes: usize) -> CliResult<(InterferometerUnitary, SqueezeParams, Option<u64>)> {
    if modes == 0 {
        return Err(Failure::input("at least one mode is required"));
    }
    if setup.squeeze.len() > modes {
        return Err(Failure::input(format!(
            "{} squeezing values given for {modes} modes",
            setup.squeeze.len()
        )));
    }
    let mut r = setup.squeeze.clone();
    r.resize(modes, 0.0);
    let params = SqueezeParams::new(r)?;
    let t = match (&setup.unitary, setup.haar_seed) {
        (Some(path), _) => read_unitary(path)?,
        (None, Some(seed)) => haar_unitary(modes, seed),
        (None, None) => InterferometerUnitary::identity(modes),
    };
    if t.modes() != modes {
        return Err(Failure::input(format!(
            "interferometer has {} modes, expected {modes}",
            t.modes()
        )));
    }
    Ok((t, params, setup.haar_seed))
}

fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    let cfg = Config::DEFAULT.with_hafnian_cap(cli.hafnian_cap);
    match &cli.command {
        Command::Haf { file, recursive } => {
            let a: ComplexMatrix = parse(read_payload(file)?, file)?;
            let h = hafnian_pmp_with(&a, &cfg)?;
            let other = if *recursive {
                Some(hafnian_recursive_with(&a, &cfg)?)
            } else {
                None
            };
            if cli.json {
                let mut rec = json!({ "hafnian": [h.re, h.im] });
                if let Some(r) = other {
                    rec["recursive"] = json!([r.re, r.im]);
                    rec["difference"] = json!((h - r).norm());
                }
                println!("{rec}");
            } else {
                println!("{}", complex(h));
                if let Some(r) = other {
                    println!("recursive {}", complex(r));
                    println!("difference {}", num((h - r).norm()));
                }
            }
        }
        Command::Prob {
            setup,
            pattern,
            general,
        } => {
            let pattern = PhotonPattern::new(pattern.clone());
            let (t, params, seed) = build_setup(setup, pattern.modes())?;
            if let Some(warning) = rank_deficiency_warning(&params, &pattern) {
                eprintln!("warning: {warning}");
            }
            let p = if *general {
                GeneralEvaluator::new(&output_state(&t, &params)?, &cfg)?.probability(&pattern)?
            } else {
                SqueezedEvaluator::new(&t, &params, &cfg)?.probability(&pattern)?
            };
            if cli.json {
                let rec = json!({
                    "pattern": pattern,
                    "squeeze": params,
                    "haar_seed": seed,
                    "probability": p,
                });
                println!("{rec}");
            } else {
                println!("{}", num(p));
            }
        }
        Command::Sample {
            setup,
            modes,
            cutoff,
            max_per_mode,
            draws,
            sample_seed,
            out,
        } => {
            let (t, params, seed) = build_setup(setup, *modes)?;
            let mut table = build_distribution_with(&t, &params, *cutoff, max_per_mode.unwrap_or(*cutoff), &cfg)?;
            if let Some(s) = seed {
                table = table.with_unitary_seed(s);
            }
            let samples = match (*draws, sample_seed) {
                (0, _) => None,
                (n, Some(s)) => Some(draw(&table, n, *s)),
                (_, None) => return Err(Failure::input("--sample-seed is required when --draws > 0")),
            };
            let summary = json!({
                "patterns": table.entries().len(),
                "residual": table.residual(),
                "draws": draws,
                "residual_draws": samples.as_ref().map(|s| s.residual_draws),
            });
            let text = io::to_json(&SamplingRun { table, samples })?;
            emit(&text, out.as_deref())?;
            if out.is_some() {
                if cli.json {
                    println!("{summary}");
                } else {
                    println!(
                        "tabulated {} patterns, residual {}, {} draws",
                        summary["patterns"],
                        num(summary["residual"].as_f64().unwrap_or(0.0)),
                        draws
                    );
                }
            }
        }
        Command::Compare {
            photons,
            squeezers,
            squeeze,
        } => {
            let (k, n, r) = (*squeezers, *photons, *squeeze);
            let p_k = ppe_distribution(&PpeDistributionSpec::new(k, r, n)?);
            let p_prob = pfbs_probability(k, n, r);
            let (exact, asymptotic) = generation_ratio(k, n)?;
            let (gbs, sbs) = sampling_space_sizes(n)?;
            if cli.json {
                let rec = json!({
                    "photons": n,
                    "squeezers": k,
                    "squeeze": r,
                    "p_k": p_k,
                    "p_prob": p_prob,
                    "ratio_exact": exact,
                    "ratio_asymptotic": asymptotic,
                    "space_gbs": gbs.to_string(),
                    "space_sbs": sbs.to_string(),
                });
                println!("{rec}");
            } else {
                println!("P_K(N)             {}", num(p_k));
                println!("P_prob(N)          {}", num(p_prob));
                println!("ratio exact        {}", num(exact));
                println!("ratio asymptotic   {}", num(asymptotic));
                println!("space gaussian     {gbs}");
                println!("space scattershot  {sbs}");
            }
        }
        Command::Haar {
            modes,
            seed,
            coe,
            out,
        } => {
            if *modes == 0 {
                return Err(Failure::input("at least one mode is required"));
            }
            let text = if *coe {
                io::to_json(&SeededCoe {
                    seed: *seed,
                    modes: *modes,
                    coe: coe_matrix(*modes, *seed),
                })?
            } else {
                io::to_json(&SeededUnitary {
                    seed: *seed,
                    unitary: haar_unitary(*modes, *seed),
                })?
            };
            emit(&text, out.as_deref())?;
        }
    }
    Ok(())
}

fn report(json: bool, f: &Failure) {
    if json {
        eprintln!("{}", json!({ "error": f.message, "exit_code": f.code }));
    } else {
        eprintln!("error: {}", f.message);
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            if std::env::args().any(|a| a == "--json") {
                report(true, &Failure::input(e.to_string().trim_end()));
            } else {
                let _ = e.print();
            }
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            report(cli.json, &f);
            ExitCode::from(f.code)
        }
    }
}
