use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use unitary_shield::channels::{make_channel, ChannelKind};
use unitary_shield::circuits::u_prep;
use unitary_shield::estimation::{fidelity_exact, fidelity_sampled, Mode};
use unitary_shield::harness::{
    self, parse_p_grid, render, run_sweep, OutputFormat, SweepConfig, DEFAULT_BASE_SEED,
};
use unitary_shield::optimizer::{calibrate_xi_sampled, optimize_xi_exact, EXACT_GRID_POINTS};
use unitary_shield::schemes::{input_state, resolve_scheme, run_protected, Scheme};
use unitary_shield::{validation, Error};

const OUT_DIR_ENV: &str = "UNITARY_SHIELD_OUT_DIR";

/// Simulate unitary pre/post-processing around single-qubit noise.
///
/// Defaults: θ = 2π/3 for the input state and 10000 shots per sampled
/// estimate. Registers of n = 2 (default) and n = 4 qubits are the standard
/// sizes.
#[derive(Parser, Debug)]
#[command(name = "unitary-shield", version, about, long_about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep fidelity against noise strength for several schemes and channels.
    Sweep(SweepArgs),
    /// Evaluate one (scheme, channel, p) point and print F.
    Run(RunArgs),
    /// Find the collective angle ξ maximizing the exact fidelity.
    Optimize(PointArgs),
    /// Scan ξ with shot-sampled fidelities and report the best grid angle.
    Calibrate(CalibrateArgs),
    /// Run the internal invariant checks.
    Validate(FormatArg),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatChoice {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum TextOrJson {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeChoice {
    Exact,
    Sampled,
}

impl From<ModeChoice> for Mode {
    fn from(m: ModeChoice) -> Self {
        match m {
            ModeChoice::Exact => Mode::Exact,
            ModeChoice::Sampled => Mode::Sampled,
        }
    }
}

#[derive(Args, Debug)]
struct FormatArg {
    /// Output format.
    #[arg(long, value_enum, default_value_t = TextOrJson::Text)]
    format: TextOrJson,
}

#[derive(Args, Debug)]
struct SystemArgs {
    /// Number of qubits (standard sizes: 2 and 4).
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u16).range(1..=10))]
    n: u16,
    /// Input-state angle in radians; accepts forms such as `2pi/3` or `-pi/4`.
    #[arg(long, default_value = "2pi/3", value_parser = parse_angle, allow_hyphen_values = true)]
    theta: f64,
}

#[derive(Args, Debug)]
struct SamplingArgs {
    /// Shots per sampled estimate.
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    shots: u64,
    /// Base seed for shot sampling.
    #[arg(long, default_value_t = DEFAULT_BASE_SEED)]
    seed: u64,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Comma-separated noise channels.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "amplitude-damping,dephasing,depolarizing"
    )]
    channels: Vec<ChannelKind>,
    /// Comma-separated schemes.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "unprotected,ind-ind,ind-coll,coll-ind,coll-coll"
    )]
    schemes: Vec<Scheme>,
    /// Noise strengths as `start:stop:count`.
    #[arg(long, default_value = "0:1:21", value_parser = parse_grid)]
    p_grid: Grid,
    /// Fidelity estimator.
    #[arg(long, value_enum, default_value_t = ModeChoice::Exact)]
    mode: ModeChoice,
    #[command(flatten)]
    sampling: SamplingArgs,
    /// Use ξ = 0 instead of optimizing it per strength.
    #[arg(long)]
    no_optimize_xi: bool,
    /// Worker threads (default: all cores; 1 runs sequentially).
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    width: Option<u16>,
    /// Output file. Without it, output goes to the directory in
    /// UNITARY_SHIELD_OUT_DIR if set, else to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Default output directory.
    #[arg(long, env = OUT_DIR_ENV, hide_env_values = true)]
    out_dir: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatChoice::Csv)]
    format: FormatChoice,
}

#[derive(Clone, Debug)]
struct Grid(Vec<f64>);

fn parse_grid(s: &str) -> Result<Grid, String> {
    parse_p_grid(s).map(Grid).map_err(|e| e.to_string())
}

#[derive(Args, Debug)]
struct PointArgs {
    /// Protection scheme.
    #[arg(long)]
    scheme: Scheme,
    /// Noise channel.
    #[arg(long)]
    channel: ChannelKind,
    /// Noise strength in [0, 1].
    #[arg(long, value_parser = parse_strength)]
    p: f64,
    #[command(flatten)]
    system: SystemArgs,
    /// Output format.
    #[arg(long, value_enum, default_value_t = TextOrJson::Text)]
    format: TextOrJson,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    point: PointArgs,
    /// Fidelity estimator.
    #[arg(long, value_enum, default_value_t = ModeChoice::Exact)]
    mode: ModeChoice,
    #[command(flatten)]
    sampling: SamplingArgs,
    /// Collective angle in radians; optimized when omitted.
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    xi: Option<f64>,
}

#[derive(Args, Debug)]
struct CalibrateArgs {
    #[command(flatten)]
    point: PointArgs,
    #[command(flatten)]
    sampling: SamplingArgs,
    /// Number of ξ grid points over [−π, π).
    #[arg(long, default_value_t = EXACT_GRID_POINTS as u32,
          value_parser = clap::value_parser!(u32).range(3..=100_000))]
    grid_points: u32,
}

fn parse_strength(s: &str) -> Result<f64, String> {
    let p: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("'{s}' is not a number"))?;
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(format!("{p} is outside [0, 1]"))
    }
}

/// Parses a radian value written as a plain number or as `[a][*]pi[/b]`.
fn parse_angle(s: &str) -> Result<f64, String> {
    let t: String = s
        .trim()
        .to_ascii_lowercase()
        .replace('π', "pi")
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect();
    let bad = || format!("'{s}' is not an angle (examples: 2.0944, 2pi/3, -pi/4)");
    let value = match t.split_once("pi") {
        None => t.parse::<f64>().map_err(|_| bad())?,
        Some((coef, rest)) => {
            let coef = coef.strip_suffix('*').unwrap_or(coef);
            let a = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| bad())?,
            };
            let b = match rest {
                "" => 1.0,
                r => r
                    .strip_prefix('/')
                    .and_then(|d| d.parse::<f64>().ok())
                    .filter(|d| *d != 0.0)
                    .ok_or_else(bad)?,
            };
            a * PI / b
        }
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::Input(_) => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn print_json(v: &serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(v).expect("json value serializes")
    );
}

fn sweep(args: SweepArgs) -> Result<ExitCode, Error> {
    let cfg = SweepConfig {
        n: args.system.n.into(),
        theta: args.system.theta,
        kinds: args.channels,
        schemes: args.schemes,
        p_grid: args.p_grid.0,
        mode: args.mode.into(),
        shots: args.sampling.shots,
        base_seed: args.sampling.seed,
        optimize_xi: !args.no_optimize_xi,
        width: args.width.map(usize::from),
    };
    let format = match args.format {
        FormatChoice::Csv => OutputFormat::Csv,
        FormatChoice::Json => OutputFormat::Json,
    };
    let report = run_sweep(&cfg)?;
    for f in &report.failures {
        eprintln!("point failed: {f}");
    }
    let target = args.out.or_else(|| {
        args.out_dir.map(|dir| {
            dir.join(format!(
                "sweep-n{}-{}.{}",
                cfg.n,
                cfg.mode,
                format.extension()
            ))
        })
    });
    match target {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|source| Error::Io {
                    path: parent.to_path_buf(),
                    source,
                })?;
            }
            harness::serialize(&report.curves, format, &path)?;
            eprintln!("wrote {}", path.display());
        }
        None => {
            let text = render(&report.curves, format)?;
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|source| Error::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })?;
        }
    }
    Ok(if report.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn run(args: RunArgs) -> Result<ExitCode, Error> {
    let pt = &args.point;
    let n = usize::from(pt.system.n);
    let theta = pt.system.theta;
    let xi = match args.xi {
        Some(xi) => xi,
        None if pt.scheme.uses_xi() => {
            optimize_xi_exact(pt.scheme, pt.channel, pt.p, n, theta)?.xi_star
        }
        None => 0.0,
    };
    let inst = resolve_scheme(pt.scheme, pt.channel, n, theta, xi)?;
    let psi = input_state(n, theta)?;
    let rho = run_protected(&inst, &make_channel(pt.channel, pt.p)?, &psi)?;
    let mode = Mode::from(args.mode);
    let est = match mode {
        Mode::Exact => fidelity_exact(&psi, &rho)?,
        Mode::Sampled => fidelity_sampled(
            &u_prep(n, theta)?,
            &rho,
            args.sampling.shots,
            args.sampling.seed,
        )?,
    };
    match pt.format {
        TextOrJson::Text => {
            println!("F = {:.12}", est.value);
            if mode == Mode::Sampled {
                println!("stderr = {:.12}", est.stderr);
            }
            if pt.scheme.uses_xi() {
                println!("xi = {:.12}", xi);
            }
        }
        TextOrJson::Json => print_json(&json!({
            "scheme": pt.scheme,
            "kind": pt.channel,
            "n": n,
            "theta": theta,
            "p": pt.p,
            "xi": xi,
            "mode": mode,
            "fidelity": est.value,
            "stderr": est.stderr,
            "shots": est.shots,
            "seed": est.seed,
        })),
    }
    Ok(ExitCode::SUCCESS)
}

fn optimize(args: PointArgs) -> Result<ExitCode, Error> {
    let n = usize::from(args.system.n);
    let opt = optimize_xi_exact(args.scheme, args.channel, args.p, n, args.system.theta)?;
    match args.format {
        TextOrJson::Text => {
            println!("xi* = {:.12}", opt.xi_star);
            println!("F* = {:.12}", opt.f_star);
            println!("evaluations = {}", opt.evaluations);
        }
        TextOrJson::Json => print_json(&json!(opt)),
    }
    Ok(ExitCode::SUCCESS)
}

fn calibrate(args: CalibrateArgs) -> Result<ExitCode, Error> {
    let pt = &args.point;
    let cal = calibrate_xi_sampled(
        pt.scheme,
        pt.channel,
        pt.p,
        usize::from(pt.system.n),
        pt.system.theta,
        args.sampling.shots,
        args.sampling.seed,
        args.grid_points as usize,
    )?;
    match pt.format {
        TextOrJson::Text => {
            println!("xi* = {:.12}", cal.optimum.xi_star);
            println!("F* = {:.12}", cal.optimum.f_star);
            println!("xi,fidelity,stderr");
            for c in &cal.curve {
                println!("{:.12},{:.12},{:.12}", c.xi, c.fidelity, c.stderr);
            }
        }
        TextOrJson::Json => print_json(&json!(cal)),
    }
    Ok(ExitCode::SUCCESS)
}

fn validate(args: FormatArg) -> ExitCode {
    let results = validation::run_checks();
    let all_passed = results.iter().all(|r| r.passed);
    match args.format {
        TextOrJson::Text => {
            for r in &results {
                let tag = if r.passed { "PASS" } else { "FAIL" };
                println!("{tag} {:<34} {}", r.name, r.detail);
            }
        }
        TextOrJson::Json => print_json(&json!({ "passed": all_passed, "checks": results })),
    }
    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Sweep(a) => sweep(a),
        Command::Run(a) => run(a),
        Command::Optimize(a) => optimize(a),
        Command::Calibrate(a) => calibrate(a),
        Command::Validate(a) => Ok(validate(a)),
    };
    outcome.unwrap_or_else(fail)
}
