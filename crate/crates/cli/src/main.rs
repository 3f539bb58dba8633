mod commands;
mod config;
mod forms;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{CliError, CliResult, RunConfig};

/// Coefficients, mean values and sign statistics of automorphic-style
/// L-function coefficients.
#[derive(Parser)]
#[command(name = "lsign", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Flat TOML file of settings; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    output: Option<String>,
    /// csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Write λ(n) for n ≤ limit as CSV `n,lambda`.
    Coeffs {
        /// delta, sym:k, ones, squarefree, mobius or piltz:κ.
        #[arg(long)]
        form: Option<String>,
        #[arg(long)]
        limit: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Compare partial sums of a non-negative multiplicative function with
    /// the predicted main term.
    Moments {
        /// ones, squarefree, divisor, piltz:κ, delta-sq or delta-sq-over-divisor.
        #[arg(long)]
        f: Option<String>,
        /// Mean exponent κ of the main term (defaults to the target's own).
        #[arg(long)]
        kappa: Option<String>,
        /// x grid: `1e5,1e6`, `1e3..1e7` (decades) or `1e3..1e7:9`.
        #[arg(long)]
        x: Option<String>,
        /// Error function, e.g. power:0.5.
        #[arg(long = "R")]
        r: Option<String>,
        /// S for Σ f(n), s for Σ f(n)/n.
        #[arg(long)]
        kind: Option<String>,
        /// Primes used in the Euler product (defaults to the largest x).
        #[arg(long = "prime-limit")]
        prime_limit: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Count positive, negative and zero coefficients and sign changes.
    Signs {
        #[arg(long)]
        form: Option<String>,
        #[arg(long)]
        x: Option<String>,
        /// Degree used in the lower bound (defaults to the form's degree).
        #[arg(long)]
        m: Option<String>,
        #[arg(long)]
        limit: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Prime-sum and growth diagnostics.
    Diag {
        #[command(subcommand)]
        which: Diag,
    },
}

#[derive(Subcommand)]
enum Diag {
    /// Prime number theorem sums Σ|a(p)|² log p and Σ Λ(n)a(n).
    Pnt {
        #[arg(long)]
        form: Option<String>,
        #[arg(long)]
        x: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Partial sums Σ_p |a(p^ν)|² (log p)² / p^ν.
    #[command(name = "hyp-h")]
    HypH {
        #[arg(long)]
        form: Option<String>,
        #[arg(long)]
        nu: Option<String>,
        #[arg(long)]
        x: Option<String>,
        /// Use a single log p.
        #[arg(long)]
        weak: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Running constants of the four growth estimates for an error function.
    Lemma25 {
        #[arg(long = "R")]
        r: Option<String>,
        #[arg(long)]
        z: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

type Runner = fn(&RunConfig) -> CliResult<()>;

fn resolve(
    command: &str,
    keys: &[&str],
    defaults: &[(&str, &str)],
    common: Common,
    mut flags: Vec<(&'static str, Option<String>)>,
) -> CliResult<RunConfig> {
    let mut allowed = vec!["output", "format", "threads"];
    allowed.extend_from_slice(keys);
    flags.push(("output", common.output));
    flags.push(("format", common.format));
    flags.push(("threads", common.threads));
    RunConfig::resolve(command, &allowed, defaults, common.config.as_deref(), flags)
}

fn plan(cmd: Command) -> CliResult<(RunConfig, Runner)> {
    Ok(match cmd {
        Command::Coeffs { form, limit, common } => (
            resolve(
                "coeffs",
                &["form", "limit"],
                &[("form", "delta"), ("format", "csv")],
                common,
                vec![("form", form), ("limit", limit)],
            )?,
            commands::coeffs,
        ),
        Command::Moments { f, kappa, x, r, kind, prime_limit, common } => (
            resolve(
                "moments",
                &["f", "kappa", "x", "R", "kind", "prime-limit"],
                &[("R", "power:0.5"), ("kind", "S")],
                common,
                vec![("f", f), ("kappa", kappa), ("x", x), ("R", r), ("kind", kind), ("prime-limit", prime_limit)],
            )?,
            commands::moments,
        ),
        Command::Signs { form, x, m, limit, common } => (
            resolve(
                "signs",
                &["form", "x", "m", "limit"],
                &[("form", "delta")],
                common,
                vec![("form", form), ("x", x), ("m", m), ("limit", limit)],
            )?,
            commands::signs,
        ),
        Command::Diag { which: Diag::Pnt { form, x, common } } => (
            resolve("diag pnt", &["form", "x"], &[("form", "delta")], common, vec![("form", form), ("x", x)])?,
            commands::pnt,
        ),
        Command::Diag { which: Diag::HypH { form, nu, x, weak, common } } => (
            resolve(
                "diag hyp-h",
                &["form", "nu", "x", "weak"],
                &[("form", "delta"), ("nu", "2")],
                common,
                vec![("form", form), ("nu", nu), ("x", x), ("weak", weak.then(|| "true".to_string()))],
            )?,
            commands::hyp_h,
        ),
        Command::Diag { which: Diag::Lemma25 { r, z, common } } => (
            resolve("diag lemma25", &["R", "z"], &[], common, vec![("R", r), ("z", z)])?,
            commands::lemma25,
        ),
    })
}

fn run(cli: Cli) -> CliResult<()> {
    let (cfg, runner) = plan(cli.command)?;
    if let Some(n) = cfg.threads()? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    runner(&cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lsign: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
