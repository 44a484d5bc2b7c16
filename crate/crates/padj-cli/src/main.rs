use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use padj::scenario::{error_json, exit_code, run_scenario, Format, PrecisionOverrides, ScenarioConfig};
use padj::Error;

/// Desk-scale p-adic adjoint L-function scenarios.
#[derive(Parser)]
#[command(name = "padj", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    global: Global,
}

#[derive(Args)]
struct Global {
    /// p-adic precision N
    #[arg(long = "precision-N", global = true)]
    precision_n: Option<i64>,
    /// disk truncation M (u^M)
    #[arg(long = "precision-M", global = true)]
    precision_m: Option<usize>,
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    #[arg(long, global = true)]
    csv: bool,
    /// write the report here instead of stdout
    #[arg(long, short, global = true)]
    output: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Family twisted pairing [Phi+, Phi-] on the slope <= nu cuspidal part
    Pair {
        #[arg(long)]
        level: i64,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        k: i64,
        #[arg(long, default_value = "0.5")]
        nu: String,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        ell: i64,
    },
    /// Local zeta integrals I1, I2 and Psi(1) in closed form
    Zeta {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        terms: Option<usize>,
    },
    /// Noether different, scalar-product ideal and ramification of a finite algebra
    Different {
        #[arg(long)]
        algebra: String,
    },
    /// Newton polygon and slope projector of a rational matrix
    Slope {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        nu: String,
        /// JSON rows, e.g. '[["1","0"],["0","3"]]'
        #[arg(long)]
        matrix: String,
    },
    /// Classical weights on the disk around a center
    Weights {
        #[arg(long)]
        p: u64,
        #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0, 0], allow_negative_numbers = true)]
        center: Vec<i64>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        lambdas: Option<Vec<i64>>,
    },
    /// Run a JSON scenario config
    Run {
        #[arg(long)]
        config: String,
    },
}

fn build_config(cli: Cli) -> Result<ScenarioConfig, Error> {
    let g = cli.global;
    let format = if g.json {
        Some(Format::Json)
    } else if g.csv {
        Some(Format::Csv)
    } else {
        None
    };
    let (scenario, params) = match cli.cmd {
        Cmd::Run { config } => {
            let text = std::fs::read_to_string(&config).map_err(|e| Error::Invalid(format!("{}: {}", config, e)))?;
            let mut cfg: ScenarioConfig = serde_json::from_str(&text).map_err(|e| Error::Invalid(format!("config: {}", e)))?;
            cfg.precision.n = g.precision_n.or(cfg.precision.n);
            cfg.precision.m = g.precision_m.or(cfg.precision.m);
            cfg.format = format.or(cfg.format);
            cfg.output = g.output.or(cfg.output);
            return Ok(cfg);
        }
        Cmd::Pair { level, p, k, nu, ell } => ("pair", json!({"level": level, "p": p, "k": k, "nu": nu, "ell": ell})),
        Cmd::Zeta { alpha, beta, q, terms } => ("zeta", json!({"alpha": alpha, "beta": beta, "q": q, "terms": terms})),
        Cmd::Different { algebra } => ("different", json!({ "algebra": algebra })),
        Cmd::Slope { p, nu, matrix } => {
            let m: serde_json::Value = serde_json::from_str(&matrix).map_err(|e| Error::Invalid(format!("--matrix: {}", e)))?;
            ("slope", json!({"p": p, "nu": nu, "matrix": m}))
        }
        Cmd::Weights { p, center, lambdas } => ("weights", json!({"p": p, "center": center, "lambdas": lambdas})),
    };
    Ok(ScenarioConfig {
        scenario: scenario.into(),
        params,
        output: g.output,
        format,
        precision: PrecisionOverrides { n: g.precision_n, m: g.precision_m },
    })
}

fn run(cli: Cli) -> Result<(), Error> {
    let cfg = build_config(cli)?;
    let text = run_scenario(&cfg)?.render(cfg.format);
    match &cfg.output {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Invalid(format!("{}: {}", path, e))),
        None => {
            print!("{}", text);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprint!("{}", error_json(&e));
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
