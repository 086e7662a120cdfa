use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use grovertails::config::{
    parse_complex, parse_complex_list, parse_vertex_list, DEFAULT_TOL, DEFAULT_TRUNCATION,
};
use grovertails::matrix_text::write_matrix;
use grovertails::{export, run, Mode, OutputFormat, RunConfig, RunError, RunOutput};
use grovertails::{EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE};
use serde_json::json;

/// Driven Grover walks on graphs with semi-infinite tails: stationary
/// states, scattering, spectra and flow-law verification.
#[derive(Parser, Debug)]
#[command(name = "grovertails", version)]
struct Cli {
    /// Edge-list file: one `u v` pair per line, `#` comments
    #[arg(long, env = "GROVERTAILS_GRAPH")]
    graph: PathBuf,

    /// Tail attachment vertices, e.g. "0,1"
    #[arg(long, env = "GROVERTAILS_TAILS")]
    tails: String,

    /// Inflow amplitude per tail, e.g. "1+0i,0" (default: unit inflow on the first tail)
    #[arg(long, env = "GROVERTAILS_INFLOW")]
    inflow: Option<String>,

    /// Drive frequency on the unit circle
    #[arg(long, env = "GROVERTAILS_Z", default_value = "1")]
    z: String,

    #[arg(long, value_enum, env = "GROVERTAILS_MODE", default_value = "all")]
    mode: Mode,

    /// Step budget for evolve (default: chosen from the spectral gap)
    #[arg(long, env = "GROVERTAILS_STEPS")]
    steps: Option<usize>,

    /// Convergence tolerance for evolve
    #[arg(long, env = "GROVERTAILS_TOL", default_value_t = DEFAULT_TOL)]
    tol: f64,

    /// Tail length of the truncated unitary cross-check
    #[arg(long, env = "GROVERTAILS_TRUNCATION", default_value_t = DEFAULT_TRUNCATION)]
    truncation: usize,

    #[arg(long, value_enum, env = "GROVERTAILS_FORMAT", default_value = "json")]
    format: OutputFormat,

    /// Seed for the random cut subsets of the conservation check
    #[arg(long, env = "GROVERTAILS_SEED", default_value_t = 0)]
    seed: u64,

    /// Write the report here instead of stdout
    #[arg(long, env = "GROVERTAILS_OUT")]
    out: Option<PathBuf>,

    /// Also dump the walk operators as text matrices into this directory
    #[arg(long, env = "GROVERTAILS_DUMP_OPERATORS")]
    dump_operators: Option<PathBuf>,
}

impl Cli {
    fn to_config(&self) -> Result<RunConfig, RunError> {
        let mut cfg = RunConfig::new(&self.graph, parse_vertex_list(&self.tails)?, self.mode);
        cfg.inflow = self.inflow.as_deref().map(parse_complex_list).transpose()?;
        cfg.z = parse_complex(&self.z)?;
        cfg.steps = self.steps;
        cfg.tol = self.tol;
        cfg.truncation = self.truncation;
        cfg.format = self.format;
        cfg.seed = self.seed;
        cfg.out = self.out.clone();
        Ok(cfg)
    }
}

fn diagnostic(kind: &str, message: &str) {
    eprintln!("{}", json!({ "error": kind, "message": message }));
}

fn dump_operators(dir: &Path, output: &RunOutput) -> anyhow::Result<()> {
    let Some(a) = &output.analysis else {
        return Ok(());
    };
    let ops = a.operators();
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (name, m) in [
        ("k", &ops.k),
        ("s", &ops.s),
        ("c_prime", &ops.c_prime),
        ("e_pon", &ops.e_pon),
        ("d", &ops.d),
        ("t", &ops.t),
        ("e_gon", &ops.e_gon),
        ("l", &ops.l),
    ] {
        let path = dir.join(format!("{name}.txt"));
        std::fs::write(&path, write_matrix(m))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn emit(cli: &Cli, cfg: &RunConfig, output: &RunOutput) -> anyhow::Result<()> {
    let body = match cfg.format {
        OutputFormat::Json => serde_json::to_string_pretty(&output.report)? + "\n",
        OutputFormat::Csv => export::to_csv(output, cfg.mode)?,
    };
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{body}"),
    }
    if let Some(dir) = &cli.dump_operators {
        dump_operators(dir, output)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::from(EXIT_OK);
        }
        Err(e) => {
            let text = e.to_string();
            diagnostic(
                "UsageError",
                text.lines().next().unwrap_or("invalid arguments"),
            );
            return ExitCode::from(EXIT_USAGE);
        }
    };

    let output = match cli
        .to_config()
        .and_then(|cfg| run(&cfg).map(|out| (cfg, out)))
    {
        Ok(pair) => pair,
        Err(e) => {
            diagnostic(&e.kind(), &e.to_string());
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let (cfg, output) = output;

    if let Err(e) = emit(&cli, &cfg, &output) {
        diagnostic("IoError", &format!("{e:#}"));
        return ExitCode::from(EXIT_USAGE);
    }
    for f in &output.report.failures {
        eprintln!(
            "{}",
            json!({ "error": f.kind, "stage": f.stage, "message": f.message })
        );
    }
    if output.report.passed {
        ExitCode::from(EXIT_OK)
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    }
}
