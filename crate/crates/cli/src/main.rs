use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use blanket_lab::io::{parse_config, ConfigError, Flags, Format, GLOBAL_KEYS};
use blanket_lab_cli::{replay, run_and_emit, schema, CliError};

#[derive(Parser)]
#[command(name = "blanket-lab", version, about = "Blanket times, cover times and local times of random walks on critical random graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Jsonl,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed (default: drawn from OS entropy and recorded in the manifest).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0: one per core).
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory (default `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record stream format.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Command parameter `key=value`; repeatable. `blanket-lab keys <command>` lists them.
    #[arg(short = 'p', long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Statistics of an input graph or a sampled model instance.
    Graph(Common),
    /// Conditioned Galton-Watson trees.
    Tree(Common),
    /// Critical random graphs and their component sizes.
    Gen(Common),
    /// One random walk and its local times.
    Walk(Common),
    /// Blanket-time replicates.
    Blanket(Common),
    /// Brownian excursion, its discretized tree and continuum blanket times.
    Excursion(Common),
    /// Coupled distance bounds along a ladder of finite trees.
    Compare(Common),
    /// A scaling experiment plan.
    Experiment(Common),
    /// Re-run from a manifest and check the outputs are identical.
    Replay {
        manifest: PathBuf,
        /// Also write the replayed outputs here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Document the keys of a command.
    Keys { command: String },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (name, common) = match cli.command {
        Command::Graph(c) => ("graph", c),
        Command::Tree(c) => ("tree", c),
        Command::Gen(c) => ("gen", c),
        Command::Walk(c) => ("walk", c),
        Command::Blanket(c) => ("blanket", c),
        Command::Excursion(c) => ("excursion", c),
        Command::Compare(c) => ("compare", c),
        Command::Experiment(c) => ("experiment", c),
        Command::Replay { manifest, out, threads } => {
            let bad = replay(&manifest, out, threads)?;
            if bad.is_empty() {
                println!("replay identical");
                return Ok(());
            }
            return Err(CliError::Runtime(format!("replay differs in {}", bad.join(", "))));
        }
        Command::Keys { command } => {
            let keys = schema(&command).ok_or_else(|| ConfigError::Malformed(format!("unknown command `{command}`")))?;
            for k in keys {
                println!("{:<12} {:<6} default {:<28} {}", k.name, format!("{:?}", k.kind).to_lowercase(), k.default, k.doc);
            }
            println!("global keys: {}", GLOBAL_KEYS.join(", "));
            return Ok(());
        }
    };
    let keys = schema(name).expect("every subcommand has a schema");
    let mut params = Vec::new();
    for p in &common.params {
        let (k, v) = p.split_once('=').ok_or_else(|| ConfigError::Malformed(format!("parameter `{p}` is not key=value")))?;
        params.push((k.trim().to_string(), v.to_string()));
    }
    let flags = Flags {
        seed: common.seed,
        threads: common.threads,
        out: common.out,
        format: common.format.map(|f| match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Jsonl => Format::Jsonl,
        }),
        params,
    };
    let file = match &common.config {
        Some(path) => Some(std::fs::read_to_string(path).map_err(|e| ConfigError::Malformed(format!("{}: {e}", path.display())))?),
        None => None,
    };
    let config = parse_config(name, &keys, &flags, file.as_deref())?;
    let (manifest, report) = run_and_emit(&config)?;
    println!("{report}");
    println!("wrote {} files and manifest to {} (seed {})", manifest.checksums.len(), config.out.display(), config.master_seed);
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
