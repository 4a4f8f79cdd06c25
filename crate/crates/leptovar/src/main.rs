//! Thin command-line wrapper: parses flags into a [`leptovar::cli::RunConfig`]
//! and dispatches to the library.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use leptovar::cli::{self, Command, OutputFormat, RunConfig};

#[derive(Parser)]
#[command(
    name = "leptovar",
    version,
    about = "Regression-tree lepto/macro variance analysis of numeric series"
)]
struct Args {
    #[command(subcommand)]
    command: Cli,
}

#[derive(clap::Args, Debug)]
struct InputArgs {
    /// CSV file to analyze
    #[arg(long)]
    input: PathBuf,
    /// Field delimiter
    #[arg(long, default_value = ",")]
    delimiter: char,
    /// Treat the first row as data, not a header
    #[arg(long)]
    no_header: bool,
    /// Name of a date/index column to exclude from the panel
    #[arg(long)]
    index_col: Option<String>,
}

#[derive(clap::Args, Debug)]
struct OutputArgs {
    /// Output format
    #[arg(long, default_value = "text")]
    format: String,
    /// Write output to a file instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cli {
    /// Descriptive statistics and correlations of a CSV panel
    Describe {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Fit a greedy regression tree and render it (text, json or dot)
    Fit {
        #[command(flatten)]
        input: InputArgs,
        /// Target column name
        #[arg(long)]
        target: String,
        /// Comma-separated feature column names
        #[arg(long, value_delimiter = ',')]
        features: Vec<String>,
        /// Maximum tree depth
        #[arg(long, default_value_t = 1)]
        depth: usize,
        /// Minimum samples per leaf
        #[arg(long, default_value_t = 1)]
        min_leaf: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Lepto/macro variance decomposition of a target against itself
    Lepto {
        #[command(flatten)]
        input: InputArgs,
        /// Target column name
        #[arg(long)]
        target: String,
        /// Maximum decomposition depth
        #[arg(long, default_value_t = 1)]
        depth: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Rank feature sets by the fraction of macro-variance they explain
    Rank {
        #[command(flatten)]
        input: InputArgs,
        /// Target column name
        #[arg(long)]
        target: String,
        /// Semicolon-separated feature sets, each a comma-separated list
        #[arg(long)]
        sets: String,
        /// Tree depth for every feature set
        #[arg(long, default_value_t = 1)]
        depth: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Randomized oracle property suites and the conjecture sweep
    Verify {
        /// Trials per suite (or sweep trials with --conjecture)
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Seed for all randomized trials
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Run the average-depth conjecture sweep instead of the suites
        #[arg(long)]
        conjecture: bool,
        /// Maximum series length for conjecture trials
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// Tree depth for conjecture trials
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Recompute the built-in worked example and check its reference values
    #[command(name = "paper-demo")]
    PaperDemo {
        /// Also write the bundled 8-day panel to this CSV path
        #[arg(long)]
        emit_csv: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse()
}

fn parse_sets(spec: &str) -> Vec<Vec<String>> {
    spec.split(';')
        .filter(|part| !part.trim().is_empty())
        .map(|part| {
            part.split(',')
                .map(|name| name.trim().to_string())
                .filter(|name| !name.is_empty())
                .collect()
        })
        .collect()
}

fn build_config(cli: Cli) -> Result<RunConfig, String> {
    let apply_input = |config: &mut RunConfig, input: InputArgs| -> Result<(), String> {
        if !input.delimiter.is_ascii() {
            return Err(format!("delimiter must be ASCII, got {:?}", input.delimiter));
        }
        config.input = Some(input.input);
        config.delimiter = input.delimiter as u8;
        config.has_header = !input.no_header;
        config.index_column = input.index_col;
        Ok(())
    };
    let config = match cli {
        Cli::Describe { input, output } => {
            let mut config = RunConfig::new(Command::Describe);
            apply_input(&mut config, input)?;
            config.format = parse_format(&output.format)?;
            config.out = output.out;
            config
        }
        Cli::Fit {
            input,
            target,
            features,
            depth,
            min_leaf,
            output,
        } => {
            let mut config = RunConfig::new(Command::Fit);
            apply_input(&mut config, input)?;
            config.target = Some(target);
            config.features = features;
            config.depth = depth;
            config.min_leaf = min_leaf;
            config.format = parse_format(&output.format)?;
            config.out = output.out;
            config
        }
        Cli::Lepto {
            input,
            target,
            depth,
            output,
        } => {
            let mut config = RunConfig::new(Command::Lepto);
            apply_input(&mut config, input)?;
            config.target = Some(target);
            config.depth = depth;
            config.format = parse_format(&output.format)?;
            config.out = output.out;
            config
        }
        Cli::Rank {
            input,
            target,
            sets,
            depth,
            output,
        } => {
            let mut config = RunConfig::new(Command::Rank);
            apply_input(&mut config, input)?;
            config.target = Some(target);
            config.feature_sets = parse_sets(&sets);
            config.depth = depth;
            config.format = parse_format(&output.format)?;
            config.out = output.out;
            config
        }
        Cli::Verify {
            trials,
            seed,
            conjecture,
            n,
            depth,
            output,
        } => {
            let mut config = RunConfig::new(Command::Verify);
            config.trials = trials;
            config.seed = seed;
            config.conjecture = conjecture;
            config.sample_size = n;
            config.depth = depth;
            config.format = parse_format(&output.format)?;
            config.out = output.out;
            config
        }
        Cli::PaperDemo { emit_csv, output } => {
            let mut config = RunConfig::new(Command::PaperDemo);
            config.emit_csv = emit_csv;
            config.format = parse_format(&output.format)?;
            config.out = output.out;
            config
        }
    };
    Ok(config)
}

fn configure_threads() {
    if let Ok(value) = std::env::var("LEPTOVAR_THREADS") {
        match value.parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("warning: ignoring invalid LEPTOVAR_THREADS={value:?}"),
        }
    }
}

fn main() -> ExitCode {
    configure_threads();
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(cli::EXIT_USAGE as u8);
        }
    };
    match build_config(args.command) {
        Ok(config) => ExitCode::from(cli::run(&config) as u8),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(cli::EXIT_USAGE as u8)
        }
    }
}
