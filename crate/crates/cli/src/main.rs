//! `chainnet`: validate, count, compare and parse sense-forest annotations.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "chainnet", version, about = "Sense-forest annotation toolkit")]
pub struct Cli {
    /// TOML file whose keys mirror long flags (top-level `seed`, one table per subcommand)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Seed for every random choice
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check annotation files against the forest invariants
    Validate {
        /// Annotation files (.json, .jsonl) or directories
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Corpus statistics for annotation files
    Stats {
        #[arg(long, required = true, num_args = 1..)]
        annotations: Vec<PathBuf>,
    },
    /// Count possible annotations of a word with N senses
    Count {
        #[arg(long)]
        senses: usize,
        /// Edge labels
        #[arg(long, default_value_t = 2)]
        labels: u32,
        /// Also enumerate every forest and report the tally
        #[arg(long)]
        enumerate: bool,
        /// Also count forests the annotation interface can build without conduits
        #[arg(long)]
        constructible: bool,
    },
    /// Inter-annotator agreement
    Agree {
        /// One or more files; records are grouped by their annotator field
        #[arg(long, required = true, num_args = 1..)]
        annotations: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "all,ap,ac")]
        filters: Vec<chainnet::agreement::Filter>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Merge split senses and remove virtual ones
    Preprocess {
        #[arg(long, required = true, num_args = 1..)]
        annotations: Vec<PathBuf>,
        /// Output JSONL
        #[arg(long)]
        out: PathBuf,
    },
    /// Filter inventory words and split them 80/10/10
    Split {
        /// WordNet directory or JSON inventory
        #[arg(long, required_unless_present = "words")]
        inventory: Option<PathBuf>,
        /// Use this word list instead of filtering the inventory
        #[arg(long)]
        words: Option<PathBuf>,
        /// Directory for train.txt, dev.txt and test.txt
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a parser
    Train(TrainArgs),
    /// Parse words with a trained model
    Parse {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        embeddings: PathBuf,
        /// Sense lists from an inventory
        #[arg(long, required_unless_present = "annotations")]
        inventory: Option<PathBuf>,
        /// Sense lists from annotations (after preprocessing)
        #[arg(long, num_args = 1..)]
        annotations: Vec<PathBuf>,
        /// Restrict to these words
        #[arg(long)]
        words: Option<PathBuf>,
        /// Emit the 1-best parse and its alternatives
        #[arg(long)]
        n_best: bool,
        /// Output JSONL (default stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score models against gold annotations
    Evaluate {
        #[arg(long, required = true, num_args = 1..)]
        annotations: Vec<PathBuf>,
        #[arg(long)]
        embeddings: PathBuf,
        /// Test words
        #[arg(long)]
        words: PathBuf,
        /// NAME=PATH of a trained model; repeatable
        #[arg(long = "model")]
        models: Vec<String>,
        /// Leave out the random baseline
        #[arg(long)]
        no_random: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Paired permutation tests between every pair of evaluated systems
    Significance {
        /// Report written by `evaluate --out`
        #[arg(long)]
        report: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        resamples: usize,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, value_delimiter = ',', default_value = "los,uuas,ulas")]
        metrics: Vec<chainnet::evaluation::Metric>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the annotation HTTP service
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long)]
        inventory: PathBuf,
        #[arg(long)]
        store_dir: PathBuf,
        /// Lines of `token annotator`
        #[arg(long)]
        annotators: PathBuf,
        /// Queue order (default: filtered inventory words)
        #[arg(long)]
        words: Option<PathBuf>,
    },
}

#[derive(clap::Args, Debug)]
pub struct TrainArgs {
    /// mpd or biaffine
    #[arg(long)]
    pub model: chainnet::parsers::ModelKind,
    #[arg(long, required = true, num_args = 1..)]
    pub annotations: Vec<PathBuf>,
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Training words
    #[arg(long)]
    pub train: PathBuf,
    /// Early-stopping words
    #[arg(long)]
    pub dev: PathBuf,
    /// Checkpoint path
    #[arg(long)]
    pub out: PathBuf,
    /// Per-epoch log (JSONL)
    #[arg(long)]
    pub log: Option<PathBuf>,
    #[arg(long, default_value_t = 32)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 5e-5)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 0.01)]
    pub weight_decay: f64,
    #[arg(long, default_value_t = 8)]
    pub patience: usize,
    #[arg(long, default_value_t = 1)]
    pub lr_drops: usize,
    #[arg(long, default_value_t = 500)]
    pub max_epochs: usize,
    #[arg(long, default_value_t = 0.33)]
    pub dropout: f64,
    #[arg(long, default_value_t = 2048)]
    pub edge_dim: usize,
    #[arg(long, default_value_t = 100)]
    pub label_dim: usize,
    /// Distance for the MPD spanning tree: euclidean or cosine
    #[arg(long, default_value = "euclidean")]
    pub metric: chainnet::decoding::Metric,
}

fn parse_args(argv: Vec<OsString>) -> Result<Cli, ExitCode> {
    let command = || Cli::command().mut_subcommands(|c| c.args_override_self(true));
    let usage = |e: clap::Error| {
        let _ = e.print();
        ExitCode::from(e.exit_code() as u8)
    };
    // A lenient first pass finds the config file and subcommand even when
    // required flags are still missing.
    let probe = command().ignore_errors(true).try_get_matches_from(&argv).ok();
    let found = probe.as_ref().and_then(|m| {
        let (name, sub) = m.subcommand()?;
        let config = sub
            .try_get_one::<PathBuf>("config")
            .ok()
            .flatten()
            .or_else(|| m.try_get_one::<PathBuf>("config").ok().flatten())?;
        Some((name.to_string(), config.clone()))
    });
    let Some((name, path)) = found else {
        let matches = command().try_get_matches_from(&argv).map_err(usage)?;
        return Cli::from_arg_matches(&matches).map_err(usage);
    };
    let name = name.as_str();
    let extra = config::load_flags(&path, name).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })?;
    let at = argv.iter().position(|a| a == name).map_or(argv.len(), |i| i + 1);
    let mut merged = argv[..at].to_vec();
    merged.extend(extra.into_iter().map(OsString::from));
    merged.extend_from_slice(&argv[at..]);
    let matches = command().try_get_matches_from(&merged).map_err(usage)?;
    Cli::from_arg_matches(&matches).map_err(usage)
}

fn main() -> ExitCode {
    let cli = match parse_args(std::env::args_os().collect()) {
        Ok(cli) => cli,
        Err(code) => return code,
    };
    match commands::run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
