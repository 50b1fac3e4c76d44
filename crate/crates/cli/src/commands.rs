use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chainnet::agreement::{agreement_report, AnnotatorView};
use chainnet::combinatorics::{count_total, count_total_constructible, enumerate_annotations, rounded_3sf};
use chainnet::corpus::{self, load_embeddings, load_records, load_words, write_jsonl, SenseInventory};
use chainnet::evaluation::{evaluate, render_significance, render_table, significance, EvalResult, Protocol};
use chainnet::parsers::optim::AdamWConfig;
use chainnet::parsers::{checkpoint, examples_for, train, Parser, RandomBaseline, TrainConfig, WordInput};
use chainnet::preprocess::preprocess;
use chainnet::{Parse, SenseKind, WordAnnotation};
use chainnet_service::{AppState, Store, Tokens};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::{Cli, Command, TrainArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Data(#[from] chainnet::Error),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Service(#[from] chainnet_service::StoreError),
    #[error(transparent)]
    Tokens(#[from] chainnet_service::auth::TokenError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Data(chainnet::Error::Io { .. }) | CliError::Io { .. } => 2,
            CliError::Tokens(chainnet_service::auth::TokenError::Io { .. }) => 2,
            _ => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes")
}

fn load_annotations(paths: &[PathBuf]) -> Result<Vec<WordAnnotation>> {
    let mut out = Vec::new();
    for p in paths {
        out.extend(load_records::<WordAnnotation>(p)?);
    }
    Ok(out)
}

/// One gold parse per word, after preprocessing. The first annotation of a
/// word wins.
fn load_gold(paths: &[PathBuf]) -> Result<BTreeMap<String, Parse>> {
    let mut gold = BTreeMap::new();
    let mut duplicates = 0;
    for a in load_annotations(paths)? {
        a.ensure_valid()?;
        if gold.contains_key(&a.word) {
            duplicates += 1;
            continue;
        }
        let parse = Parse::from_annotation(&preprocess(&a).annotation)?;
        gold.insert(a.word.clone(), parse);
    }
    if duplicates > 0 {
        eprintln!("note: {duplicates} further annotation(s) of already-seen words ignored");
    }
    Ok(gold)
}

pub fn run(cli: Cli) -> Result<ExitCode> {
    let seed = cli.seed;
    match cli.command {
        Command::Validate { files } => validate(&files),
        Command::Stats { annotations } => stats(&annotations),
        Command::Count {
            senses,
            labels,
            enumerate,
            constructible,
        } => count(senses, labels, enumerate, constructible),
        Command::Agree {
            annotations,
            filters,
            out,
        } => agree(&annotations, &filters, out.as_deref()),
        Command::Preprocess { annotations, out } => preprocess_cmd(&annotations, &out),
        Command::Split { inventory, words, out } => split(inventory.as_deref(), words.as_deref(), &out, seed),
        Command::Train(args) => train_cmd(&args, seed),
        Command::Parse {
            model,
            embeddings,
            inventory,
            annotations,
            words,
            n_best,
            out,
        } => parse_cmd(
            &model,
            &embeddings,
            inventory.as_deref(),
            &annotations,
            words.as_deref(),
            n_best,
            out.as_deref(),
        ),
        Command::Evaluate {
            annotations,
            embeddings,
            words,
            models,
            no_random,
            out,
        } => evaluate_cmd(&annotations, &embeddings, &words, &models, !no_random, out.as_deref(), seed),
        Command::Significance {
            report,
            resamples,
            alpha,
            metrics,
            out,
        } => significance_cmd(&report, resamples, alpha, &metrics, out.as_deref(), seed),
        Command::Serve {
            port,
            host,
            inventory,
            store_dir,
            annotators,
            words,
        } => serve(&host, port, &inventory, &store_dir, &annotators, words.as_deref()),
    }
}

fn validate(files: &[PathBuf]) -> Result<ExitCode> {
    let mut bad = 0usize;
    let mut total = 0usize;
    for f in files {
        for a in load_records::<WordAnnotation>(f)? {
            total += 1;
            let report = a.validate();
            if !report.is_valid() {
                bad += 1;
                for v in &report.violations {
                    println!("{}: {} ({}): {v}", f.display(), a.word, a.annotator);
                }
            }
        }
    }
    println!("{total} annotation(s), {bad} invalid");
    Ok(if bad == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

#[derive(Serialize)]
struct Stats {
    annotations: usize,
    invalid: usize,
    words: usize,
    annotators: Vec<String>,
    senses: usize,
    prototypes: usize,
    metaphors: usize,
    metonymies: usize,
    conduits: usize,
    split_halves: usize,
    virtual_senses: usize,
    unknown_senses: usize,
    unknown_words: usize,
    mean_senses_per_word: f64,
    mean_prototypes_per_word: f64,
    homonymous_fraction: f64,
}

fn stats(paths: &[PathBuf]) -> Result<ExitCode> {
    let all = load_annotations(paths)?;
    let n = all.len();
    let count = |f: &dyn Fn(&chainnet::SenseAnnotation) -> bool| -> usize {
        all.iter().map(|a| a.senses.iter().filter(|s| f(s)).count()).sum()
    };
    let ratio = |x: usize| if n == 0 { 0.0 } else { x as f64 / n as f64 };
    let senses = count(&|_| true);
    let prototypes = count(&|s| s.kind() == SenseKind::Prototype);
    let s = Stats {
        annotations: n,
        invalid: all.iter().filter(|a| !a.validate().is_valid()).count(),
        words: all.iter().map(|a| &a.word).collect::<BTreeSet<_>>().len(),
        annotators: all
            .iter()
            .map(|a| a.annotator.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
        senses,
        prototypes,
        metaphors: count(&|s| s.kind() == SenseKind::Metaphor),
        metonymies: count(&|s| s.kind() == SenseKind::Metonymy),
        conduits: count(&|s| s.conduit),
        split_halves: count(&|s| s.id().is_split_half()),
        virtual_senses: count(&|s| s.id().is_virtual()),
        unknown_senses: count(&|s| !s.sense.known),
        unknown_words: all.iter().filter(|a| !a.word_known).count(),
        mean_senses_per_word: ratio(senses),
        mean_prototypes_per_word: ratio(prototypes),
        homonymous_fraction: ratio(all.iter().filter(|a| a.prototypes().count() > 1).count()),
    };
    println!("{}", pretty(&s));
    Ok(ExitCode::SUCCESS)
}

fn count(senses: usize, labels: u32, enumerate: bool, constructible: bool) -> Result<ExitCode> {
    let total = count_total(senses, labels)?;
    println!("{total}");
    println!("rounded: {}", rounded_3sf(&total));
    if constructible {
        if labels != 2 {
            return Err(CliError::Usage("--constructible needs --labels 2".into()));
        }
        println!("constructible: {}", count_total_constructible(senses)?);
    }
    if enumerate {
        println!("enumerated: {}", enumerate_annotations(senses, labels)?.count());
    }
    Ok(ExitCode::SUCCESS)
}

fn agree(paths: &[PathBuf], filters: &[chainnet::agreement::Filter], out: Option<&Path>) -> Result<ExitCode> {
    let mut by_annotator: BTreeMap<String, Vec<WordAnnotation>> = BTreeMap::new();
    for a in load_annotations(paths)? {
        by_annotator.entry(a.annotator.clone()).or_default().push(a);
    }
    let views = by_annotator
        .iter()
        .map(|(who, list)| AnnotatorView::from_annotations(who.clone(), list))
        .collect::<chainnet::Result<Vec<_>>>()?;
    let report = agreement_report(&views, filters)?;
    let text = pretty(&report);
    match out {
        Some(p) => write_file(p, &text)?,
        None => println!("{text}"),
    }
    let pct = |x: Option<f64>| x.map_or("n/a".to_string(), |v| format!("{v:.1}"));
    let kap = |x: Option<f64>| x.map_or("n/a".to_string(), |v| format!("{v:.2}"));
    eprintln!(
        "{} annotators, {} shared words, ARI {}",
        report.annotators.len(),
        report.shared_words,
        kap(report.ari)
    );
    for l in &report.labels {
        eprintln!(
            "{:?}: any {}% (kappa {}), prototype {}%, metaphor {}%, metonymy {}%",
            l.filter,
            pct(l.percentage.any),
            kap(l.kappa.any),
            pct(l.percentage.prototype),
            pct(l.percentage.metaphor),
            pct(l.percentage.metonymy)
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn preprocess_cmd(paths: &[PathBuf], out: &Path) -> Result<ExitCode> {
    let mut done = Vec::new();
    for a in load_annotations(paths)? {
        a.ensure_valid()?;
        let p = preprocess(&a);
        for w in &p.warnings {
            eprintln!("{} ({}): {}", a.word, a.annotator, serde_json::to_string(w).expect("warning serializes"));
        }
        done.push(p.annotation);
    }
    write_jsonl(out, &done)?;
    eprintln!("{} annotation(s) written to {}", done.len(), out.display());
    Ok(ExitCode::SUCCESS)
}

fn split(inventory: Option<&Path>, words: Option<&Path>, out: &Path, seed: u64) -> Result<ExitCode> {
    let list = match (words, inventory) {
        (Some(w), _) => load_words(w)?,
        (None, Some(inv)) => corpus::filter_words(&SenseInventory::load(inv)?),
        (None, None) => return Err(CliError::Usage("give --inventory or --words".into())),
    };
    let s = corpus::split_dataset(&list, seed)?;
    fs::create_dir_all(out).map_err(|source| CliError::Io {
        path: out.to_path_buf(),
        source,
    })?;
    for (name, part) in [("train", &s.train), ("dev", &s.dev), ("test", &s.test)] {
        let mut text = part.join("\n");
        text.push('\n');
        write_file(&out.join(format!("{name}.txt")), &text)?;
    }
    println!(
        "{}",
        pretty(&json!({ "seed": seed, "train": s.train.len(), "dev": s.dev.len(), "test": s.test.len() }))
    );
    Ok(ExitCode::SUCCESS)
}

fn train_cmd(args: &TrainArgs, seed: u64) -> Result<ExitCode> {
    let gold = load_gold(&args.annotations)?;
    let table = load_embeddings(&args.embeddings)?;
    let (train_set, train_excluded) = examples_for(&load_words(&args.train)?, &gold, &table)?;
    let (dev_set, dev_excluded) = examples_for(&load_words(&args.dev)?, &gold, &table)?;
    let config = TrainConfig {
        batch_size: args.batch_size,
        optimizer: AdamWConfig {
            learning_rate: args.learning_rate,
            weight_decay: args.weight_decay,
            ..AdamWConfig::default()
        },
        patience: args.patience,
        lr_drops: args.lr_drops,
        max_epochs: args.max_epochs,
        dropout: args.dropout,
        edge_dim: args.edge_dim,
        label_dim: args.label_dim,
        metric: args.metric,
        seed,
        ..TrainConfig::default()
    };
    let (model, log) = train(args.model, &config, &train_set, &dev_set)?;
    checkpoint::save(&args.out, &model)?;
    if let Some(path) = &args.log {
        write_jsonl(path, &log)?;
    }
    let summary = json!({
        "model": args.model,
        "checkpoint": args.out,
        "fingerprint": checkpoint::fingerprint(&model),
        "epochs": log.len(),
        "train_words": train_set.len(),
        "dev_words": dev_set.len(),
        "excluded_words": train_excluded.len() + dev_excluded.len(),
        "config": config,
    });
    println!("{}", pretty(&summary));
    Ok(ExitCode::SUCCESS)
}

fn parse_cmd(
    model: &Path,
    embeddings: &Path,
    inventory: Option<&Path>,
    annotations: &[PathBuf],
    words: Option<&Path>,
    n_best: bool,
    out: Option<&Path>,
) -> Result<ExitCode> {
    let model = checkpoint::load(model)?;
    let table = load_embeddings(embeddings)?;
    let mut senses: BTreeMap<String, Vec<chainnet::SenseIndex>> = BTreeMap::new();
    if let Some(inv) = inventory {
        let inv = SenseInventory::load(inv)?;
        for w in inv.words.keys() {
            let ids = inv.records(w).unwrap_or_default().into_iter().map(|r| r.id).collect();
            senses.insert(w.clone(), ids);
        }
    }
    for (w, p) in load_gold(annotations)? {
        senses.entry(w).or_insert(p.ids);
    }
    let wanted: Vec<String> = match words {
        Some(path) => load_words(path)?,
        None => senses.keys().cloned().collect(),
    };
    let mut lines = String::new();
    let mut skipped = 0;
    for w in &wanted {
        let Some(ids) = senses.get(w) else {
            skipped += 1;
            continue;
        };
        let input = match WordInput::from_table(w, ids, &table) {
            Ok(input) => input,
            Err(chainnet::Error::MissingEmbedding(_)) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let line = if n_best {
            serde_json::to_string(&json!({ "word": w, "parses": model.n_best(&input)? }))
        } else {
            serde_json::to_string(&model.predict(&input)?)
        };
        lines.push_str(&line.expect("parse serializes"));
        lines.push('\n');
    }
    if skipped > 0 {
        eprintln!("{skipped} word(s) skipped: unknown or missing embeddings");
    }
    match out {
        Some(p) => write_file(p, &lines)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(lines.as_bytes());
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize, Deserialize)]
struct EvaluationReport {
    seed: u64,
    words: usize,
    excluded_words: Vec<String>,
    results: Vec<EvalResult>,
}

fn evaluate_cmd(
    annotations: &[PathBuf],
    embeddings: &Path,
    words: &Path,
    models: &[String],
    random: bool,
    out: Option<&Path>,
    seed: u64,
) -> Result<ExitCode> {
    let gold = load_gold(annotations)?;
    let table = load_embeddings(embeddings)?;
    let (examples, excluded_words) = examples_for(&load_words(words)?, &gold, &table)?;
    let mut results = Vec::new();
    if random {
        let baseline = RandomBaseline { seed };
        results.push(evaluate("Random", &baseline, &examples, Protocol::OneBest)?);
        results.push(evaluate("Random", &baseline, &examples, Protocol::NBest)?);
    }
    for spec in models {
        let (name, path) = spec
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--model expects NAME=PATH, got `{spec}`")))?;
        let model = checkpoint::load(Path::new(path))?;
        results.push(evaluate(name, &model, &examples, Protocol::OneBest)?);
        results.push(evaluate(name, &model, &examples, Protocol::NBest)?);
    }
    let report = EvaluationReport {
        seed,
        words: examples.len(),
        excluded_words,
        results,
    };
    if let Some(p) = out {
        write_file(p, &pretty(&report))?;
    }
    print!("{}", render_table(&report.results));
    if !report.excluded_words.is_empty() {
        eprintln!("{} word(s) excluded for missing embeddings", report.excluded_words.len());
    }
    Ok(ExitCode::SUCCESS)
}

fn significance_cmd(
    report: &Path,
    resamples: usize,
    alpha: f64,
    metrics: &[chainnet::evaluation::Metric],
    out: Option<&Path>,
    seed: u64,
) -> Result<ExitCode> {
    let text = fs::read_to_string(report).map_err(|source| CliError::Io {
        path: report.to_path_buf(),
        source,
    })?;
    let report: EvaluationReport = serde_json::from_str(&text)
        .map_err(|e| chainnet::Error::malformed(report.display(), e.to_string()))?;
    let systems: Vec<EvalResult> = report
        .results
        .into_iter()
        .map(|mut r| {
            if r.protocol == Protocol::NBest {
                r.model = format!("{} (n-best)", r.model);
            }
            r
        })
        .collect();
    let tests = significance(&systems, metrics, resamples, alpha, seed)?;
    if let Some(p) = out {
        write_file(p, &pretty(&json!({ "seed": seed, "tests": tests })))?;
    }
    print!("{}", render_significance(&tests));
    Ok(ExitCode::SUCCESS)
}

fn serve(
    host: &str,
    port: u16,
    inventory: &Path,
    store_dir: &Path,
    annotators: &Path,
    words: Option<&Path>,
) -> Result<ExitCode> {
    let inv = SenseInventory::load(inventory)?;
    let queue = match words {
        Some(p) => load_words(p)?,
        None => corpus::filter_words(&inv),
    };
    let senses = inv
        .words
        .keys()
        .filter_map(|w| inv.records(w).map(|r| (w.clone(), r)))
        .collect();
    let store = Store::open(Some(store_dir), queue, senses)?;
    let tokens = Tokens::load(annotators)?;
    let addr: SocketAddr = format!("{host}:{port}")
        .parse()
        .map_err(|e| CliError::Usage(format!("bad address {host}:{port}: {e}")))?;
    let runtime = tokio::runtime::Runtime::new().map_err(|source| CliError::Io {
        path: PathBuf::from("<runtime>"),
        source,
    })?;
    eprintln!("listening on http://{addr}");
    runtime
        .block_on(chainnet_service::serve(addr, AppState::new(store, tokens)))
        .map_err(|source| CliError::Io {
            path: PathBuf::from(addr.to_string()),
            source,
        })?;
    Ok(ExitCode::SUCCESS)
}
