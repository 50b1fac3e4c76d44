//! Mini-batch training with dev-loss early stopping.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::biaffine::{BiaffineConfig, BiaffineModel, Part};
use super::mpd::MpdModel;
use super::nn::Activation;
use super::optim::{AdamW, AdamWConfig, PlateauSchedule, ScheduleAction};
use super::{Example, Parameters, Parser, WordInput};
use crate::decoding::Metric;
use crate::error::{Error, Result};
use crate::parse::Parse;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Mpd,
    Biaffine,
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mpd" | "mpd+mst" => Ok(ModelKind::Mpd),
            "biaffine" => Ok(ModelKind::Biaffine),
            other => Err(Error::malformed("model", format!("unknown model `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub optimizer: AdamWConfig,
    pub patience: usize,
    pub lr_drops: usize,
    pub max_epochs: usize,
    pub dropout: f64,
    pub edge_dim: usize,
    pub label_dim: usize,
    pub activation: Activation,
    pub metric: Metric,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            batch_size: 32,
            optimizer: AdamWConfig::default(),
            patience: 8,
            lr_drops: 1,
            max_epochs: 500,
            dropout: 0.33,
            edge_dim: 2048,
            label_dim: 100,
            activation: Activation::default(),
            metric: Metric::Euclidean,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub phase: String,
    pub epoch: usize,
    pub train_loss: f64,
    pub dev_loss: f64,
    pub learning_rate: f64,
    pub action: ScheduleAction,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TrainedModel {
    Mpd(MpdModel),
    Biaffine(BiaffineModel),
}

impl TrainedModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            TrainedModel::Mpd(_) => ModelKind::Mpd,
            TrainedModel::Biaffine(_) => ModelKind::Biaffine,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            TrainedModel::Mpd(m) => m.dim(),
            TrainedModel::Biaffine(m) => m.config.k,
        }
    }
}

impl Parser for TrainedModel {
    fn predict(&self, input: &WordInput) -> Result<Parse> {
        match self {
            TrainedModel::Mpd(m) => m.predict(input),
            TrainedModel::Biaffine(m) => m.predict(input),
        }
    }

    fn n_best(&self, input: &WordInput) -> Result<Vec<Parse>> {
        match self {
            TrainedModel::Mpd(m) => m.n_best(input),
            TrainedModel::Biaffine(m) => m.n_best(input),
        }
    }
}

/// Trains `kind` on `train`, early-stopping on `dev`. The biaffine edge
/// and label scorers are optimized one after the other, each with its own
/// schedule.
pub fn train(
    kind: ModelKind,
    config: &TrainConfig,
    train: &[Example],
    dev: &[Example],
) -> Result<(TrainedModel, Vec<EpochLog>)> {
    if train.is_empty() || dev.is_empty() {
        return Err(Error::TooFew {
            needed: 1,
            got: train.len().min(dev.len()),
        });
    }
    let k = train[0].input.dim();
    for e in train.iter().chain(dev) {
        if e.input.dim() != k {
            return Err(Error::DimensionMismatch {
                location: e.input.word.clone(),
                expected: k,
                found: e.input.dim(),
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut log = Vec::new();
    let train: Vec<&Example> = train.iter().collect();
    let dev: Vec<&Example> = dev.iter().collect();
    match kind {
        ModelKind::Mpd => {
            let mut model = MpdModel::new(&mut rng, k, config.metric);
            run_phase(
                &mut model,
                "mpd",
                "",
                config,
                &train,
                &dev,
                &mut rng,
                |m, b, _| m.loss_and_gradient(b),
                &mut log,
            )?;
            Ok((TrainedModel::Mpd(model), log))
        }
        ModelKind::Biaffine => {
            let bc = BiaffineConfig {
                k,
                edge_dim: config.edge_dim,
                label_dim: config.label_dim,
                activation: config.activation,
                dropout: config.dropout,
            };
            let mut model = BiaffineModel::new(&mut rng, bc);
            for part in [Part::Edge, Part::Label] {
                run_phase(
                    &mut model,
                    match part {
                        Part::Edge => "edge",
                        Part::Label => "label",
                    },
                    part.prefix(),
                    config,
                    &train,
                    &dev,
                    &mut rng,
                    |m, b, seed| m.loss_and_gradient(part, b, seed),
                    &mut log,
                )?;
            }
            Ok((TrainedModel::Biaffine(model), log))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run_phase<M: Parameters + Clone>(
    model: &mut M,
    phase: &str,
    prefix: &str,
    config: &TrainConfig,
    train: &[&Example],
    dev: &[&Example],
    rng: &mut ChaCha8Rng,
    loss_and_gradient: impl Fn(&M, &[&Example], Option<u64>) -> (f64, M),
    log: &mut Vec<EpochLog>,
) -> Result<()> {
    let mut opt = AdamW::new(config.optimizer.clone(), prefix);
    let mut schedule = PlateauSchedule::new(config.patience, config.lr_drops);
    let mut best = model.clone();
    let mut order: Vec<usize> = (0..train.len()).collect();
    let batch_size = config.batch_size.max(1);
    for epoch in 1..=config.max_epochs {
        order.shuffle(rng);
        let mut train_loss = 0.0;
        let mut batches = 0;
        for chunk in order.chunks(batch_size) {
            let batch: Vec<&Example> = chunk.iter().map(|&i| train[i]).collect();
            let seed = (config.dropout > 0.0).then(|| rng.gen::<u64>());
            let (loss, grad) = loss_and_gradient(model, &batch, seed);
            if !loss.is_finite() || !grad.all_finite() {
                return Err(Error::NonFiniteLoss {
                    what: format!("{phase} training loss"),
                    epoch,
                });
            }
            opt.step(model, &grad);
            train_loss += loss;
            batches += 1;
        }
        let dev_loss = loss_and_gradient(model, dev, None).0;
        if !dev_loss.is_finite() {
            return Err(Error::NonFiniteLoss {
                what: format!("{phase} dev loss"),
                epoch,
            });
        }
        let action = schedule.observe(dev_loss);
        if schedule.improved() {
            best = model.clone();
        }
        log.push(EpochLog {
            phase: phase.to_string(),
            epoch,
            train_loss: train_loss / batches.max(1) as f64,
            dev_loss,
            learning_rate: opt.config.learning_rate,
            action,
        });
        match action {
            ScheduleAction::Continue => {}
            ScheduleAction::DropLearningRate => {
                *model = best.clone();
                opt.config.learning_rate /= 10.0;
                opt.reset();
            }
            ScheduleAction::Stop => break,
        }
    }
    *model = best;
    Ok(())
}
