//! Adam with decoupled weight decay, and the plateau schedule that drops
//! the learning rate once before stopping.

use serde::{Deserialize, Serialize};

use super::Parameters;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamWConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub weight_decay: f64,
}

impl Default for AdamWConfig {
    fn default() -> Self {
        AdamWConfig {
            learning_rate: 5e-5,
            beta1: 0.9,
            beta2: 0.9,
            epsilon: 1e-8,
            weight_decay: 0.01,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AdamW {
    pub config: AdamWConfig,
    /// Only tensors whose name starts with this are updated.
    pub prefix: String,
    step: i32,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl AdamW {
    pub fn new(config: AdamWConfig, prefix: impl Into<String>) -> Self {
        AdamW {
            config,
            prefix: prefix.into(),
            step: 0,
            m: Vec::new(),
            v: Vec::new(),
        }
    }

    /// Clears the moment estimates.
    pub fn reset(&mut self) {
        self.step = 0;
        self.m.clear();
        self.v.clear();
    }

    pub fn step<M: Parameters>(&mut self, model: &mut M, grad: &M) {
        let c = &self.config;
        self.step += 1;
        let bc1 = 1.0 - c.beta1.powi(self.step);
        let bc2 = 1.0 - c.beta2.powi(self.step);
        let grads = grad.tensors();
        let params = model.tensors_mut();
        if self.m.is_empty() {
            self.m = params.iter().map(|(_, p)| vec![0.0; p.len()]).collect();
            self.v = self.m.clone();
        }
        for (i, ((name, p), g)) in params.into_iter().zip(grads).enumerate() {
            if !name.starts_with(&self.prefix) {
                continue;
            }
            let (m, v) = (&mut self.m[i], &mut self.v[i]);
            for j in 0..p.len() {
                let gj = g.data[j];
                m[j] = c.beta1 * m[j] + (1.0 - c.beta1) * gj;
                v[j] = c.beta2 * v[j] + (1.0 - c.beta2) * gj * gj;
                let update = (m[j] / bc1) / ((v[j] / bc2).sqrt() + c.epsilon);
                p[j] -= c.learning_rate * (update + c.weight_decay * p[j]);
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleAction {
    Continue,
    /// Restore the best parameters and divide the learning rate by 10.
    DropLearningRate,
    /// Restore the best parameters and finish.
    Stop,
}

/// Watches dev loss once per epoch. After `patience` epochs without a new
/// minimum the learning rate drops; after `drops` drops the next stall
/// stops training.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlateauSchedule {
    pub patience: usize,
    pub drops: usize,
    pub best: f64,
    pub best_epoch: usize,
    pub epoch: usize,
    stale: usize,
    drops_done: usize,
}

impl PlateauSchedule {
    pub fn new(patience: usize, drops: usize) -> Self {
        PlateauSchedule {
            patience: patience.max(1),
            drops,
            best: f64::INFINITY,
            best_epoch: 0,
            epoch: 0,
            stale: 0,
            drops_done: 0,
        }
    }

    /// Whether the last observed loss was a new minimum.
    pub fn improved(&self) -> bool {
        self.best_epoch == self.epoch
    }

    pub fn observe(&mut self, dev_loss: f64) -> ScheduleAction {
        self.epoch += 1;
        if dev_loss < self.best {
            self.best = dev_loss;
            self.best_epoch = self.epoch;
            self.stale = 0;
            return ScheduleAction::Continue;
        }
        self.stale += 1;
        if self.stale < self.patience {
            return ScheduleAction::Continue;
        }
        self.stale = 0;
        if self.drops_done < self.drops {
            self.drops_done += 1;
            ScheduleAction::DropLearningRate
        } else {
            ScheduleAction::Stop
        }
    }
}
