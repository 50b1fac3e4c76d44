//! Sense-label classifier (a linear layer and softmax over prototype,
//! metaphor and metonymy) whose labels are attached to a minimum spanning
//! tree over sense vectors.

use ndarray::{Array1, Array2, Axis};
use rand::Rng;

use super::nn::{init_matrix, log_sum_exp};
use super::{view, view_mut, Example, Parameters, Parser, TensorView, WordInput};
use crate::decoding::{n_best_variants, orient_and_label, undirected_mst, undirected_mst_without, Metric};
use crate::error::Result;
use crate::model::SenseKind;
use crate::parse::Parse;

#[derive(Clone, Debug, PartialEq)]
pub struct MpdModel {
    /// 3 × k, rows in [`SenseKind::ordinal`] order.
    pub weight: Array2<f64>,
    pub bias: Array1<f64>,
    pub metric: Metric,
}

impl MpdModel {
    pub fn new<R: Rng>(rng: &mut R, k: usize, metric: Metric) -> Self {
        MpdModel {
            weight: init_matrix(rng, 3, k, k),
            bias: Array1::zeros(3),
            metric,
        }
    }

    pub fn dim(&self) -> usize {
        self.weight.ncols()
    }

    pub fn logits(&self, x: &Array2<f64>) -> Array2<f64> {
        x.dot(&self.weight.t()) + &self.bias
    }

    pub fn probabilities(&self, x: &Array2<f64>) -> Array2<f64> {
        let mut p = self.logits(x);
        for mut row in p.rows_mut() {
            let lse = log_sum_exp(row.iter().copied());
            row.mapv_inplace(|v| (v - lse).exp());
        }
        p
    }

    /// Mean cross-entropy of the gold labels and its gradient.
    pub fn loss_and_gradient(&self, batch: &[&Example]) -> (f64, MpdModel) {
        let mut grad = self.zeros_like();
        let total: usize = batch.iter().map(|e| e.input.len()).sum();
        if total == 0 {
            return (0.0, grad);
        }
        let scale = 1.0 / total as f64;
        let mut loss = 0.0;
        for e in batch {
            let mut d = self.probabilities(&e.input.x);
            for (i, kind) in e.gold.kinds.iter().enumerate() {
                let g = kind.ordinal();
                loss -= d[[i, g]].max(f64::MIN_POSITIVE).ln() * scale;
                d[[i, g]] -= 1.0;
            }
            d *= scale;
            grad.weight += &d.t().dot(&e.input.x);
            grad.bias += &d.sum_axis(Axis(0));
        }
        (loss, grad)
    }

    pub fn loss(&self, batch: &[&Example]) -> f64 {
        self.loss_and_gradient(batch).0
    }
}

/// One prototype: the sense with the highest prototype probability (lower
/// index on ties). Every other sense takes the better of metaphor and
/// metonymy (metaphor on ties).
pub fn assign_labels(probs: &Array2<f64>) -> Vec<SenseKind> {
    let p = SenseKind::Prototype.ordinal();
    let (m, me) = (SenseKind::Metaphor.ordinal(), SenseKind::Metonymy.ordinal());
    let mut proto = 0;
    for i in 1..probs.nrows() {
        if probs[[i, p]] > probs[[proto, p]] {
            proto = i;
        }
    }
    (0..probs.nrows())
        .map(|i| {
            if i == proto {
                SenseKind::Prototype
            } else if probs[[i, me]] > probs[[i, m]] {
                SenseKind::Metonymy
            } else {
                SenseKind::Metaphor
            }
        })
        .collect()
}

impl MpdModel {
    fn decode(&self, input: &WordInput, forbid: &[(usize, usize)]) -> Result<Option<Parse>> {
        let probs = self.probabilities(&input.x);
        let labels = assign_labels(&probs);
        let points: Vec<&[f64]> = input
            .x
            .rows()
            .into_iter()
            .map(|r| r.to_slice().expect("standard layout"))
            .collect();
        let tree = if forbid.is_empty() {
            Some(undirected_mst(&points, self.metric)?)
        } else {
            undirected_mst_without(&points, self.metric, forbid)?
        };
        match tree {
            Some(t) => Ok(Some(orient_and_label(&input.word, &input.ids, &t, &labels, &labels)?)),
            None => Ok(None),
        }
    }
}

impl Parser for MpdModel {
    fn predict(&self, input: &WordInput) -> Result<Parse> {
        Ok(self.decode(input, &[])?.expect("unconstrained tree exists"))
    }

    fn n_best(&self, input: &WordInput) -> Result<Vec<Parse>> {
        let best = self.predict(input)?;
        let nb = n_best_variants(&best, |e| match e.head {
            None => Ok(None),
            Some(h) => self.decode(input, &[(h, e.dependent)]),
        })?;
        Ok(nb.parses)
    }
}

impl Parameters for MpdModel {
    fn tensors(&self) -> Vec<TensorView<'_>> {
        vec![view("mpd.weight", &self.weight), view("mpd.bias", &self.bias)]
    }

    fn tensors_mut(&mut self) -> Vec<(String, &mut [f64])> {
        vec![view_mut("mpd.weight", &mut self.weight), view_mut("mpd.bias", &mut self.bias)]
    }

    fn zeros_like(&self) -> Self {
        MpdModel {
            weight: Array2::zeros(self.weight.raw_dim()),
            bias: Array1::zeros(3),
            metric: self.metric,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sense::SenseIndex;
    use ndarray::array;
    use SenseKind::{Metaphor as M, Metonymy as Me, Prototype as P};

    #[test]
    fn label_assignment_rules() {
        assert_eq!(assign_labels(&array![[0.9, 0.05, 0.05], [0.2, 0.5, 0.3]]), vec![P, M]);
        assert_eq!(assign_labels(&array![[0.6, 0.3, 0.1], [0.55, 0.05, 0.4]]), vec![P, Me]);
        assert_eq!(assign_labels(&array![[0.5, 0.3, 0.2], [0.5, 0.2, 0.3]]), vec![P, Me]);
    }

    #[test]
    fn two_sense_prediction() {
        // identity-like weights so logits equal the inputs
        let model = MpdModel {
            weight: Array2::eye(3),
            bias: Array1::zeros(3),
            metric: Metric::Euclidean,
        };
        let x = array![[0.9f64.ln(), 0.05f64.ln(), 0.05f64.ln()], [0.2f64.ln(), 0.5f64.ln(), 0.3f64.ln()]];
        let input = WordInput::new("w", vec![SenseIndex::Plain(1), SenseIndex::Plain(2)], x).unwrap();
        let p = model.predict(&input).unwrap();
        assert_eq!(p.kinds, vec![P, M]);
        assert_eq!(p.parents, vec![None, Some(0)]);
        let nb = model.n_best(&input).unwrap();
        assert_eq!(nb.len(), 1);
    }
}
