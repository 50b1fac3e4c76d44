//! Biaffine edge and label scorers over sense vectors.
//!
//! For node vectors `h = MLP_head(e_head)` and `d = MLP_dep(e_dep)`:
//!
//! ```text
//! score(head -> dep) = hᵀ U d + wᵀ [h; d] + b
//! ```
//!
//! The word root is represented by the mean of the word's sense vectors.
//! The label scorer has its own MLPs and one `(U, w, b)` per label.

use ndarray::{concatenate, s, Array1, Array2, Array3, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::nn::{init_matrix, log_sum_exp, Activation, Mlp, MlpCache};
use super::{view, view_mut, Example, Parameters, Parser, TensorView, WordInput};
use crate::decoding::{max_arborescence, n_best_variants};
use crate::error::{Error, Result};
use crate::model::SenseKind;
use crate::parse::Parse;

/// Label classes of the label scorer.
pub const LABELS: [SenseKind; 2] = [SenseKind::Metaphor, SenseKind::Metonymy];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiaffineConfig {
    /// Input vector dimension.
    pub k: usize,
    pub edge_dim: usize,
    pub label_dim: usize,
    #[serde(default)]
    pub activation: Activation,
    pub dropout: f64,
}

impl BiaffineConfig {
    pub fn new(k: usize) -> Self {
        BiaffineConfig {
            k,
            edge_dim: 2048,
            label_dim: 100,
            activation: Activation::default(),
            dropout: 0.33,
        }
    }
}

/// One biaffine scorer with `classes` outputs per ordered node pair.
#[derive(Clone, Debug, PartialEq)]
pub struct Biaffine {
    pub head: Mlp,
    pub dep: Mlp,
    pub u: Array3<f64>,
    pub w: Array2<f64>,
    pub b: Array1<f64>,
}

struct Encoded {
    h: Array2<f64>,
    d: Array2<f64>,
    head_cache: MlpCache,
    dep_cache: MlpCache,
}

impl Biaffine {
    pub fn new<R: Rng>(rng: &mut R, k: usize, dim: usize, classes: usize) -> Self {
        let head = Mlp::new(rng, k, dim);
        let dep = Mlp::new(rng, k, dim);
        let a = 1.0 / (dim.max(1) as f64).sqrt();
        Biaffine {
            head,
            dep,
            u: Array3::from_shape_fn((classes, dim, dim), |_| rng.gen_range(-a..a)),
            w: init_matrix(rng, classes, 2 * dim, 2 * dim),
            b: Array1::zeros(classes),
        }
    }

    pub fn zeros(k: usize, dim: usize, classes: usize) -> Self {
        Biaffine {
            head: Mlp::zeros(k, dim),
            dep: Mlp::zeros(k, dim),
            u: Array3::zeros((classes, dim, dim)),
            w: Array2::zeros((classes, 2 * dim)),
            b: Array1::zeros(classes),
        }
    }

    fn dim(&self) -> usize {
        self.head.output_dim()
    }

    fn encode(&self, x: &Array2<f64>, act: Activation, dropout: Option<(f64, &mut ChaCha8Rng)>) -> Encoded {
        let (h, head_cache, d, dep_cache) = match dropout {
            Some((p, rng)) => {
                let (h, hc) = self.head.forward(x, act, Some((p, &mut *rng)));
                let (d, dc) = self.dep.forward(x, act, Some((p, rng)));
                (h, hc, d, dc)
            }
            None => {
                let (h, hc) = self.head.forward::<ChaCha8Rng>(x, act, None);
                let (d, dc) = self.dep.forward::<ChaCha8Rng>(x, act, None);
                (h, hc, d, dc)
            }
        };
        Encoded {
            h,
            d,
            head_cache,
            dep_cache,
        }
    }

    /// `S[a, b]` scores node `a` as head of node `b` for class `c`.
    fn class_scores(&self, c: usize, h: &Array2<f64>, d: &Array2<f64>) -> Array2<f64> {
        let k = self.dim();
        let u = self.u.index_axis(Axis(0), c);
        let w_head = self.w.slice(s![c, ..k]);
        let w_dep = self.w.slice(s![c, k..]);
        let mut out = h.dot(&u).dot(&d.t());
        let hw = h.dot(&w_head);
        let dw = d.dot(&w_dep);
        for ((a, b), v) in out.indexed_iter_mut() {
            *v += hw[a] + dw[b] + self.b[c];
        }
        out
    }

    /// Accumulates gradients of class `c` scores given `ds = ∂L/∂S`.
    fn accumulate(
        &self,
        c: usize,
        enc: &Encoded,
        ds: &ArrayView2<f64>,
        dh: &mut Array2<f64>,
        dd: &mut Array2<f64>,
        grad: &mut Biaffine,
    ) {
        let k = self.dim();
        let (h, d) = (&enc.h, &enc.d);
        let u = self.u.index_axis(Axis(0), c);
        let row_sums = ds.sum_axis(Axis(1));
        let col_sums = ds.sum_axis(Axis(0));
        let mut gu = grad.u.index_axis_mut(Axis(0), c);
        gu += &h.t().dot(ds).dot(d);
        *dh += &ds.dot(d).dot(&u.t());
        *dd += &ds.t().dot(h).dot(&u);
        let w_head = self.w.slice(s![c, ..k]);
        let w_dep = self.w.slice(s![c, k..]);
        for a in 0..h.nrows() {
            dh.row_mut(a).scaled_add(row_sums[a], &w_head);
            dd.row_mut(a).scaled_add(col_sums[a], &w_dep);
        }
        let mut gw_head = grad.w.slice_mut(s![c, ..k]);
        gw_head += &h.t().dot(&row_sums);
        let mut gw_dep = grad.w.slice_mut(s![c, k..]);
        gw_dep += &d.t().dot(&col_sums);
        grad.b[c] += ds.sum();
    }

    fn backward(&self, enc: &Encoded, act: Activation, dh: &Array2<f64>, dd: &Array2<f64>, grad: &mut Biaffine) {
        self.head.backward(&enc.head_cache, act, dh, &mut grad.head);
        self.dep.backward(&enc.dep_cache, act, dd, &mut grad.dep);
    }

    fn tensors<'a>(&'a self, prefix: &str) -> Vec<TensorView<'a>> {
        vec![
            view(format!("{prefix}.head.weight"), &self.head.weight),
            view(format!("{prefix}.head.bias"), &self.head.bias),
            view(format!("{prefix}.dep.weight"), &self.dep.weight),
            view(format!("{prefix}.dep.bias"), &self.dep.bias),
            view(format!("{prefix}.u"), &self.u),
            view(format!("{prefix}.w"), &self.w),
            view(format!("{prefix}.b"), &self.b),
        ]
    }

    fn tensors_mut<'a>(&'a mut self, prefix: &str) -> Vec<(String, &'a mut [f64])> {
        vec![
            view_mut(format!("{prefix}.head.weight"), &mut self.head.weight),
            view_mut(format!("{prefix}.head.bias"), &mut self.head.bias),
            view_mut(format!("{prefix}.dep.weight"), &mut self.dep.weight),
            view_mut(format!("{prefix}.dep.bias"), &mut self.dep.bias),
            view_mut(format!("{prefix}.u"), &mut self.u),
            view_mut(format!("{prefix}.w"), &mut self.w),
            view_mut(format!("{prefix}.b"), &mut self.b),
        ]
    }
}

/// Input rows with the root (the mean sense vector) prepended as node 0.
pub fn with_root(x: &Array2<f64>) -> Array2<f64> {
    let mean = x.mean_axis(Axis(0)).expect("at least one sense");
    concatenate(Axis(0), &[mean.view().insert_axis(Axis(0)), x.view()]).expect("same width")
}

/// Edge scores and per-label scores, nodes indexed with the root at 0.
#[derive(Clone, Debug, PartialEq)]
pub struct WordScores {
    pub edges: Array2<f64>,
    pub labels: Vec<Array2<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BiaffineModel {
    pub config: BiaffineConfig,
    pub edge: Biaffine,
    pub label: Biaffine,
}

/// Which scorer a loss trains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Edge,
    Label,
}

impl Part {
    pub fn prefix(self) -> &'static str {
        match self {
            Part::Edge => "edge.",
            Part::Label => "label.",
        }
    }
}

impl BiaffineModel {
    pub fn new<R: Rng>(rng: &mut R, config: BiaffineConfig) -> Self {
        let edge = Biaffine::new(rng, config.k, config.edge_dim, 1);
        let label = Biaffine::new(rng, config.k, config.label_dim, LABELS.len());
        BiaffineModel { config, edge, label }
    }

    pub fn zeros(config: BiaffineConfig) -> Self {
        BiaffineModel {
            edge: Biaffine::zeros(config.k, config.edge_dim, 1),
            label: Biaffine::zeros(config.k, config.label_dim, LABELS.len()),
            config,
        }
    }

    pub fn scores(&self, input: &WordInput) -> WordScores {
        let x = with_root(&input.x);
        let act = self.config.activation;
        let e = self.edge.encode(&x, act, None);
        let l = self.label.encode(&x, act, None);
        WordScores {
            edges: self.edge.class_scores(0, &e.h, &e.d),
            labels: (0..LABELS.len()).map(|c| self.label.class_scores(c, &l.h, &l.d)).collect(),
        }
    }

    /// Mean over senses of the cross-entropy of the gold head under a
    /// softmax over all candidate heads, or the mean cross-entropy of gold
    /// labels on gold edges. `dropout_seed` switches on training-mode
    /// dropout.
    pub fn loss_and_gradient(&self, part: Part, batch: &[&Example], dropout_seed: Option<u64>) -> (f64, BiaffineModel) {
        let mut grad = BiaffineModel::zeros(self.config.clone());
        let total: usize = batch
            .iter()
            .map(|e| match part {
                Part::Edge => e.gold.len(),
                Part::Label => e.gold.parents.iter().filter(|p| p.is_some()).count(),
            })
            .sum();
        if total == 0 {
            return (0.0, grad);
        }
        let scale = 1.0 / total as f64;
        let mut loss = 0.0;
        for (i, e) in batch.iter().enumerate() {
            let mut rng = dropout_seed.map(|s| {
                let mut r = ChaCha8Rng::seed_from_u64(s);
                r.set_stream(i as u64);
                r
            });
            let dropout = rng.as_mut().map(|r| (self.config.dropout, r));
            loss += match part {
                Part::Edge => self.edge_word(e, scale, dropout, &mut grad.edge),
                Part::Label => self.label_word(e, scale, dropout, &mut grad.label),
            };
        }
        (loss, grad)
    }

    pub fn loss(&self, part: Part, batch: &[&Example]) -> f64 {
        self.loss_and_gradient(part, batch, None).0
    }

    fn edge_word(&self, e: &Example, scale: f64, dropout: Option<(f64, &mut ChaCha8Rng)>, grad: &mut Biaffine) -> f64 {
        let act = self.config.activation;
        let x = with_root(&e.input.x);
        let enc = self.edge.encode(&x, act, dropout);
        let s = self.edge.class_scores(0, &enc.h, &enc.d);
        let n = s.nrows();
        let mut ds = Array2::zeros((n, n));
        let mut loss = 0.0;
        for dep in 1..n {
            let gold = e.gold.parents[dep - 1].map_or(0, |p| p + 1);
            let lse = log_sum_exp((0..n).filter(|h| *h != dep).map(|h| s[[h, dep]]));
            loss += (lse - s[[gold, dep]]) * scale;
            for h in (0..n).filter(|h| *h != dep) {
                ds[[h, dep]] = (s[[h, dep]] - lse).exp() * scale;
            }
            ds[[gold, dep]] -= scale;
        }
        let mut dh = Array2::zeros(enc.h.raw_dim());
        let mut dd = Array2::zeros(enc.d.raw_dim());
        self.edge.accumulate(0, &enc, &ds.view(), &mut dh, &mut dd, grad);
        self.edge.backward(&enc, act, &dh, &dd, grad);
        loss
    }

    fn label_word(&self, e: &Example, scale: f64, dropout: Option<(f64, &mut ChaCha8Rng)>, grad: &mut Biaffine) -> f64 {
        let edges: Vec<(usize, usize, usize)> = (0..e.gold.len())
            .filter_map(|i| {
                let p = e.gold.parents[i]?;
                let c = LABELS.iter().position(|k| *k == e.gold.kinds[i])?;
                Some((p + 1, i + 1, c))
            })
            .collect();
        if edges.is_empty() {
            return 0.0;
        }
        let act = self.config.activation;
        let x = with_root(&e.input.x);
        let enc = self.label.encode(&x, act, dropout);
        let n = x.nrows();
        let scores: Vec<Array2<f64>> = (0..LABELS.len()).map(|c| self.label.class_scores(c, &enc.h, &enc.d)).collect();
        let mut ds: Vec<Array2<f64>> = (0..LABELS.len()).map(|_| Array2::zeros((n, n))).collect();
        let mut loss = 0.0;
        for (h, d, gold) in edges {
            let lse = log_sum_exp(scores.iter().map(|s| s[[h, d]]));
            loss += (lse - scores[gold][[h, d]]) * scale;
            for c in 0..LABELS.len() {
                ds[c][[h, d]] += (scores[c][[h, d]] - lse).exp() * scale;
            }
            ds[gold][[h, d]] -= scale;
        }
        let mut dh = Array2::zeros(enc.h.raw_dim());
        let mut dd = Array2::zeros(enc.d.raw_dim());
        for (c, g) in ds.iter().enumerate() {
            self.label.accumulate(c, &enc, &g.view(), &mut dh, &mut dd, grad);
        }
        self.label.backward(&enc, act, &dh, &dd, grad);
        loss
    }

    /// Labels the arborescence given by `heads` (node indices, root 0).
    pub fn label_tree(&self, input: &WordInput, scores: &WordScores, heads: &[usize]) -> Result<Parse> {
        let n = input.len();
        let mut kinds = Vec::with_capacity(n);
        let mut parents = Vec::with_capacity(n);
        for d in 1..=n {
            let h = heads[d];
            if h == 0 {
                kinds.push(SenseKind::Prototype);
                parents.push(None);
            } else {
                let best = (1..LABELS.len()).fold(0, |b, c| {
                    if scores.labels[c][[h, d]] > scores.labels[b][[h, d]] {
                        c
                    } else {
                        b
                    }
                });
                kinds.push(LABELS[best]);
                parents.push(Some(h - 1));
            }
        }
        Parse::new(input.word.clone(), input.ids.clone(), kinds, parents)
    }

    fn decode(&self, input: &WordInput, scores: &WordScores, edges: &Array2<f64>) -> Result<Option<Parse>> {
        match max_arborescence(edges) {
            Ok(heads) => self.label_tree(input, scores, &heads).map(Some),
            Err(Error::Unreachable(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }
}

impl Parser for BiaffineModel {
    fn predict(&self, input: &WordInput) -> Result<Parse> {
        let scores = self.scores(input);
        let heads = max_arborescence(&scores.edges)?;
        self.label_tree(input, &scores, &heads)
    }

    fn n_best(&self, input: &WordInput) -> Result<Vec<Parse>> {
        let scores = self.scores(input);
        let best = self.predict(input)?;
        let nb = n_best_variants(&best, |e| {
            let mut edges = scores.edges.clone();
            edges[[e.head.map_or(0, |h| h + 1), e.dependent + 1]] = f64::NEG_INFINITY;
            self.decode(input, &scores, &edges)
        })?;
        Ok(nb.parses)
    }
}

impl Parameters for BiaffineModel {
    fn tensors(&self) -> Vec<TensorView<'_>> {
        let mut v = self.edge.tensors("edge");
        v.extend(self.label.tensors("label"));
        v
    }

    fn tensors_mut(&mut self) -> Vec<(String, &mut [f64])> {
        let mut v = self.edge.tensors_mut("edge");
        v.extend(self.label.tensors_mut("label"));
        v
    }

    fn zeros_like(&self) -> Self {
        BiaffineModel::zeros(self.config.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sense::SenseIndex;
    use ndarray::array;

    fn ids(n: u32) -> Vec<SenseIndex> {
        (1..=n).map(SenseIndex::Plain).collect()
    }

    fn identity_model(k: usize) -> BiaffineModel {
        let config = BiaffineConfig {
            k,
            edge_dim: k,
            label_dim: k,
            activation: Activation::Identity,
            dropout: 0.0,
        };
        let mut m = BiaffineModel::zeros(config);
        for s in [&mut m.edge, &mut m.label] {
            s.head.weight = Array2::eye(k);
            s.dep.weight = Array2::eye(k);
        }
        m
    }

    #[test]
    fn constant_bias_scores() {
        let mut m = identity_model(2);
        m.edge.b[0] = 1.5;
        let input = WordInput::new("w", ids(3), array![[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]).unwrap();
        assert!(m.scores(&input).edges.iter().all(|v| *v == 1.5));
    }

    #[test]
    fn orthogonal_vectors_score_zero() {
        let mut m = identity_model(2);
        m.edge.u.index_axis_mut(Axis(0), 0).assign(&Array2::eye(2));
        let input = WordInput::new("w", ids(2), array![[1.0, 0.0], [0.0, 1.0]]).unwrap();
        let s = m.scores(&input).edges;
        assert_eq!(s[[1, 2]], 0.0);
        assert_eq!(s[[2, 1]], 0.0);
        assert_eq!(s[[1, 1]], 1.0);
    }

    #[test]
    fn scores_match_hand_arithmetic() {
        // MLPs identity at k' = 2; U, w, b chosen by hand
        let mut m = identity_model(2);
        m.edge.u.index_axis_mut(Axis(0), 0).assign(&array![[1.0, 2.0], [0.0, -1.0]]);
        m.edge.w.row_mut(0).assign(&array![0.5, -0.5, 1.0, 2.0]);
        m.edge.b[0] = 0.25;
        let input = WordInput::new("w", ids(3), array![[1.0, 0.0], [0.0, 2.0], [1.0, 1.0]]).unwrap();
        let s = m.scores(&input).edges;
        // nodes: root (2/3, 1), a (1, 0), b (0, 2), c (1, 1)
        let nodes = [[2.0 / 3.0, 1.0], [1.0, 0.0], [0.0, 2.0], [1.0, 1.0]];
        for (i, h) in nodes.iter().enumerate() {
            for (j, d) in nodes.iter().enumerate() {
                let bil = h[0] * (1.0 * d[0] + 2.0 * d[1]) + h[1] * (-d[1]);
                let lin = 0.5 * h[0] - 0.5 * h[1] + d[0] + 2.0 * d[1];
                assert!((s[[i, j]] - (bil + lin + 0.25)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn forced_structures() {
        let mut m = identity_model(2);
        m.edge.u.index_axis_mut(Axis(0), 0).assign(&Array2::zeros((2, 2)));
        let input = WordInput::new("w", ids(2), array![[1.0, 0.0], [0.0, 1.0]]).unwrap();
        let mut scores = m.scores(&input);
        let ninf = f64::NEG_INFINITY;
        scores.edges = array![[ninf, 3.0, 0.0], [ninf, ninf, 2.0], [ninf, 0.0, ninf]];
        scores.labels[0][[1, 2]] = 1.0;
        let heads = max_arborescence(&scores.edges).unwrap();
        let p = m.label_tree(&input, &scores, &heads).unwrap();
        assert_eq!(p.kinds, vec![SenseKind::Prototype, SenseKind::Metaphor]);
        assert_eq!(p.parents, vec![None, Some(0)]);

        scores.edges = array![[ninf, 3.0, 3.0], [ninf, ninf, 0.0], [ninf, 0.0, ninf]];
        let heads = max_arborescence(&scores.edges).unwrap();
        let p = m.label_tree(&input, &scores, &heads).unwrap();
        assert_eq!(p.kinds, vec![SenseKind::Prototype, SenseKind::Prototype]);
    }

    #[test]
    fn uniform_scores_give_log_m() {
        let m = BiaffineModel::zeros(BiaffineConfig {
            k: 2,
            edge_dim: 2,
            label_dim: 2,
            activation: Activation::default(),
            dropout: 0.0,
        });
        let input = WordInput::new("w", ids(4), Array2::ones((4, 2))).unwrap();
        let gold = Parse::new("w", ids(4), vec![SenseKind::Prototype; 4], vec![None; 4]).unwrap();
        let e = Example::new(input, gold).unwrap();
        // each sense has 4 candidate heads: the root and the 3 other senses
        assert!((m.loss(Part::Edge, &[&e]) - 4f64.ln()).abs() < 1e-12);
    }
}
