//! Polysemy parsers: a random baseline, sense-label classification plus an
//! embedding-distance spanning tree (MPD+MST), and a biaffine edge scorer
//! decoded as a maximum spanning arborescence.

pub mod biaffine;
pub mod checkpoint;
pub mod gradcheck;
pub mod mpd;
pub mod nn;
pub mod optim;
pub mod random;
pub mod train;

use std::collections::BTreeMap;

use ndarray::Array2;

use crate::corpus::EmbeddingTable;
use crate::error::{Error, Result};
use crate::parse::Parse;
use crate::sense::{SenseId, SenseIndex};

pub use biaffine::{BiaffineConfig, BiaffineModel};
pub use mpd::MpdModel;
pub use random::{random_parse, RandomBaseline};
pub use train::{train, EpochLog, ModelKind, TrainConfig, TrainedModel};

/// One word's senses and their vectors, rows in `ids` order.
#[derive(Clone, Debug, PartialEq)]
pub struct WordInput {
    pub word: String,
    pub ids: Vec<SenseIndex>,
    pub x: Array2<f64>,
}

impl WordInput {
    pub fn new(word: impl Into<String>, ids: Vec<SenseIndex>, x: Array2<f64>) -> Result<Self> {
        if ids.is_empty() {
            return Err(Error::NoSenses);
        }
        if x.nrows() != ids.len() {
            return Err(Error::LengthMismatch(ids.len(), x.nrows()));
        }
        Ok(WordInput {
            word: word.into(),
            ids,
            x,
        })
    }

    pub fn from_table(word: &str, ids: &[SenseIndex], table: &EmbeddingTable) -> Result<Self> {
        let mut x = Array2::zeros((ids.len(), table.dim));
        for (i, id) in ids.iter().enumerate() {
            let sid = SenseId::new(word, *id);
            let v = table.get(&sid).ok_or(Error::MissingEmbedding(sid))?;
            x.row_mut(i).assign(&ndarray::ArrayView1::from(v));
        }
        WordInput::new(word, ids.to_vec(), x)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.x.ncols()
    }
}

/// An input paired with its gold parse (same sense order).
#[derive(Clone, Debug, PartialEq)]
pub struct Example {
    pub input: WordInput,
    pub gold: Parse,
}

impl Example {
    pub fn new(input: WordInput, gold: Parse) -> Result<Self> {
        if input.ids != gold.ids {
            return Err(Error::MismatchedSenses(gold.word.clone()));
        }
        Ok(Example { input, gold })
    }
}

/// Builds examples for `words` from gold parses and embeddings. Words with
/// any missing vector are skipped and returned separately.
pub fn examples_for(
    words: &[String],
    gold: &BTreeMap<String, Parse>,
    table: &EmbeddingTable,
) -> Result<(Vec<Example>, Vec<String>)> {
    let mut out = Vec::new();
    let mut excluded = Vec::new();
    for w in words {
        let Some(parse) = gold.get(w) else {
            excluded.push(w.clone());
            continue;
        };
        match WordInput::from_table(w, &parse.ids, table) {
            Ok(input) => out.push(Example::new(input, parse.clone())?),
            Err(Error::MissingEmbedding(_)) => excluded.push(w.clone()),
            Err(e) => return Err(e),
        }
    }
    Ok((out, excluded))
}

/// A named, shaped view of one parameter tensor.
pub struct TensorView<'a> {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: &'a [f64],
}

/// Flat access to a model's parameters, in a fixed order.
pub trait Parameters {
    fn tensors(&self) -> Vec<TensorView<'_>>;
    fn tensors_mut(&mut self) -> Vec<(String, &mut [f64])>;
    /// Same shapes, all zeros.
    fn zeros_like(&self) -> Self;

    fn parameter_count(&self) -> usize {
        self.tensors().iter().map(|t| t.data.len()).sum()
    }

    fn all_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.data.iter().all(|x| x.is_finite()))
    }
}

pub(crate) fn view<'a, D: ndarray::Dimension>(
    name: impl Into<String>,
    a: &'a ndarray::Array<f64, D>,
) -> TensorView<'a> {
    TensorView {
        name: name.into(),
        shape: a.shape().to_vec(),
        data: a.as_slice().expect("standard layout"),
    }
}

pub(crate) fn view_mut<'a, D: ndarray::Dimension>(
    name: impl Into<String>,
    a: &'a mut ndarray::Array<f64, D>,
) -> (String, &'a mut [f64]) {
    (name.into(), a.as_slice_mut().expect("standard layout"))
}

/// A predictor of parses, with alternatives for the n-best protocol.
pub trait Parser {
    fn predict(&self, input: &WordInput) -> Result<Parse>;
    /// The 1-best parse first, then up to `n - 1` alternatives, where `n`
    /// is the number of senses.
    fn n_best(&self, input: &WordInput) -> Result<Vec<Parse>>;
}
