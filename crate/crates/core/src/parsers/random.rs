//! Uniformly random single-prototype parses.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use super::{Parser, WordInput};
use crate::decoding::orient_and_label;
use crate::error::{Error, Result};
use crate::model::SenseKind;
use crate::parse::Parse;
use crate::sense::SenseIndex;

/// Edges of the labelled tree on `0..n` encoded by a Prüfer sequence.
pub fn prufer_tree(sequence: &[usize]) -> Vec<(usize, usize)> {
    let n = sequence.len() + 2;
    let mut degree = vec![1usize; n];
    for &v in sequence {
        degree[v] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &v in sequence {
        let leaf = (0..n).find(|&u| degree[u] == 1).expect("a leaf exists");
        edges.push((leaf, v));
        degree[leaf] -= 1;
        degree[v] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&u| degree[u] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// A uniformly random tree over the senses, a uniformly random prototype
/// and uniformly random metaphor/metonymy labels on the other senses.
pub fn random_parse<R: Rng>(rng: &mut R, word: &str, ids: &[SenseIndex]) -> Result<Parse> {
    let n = ids.len();
    if n == 0 {
        return Err(Error::NoSenses);
    }
    let edges = if n == 1 {
        Vec::new()
    } else {
        let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
        prufer_tree(&seq)
    };
    let root = rng.gen_range(0..n);
    let labels: Vec<SenseKind> = (0..n)
        .map(|i| {
            if i == root {
                SenseKind::Prototype
            } else if rng.gen_bool(0.5) {
                SenseKind::Metaphor
            } else {
                SenseKind::Metonymy
            }
        })
        .collect();
    orient_and_label(word, ids, &edges, &labels, &labels)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomBaseline {
    pub seed: u64,
}

impl RandomBaseline {
    fn rng(&self, word: &str) -> ChaCha8Rng {
        let digest = Sha256::digest(word.as_bytes());
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(u64::from_le_bytes(digest[..8].try_into().expect("8 bytes")));
        rng
    }
}

impl Parser for RandomBaseline {
    fn predict(&self, input: &WordInput) -> Result<Parse> {
        random_parse(&mut self.rng(&input.word), &input.word, &input.ids)
    }

    /// The 1-best draw followed by further independent draws.
    fn n_best(&self, input: &WordInput) -> Result<Vec<Parse>> {
        let mut rng = self.rng(&input.word);
        (0..input.len())
            .map(|_| random_parse(&mut rng, &input.word, &input.ids))
            .collect()
    }
}
