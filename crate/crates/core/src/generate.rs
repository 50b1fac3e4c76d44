//! Random valid annotations, single-point corruptions of them, and
//! synthetic parsing data with planted forests.

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{
    slippage_minimum_met, Feature, FeatureJudgement, SenseAnnotation, SenseKind, SenseLabel,
    SenseRecord, Verdict, WordAnnotation,
};
use crate::parse::Parse;
use crate::parsers::{Example, WordInput};
use crate::sense::{Half, SenseIndex};

#[derive(Clone, Debug)]
pub struct ForestShape {
    pub max_senses: u32,
    pub max_virtual: u32,
    pub split_probability: f64,
    pub prototype_probability: f64,
    pub conduit_probability: f64,
}

impl Default for ForestShape {
    fn default() -> Self {
        ForestShape {
            max_senses: 8,
            max_virtual: 2,
            split_probability: 0.3,
            prototype_probability: 0.2,
            conduit_probability: 0.15,
        }
    }
}

/// A random annotation that passes validation.
pub fn random_annotation<R: Rng>(rng: &mut R, word: &str, shape: &ForestShape) -> WordAnnotation {
    let n = rng.gen_range(1..=shape.max_senses.max(1));
    let mut ids: Vec<SenseIndex> = (1..=n).map(SenseIndex::Plain).collect();
    if n >= 1 && rng.gen_bool(shape.split_probability) {
        let i = rng.gen_range(1..=n);
        ids.retain(|x| *x != SenseIndex::Plain(i));
        ids.push(SenseIndex::Split(i, Half::A));
        ids.push(SenseIndex::Split(i, Half::B));
    }
    for v in 1..=rng.gen_range(0..=shape.max_virtual) {
        ids.push(SenseIndex::Virtual(v));
    }
    ids.shuffle(rng);

    let mut senses: Vec<SenseAnnotation> = Vec::with_capacity(ids.len());
    for (pos, id) in ids.iter().enumerate() {
        let record = SenseRecord::new(*id, format!("definition of {word} {id}"));
        if pos == 0 || rng.gen_bool(shape.prototype_probability) {
            senses.push(SenseAnnotation::new(record, SenseLabel::prototype()));
            continue;
        }
        let p = rng.gen_range(0..pos);
        let parent = senses[p].id();
        let kind = if rng.gen_bool(0.5) {
            SenseKind::Metaphor
        } else {
            SenseKind::Metonymy
        };
        let legal = match (kind, senses[p].kind()) {
            (_, SenseKind::Prototype) => true,
            (SenseKind::Metonymy, _) => false,
            (SenseKind::Metaphor, parent_kind) => parent_kind != SenseKind::Metaphor,
            (SenseKind::Prototype, _) => true,
        };
        if !legal {
            senses[p].conduit = true;
        }
        let mut s = SenseAnnotation::new(
            record,
            SenseLabel {
                kind,
                parent: Some(parent),
            },
        );
        s.conduit = rng.gen_bool(shape.conduit_probability);
        senses.push(s);
    }

    let extended: Vec<SenseIndex> = senses
        .iter()
        .filter(|s| s.kind() == SenseKind::Metaphor)
        .filter_map(|s| s.parent())
        .collect();
    for s in &mut senses {
        if extended.contains(&s.id()) {
            let k = rng.gen_range(1..=3u32);
            s.features = (1..=k)
                .map(|f| Feature {
                    id: f,
                    text: format!("feature {f} of {}", s.id()),
                })
                .collect();
        }
    }
    for i in 0..senses.len() {
        if senses[i].kind() != SenseKind::Metaphor {
            continue;
        }
        let parent = senses[i].parent().expect("metaphor has parent");
        let features = senses
            .iter()
            .find(|s| s.id() == parent)
            .expect("parent present")
            .features
            .clone();
        let mut judgements: Vec<FeatureJudgement> = features
            .iter()
            .map(|f| match rng.gen_range(0..3) {
                0 => FeatureJudgement::kept(f.id),
                1 => FeatureJudgement::lost(f.id),
                _ => FeatureJudgement::modified(f.id, format!("{} (changed)", f.text)),
            })
            .collect();
        if !slippage_minimum_met(&judgements) {
            let j = &mut judgements[0];
            j.verdict = Verdict::Modified;
            j.modified_text = Some("changed".into());
        }
        senses[i].judgements = judgements;
    }

    WordAnnotation {
        word: word.to_string(),
        annotator: "generated".to_string(),
        word_known: true,
        senses,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Corruption {
    DropParent,
    AddCycle,
    DeleteJudgement,
    MetaphorOnMetaphor,
    AllKept,
}

/// Applies one corruption, or returns `None` when the annotation has no
/// place for it.
pub fn corrupt<R: Rng>(
    rng: &mut R,
    annotation: &WordAnnotation,
    corruption: Corruption,
) -> Option<WordAnnotation> {
    let mut a = annotation.clone();
    let pick = |rng: &mut R, v: Vec<usize>| v.choose(rng).copied();
    match corruption {
        Corruption::DropParent => {
            let i = pick(
                rng,
                (0..a.senses.len())
                    .filter(|&i| a.senses[i].parent().is_some())
                    .collect(),
            )?;
            a.senses[i].label.parent = None;
        }
        Corruption::AddCycle => {
            // a prototype made to hang off one of its own descendants
            let parse = crate::parse::Parse::from_annotation(&a).ok()?;
            let roots_with_desc: Vec<usize> = (0..parse.len())
                .filter(|&r| parse.parents[r].is_none())
                .filter(|&r| (0..parse.len()).any(|d| d != r && parse.root_of(d) == r))
                .collect();
            if let Some(r) = roots_with_desc.choose(rng) {
                let descendants: Vec<usize> = (0..parse.len())
                    .filter(|&d| d != *r && parse.root_of(d) == *r)
                    .collect();
                let d = *descendants.choose(rng)?;
                let (rid, did) = (parse.ids[*r], parse.ids[d]);
                let s = a.sense_mut(rid)?;
                s.label = SenseLabel::metonymy(did);
            } else {
                let s = &mut a.senses[0];
                let id = s.id();
                s.label = SenseLabel::metonymy(id);
            }
        }
        Corruption::DeleteJudgement => {
            let i = pick(
                rng,
                (0..a.senses.len())
                    .filter(|&i| !a.senses[i].judgements.is_empty())
                    .collect(),
            )?;
            let j = rng.gen_range(0..a.senses[i].judgements.len());
            a.senses[i].judgements.remove(j);
        }
        Corruption::MetaphorOnMetaphor => {
            // a new metaphor hung off an existing non-conduit metaphor
            let i = pick(
                rng,
                (0..a.senses.len())
                    .filter(|&i| a.senses[i].kind() == SenseKind::Metaphor && !a.senses[i].conduit)
                    .collect(),
            )?;
            let parent = a.senses[i].id();
            let next = a
                .ids()
                .filter_map(|x| match x {
                    SenseIndex::Virtual(v) => Some(v),
                    _ => None,
                })
                .max()
                .unwrap_or(0)
                + 1;
            if a.senses[i].features.is_empty() {
                a.senses[i].features = vec![Feature {
                    id: 1,
                    text: "stands out".into(),
                }];
                for s in &mut a.senses {
                    if s.kind() == SenseKind::Metaphor && s.parent() == Some(parent) {
                        s.judgements = vec![FeatureJudgement::modified(1, "stands apart")];
                    }
                }
            }
            let mut s = SenseAnnotation::new(
                SenseRecord::new(SenseIndex::Virtual(next), "an added sense"),
                SenseLabel::metaphor(parent),
            );
            s.judgements = a.senses[i]
                .features
                .iter()
                .map(|f| FeatureJudgement::modified(f.id, "altered"))
                .collect();
            a.senses.push(s);
        }
        Corruption::AllKept => {
            let i = pick(
                rng,
                (0..a.senses.len())
                    .filter(|&i| !a.senses[i].judgements.is_empty())
                    .collect(),
            )?;
            for j in &mut a.senses[i].judgements {
                j.verdict = Verdict::Kept;
                j.modified_text = None;
            }
        }
    }
    Some(a)
}

/// Settings for planted forests whose structure is recoverable from the
/// sense vectors.
#[derive(Clone, Debug)]
pub struct SyntheticShape {
    pub min_senses: usize,
    pub max_senses: usize,
    pub prototype_probability: f64,
    pub noise: f64,
    pub noise_dims: usize,
}

impl Default for SyntheticShape {
    fn default() -> Self {
        SyntheticShape {
            min_senses: 2,
            max_senses: 10,
            prototype_probability: 0.15,
            noise: 0.05,
            noise_dims: 4,
        }
    }
}

impl SyntheticShape {
    /// Vector width: own slot, parent slot, prototype flag, two label
    /// indicators and pure-noise coordinates.
    pub fn dim(&self) -> usize {
        2 * self.max_senses + 3 + self.noise_dims
    }
}

/// A random forest over `n` senses: the first sense in a random order is a
/// prototype, later ones are prototypes with some probability or attach to
/// an earlier sense as metaphor or metonymy.
pub fn planted_forest<R: Rng>(rng: &mut R, word: &str, n: usize, prototype_probability: f64) -> Parse {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut parents = vec![None; n];
    let mut kinds = vec![SenseKind::Prototype; n];
    for (pos, &i) in order.iter().enumerate() {
        if pos == 0 || rng.gen_bool(prototype_probability) {
            continue;
        }
        parents[i] = Some(order[rng.gen_range(0..pos)]);
        kinds[i] = if rng.gen_bool(0.5) {
            SenseKind::Metaphor
        } else {
            SenseKind::Metonymy
        };
    }
    Parse::new(
        word,
        (1..=n as u32).map(SenseIndex::Plain).collect(),
        kinds,
        parents,
    )
    .expect("planted forest is valid")
}

/// Words with planted forests and vectors that encode them: each sense
/// holds a one-hot code of its own random slot, the code of its parent's
/// slot, a prototype flag and its label, all plus Gaussian noise.
pub fn synthetic_examples<R: Rng>(rng: &mut R, words: usize, shape: &SyntheticShape) -> Vec<Example> {
    let noise = rand_distr::Normal::new(0.0, shape.noise).expect("noise scale is finite");
    let slots = shape.max_senses;
    (0..words)
        .map(|w| {
            let n = rng.gen_range(shape.min_senses..=shape.max_senses);
            let gold = planted_forest(rng, &format!("synthetic{w}"), n, shape.prototype_probability);
            let mut slot: Vec<usize> = (0..slots).collect();
            slot.shuffle(rng);
            let mut x = Array2::zeros((n, shape.dim()));
            for i in 0..n {
                x[[i, slot[i]]] = 1.0;
                match gold.parents[i] {
                    Some(p) => x[[i, slots + slot[p]]] = 1.0,
                    None => x[[i, 2 * slots]] = 1.0,
                }
                match gold.kinds[i] {
                    SenseKind::Metaphor => x[[i, 2 * slots + 1]] = 1.0,
                    SenseKind::Metonymy => x[[i, 2 * slots + 2]] = 1.0,
                    SenseKind::Prototype => {}
                }
                for v in x.row_mut(i).iter_mut() {
                    *v += rng.sample(noise);
                }
            }
            let input = WordInput::new(gold.word.clone(), gold.ids.clone(), x).expect("rows match senses");
            Example::new(input, gold).expect("same senses")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_annotations_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for i in 0..500 {
            let a = random_annotation(&mut rng, &format!("w{i}"), &ForestShape::default());
            assert!(a.validate().is_valid(), "{:#?}\n{:?}", a, a.validate());
        }
    }
}
