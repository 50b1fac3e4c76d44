//! In-progress annotations: completeness checks, allowed parents and sense
//! edits (split, merge, virtual senses, familiarity).

use std::collections::{BTreeMap, BTreeSet};

use chainnet::model::{slippage_minimum_met, Violation};
use chainnet::sense::Half;
use chainnet::{
    Feature, FeatureJudgement, SenseAnnotation, SenseIndex, SenseKind, SenseLabel, SenseRecord, Verdict,
    WordAnnotation,
};
use serde::{Deserialize, Serialize};

/// A sense row that may still lack its label or parent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DraftSense {
    #[serde(flatten)]
    pub sense: SenseRecord,
    #[serde(default)]
    pub label: Option<SenseKind>,
    #[serde(default)]
    pub parent: Option<SenseIndex>,
    #[serde(default)]
    pub conduit: bool,
    #[serde(default)]
    pub features: Vec<Feature>,
    #[serde(default)]
    pub judgements: Vec<FeatureJudgement>,
}

impl DraftSense {
    pub fn blank(sense: SenseRecord) -> Self {
        DraftSense {
            sense,
            label: None,
            parent: None,
            conduit: false,
            features: Vec::new(),
            judgements: Vec::new(),
        }
    }

    pub fn id(&self) -> SenseIndex {
        self.sense.id
    }

    fn clear_link(&mut self) {
        self.parent = None;
        self.judgements.clear();
    }
}

/// The same JSON shape as a [`WordAnnotation`], with labels optional.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Draft {
    pub word: String,
    #[serde(default)]
    pub annotator: String,
    #[serde(default = "yes")]
    pub word_known: bool,
    pub senses: Vec<DraftSense>,
}

fn yes() -> bool {
    true
}

impl From<&WordAnnotation> for Draft {
    fn from(a: &WordAnnotation) -> Self {
        Draft {
            word: a.word.clone(),
            annotator: a.annotator.clone(),
            word_known: a.word_known,
            senses: a
                .senses
                .iter()
                .map(|s| DraftSense {
                    sense: s.sense.clone(),
                    label: Some(s.kind()),
                    parent: s.parent(),
                    conduit: s.conduit,
                    features: s.features.clone(),
                    judgements: s.judgements.clone(),
                })
                .collect(),
        }
    }
}

impl Draft {
    pub fn new(word: impl Into<String>, annotator: impl Into<String>, senses: Vec<SenseRecord>) -> Self {
        Draft {
            word: word.into(),
            annotator: annotator.into(),
            word_known: true,
            senses: senses.into_iter().map(DraftSense::blank).collect(),
        }
    }

    pub fn sense(&self, id: SenseIndex) -> Option<&DraftSense> {
        self.senses.iter().find(|s| s.id() == id)
    }

    fn sense_mut(&mut self, id: SenseIndex) -> Option<&mut DraftSense> {
        self.senses.iter_mut().find(|s| s.id() == id)
    }

    /// The full annotation, if every sense has a label and every derived
    /// sense a parent.
    pub fn to_annotation(&self) -> Option<WordAnnotation> {
        let senses = self
            .senses
            .iter()
            .map(|s| {
                let label = match s.label? {
                    SenseKind::Prototype => SenseLabel::prototype(),
                    kind => SenseLabel {
                        kind,
                        parent: Some(s.parent?),
                    },
                };
                Some(SenseAnnotation {
                    sense: s.sense.clone(),
                    label,
                    conduit: s.conduit,
                    features: s.features.clone(),
                    judgements: s.judgements.clone(),
                })
            })
            .collect::<Option<Vec<_>>>()?;
        Some(WordAnnotation {
            word: self.word.clone(),
            annotator: self.annotator.clone(),
            word_known: self.word_known,
            senses,
        })
    }

    /// Senses reachable from `id` through child links.
    pub fn descendants(&self, id: SenseIndex) -> BTreeSet<SenseIndex> {
        let mut out = BTreeSet::new();
        let mut frontier = vec![id];
        while let Some(p) = frontier.pop() {
            for s in &self.senses {
                if s.parent == Some(p) && s.label != Some(SenseKind::Prototype) && out.insert(s.id()) {
                    frontier.push(s.id());
                }
            }
        }
        out
    }

    /// Parents the sense may take as a metaphor and as a metonymy: never
    /// itself or one of its descendants; metonymy only off prototypes,
    /// metaphor off prototypes and metonymies, either off conduits.
    pub fn allowed_parents(&self, id: SenseIndex) -> AllowedParents {
        let banned = self.descendants(id);
        let candidates = self
            .senses
            .iter()
            .filter(|s| s.id() != id && !banned.contains(&s.id()));
        let mut out = AllowedParents::default();
        for s in candidates {
            let conduit = s.conduit && s.label.is_some_and(|k| k != SenseKind::Prototype);
            match s.label {
                Some(SenseKind::Prototype) => {
                    out.metaphor.push(s.id());
                    out.metonymy.push(s.id());
                }
                Some(SenseKind::Metonymy) => {
                    out.metaphor.push(s.id());
                    if conduit {
                        out.metonymy.push(s.id());
                    }
                }
                Some(SenseKind::Metaphor) if conduit => {
                    out.metaphor.push(s.id());
                    out.metonymy.push(s.id());
                }
                _ => {}
            }
        }
        out
    }

    pub fn check(&self) -> ValidationResponse {
        let mut missing: BTreeMap<SenseIndex, Vec<Missing>> = BTreeMap::new();
        let extended: BTreeSet<SenseIndex> = self
            .senses
            .iter()
            .filter(|s| s.label == Some(SenseKind::Metaphor))
            .filter_map(|s| s.parent)
            .collect();
        for s in &self.senses {
            let m = missing.entry(s.id()).or_default();
            match s.label {
                None => m.push(Missing::Label),
                Some(SenseKind::Prototype) => {}
                Some(_) if s.parent.is_none() => m.push(Missing::Parent),
                Some(_) => {}
            }
            if extended.contains(&s.id()) && s.features.is_empty() {
                m.push(Missing::Features);
            }
            if s.label == Some(SenseKind::Metaphor) {
                if let Some(parent) = s.parent.and_then(|p| self.sense(p)) {
                    let judged: BTreeSet<u32> = s.judgements.iter().map(|j| j.feature_id).collect();
                    let all_judged = parent.features.iter().all(|f| judged.contains(&f.id));
                    if !all_judged || !slippage_minimum_met(&s.judgements) {
                        m.push(Missing::Judgements);
                    }
                    if s
                        .judgements
                        .iter()
                        .any(|j| j.verdict == Verdict::Modified && j.modified_text.as_deref().is_none_or(|t| t.trim().is_empty()))
                    {
                        m.push(Missing::ModifiedText);
                    }
                }
            }
        }
        let violations = self
            .to_annotation()
            .map(|a| a.validate().violations)
            .unwrap_or_default();
        let senses: Vec<SenseStatus> = self
            .senses
            .iter()
            .map(|s| {
                let own: Vec<Violation> = violations
                    .iter()
                    .filter(|v| v.senses().first() == Some(&s.id()))
                    .cloned()
                    .collect();
                let missing = missing.remove(&s.id()).unwrap_or_default();
                SenseStatus {
                    id: s.id(),
                    complete: missing.is_empty() && own.is_empty(),
                    missing,
                    violations: own,
                    allowed_parents: self.allowed_parents(s.id()),
                }
            })
            .collect();
        let complete = !self.senses.is_empty() && senses.iter().all(|s| s.complete) && violations.is_empty();
        ValidationResponse {
            complete,
            senses,
            violations,
            uncovered: Vec::new(),
        }
    }

    /// As [`Draft::check`], also requiring every inventory sense to appear,
    /// whole or as both split halves.
    pub fn check_against(&self, inventory: &[SenseRecord]) -> ValidationResponse {
        let mut r = self.check();
        let present: BTreeSet<SenseIndex> = self.senses.iter().map(|s| s.id()).collect();
        r.uncovered = inventory
            .iter()
            .map(|s| s.id)
            .filter(|&id| match id {
                SenseIndex::Plain(i) => {
                    !present.contains(&id)
                        && !(present.contains(&SenseIndex::Split(i, Half::A))
                            && present.contains(&SenseIndex::Split(i, Half::B)))
                }
                other => !present.contains(&other),
            })
            .collect();
        r.complete &= r.uncovered.is_empty();
        r
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AllowedParents {
    pub metaphor: Vec<SenseIndex>,
    pub metonymy: Vec<SenseIndex>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Missing {
    Label,
    Parent,
    Features,
    Judgements,
    ModifiedText,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SenseStatus {
    pub id: SenseIndex,
    pub complete: bool,
    pub missing: Vec<Missing>,
    pub violations: Vec<Violation>,
    pub allowed_parents: AllowedParents,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationResponse {
    /// Every sense complete and no violations: the draft may be submitted.
    pub complete: bool,
    pub senses: Vec<SenseStatus>,
    pub violations: Vec<Violation>,
    /// Inventory senses dropped from the draft.
    #[serde(default)]
    pub uncovered: Vec<SenseIndex>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum EditOp {
    Split {
        sense: u32,
        definition_a: String,
        definition_b: String,
    },
    Merge {
        sense: u32,
    },
    AddVirtual {
        definition: String,
    },
    DeleteVirtual {
        sense: SenseIndex,
    },
    /// Marks a sense, or the whole word when `sense` is absent.
    MarkUnknown {
        #[serde(default)]
        sense: Option<SenseIndex>,
        #[serde(default)]
        known: bool,
    },
    /// Replaces the draft's rows wholesale (label and link edits).
    Update {
        draft: Draft,
    },
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EditError {
    #[error("sense {0} is not in the draft")]
    UnknownSense(SenseIndex),
    #[error("sense {0} is not a plain inventory sense")]
    NotPlain(SenseIndex),
    #[error("sense {0} is not split")]
    NotSplit(u32),
    #[error("sense {0} is not virtual")]
    NotVirtual(SenseIndex),
    #[error("definition must not be empty")]
    EmptyDefinition,
    #[error("updated draft is for word `{0}`")]
    WrongWord(String),
}

impl Draft {
    /// Applies one edit. Links into removed senses are cleared, so their
    /// children show up as incomplete. `inventory` supplies definitions
    /// restored on merge.
    pub fn apply(&mut self, op: EditOp, inventory: &[SenseRecord]) -> Result<(), EditError> {
        match op {
            EditOp::Split {
                sense,
                definition_a,
                definition_b,
            } => {
                let id = SenseIndex::Plain(sense);
                let pos = self
                    .senses
                    .iter()
                    .position(|s| s.id() == id)
                    .ok_or(EditError::NotPlain(id))?;
                if definition_a.trim().is_empty() || definition_b.trim().is_empty() {
                    return Err(EditError::EmptyDefinition);
                }
                let old = self.senses.remove(pos);
                let half = |h: Half, def: String| {
                    let mut r = SenseRecord::new(SenseIndex::Split(sense, h), def);
                    r.synonyms = old.sense.synonyms.clone();
                    r.known = old.sense.known;
                    DraftSense::blank(r)
                };
                self.senses.insert(pos, half(Half::B, definition_b));
                self.senses.insert(pos, half(Half::A, definition_a));
                self.unlink(&[id]);
            }
            EditOp::Merge { sense } => {
                let halves = [SenseIndex::Split(sense, Half::A), SenseIndex::Split(sense, Half::B)];
                let pos = self
                    .senses
                    .iter()
                    .position(|s| halves.contains(&s.id()))
                    .ok_or(EditError::NotSplit(sense))?;
                self.senses.retain(|s| !halves.contains(&s.id()));
                let id = SenseIndex::Plain(sense);
                let record = inventory
                    .iter()
                    .find(|r| r.id == id)
                    .cloned()
                    .unwrap_or_else(|| SenseRecord::new(id, format!("sense {sense}")));
                self.senses.insert(pos, DraftSense::blank(record));
                self.unlink(&halves);
            }
            EditOp::AddVirtual { definition } => {
                if definition.trim().is_empty() {
                    return Err(EditError::EmptyDefinition);
                }
                let next = self
                    .senses
                    .iter()
                    .filter_map(|s| match s.id() {
                        SenseIndex::Virtual(v) => Some(v),
                        _ => None,
                    })
                    .max()
                    .unwrap_or(0)
                    + 1;
                self.senses
                    .push(DraftSense::blank(SenseRecord::new(SenseIndex::Virtual(next), definition)));
            }
            EditOp::DeleteVirtual { sense } => {
                if !sense.is_virtual() {
                    return Err(EditError::NotVirtual(sense));
                }
                if self.sense(sense).is_none() {
                    return Err(EditError::UnknownSense(sense));
                }
                self.senses.retain(|s| s.id() != sense);
                self.unlink(&[sense]);
            }
            EditOp::MarkUnknown { sense, known } => match sense {
                None => self.word_known = known,
                Some(id) => {
                    self.sense_mut(id).ok_or(EditError::UnknownSense(id))?.sense.known = known;
                }
            },
            EditOp::Update { draft } => {
                if draft.word != self.word {
                    return Err(EditError::WrongWord(draft.word));
                }
                let annotator = std::mem::take(&mut self.annotator);
                *self = draft;
                self.annotator = annotator;
            }
        }
        Ok(())
    }

    fn unlink(&mut self, removed: &[SenseIndex]) {
        for s in &mut self.senses {
            if s.parent.is_some_and(|p| removed.contains(&p)) {
                s.clear_link();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chainnet::fixtures;

    fn ix(s: &str) -> SenseIndex {
        s.parse().unwrap()
    }

    #[test]
    fn fixtures_check_clean() {
        for a in [fixtures::march(), fixtures::neck(), fixtures::birth_split(), fixtures::twin_virtual()] {
            let r = Draft::from(&a).check();
            assert!(r.complete, "{}: {:?}", a.word, r);
        }
    }

    #[test]
    fn unlabelled_sense_is_flagged() {
        let mut d = Draft::from(&fixtures::march());
        let s3 = d.senses.iter_mut().find(|s| s.id() == ix("3")).unwrap();
        s3.label = None;
        s3.parent = None;
        s3.judgements.clear();
        let r = d.check();
        assert!(!r.complete);
        let st = r.senses.iter().find(|s| s.id == ix("3")).unwrap();
        assert!(!st.complete);
        assert!(st.missing.contains(&Missing::Label));
    }

    #[test]
    fn allowed_parent_sets() {
        // 1 prototype, 2 metaphor of 1, 3 metonymy of 1, 4 metaphor of 3 (conduit 3)
        let mut d = Draft::new(
            "w",
            "a",
            (1..=4).map(|i| SenseRecord::new(SenseIndex::Plain(i), "d")).collect(),
        );
        let set = |d: &mut Draft, i: &str, k: SenseKind, p: Option<&str>, conduit: bool| {
            let s = d.sense_mut(ix(i)).unwrap();
            s.label = Some(k);
            s.parent = p.map(ix);
            s.conduit = conduit;
        };
        set(&mut d, "1", SenseKind::Prototype, None, false);
        set(&mut d, "2", SenseKind::Metaphor, Some("1"), false);
        set(&mut d, "3", SenseKind::Metonymy, Some("1"), true);
        set(&mut d, "4", SenseKind::Metaphor, Some("3"), false);
        let a = d.allowed_parents(ix("4"));
        // metaphor: prototypes, metonymies and conduits, not 2 (metaphor), not itself
        assert_eq!(a.metaphor, vec![ix("1"), ix("3")]);
        assert_eq!(a.metonymy, vec![ix("1"), ix("3")]);
        // 3's descendants (4) are never offered to 3
        let a3 = d.allowed_parents(ix("3"));
        assert_eq!(a3.metaphor, vec![ix("1")]);
        assert!(!a3.metaphor.contains(&ix("3")));
    }

    #[test]
    fn split_merge_and_virtual_edits() {
        let inv: Vec<SenseRecord> = (1..=3).map(|i| SenseRecord::new(SenseIndex::Plain(i), format!("def {i}"))).collect();
        let mut d = Draft::new("birth", "a", inv.clone());
        d.apply(
            EditOp::Split {
                sense: 1,
                definition_a: "the event".into(),
                definition_b: "a beginning".into(),
            },
            &inv,
        )
        .unwrap();
        let ids: Vec<String> = d.senses.iter().map(|s| s.id().to_string()).collect();
        assert_eq!(ids, vec!["1A", "1B", "2", "3"]);
        assert_eq!(
            d.apply(EditOp::Merge { sense: 2 }, &inv),
            Err(EditError::NotSplit(2))
        );
        d.apply(EditOp::Merge { sense: 1 }, &inv).unwrap();
        assert_eq!(d.senses[0].sense.definition, "def 1");

        d.apply(EditOp::AddVirtual { definition: "a pair".into() }, &inv).unwrap();
        assert_eq!(d.senses.last().unwrap().id(), ix("V1"));
        let child = d.sense_mut(ix("2")).unwrap();
        child.label = Some(SenseKind::Metonymy);
        child.parent = Some(ix("V1"));
        assert_eq!(
            d.apply(EditOp::DeleteVirtual { sense: ix("2") }, &inv),
            Err(EditError::NotVirtual(ix("2")))
        );
        d.apply(EditOp::DeleteVirtual { sense: ix("V1") }, &inv).unwrap();
        assert_eq!(d.sense(ix("2")).unwrap().parent, None);
        let st = d.check();
        assert!(st.senses.iter().find(|s| s.id == ix("2")).unwrap().missing.contains(&Missing::Parent));
    }
}
