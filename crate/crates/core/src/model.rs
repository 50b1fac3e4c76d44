//! The annotation data model and its validator.
//!
//! A word's annotation is a forest over its senses. Roots are prototypes,
//! every other sense hangs off exactly one parent through a metaphor or
//! metonymy edge. Metaphors additionally record, for each feature of the
//! sense they extend, whether that feature is kept, lost or modified.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sense::{SenseId, SenseIndex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SenseKind {
    Prototype,
    Metaphor,
    Metonymy,
}

impl SenseKind {
    pub const ALL: [SenseKind; 3] = [SenseKind::Prototype, SenseKind::Metaphor, SenseKind::Metonymy];

    pub fn as_str(self) -> &'static str {
        match self {
            SenseKind::Prototype => "prototype",
            SenseKind::Metaphor => "metaphor",
            SenseKind::Metonymy => "metonymy",
        }
    }

    /// Position in [`SenseKind::ALL`].
    pub fn ordinal(self) -> usize {
        match self {
            SenseKind::Prototype => 0,
            SenseKind::Metaphor => 1,
            SenseKind::Metonymy => 2,
        }
    }
}

impl fmt::Display for SenseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn default_true() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// An inventory sense as seen by the annotator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SenseRecord {
    pub id: SenseIndex,
    pub definition: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub synonyms: Vec<String>,
    /// Annotator familiarity with the sense.
    #[serde(default = "default_true", skip_serializing_if = "is_true")]
    pub known: bool,
}

impl SenseRecord {
    pub fn new(id: SenseIndex, definition: impl Into<String>) -> Self {
        SenseRecord {
            id,
            definition: definition.into(),
            synonyms: Vec::new(),
            known: true,
        }
    }

    pub fn is_virtual(&self) -> bool {
        self.id.is_virtual()
    }

    pub fn is_split_half(&self) -> bool {
        self.id.is_split_half()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SenseLabel {
    #[serde(rename = "label")]
    pub kind: SenseKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<SenseIndex>,
}

impl SenseLabel {
    pub fn prototype() -> Self {
        SenseLabel {
            kind: SenseKind::Prototype,
            parent: None,
        }
    }

    pub fn metaphor(parent: SenseIndex) -> Self {
        SenseLabel {
            kind: SenseKind::Metaphor,
            parent: Some(parent),
        }
    }

    pub fn metonymy(parent: SenseIndex) -> Self {
        SenseLabel {
            kind: SenseKind::Metonymy,
            parent: Some(parent),
        }
    }
}

/// A feature of a sense, completing "This thing ___".
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feature {
    pub id: u32,
    pub text: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Kept,
    Lost,
    Modified,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureJudgement {
    pub feature_id: u32,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modified_text: Option<String>,
}

impl FeatureJudgement {
    pub fn kept(feature_id: u32) -> Self {
        FeatureJudgement {
            feature_id,
            verdict: Verdict::Kept,
            modified_text: None,
        }
    }

    pub fn lost(feature_id: u32) -> Self {
        FeatureJudgement {
            feature_id,
            verdict: Verdict::Lost,
            modified_text: None,
        }
    }

    pub fn modified(feature_id: u32, text: impl Into<String>) -> Self {
        FeatureJudgement {
            feature_id,
            verdict: Verdict::Modified,
            modified_text: Some(text.into()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SenseAnnotation {
    #[serde(flatten)]
    pub sense: SenseRecord,
    #[serde(flatten)]
    pub label: SenseLabel,
    #[serde(default, skip_serializing_if = "is_false")]
    pub conduit: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub features: Vec<Feature>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub judgements: Vec<FeatureJudgement>,
}

impl SenseAnnotation {
    pub fn new(sense: SenseRecord, label: SenseLabel) -> Self {
        SenseAnnotation {
            sense,
            label,
            conduit: false,
            features: Vec::new(),
            judgements: Vec::new(),
        }
    }

    pub fn id(&self) -> SenseIndex {
        self.sense.id
    }

    pub fn kind(&self) -> SenseKind {
        self.label.kind
    }

    pub fn parent(&self) -> Option<SenseIndex> {
        self.label.parent
    }
}

/// One annotator's forest over the senses of one word.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordAnnotation {
    pub word: String,
    pub annotator: String,
    #[serde(default = "default_true")]
    pub word_known: bool,
    pub senses: Vec<SenseAnnotation>,
}

impl WordAnnotation {
    pub fn sense(&self, id: SenseIndex) -> Option<&SenseAnnotation> {
        self.senses.iter().find(|s| s.id() == id)
    }

    pub fn sense_mut(&mut self, id: SenseIndex) -> Option<&mut SenseAnnotation> {
        self.senses.iter_mut().find(|s| s.id() == id)
    }

    pub fn sense_id(&self, id: SenseIndex) -> SenseId {
        SenseId::new(self.word.clone(), id)
    }

    pub fn ids(&self) -> impl Iterator<Item = SenseIndex> + '_ {
        self.senses.iter().map(|s| s.id())
    }

    pub fn prototypes(&self) -> impl Iterator<Item = SenseIndex> + '_ {
        self.senses
            .iter()
            .filter(|s| s.kind() == SenseKind::Prototype)
            .map(|s| s.id())
    }

    /// Senses whose parent is `id`, in document order.
    pub fn children(&self, id: SenseIndex) -> impl Iterator<Item = &SenseAnnotation> + '_ {
        self.senses.iter().filter(move |s| s.parent() == Some(id))
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }

    /// Returns `self` if valid, otherwise the violations as an error.
    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidAnnotation {
                word: self.word.clone(),
                violations: report.violations,
            })
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("annotation serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::malformed("annotation", e.to_string()))
    }
}

/// A broken invariant, naming the offending sense(s).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    EmptyAnnotation,
    DuplicateSense { sense: SenseIndex },
    EmptyDefinition { sense: SenseIndex },
    PrototypeHasParent { sense: SenseIndex, parent: SenseIndex },
    MissingParent { sense: SenseIndex },
    UnknownParent { sense: SenseIndex, parent: SenseIndex },
    Cycle { senses: Vec<SenseIndex> },
    NoPrototype,
    ConduitOnPrototype { sense: SenseIndex },
    MetonymyParentNotPrototype { sense: SenseIndex, parent: SenseIndex },
    MetaphorExtendsMetaphor { sense: SenseIndex, parent: SenseIndex },
    FeaturesWithoutMetaphor { sense: SenseIndex },
    EmptyFeatureText { sense: SenseIndex, feature_id: u32 },
    DuplicateFeatureId { sense: SenseIndex, feature_id: u32 },
    JudgementsOnNonMetaphor { sense: SenseIndex },
    SlippageIncomplete {
        sense: SenseIndex,
        parent: SenseIndex,
        missing: Vec<u32>,
        unexpected: Vec<u32>,
    },
    SlippageMinimumUnmet { sense: SenseIndex },
    ModifiedTextMissing { sense: SenseIndex, feature_id: u32 },
    ModifiedTextUnexpected { sense: SenseIndex, feature_id: u32 },
    SplitSiblingMissing { sense: SenseIndex },
    SplitAlongsideUnsplit { sense: SenseIndex },
}

impl Violation {
    /// Every sense the violation points at.
    pub fn senses(&self) -> Vec<SenseIndex> {
        use Violation::*;
        match self {
            EmptyAnnotation | NoPrototype => Vec::new(),
            Cycle { senses } => senses.clone(),
            PrototypeHasParent { sense, parent }
            | UnknownParent { sense, parent }
            | MetonymyParentNotPrototype { sense, parent }
            | MetaphorExtendsMetaphor { sense, parent }
            | SlippageIncomplete { sense, parent, .. } => vec![*sense, *parent],
            DuplicateSense { sense }
            | EmptyDefinition { sense }
            | MissingParent { sense }
            | ConduitOnPrototype { sense }
            | FeaturesWithoutMetaphor { sense }
            | EmptyFeatureText { sense, .. }
            | DuplicateFeatureId { sense, .. }
            | JudgementsOnNonMetaphor { sense }
            | SlippageMinimumUnmet { sense }
            | ModifiedTextMissing { sense, .. }
            | ModifiedTextUnexpected { sense, .. }
            | SplitSiblingMissing { sense }
            | SplitAlongsideUnsplit { sense } => vec![*sense],
        }
    }
}

fn join(ids: &[impl fmt::Display]) -> String {
    ids.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            EmptyAnnotation => write!(f, "annotation has no senses"),
            DuplicateSense { sense } => write!(f, "sense {sense} appears more than once"),
            EmptyDefinition { sense } => write!(f, "sense {sense} has an empty definition"),
            PrototypeHasParent { sense, parent } => {
                write!(f, "prototype {sense} has a parent ({parent})")
            }
            MissingParent { sense } => write!(f, "derived sense {sense} has no parent"),
            UnknownParent { sense, parent } => {
                write!(f, "sense {sense} names unknown parent {parent}")
            }
            Cycle { senses } => write!(f, "parent links form a cycle: {}", join(senses)),
            NoPrototype => write!(f, "no sense is labelled prototype"),
            ConduitOnPrototype { sense } => write!(f, "prototype {sense} is marked conduit"),
            MetonymyParentNotPrototype { sense, parent } => write!(
                f,
                "metonymy {sense} extends non-prototype {parent} without conduit"
            ),
            MetaphorExtendsMetaphor { sense, parent } => write!(
                f,
                "metaphor extends metaphor without conduit: {sense} -> {parent}"
            ),
            FeaturesWithoutMetaphor { sense } => write!(
                f,
                "sense {sense} has features but no metaphor extends it"
            ),
            EmptyFeatureText { sense, feature_id } => {
                write!(f, "feature {feature_id} of sense {sense} is empty")
            }
            DuplicateFeatureId { sense, feature_id } => {
                write!(f, "feature id {feature_id} repeated on sense {sense}")
            }
            JudgementsOnNonMetaphor { sense } => {
                write!(f, "sense {sense} has slippage judgements but is not a metaphor")
            }
            SlippageIncomplete {
                sense,
                parent,
                missing,
                unexpected,
            } => write!(
                f,
                "slippage of {sense} does not match the features of {parent} (missing [{}], unexpected [{}])",
                join(missing),
                join(unexpected)
            ),
            SlippageMinimumUnmet { sense } => write!(
                f,
                "slippage minimum unmet for {sense}: need a modified feature, or a kept and a lost feature"
            ),
            ModifiedTextMissing { sense, feature_id } => write!(
                f,
                "feature {feature_id} of {sense} is modified but has no modified text"
            ),
            ModifiedTextUnexpected { sense, feature_id } => write!(
                f,
                "feature {feature_id} of {sense} carries modified text but is not modified"
            ),
            SplitSiblingMissing { sense } => {
                write!(f, "split half {sense} has no sibling half")
            }
            SplitAlongsideUnsplit { sense } => write!(
                f,
                "sense {sense} is present together with its split halves"
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// Violations that mention `id`.
    pub fn for_sense(&self, id: SenseIndex) -> impl Iterator<Item = &Violation> + '_ {
        self.violations
            .iter()
            .filter(move |v| v.senses().contains(&id))
    }
}

/// Checks every invariant of a word annotation. Violations are collected,
/// never raised.
pub fn validate(annotation: &WordAnnotation) -> ValidationReport {
    let mut out = Vec::new();
    if annotation.senses.is_empty() {
        out.push(Violation::EmptyAnnotation);
        return ValidationReport { violations: out };
    }

    let mut by_id: HashMap<SenseIndex, &SenseAnnotation> = HashMap::new();
    for s in &annotation.senses {
        if by_id.insert(s.id(), s).is_some() {
            out.push(Violation::DuplicateSense { sense: s.id() });
        }
    }

    for s in &annotation.senses {
        let id = s.id();
        if s.sense.definition.trim().is_empty() {
            out.push(Violation::EmptyDefinition { sense: id });
        }
        match (s.kind(), s.parent()) {
            (SenseKind::Prototype, Some(parent)) => {
                out.push(Violation::PrototypeHasParent { sense: id, parent })
            }
            (SenseKind::Prototype, None) => {}
            (_, None) => out.push(Violation::MissingParent { sense: id }),
            (kind, Some(parent)) => match by_id.get(&parent) {
                None => out.push(Violation::UnknownParent { sense: id, parent }),
                Some(_) if parent == id => {}
                Some(p) => {
                    if !p.conduit {
                        if kind == SenseKind::Metonymy && p.kind() != SenseKind::Prototype {
                            out.push(Violation::MetonymyParentNotPrototype { sense: id, parent });
                        }
                        if kind == SenseKind::Metaphor && p.kind() == SenseKind::Metaphor {
                            out.push(Violation::MetaphorExtendsMetaphor { sense: id, parent });
                        }
                    }
                }
            },
        }
        if s.conduit && s.kind() == SenseKind::Prototype {
            out.push(Violation::ConduitOnPrototype { sense: id });
        }
    }

    out.extend(find_cycles(annotation, &by_id));
    if annotation.prototypes().next().is_none() {
        out.push(Violation::NoPrototype);
    }

    check_features(annotation, &by_id, &mut out);
    check_splits(annotation, &by_id, &mut out);

    ValidationReport { violations: out }
}

fn find_cycles(
    annotation: &WordAnnotation,
    by_id: &HashMap<SenseIndex, &SenseAnnotation>,
) -> Vec<Violation> {
    // 0 = unvisited, 1 = on current walk, 2 = settled
    let mut state: HashMap<SenseIndex, u8> = HashMap::new();
    let mut cycles = Vec::new();
    for start in annotation.ids() {
        if state.get(&start).copied().unwrap_or(0) != 0 {
            continue;
        }
        let mut walk = Vec::new();
        let mut cur = Some(start);
        while let Some(id) = cur {
            match state.get(&id).copied().unwrap_or(0) {
                2 => break,
                1 => {
                    let pos = walk.iter().position(|w| *w == id).expect("on walk");
                    let mut members: Vec<SenseIndex> = walk[pos..].to_vec();
                    members.sort();
                    cycles.push(Violation::Cycle { senses: members });
                    break;
                }
                _ => {
                    state.insert(id, 1);
                    walk.push(id);
                    cur = by_id
                        .get(&id)
                        .and_then(|s| match s.kind() {
                            SenseKind::Prototype => None,
                            _ => s.parent(),
                        })
                        .filter(|p| by_id.contains_key(p));
                }
            }
        }
        for id in walk {
            state.insert(id, 2);
        }
    }
    cycles
}

fn check_features(
    annotation: &WordAnnotation,
    by_id: &HashMap<SenseIndex, &SenseAnnotation>,
    out: &mut Vec<Violation>,
) {
    let extended_by_metaphor: BTreeSet<SenseIndex> = annotation
        .senses
        .iter()
        .filter(|s| s.kind() == SenseKind::Metaphor)
        .filter_map(|s| s.parent())
        .collect();

    for s in &annotation.senses {
        let id = s.id();
        if !s.features.is_empty() && !extended_by_metaphor.contains(&id) {
            out.push(Violation::FeaturesWithoutMetaphor { sense: id });
        }
        let mut seen = BTreeSet::new();
        for f in &s.features {
            if !seen.insert(f.id) {
                out.push(Violation::DuplicateFeatureId {
                    sense: id,
                    feature_id: f.id,
                });
            }
            if f.text.trim().is_empty() {
                out.push(Violation::EmptyFeatureText {
                    sense: id,
                    feature_id: f.id,
                });
            }
        }

        if s.kind() != SenseKind::Metaphor {
            if !s.judgements.is_empty() {
                out.push(Violation::JudgementsOnNonMetaphor { sense: id });
            }
            continue;
        }

        for j in &s.judgements {
            let has_text = j
                .modified_text
                .as_deref()
                .is_some_and(|t| !t.trim().is_empty());
            match j.verdict {
                Verdict::Modified if !has_text => out.push(Violation::ModifiedTextMissing {
                    sense: id,
                    feature_id: j.feature_id,
                }),
                Verdict::Kept | Verdict::Lost if j.modified_text.is_some() => {
                    out.push(Violation::ModifiedTextUnexpected {
                        sense: id,
                        feature_id: j.feature_id,
                    })
                }
                _ => {}
            }
        }

        if let Some(parent) = s.parent().and_then(|p| by_id.get(&p)) {
            let wanted: BTreeMap<u32, usize> =
                parent.features.iter().fold(BTreeMap::new(), |mut m, f| {
                    *m.entry(f.id).or_default() += 1;
                    m
                });
            let mut given: BTreeMap<u32, usize> = BTreeMap::new();
            for j in &s.judgements {
                *given.entry(j.feature_id).or_default() += 1;
            }
            let missing: Vec<u32> = wanted
                .keys()
                .filter(|f| !given.contains_key(f))
                .copied()
                .collect();
            let unexpected: Vec<u32> = given
                .iter()
                .filter(|(f, n)| !wanted.contains_key(f) || **n > 1)
                .map(|(f, _)| *f)
                .collect();
            if !missing.is_empty() || !unexpected.is_empty() {
                out.push(Violation::SlippageIncomplete {
                    sense: id,
                    parent: parent.id(),
                    missing,
                    unexpected,
                });
            }
        }

        if !slippage_minimum_met(&s.judgements) {
            out.push(Violation::SlippageMinimumUnmet { sense: id });
        }
    }
}

/// At least one modified feature, or a kept feature together with a lost one.
pub fn slippage_minimum_met(judgements: &[FeatureJudgement]) -> bool {
    let has = |v: Verdict| judgements.iter().any(|j| j.verdict == v);
    has(Verdict::Modified) || (has(Verdict::Kept) && has(Verdict::Lost))
}

fn check_splits(
    annotation: &WordAnnotation,
    by_id: &HashMap<SenseIndex, &SenseAnnotation>,
    out: &mut Vec<Violation>,
) {
    let mut unsplit_reported = BTreeSet::new();
    for id in annotation.ids() {
        if let SenseIndex::Split(i, half) = id {
            if !by_id.contains_key(&SenseIndex::Split(i, half.other())) {
                out.push(Violation::SplitSiblingMissing { sense: id });
            }
            let whole = SenseIndex::Plain(i);
            if by_id.contains_key(&whole) && unsplit_reported.insert(whole) {
                out.push(Violation::SplitAlongsideUnsplit { sense: whole });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn ix(s: &str) -> SenseIndex {
        s.parse().unwrap()
    }

    #[test]
    fn march_and_neck_validate() {
        assert_eq!(fixtures::march().validate().violations, vec![]);
        assert_eq!(fixtures::neck().validate().violations, vec![]);
        assert_eq!(fixtures::bridge().validate().violations, vec![]);
    }

    #[test]
    fn single_prototype_is_valid() {
        let a = fixtures::word("x", &[("1", SenseLabel::prototype())]);
        assert!(a.validate().is_valid());
    }

    #[test]
    fn empty_annotation_is_reported() {
        let a = fixtures::word("x", &[]);
        assert_eq!(a.validate().violations, vec![Violation::EmptyAnnotation]);
    }

    #[test]
    fn metaphor_of_metaphor_needs_conduit() {
        let mut a = fixtures::metaphor_chain();
        let report = a.validate();
        assert!(report.violations.contains(&Violation::MetaphorExtendsMetaphor {
            sense: ix("3"),
            parent: ix("2"),
        }));
        assert_eq!(
            report.violations[0].to_string(),
            "metaphor extends metaphor without conduit: 3 -> 2"
        );
        a.sense_mut(ix("2")).unwrap().conduit = true;
        assert!(a.validate().is_valid(), "{:?}", a.validate());
    }

    #[test]
    fn metonymy_of_metonymy_needs_conduit() {
        let mut a = fixtures::word(
            "x",
            &[
                ("1", SenseLabel::prototype()),
                ("2", SenseLabel::metonymy(ix("1"))),
                ("3", SenseLabel::metonymy(ix("2"))),
            ],
        );
        assert_eq!(
            a.validate().violations,
            vec![Violation::MetonymyParentNotPrototype {
                sense: ix("3"),
                parent: ix("2")
            }]
        );
        a.sense_mut(ix("2")).unwrap().conduit = true;
        assert!(a.validate().is_valid());
    }

    #[test]
    fn all_kept_slippage_is_reported() {
        let mut a = fixtures::neck();
        for j in &mut a.sense_mut(ix("2")).unwrap().judgements {
            j.verdict = Verdict::Kept;
            j.modified_text = None;
        }
        assert_eq!(
            a.validate().violations,
            vec![Violation::SlippageMinimumUnmet { sense: ix("2") }]
        );
    }

    #[test]
    fn missing_judgement_is_incomplete() {
        let mut a = fixtures::march();
        a.sense_mut(ix("3")).unwrap().judgements.remove(0);
        let v = a.validate().violations;
        assert!(v.contains(&Violation::SlippageIncomplete {
            sense: ix("3"),
            parent: ix("4"),
            missing: vec![1],
            unexpected: vec![],
        }));
    }

    #[test]
    fn cycle_and_missing_prototype() {
        let a = fixtures::word(
            "x",
            &[
                ("1", SenseLabel::metonymy(ix("2"))),
                ("2", SenseLabel::metonymy(ix("1"))),
            ],
        );
        let v = a.validate().violations;
        assert!(v.contains(&Violation::Cycle {
            senses: vec![ix("1"), ix("2")]
        }));
        assert!(v.contains(&Violation::NoPrototype));
    }

    #[test]
    fn self_loop_is_a_cycle() {
        let a = fixtures::word(
            "x",
            &[
                ("1", SenseLabel::prototype()),
                ("2", SenseLabel::metonymy(ix("2"))),
            ],
        );
        assert!(a.validate().violations.contains(&Violation::Cycle {
            senses: vec![ix("2")]
        }));
    }

    #[test]
    fn label_parent_consistency() {
        let a = fixtures::word(
            "x",
            &[
                ("1", SenseLabel::prototype()),
                (
                    "2",
                    SenseLabel {
                        kind: SenseKind::Prototype,
                        parent: Some(ix("1")),
                    },
                ),
                (
                    "3",
                    SenseLabel {
                        kind: SenseKind::Metonymy,
                        parent: None,
                    },
                ),
                ("4", SenseLabel::metonymy(ix("9"))),
            ],
        );
        let v = a.validate().violations;
        assert!(v.contains(&Violation::PrototypeHasParent {
            sense: ix("2"),
            parent: ix("1")
        }));
        assert!(v.contains(&Violation::MissingParent { sense: ix("3") }));
        assert!(v.contains(&Violation::UnknownParent {
            sense: ix("4"),
            parent: ix("9")
        }));
    }

    #[test]
    fn conduit_on_prototype_rejected() {
        let mut a = fixtures::word("x", &[("1", SenseLabel::prototype())]);
        a.senses[0].conduit = true;
        assert_eq!(
            a.validate().violations,
            vec![Violation::ConduitOnPrototype { sense: ix("1") }]
        );
    }

    #[test]
    fn features_require_a_metaphor_child() {
        let mut a = fixtures::word(
            "x",
            &[
                ("1", SenseLabel::prototype()),
                ("2", SenseLabel::metonymy(ix("1"))),
            ],
        );
        a.senses[0].features.push(Feature {
            id: 1,
            text: "is round".into(),
        });
        assert_eq!(
            a.validate().violations,
            vec![Violation::FeaturesWithoutMetaphor { sense: ix("1") }]
        );
    }

    #[test]
    fn judgements_only_on_metaphors() {
        let mut a = fixtures::neck();
        a.sense_mut(ix("3"))
            .unwrap()
            .judgements
            .push(FeatureJudgement::kept(1));
        assert!(a
            .validate()
            .violations
            .contains(&Violation::JudgementsOnNonMetaphor { sense: ix("3") }));
    }

    #[test]
    fn modified_text_presence_rules() {
        let mut a = fixtures::neck();
        let m = a.sense_mut(ix("2")).unwrap();
        m.judgements[0].modified_text = Some("odd".into());
        let v = a.validate().violations;
        assert!(v.contains(&Violation::ModifiedTextUnexpected {
            sense: ix("2"),
            feature_id: 1
        }));

        let mut b = fixtures::neck();
        let m = b.sense_mut(ix("4")).unwrap();
        let j = m
            .judgements
            .iter_mut()
            .find(|j| j.verdict == Verdict::Modified)
            .unwrap();
        j.modified_text = Some("  ".into());
        assert!(b
            .validate()
            .violations
            .iter()
            .any(|v| matches!(v, Violation::ModifiedTextMissing { .. })));
    }

    #[test]
    fn split_halves_must_pair_and_replace_the_whole() {
        let a = fixtures::word(
            "birth",
            &[
                ("1A", SenseLabel::prototype()),
                ("1", SenseLabel::prototype()),
            ],
        );
        let v = a.validate().violations;
        assert!(v.contains(&Violation::SplitSiblingMissing { sense: ix("1A") }));
        assert!(v.contains(&Violation::SplitAlongsideUnsplit { sense: ix("1") }));
    }

    #[test]
    fn duplicate_senses_and_empty_definitions() {
        let mut a = fixtures::word(
            "x",
            &[("1", SenseLabel::prototype()), ("1", SenseLabel::prototype())],
        );
        a.senses[1].sense.definition.clear();
        let v = a.validate().violations;
        assert!(v.contains(&Violation::DuplicateSense { sense: ix("1") }));
        assert!(v.contains(&Violation::EmptyDefinition { sense: ix("1") }));
    }

    #[test]
    fn json_uses_fixed_spellings() {
        let a = fixtures::march();
        let json = a.to_json();
        assert!(json.contains("\"label\": \"metaphor\""));
        assert!(json.contains("\"verdict\": \"kept\""));
        assert!(json.contains("\"verdict\": \"lost\""));
        assert_eq!(WordAnnotation::from_json(&json).unwrap(), a);
    }
}
