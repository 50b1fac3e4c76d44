//! Removal of split and virtual senses ahead of parsing experiments.
//!
//! Both operations re-parent senses. Feature lists and slippage judgements
//! travel with the metaphors that judged them: a sense that ends up
//! extended by metaphors takes over the features those metaphors judged,
//! and a parent that a re-parented child could not legally attach to is
//! marked conduit. Every such repair is reported as a [`Warning`].

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::model::{Feature, FeatureJudgement, SenseAnnotation, SenseKind, WordAnnotation};
use crate::sense::{Half, SenseIndex};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "warning", rename_all = "snake_case")]
pub enum Warning {
    /// Both halves of a split were metaphors; half A was kept.
    BothHalvesMetaphor { sense: u32 },
    /// A virtual prototype was removed and its children became prototypes.
    VirtualPrototypeRemoved { sense: SenseIndex, promoted: Vec<SenseIndex> },
    /// A sense was marked conduit so a re-parented child stays attachable.
    ConduitAdded { sense: SenseIndex },
    /// Metaphors that judged different feature lists now share one parent;
    /// the features a metaphor never judged were recorded as lost.
    FeaturesMerged { sense: SenseIndex, filled: Vec<(SenseIndex, u32)> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Preprocessed {
    pub annotation: WordAnnotation,
    pub warnings: Vec<Warning>,
}

/// A sense of the output together with the parent it judged features of in
/// the input.
struct Planned {
    sense: SenseAnnotation,
    origin: Option<SenseIndex>,
}

/// Re-merges every split pair into its whole sense, keeping the annotation
/// of the non-metaphorical half.
pub fn merge_split(annotation: &WordAnnotation) -> Preprocessed {
    let pairs: BTreeSet<u32> = annotation
        .ids()
        .filter_map(|id| match id {
            SenseIndex::Split(i, _) => Some(i),
            _ => None,
        })
        .collect();
    let mut out = Preprocessed {
        annotation: annotation.clone(),
        warnings: Vec::new(),
    };
    // one pair at a time, so merged senses never close a cycle between pairs
    for i in pairs {
        let step = merge_pair(&out.annotation, i);
        out.annotation = step.annotation;
        out.warnings.extend(step.warnings);
    }
    out
}

fn merge_pair(annotation: &WordAnnotation, i: u32) -> Preprocessed {
    let by_id: HashMap<SenseIndex, &SenseAnnotation> =
        annotation.senses.iter().map(|s| (s.id(), s)).collect();
    let mut warnings = Vec::new();

    let a = by_id.get(&SenseIndex::Split(i, Half::A));
    let b = by_id.get(&SenseIndex::Split(i, Half::B));
    let is_metaphor = |h: Option<&&SenseAnnotation>| h.is_some_and(|s| s.kind() == SenseKind::Metaphor);
    let half = match (a.is_some(), b.is_some()) {
        (true, false) => Half::A,
        (false, true) => Half::B,
        _ if !is_metaphor(a) => Half::A,
        _ if !is_metaphor(b) => Half::B,
        _ => {
            warnings.push(Warning::BothHalvesMetaphor { sense: i });
            Half::A
        }
    };
    let kept = SenseIndex::Split(i, half);
    let dropped = SenseIndex::Split(i, half.other());

    let redirect = |id: SenseIndex| if id == kept || id == dropped { SenseIndex::Plain(i) } else { id };
    let descends_from_dropped = {
        let mut at = by_id[&kept].parent();
        let mut seen = BTreeSet::new();
        loop {
            match at {
                Some(p) if p == dropped => break true,
                Some(p) if seen.insert(p) => at = by_id.get(&p).and_then(|s| s.parent()),
                _ => break false,
            }
        }
    };

    let mut planned = Vec::new();
    for s in &annotation.senses {
        if s.id() == dropped {
            continue;
        }
        let mut out = s.clone();
        out.sense.id = redirect(s.id());
        let mut parent = s.parent();
        if s.id() == kept && descends_from_dropped {
            // the kept half sat below its own sibling: take the sibling's place
            let sibling = by_id[&dropped];
            parent = sibling.parent();
            if sibling.kind() == SenseKind::Prototype || parent.is_none() {
                out.label.kind = SenseKind::Prototype;
            }
        }
        out.label.parent = match out.label.kind {
            SenseKind::Prototype => None,
            _ => parent.map(redirect),
        };
        planned.push(Planned {
            origin: s.parent(),
            sense: out,
        });
    }
    reconcile(annotation, planned, warnings)
}

/// Removes every virtual sense, attaching its children to its nearest
/// non-virtual ancestor with their own labels.
pub fn strip_virtual(annotation: &WordAnnotation) -> Preprocessed {
    if !annotation.ids().any(|i| i.is_virtual()) {
        return Preprocessed {
            annotation: annotation.clone(),
            warnings: Vec::new(),
        };
    }
    let by_id: HashMap<SenseIndex, &SenseAnnotation> =
        annotation.senses.iter().map(|s| (s.id(), s)).collect();
    let mut promoted: BTreeMap<SenseIndex, Vec<SenseIndex>> = BTreeMap::new();

    let mut planned = Vec::new();
    for s in annotation.senses.iter().filter(|s| !s.id().is_virtual()) {
        let mut out = s.clone();
        let mut parent = s.parent();
        let mut last_virtual = None;
        let mut hops = 0;
        while let Some(p) = parent.filter(|p| p.is_virtual()) {
            last_virtual = Some(p);
            parent = by_id.get(&p).and_then(|v| v.parent());
            hops += 1;
            if hops > annotation.senses.len() {
                parent = None;
                break;
            }
        }
        if parent.is_none() && s.kind() != SenseKind::Prototype {
            out.label.kind = SenseKind::Prototype;
            if let Some(v) = last_virtual {
                promoted.entry(v).or_default().push(s.id());
            }
        }
        out.label.parent = parent;
        planned.push(Planned {
            origin: s.parent(),
            sense: out,
        });
    }
    let warnings = promoted
        .into_iter()
        .map(|(sense, promoted)| Warning::VirtualPrototypeRemoved { sense, promoted })
        .collect();
    reconcile(annotation, planned, warnings)
}

/// Split senses merged, then virtual senses stripped.
pub fn preprocess(annotation: &WordAnnotation) -> Preprocessed {
    let merged = merge_split(annotation);
    let mut stripped = strip_virtual(&merged.annotation);
    let mut warnings = merged.warnings;
    warnings.append(&mut stripped.warnings);
    Preprocessed {
        annotation: stripped.annotation,
        warnings,
    }
}

fn reconcile(
    original: &WordAnnotation,
    planned: Vec<Planned>,
    mut warnings: Vec<Warning>,
) -> Preprocessed {
    let source: HashMap<SenseIndex, &SenseAnnotation> =
        original.senses.iter().map(|s| (s.id(), s)).collect();
    let mut senses: Vec<SenseAnnotation> = Vec::with_capacity(planned.len());
    let mut origins: HashMap<SenseIndex, SenseIndex> = HashMap::new();
    for Planned { mut sense, origin } in planned {
        if sense.kind() == SenseKind::Prototype {
            sense.label.parent = None;
            sense.conduit = false;
            sense.judgements.clear();
        } else if sense.kind() == SenseKind::Metaphor {
            if let Some(o) = origin {
                origins.insert(sense.id(), o);
            }
        }
        senses.push(sense);
    }

    // metaphor children of each parent, grouped by the feature list they judged
    let mut judged: BTreeMap<SenseIndex, BTreeMap<SenseIndex, Vec<SenseIndex>>> = BTreeMap::new();
    for s in &senses {
        if let (SenseKind::Metaphor, Some(p)) = (s.kind(), s.parent()) {
            let origin = origins.get(&s.id()).copied().unwrap_or(p);
            judged
                .entry(p)
                .or_default()
                .entry(origin)
                .or_default()
                .push(s.id());
        }
    }

    let pos: HashMap<SenseIndex, usize> =
        senses.iter().enumerate().map(|(i, s)| (s.id(), i)).collect();
    for i in 0..senses.len() {
        let id = senses[i].id();
        let Some(groups) = judged.get(&id) else {
            senses[i].features.clear();
            continue;
        };
        let features_of = |o: &SenseIndex| -> Vec<Feature> {
            source.get(o).map(|s| s.features.clone()).unwrap_or_default()
        };
        if groups.len() == 1 {
            let origin = groups.keys().next().expect("one group");
            senses[i].features = features_of(origin);
            continue;
        }

        // several feature lists meet here: concatenate and renumber
        let mut merged = Vec::new();
        let mut renumber: BTreeMap<(SenseIndex, u32), u32> = BTreeMap::new();
        for origin in groups.keys() {
            for f in features_of(origin) {
                let new_id = merged.len() as u32 + 1;
                renumber.insert((*origin, f.id), new_id);
                merged.push(Feature {
                    id: new_id,
                    text: f.text,
                });
            }
        }
        let mut filled = Vec::new();
        for (origin, children) in groups {
            for child in children {
                let c = &mut senses[pos[child]];
                let mut js: Vec<FeatureJudgement> = c
                    .judgements
                    .iter()
                    .filter_map(|j| {
                        renumber.get(&(*origin, j.feature_id)).map(|n| FeatureJudgement {
                            feature_id: *n,
                            ..j.clone()
                        })
                    })
                    .collect();
                let have: BTreeSet<u32> = js.iter().map(|j| j.feature_id).collect();
                for f in &merged {
                    if !have.contains(&f.id) {
                        js.push(FeatureJudgement::lost(f.id));
                        filled.push((*child, f.id));
                    }
                }
                js.sort_by_key(|j| j.feature_id);
                c.judgements = js;
            }
        }
        senses[i].features = merged;
        warnings.push(Warning::FeaturesMerged { sense: id, filled });
    }

    // attachment legality after re-parenting
    let mut needs_conduit = BTreeSet::new();
    for s in &senses {
        let Some(p) = s.parent().and_then(|p| pos.get(&p)).map(|&p| &senses[p]) else {
            continue;
        };
        if p.conduit || p.kind() == SenseKind::Prototype {
            continue;
        }
        let illegal = match s.kind() {
            SenseKind::Metonymy => true,
            SenseKind::Metaphor => p.kind() == SenseKind::Metaphor,
            SenseKind::Prototype => false,
        };
        if illegal {
            needs_conduit.insert(p.id());
        }
    }
    for id in needs_conduit {
        senses[pos[&id]].conduit = true;
        warnings.push(Warning::ConduitAdded { sense: id });
    }

    Preprocessed {
        annotation: WordAnnotation {
            word: original.word.clone(),
            annotator: original.annotator.clone(),
            word_known: original.word_known,
            senses,
        },
        warnings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{FeatureJudgement, SenseLabel};

    fn ix(s: &str) -> SenseIndex {
        s.parse().unwrap()
    }

    fn shape(a: &WordAnnotation) -> Vec<(String, SenseKind, Option<String>)> {
        let mut v: Vec<_> = a
            .senses
            .iter()
            .map(|s| {
                (
                    s.id().to_string(),
                    s.kind(),
                    s.parent().map(|p| p.to_string()),
                )
            })
            .collect();
        v.sort();
        v
    }

    #[test]
    fn birth_split_merges_into_one_prototype() {
        let out = merge_split(&fixtures::birth_split());
        assert!(out.annotation.validate().is_valid(), "{:?}", out.annotation.validate());
        assert_eq!(
            shape(&out.annotation),
            vec![
                ("1".into(), SenseKind::Prototype, None),
                ("2".into(), SenseKind::Metonymy, Some("1".into())),
                ("3".into(), SenseKind::Metonymy, Some("1".into())),
            ]
        );
        let one = out.annotation.sense(ix("1")).unwrap();
        assert!(one.features.is_empty());
        assert_eq!(one.sense.definition, "the time when a child is born");
    }

    #[test]
    fn no_splits_is_identity() {
        let a = fixtures::neck();
        let out = merge_split(&a);
        assert_eq!(out.annotation, a);
        assert!(out.warnings.is_empty());
    }

    #[test]
    fn metonymic_half_keeps_its_attachment() {
        // 1A metonymy of 2, 1B metaphor of 1A, 3 metonymy of conduit 1B
        let mut a = fixtures::word(
            "x",
            &[
                ("1A", SenseLabel::metonymy(ix("2"))),
                ("1B", SenseLabel::metaphor(ix("1A"))),
                ("2", SenseLabel::prototype()),
                ("3", SenseLabel::metonymy(ix("1B"))),
            ],
        );
        a.sense_mut(ix("2")).unwrap().sense.definition = "two".into();
        a.sense_mut(ix("1A")).unwrap().conduit = true;
        a.sense_mut(ix("1A")).unwrap().features = vec![Feature {
            id: 1,
            text: "is a thing".into(),
        }];
        let b = a.sense_mut(ix("1B")).unwrap();
        b.conduit = true;
        b.judgements = vec![FeatureJudgement::modified(1, "is an idea")];
        assert!(a.validate().is_valid(), "{:?}", a.validate());

        let out = merge_split(&a);
        assert!(out.annotation.validate().is_valid(), "{:?}", out.annotation.validate());
        assert_eq!(
            shape(&out.annotation),
            vec![
                ("1".into(), SenseKind::Metonymy, Some("2".into())),
                ("2".into(), SenseKind::Prototype, None),
                ("3".into(), SenseKind::Metonymy, Some("1".into())),
            ]
        );
    }

    #[test]
    fn both_metaphorical_halves_keep_a_with_warning() {
        let mut a = fixtures::word(
            "x",
            &[
                ("1", SenseLabel::prototype()),
                ("2A", SenseLabel::metaphor(ix("1"))),
                ("2B", SenseLabel::metaphor(ix("1"))),
            ],
        );
        a.senses[0].features = vec![Feature {
            id: 1,
            text: "is flat".into(),
        }];
        a.senses[1].judgements = vec![FeatureJudgement::modified(1, "is thin")];
        a.senses[2].judgements = vec![FeatureJudgement::modified(1, "is wide")];
        let out = merge_split(&a);
        assert_eq!(out.warnings, vec![Warning::BothHalvesMetaphor { sense: 2 }]);
        let two = out.annotation.sense(ix("2")).unwrap();
        assert_eq!(two.judgements[0].modified_text.as_deref(), Some("is thin"));
        assert!(out.annotation.validate().is_valid());
    }

    #[test]
    fn twin_virtual_is_bridged() {
        let out = strip_virtual(&fixtures::twin_virtual());
        assert!(out.annotation.validate().is_valid(), "{:?}", out.annotation.validate());
        assert_eq!(
            shape(&out.annotation),
            vec![
                ("1".into(), SenseKind::Prototype, None),
                ("2".into(), SenseKind::Metonymy, Some("1".into())),
            ]
        );
    }

    #[test]
    fn no_virtuals_is_identity() {
        let a = fixtures::march();
        assert_eq!(strip_virtual(&a).annotation, a);
    }

    #[test]
    fn virtual_with_two_children() {
        // 1 -> V1 (metonymy, conduit) -> {2 metonymy, 3 metaphor}
        let mut a = fixtures::word(
            "x",
            &[
                ("1", SenseLabel::prototype()),
                ("2", SenseLabel::metonymy(ix("V1"))),
                ("3", SenseLabel::metaphor(ix("V1"))),
                ("V1", SenseLabel::metonymy(ix("1"))),
            ],
        );
        let v = a.sense_mut(ix("V1")).unwrap();
        v.conduit = true;
        v.features = vec![
            Feature {
                id: 1,
                text: "is a sign".into(),
            },
            Feature {
                id: 2,
                text: "is in the sky".into(),
            },
        ];
        a.sense_mut(ix("3")).unwrap().judgements =
            vec![FeatureJudgement::kept(1), FeatureJudgement::lost(2)];
        assert!(a.validate().is_valid(), "{:?}", a.validate());

        let out = strip_virtual(&a);
        assert!(out.annotation.validate().is_valid(), "{:?}", out.annotation.validate());
        assert_eq!(
            shape(&out.annotation),
            vec![
                ("1".into(), SenseKind::Prototype, None),
                ("2".into(), SenseKind::Metonymy, Some("1".into())),
                ("3".into(), SenseKind::Metaphor, Some("1".into())),
            ]
        );
        // the metaphor's judgements still match the features now on sense 1
        assert_eq!(out.annotation.sense(ix("1")).unwrap().features.len(), 2);
    }

    #[test]
    fn virtual_prototype_promotes_children() {
        let a = fixtures::word(
            "x",
            &[
                ("1", SenseLabel::metonymy(ix("V1"))),
                ("2", SenseLabel::metonymy(ix("V1"))),
                ("V1", SenseLabel::prototype()),
            ],
        );
        let out = strip_virtual(&a);
        assert!(out.annotation.validate().is_valid());
        assert_eq!(out.annotation.prototypes().count(), 2);
        assert_eq!(
            out.warnings,
            vec![Warning::VirtualPrototypeRemoved {
                sense: ix("V1"),
                promoted: vec![ix("1"), ix("2")]
            }]
        );
    }

    #[test]
    fn conduit_added_when_reparenting_breaks_attachment() {
        // 1 proto; 2 metonymy of 1; V1 metaphor of 2 (conduit); 3 metonymy of V1
        let mut a = fixtures::word(
            "x",
            &[
                ("1", SenseLabel::prototype()),
                ("2", SenseLabel::metonymy(ix("1"))),
                ("3", SenseLabel::metonymy(ix("V1"))),
                ("V1", SenseLabel::metaphor(ix("2"))),
            ],
        );
        a.sense_mut(ix("2")).unwrap().features = vec![Feature {
            id: 1,
            text: "moves".into(),
        }];
        let v = a.sense_mut(ix("V1")).unwrap();
        v.conduit = true;
        v.judgements = vec![FeatureJudgement::modified(1, "moves slowly")];
        assert!(a.validate().is_valid(), "{:?}", a.validate());
        let out = strip_virtual(&a);
        assert!(out.annotation.validate().is_valid(), "{:?}", out.annotation.validate());
        assert!(out.warnings.contains(&Warning::ConduitAdded { sense: ix("2") }));
    }
}
